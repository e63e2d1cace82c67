#include "tfl/cli/app.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <optional>

#include "tfl/error.hpp"

namespace tfl::cli {

namespace {

struct Args {
    std::string file, json;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::optional<unsigned> degree;
    bool quiet = false, timings = false;
};

void add_common(CLI::App* sub, Args& a) {
    sub->add_option("file", a.file, "problem file")->required();
    sub->add_option("--seed", a.seed, "sampling seed");
    sub->add_option("--samples", a.samples, "sample count for (Inv) and (Dim)")->check(CLI::PositiveNumber);
    sub->add_option("--json", a.json, "write the structured report to this path ('-' for stdout)");
    sub->add_flag("--quiet", a.quiet, "suppress the text summary");
    sub->add_flag("--timings", a.timings, "include wall-clock timings in the structured report");
}

double ms_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

} // namespace

Status classify(const std::exception& e) {
    if (dynamic_cast<const ConditionsFailed*>(&e) || dynamic_cast<const RegularityViolation*>(&e) ||
        dynamic_cast<const NotRegularAt*>(&e) || dynamic_cast<const NoTermination*>(&e))
        return Status::ConditionsFailed;
    if (dynamic_cast<const IntegrationFailed*>(&e) || dynamic_cast<const HintRejected*>(&e))
        return Status::IntegrationFailed;
    if (dynamic_cast<const AdaptationFailed*>(&e) || dynamic_cast<const InconclusiveZeroTest*>(&e))
        return Status::AdaptationFailed;
    if (dynamic_cast<const ParseError*>(&e) || dynamic_cast<const DimensionMismatch*>(&e) ||
        dynamic_cast<const InvalidProblem*>(&e) || dynamic_cast<const RankDeficientN*>(&e) ||
        dynamic_cast<const InvarianceViolation*>(&e) || dynamic_cast<const SyntaxError*>(&e) ||
        dynamic_cast<const UnknownVariable*>(&e) || dynamic_cast<const DomainError*>(&e))
        return Status::InvalidProblem;
    return Status::InternalError;
}

int exit_code(Status s) {
    switch (s) {
    case Status::Ok: return kOk;
    case Status::ConditionsFailed: return kConditions;
    case Status::IntegrationFailed: return kIntegration;
    case Status::AdaptationFailed: return kAdaptation;
    case Status::InvalidProblem: return kUsage;
    case Status::InternalError: return kInternal;
    }
    return kInternal;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Transverse feedback linearization: condition check and output construction"};
    app.require_subcommand(1);
    Args a;
    auto* check = app.add_subcommand("check", "decide (Con), (Inv), (Dim) and report the indices");
    auto* solve = app.add_subcommand("solve", "run the full construction and certify the output");
    add_common(check, a);
    add_common(solve, a);
    solve->add_option("--ansatz-degree", a.degree, "degree of the adaptation ansatz")->check(CLI::PositiveNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }
    const std::string command = check->parsed() ? "check" : "solve";

    std::optional<Problem> problem;
    std::optional<algo::Analysis> analysis;
    std::optional<algo::TFLReport> solution;
    Status status = Status::Ok;
    std::string error;
    Json timings = Json::object();
    try {
        auto t0 = std::chrono::steady_clock::now();
        problem = load_problem(a.file);
        auto& o = problem->options;
        if (a.seed) o.conditions.seed = *a.seed;
        if (a.samples) o.conditions.samples = *a.samples;
        if (a.degree) o.adapt.degree = *a.degree;
        timings["load_ms"] = ms_since(t0);
        t0 = std::chrono::steady_clock::now();
        analysis = algo::analyze(problem->sys, o);
        timings["analyze_ms"] = ms_since(t0);
        if (command == "check") {
            if (!analysis->conditions.all()) status = Status::ConditionsFailed;
        } else {
            t0 = std::chrono::steady_clock::now();
            solution = algo::run_tfl(*analysis, o);
            timings["solve_ms"] = ms_since(t0);
        }
    } catch (const std::exception& e) {
        status = classify(e);
        error = e.what();
    }

    Json report = make_report(command, problem ? &*problem : nullptr, analysis ? &*analysis : nullptr,
                              solution ? &*solution : nullptr, status, error);
    if (a.timings) report["timings"] = timings;
    if (!a.json.empty()) {
        const std::string text = report.dump(2) + "\n";
        if (a.json == "-") {
            out << text;
        } else {
            std::ofstream f(a.json, std::ios::binary);
            f << text;
            if (!f) {
                err << "error: cannot write " << a.json << "\n";
                return kUsage;
            }
        }
    }
    if (!a.quiet) (status == Status::Ok ? out : err) << render_text(report);
    return exit_code(status);
}

} // namespace tfl::cli
