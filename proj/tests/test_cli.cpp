#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "support/systems.hpp"
#include "tfl/cli/app.hpp"
#include "tfl/error.hpp"

using namespace tfl;
using namespace tfl::cli;

namespace {

const std::string kDir = TFL_FIXTURE_DIR;

std::string fixture(const std::string& name) { return kDir + "/" + name; }

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

struct Run {
    int code;
    std::string out, err;
};

Run run_cli(std::vector<std::string> args) {
    args.insert(args.begin(), "tfl");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

const char* kBase = R"(system:
  states: [x1, x2]
  inputs: [u]
  f: [x2, 0]
  g:
    - [0, 1]
target:
  N: [x2]
  x0: [0, 0]
  u_star: [0]
)";

std::string with_line(std::string text, const std::string& from, const std::string& to) {
    auto pos = text.find(from);
    REQUIRE(pos != std::string::npos);
    return text.replace(pos, from.size(), to);
}

} // namespace

TEST_CASE("loading the bundled problems") {
    auto p = load_problem(fixture("paper-sec5.tfl"));
    auto ref = test::sec5_system();
    CHECK(p.name == "paper-sec5");
    CHECK(p.sys.f == ref.f);
    CHECK(p.sys.g == ref.g);
    CHECK(p.sys.N_defs == ref.N_defs);
    CHECK(p.sys.x0 == ref.x0);
    CHECK(p.sys.u_star == ref.u_star);
    CHECK(p.options.hints.size() == 2);
    CHECK(p.options.hints.at(1).size() == 5);
    CHECK(p.options.conditions.samples == 8);

    auto d = load_problem(fixture("double-integrator.tfl"));
    CHECK(d.sys.f == test::double_integrator().f);
    CHECK(load_problem(fixture("brunovsky-chain.tfl")).sys.N_defs == test::brunovsky(3).N_defs);
    CHECK(load_problem(fixture("paper-sec5-nohints.tfl")).options.hints.empty());
    CHECK_THROWS_AS(load_problem(fixture("missing.tfl")), InvalidProblem);
}

TEST_CASE("problem file diagnostics") {
    CHECK_NOTHROW(parse_problem(kBase));
    CHECK_THROWS_AS(parse_problem(with_line(kBase, "    - [0, 1]", "    - [0, 1, 0]")), DimensionMismatch);
    CHECK_THROWS_AS(parse_problem(with_line(kBase, "  f: [x2, 0]", "  f: [x2]")), DimensionMismatch);
    CHECK_THROWS_AS(parse_problem(with_line(kBase, "  x0: [0, 0]", "  x0: [0]")), DimensionMismatch);
    CHECK_THROWS_AS(parse_problem(with_line(kBase, "  u_star: [0]", "  u_star: [0, 0]")), DimensionMismatch);
    CHECK_THROWS_AS(parse_problem(with_line(kBase, "  x0: [0, 0]", "  x0: [0, 1]")), InvalidProblem);
    CHECK_THROWS_AS(parse_problem(with_line(kBase, "  f: [x2, 0]", "  f: [x2, x1]")), InvarianceViolation);

    try {
        parse_problem(with_line(kBase, "  f: [x2, 0]", "  f: [x2, x1 +* 3]"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 4);
        CHECK(e.column() == 15);
    }
    try {
        parse_problem(with_line(kBase, "  N: [x2]", "  N: [x2 + y]"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 8);
        CHECK(e.column() == 12);
        CHECK(std::string(e.what()).find("'y'") != std::string::npos);
    }
    try {
        parse_problem(with_line(kBase, "  N: [x2]", "  N: [\"x2 +\"]"));
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 8);
        CHECK(e.column() == 12);
    }
    CHECK_THROWS_AS(parse_problem(with_line(kBase, "  inputs: [u]", "  inputs: [u")), ParseError);
    CHECK_THROWS_AS(parse_problem(with_line(kBase, "  u_star: [0]", "  u_star: [0]\n  extra: 1")), ParseError);
    CHECK_THROWS_AS(parse_problem(with_line(kBase, "  x0: [0, 0]", "  x0: [0, x1]")), ParseError);
    CHECK_THROWS_AS(parse_problem(""), ParseError);
    CHECK_THROWS_AS(parse_problem(with_line(kBase, "  states: [x1, x2]", "  states: [x1, x1]")), ParseError);

    auto h = parse_problem(std::string(kBase) + "hints:\n  0: [x2]\noptions:\n  seed: 9\n  ansatz_degree: 3\n");
    CHECK(h.options.hints.at(0).size() == 1);
    CHECK(h.options.conditions.seed == 9);
    CHECK(h.options.adapt.degree == 3);
    CHECK_THROWS_AS(parse_problem(std::string(kBase) + "options:\n  samples: 0\n"), ParseError);

    auto par = parse_problem(std::string(kBase).replace(std::string(kBase).find("  u_star"), 0, "  parametrization: {x2: 0}\n"));
    CHECK(par.sys.parametrization);
}

TEST_CASE("check command") {
    auto r = run_cli({"check", fixture("paper-sec5.tfl"), "--json", "-", "--quiet"});
    CHECK(r.code == kOk);
    auto j = Json::parse(r.out);
    CHECK(j["schema"] == kSchema);
    CHECK(j["status"] == "ok");
    const auto& a = j["analysis"];
    CHECK(a["conditions"]["con"] == true);
    CHECK(a["conditions"]["inv"] == true);
    CHECK(a["conditions"]["dim"] == true);
    CHECK(a["indices"]["rho"] == Json::parse("[2,2,1,0]"));
    CHECK(a["indices"]["kappa"] == Json::parse("[3,2]"));
    CHECK_FALSE(j.contains("solution"));

    auto u = run_cli({"check", fixture("uncontrollable-lti.tfl"), "--json", "-", "--quiet"});
    CHECK(u.code == kConditions);
    CHECK(Json::parse(u.out)["analysis"]["conditions"]["con"] == false);

    // A rejected hint only matters to the construction.
    std::string bad = with_line(read_file(fixture("paper-sec5.tfl")), "  2: [x5 + x7]", "  2: [x1]");
    const std::string path = "cli_bad_hint.tfl";
    std::ofstream(path) << bad;
    CHECK(run_cli({"check", path, "--quiet"}).code == kOk);
    auto s = run_cli({"solve", path, "--json", "-", "--quiet"});
    CHECK(s.code == kIntegration);
    auto sj = Json::parse(s.out);
    CHECK(sj["status"] == "integration-failed");
    CHECK(sj["error"].get<std::string>().find("k = 3") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("solve command") {
    for (const char* name : {"paper-sec5", "paper-sec5-nohints", "double-integrator", "brunovsky-chain"}) {
        CAPTURE(name);
        auto r = run_cli({"solve", fixture(std::string(name) + ".tfl"), "--json", "-", "--quiet"});
        CHECK(r.code == kOk);
        CHECK(r.out == read_file(fixture(std::string("expected/") + name + ".solve.json")));
        auto c = run_cli({"check", fixture(std::string(name) + ".tfl"), "--json", "-", "--quiet"});
        CHECK(c.out == read_file(fixture(std::string("expected/") + name + ".check.json")));
    }
    auto r = run_cli({"solve", fixture("paper-sec5.tfl"), "--json", "-", "--quiet"});
    auto j = Json::parse(r.out);
    CHECK(j["solution"]["output"]["h"].size() == 2);
    CHECK(j["solution"]["output"]["kappa"] == Json::parse("[3,2]"));
    CHECK(j["solution"]["certificate"]["all"] == true);
    CHECK(Json::parse(j.dump()) == j);
    CHECK_FALSE(j.contains("timings"));

    auto text = run_cli({"solve", fixture("brunovsky-chain.tfl")});
    CHECK(text.out.find("h = (x1)") != std::string::npos);
    CHECK(text.out.find("certificate verified") != std::string::npos);

    auto t = run_cli({"solve", fixture("double-integrator.tfl"), "--json", "-", "--quiet", "--timings"});
    CHECK(Json::parse(t.out).contains("timings"));

    CHECK(run_cli({"solve", fixture("paper-sec5.tfl"), "--ansatz-degree", "1", "--quiet"}).code == kAdaptation);
    CHECK(run_cli({"solve", fixture("uncontrollable-lti.tfl"), "--quiet"}).code == kConditions);
}

TEST_CASE("report files and flags") {
    const std::string a = "cli_report_a.json", b = "cli_report_b.json";
    CHECK(run_cli({"solve", fixture("paper-sec5.tfl"), "--json", a, "--quiet", "--seed", "4", "--samples", "5"}).code == kOk);
    CHECK(run_cli({"solve", fixture("paper-sec5.tfl"), "--json", b, "--quiet", "--seed", "4", "--samples", "5"}).code == kOk);
    const std::string ra = read_file(a);
    CHECK(ra == read_file(b));
    auto j = Json::parse(ra);
    CHECK(j["options"]["seed"] == 4);
    CHECK(j["analysis"]["conditions"]["samples"] == 5);
    std::remove(a.c_str());
    std::remove(b.c_str());

    CHECK(run_cli({}).code == kUsage);
    CHECK(run_cli({"solve"}).code == kUsage);
    CHECK(run_cli({"solve", fixture("paper-sec5.tfl"), "--samples", "0"}).code == kUsage);
    CHECK(run_cli({"frobnicate"}).code == kUsage);
    CHECK(run_cli({"check", "--help"}).code == kOk);
    auto missing = run_cli({"check", fixture("missing.tfl"), "--json", "-", "--quiet"});
    CHECK(missing.code == kUsage);
    CHECK(Json::parse(missing.out)["status"] == "invalid-problem");
}

TEST_CASE("exit code classification") {
    CHECK(classify(ConditionsFailed("x")) == Status::ConditionsFailed);
    CHECK(classify(RegularityViolation("x")) == Status::ConditionsFailed);
    CHECK(classify(IntegrationFailed("x")) == Status::IntegrationFailed);
    CHECK(classify(HintRejected("x")) == Status::IntegrationFailed);
    CHECK(classify(AdaptationFailed("x")) == Status::AdaptationFailed);
    CHECK(classify(InconclusiveZeroTest("x")) == Status::AdaptationFailed);
    CHECK(classify(ParseError(1, 1, "x")) == Status::InvalidProblem);
    CHECK(classify(CertificateMismatch("x")) == Status::InternalError);
    CHECK(classify(SubsumptionFailed("x")) == Status::InternalError);
    CHECK(classify(std::runtime_error("x")) == Status::InternalError);
    std::set<int> codes;
    for (auto s : {Status::Ok, Status::ConditionsFailed, Status::IntegrationFailed, Status::AdaptationFailed,
                   Status::InvalidProblem, Status::InternalError})
        codes.insert(exit_code(s));
    CHECK(codes.size() == 6);
}
