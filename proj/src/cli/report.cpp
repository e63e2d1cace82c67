#include "tfl/cli/report.hpp"

#include <sstream>

#include "tfl/num/dense.hpp"

namespace tfl::cli {

using sym::Expr;

namespace {

Json exprs(const std::vector<Expr>& v) {
    Json a = Json::array();
    for (const auto& e : v) a.push_back(sym::to_string(e));
    return a;
}

Json matrix(const Eigen::MatrixXd& m) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json r = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        a.push_back(std::move(r));
    }
    return a;
}

Json adapted(const integ::SmoothMapAdapted& F) {
    Json comps = Json::array();
    for (std::size_t i = 0; i < F.size(); ++i)
        comps.push_back({{"expr", sym::to_string(F.components[i])}, {"source", integ::to_string(F.provenance[i])}});
    return {{"components", comps}, {"vanish_count", F.vanish_count}};
}

Json problem_json(const Problem& p) {
    const auto& s = p.sys;
    Json g = Json::array();
    for (const auto& col : s.g) g.push_back(exprs(col));
    Json x0 = Json::array();
    for (const auto& q : s.x0) x0.push_back(q.get_str());
    Json hints = Json::object();
    for (const auto& [k, hs] : p.options.hints) hints[std::to_string(k)] = exprs(hs);
    return {{"name", p.name},
            {"n", s.n()},
            {"m", s.m()},
            {"f", exprs(s.f)},
            {"g", g},
            {"N", exprs(s.N_defs)},
            {"x0", x0},
            {"u_star", exprs(s.u_star)},
            {"hints", hints}};
}

Json options_json(const algo::Options& o) {
    return {{"seed", o.conditions.seed},
            {"samples", o.conditions.samples},
            {"radius", o.conditions.radius},
            {"ansatz_degree", o.adapt.degree}};
}

Json analysis_json(const algo::Analysis& a) {
    const auto& fd = a.fd;
    const auto& c = a.conditions;
    Json ranks = Json::array();
    for (const auto& I : fd.flag.ideals) ranks.push_back(num::rank(ext::pointwise_span(I, a.ls.p0)));
    Json closures = Json::array(), dims = Json::array();
    for (std::size_t k = 0; k < fd.levels(); ++k) {
        closures.push_back({{"k", k}, {"size", fd.closure[k].size()}, {"differential", static_cast<bool>(fd.differential[k])}});
        if (k < c.dim_detail.dims.size()) dims.push_back(c.dim_detail.dims[k].front());
    }
    return {{"n_star", a.ls.n_star},
            {"codim", a.ls.codim()},
            {"flag", {{"generator_counts", fd.flag.counts()}, {"ranks_at_p0", ranks}, {"closures", closures}}},
            {"conditions", {{"con", c.con}, {"inv", c.inv}, {"dim", c.dim}, {"all", c.all()}, {"samples", c.samples_used.size()}}},
            {"intersection_dims_at_p0", dims},
            {"indices",
             {{"rho", c.indices.listed()}, {"rho_full", c.indices.rho}, {"kappa", c.indices.kappa},
              {"advisory", c.indices_advisory}}}};
}

Json solution_json(const algo::TFLReport& r) {
    Json its = Json::array();
    for (const auto& it : r.iterations) {
        Json j = {{"k", it.k}, {"skipped", it.skipped}};
        if (!it.skipped) {
            j["mu"] = it.mu;
            j["integrated"] = adapted(it.integrated);
            j["adapted"] = adapted(it.adapted);
            j["harvested"] = exprs(it.harvested);
        }
        its.push_back(std::move(j));
    }
    Json z = Json::array();
    for (const auto& lvl : r.zflag) z.push_back({{"k", lvl.k}, {"kappa", lvl.kappa}, {"defs", exprs(lvl.defs)}});
    Json xi = Json::array(), beta = Json::array();
    for (const auto& t : r.nf.xi) xi.push_back(exprs(t));
    for (const auto& row : r.nf.beta) beta.push_back(exprs(row));
    const auto& c = r.certificate;
    return {{"iterations", its},
            {"output", {{"h", exprs(r.h)}, {"kappa", r.rd.kappa}, {"decoupling_at_x0", matrix(r.rd.decoupling)}}},
            {"certificate",
             {{"vanish_on_N", c.vanish_on_N}, {"relative_degree", c.relative_degree}, {"dual", c.dual},
              {"kappa_sum", c.kappa_sum}, {"nesting", c.nesting}, {"all", c.all()}}},
            {"zero_dynamics", z},
            {"normal_form",
             {{"xi", xi}, {"eta", exprs(r.nf.eta)}, {"alpha", exprs(r.nf.alpha)}, {"beta", beta},
              {"jacobian_condition", r.nf.jacobian_condition}}}};
}

std::string join(const Json& a) {
    std::string s;
    for (const auto& v : a) s += (s.empty() ? "" : ", ") + (v.is_string() ? v.get<std::string>() : v.dump());
    return "(" + s + ")";
}

} // namespace

const char* to_string(Status s) {
    switch (s) {
    case Status::Ok: return "ok";
    case Status::ConditionsFailed: return "conditions-failed";
    case Status::IntegrationFailed: return "integration-failed";
    case Status::AdaptationFailed: return "adaptation-failed";
    case Status::InvalidProblem: return "invalid-problem";
    case Status::InternalError: return "internal-error";
    }
    return "?";
}

Json make_report(const std::string& command, const Problem* problem, const algo::Analysis* analysis,
                 const algo::TFLReport* solution, Status status, const std::string& error) {
    Json r = {{"schema", kSchema}, {"command", command}, {"status", to_string(status)}};
    if (!error.empty()) r["error"] = error;
    if (problem) {
        r["problem"] = problem_json(*problem);
        r["options"] = options_json(problem->options);
    }
    if (analysis) r["analysis"] = analysis_json(*analysis);
    if (solution) r["solution"] = solution_json(*solution);
    std::vector<std::string> warnings;
    if (analysis) warnings = analysis->conditions.warnings;
    if (solution) warnings = solution->warnings;
    r["warnings"] = warnings;
    return r;
}

std::string render_text(const Json& r) {
    std::ostringstream o;
    o << r["command"].get<std::string>();
    if (r.contains("problem")) o << " " << r["problem"]["name"].get<std::string>();
    o << ": " << r["status"].get<std::string>() << "\n";
    if (r.contains("error")) o << "  error: " << r["error"].get<std::string>() << "\n";
    if (r.contains("analysis")) {
        const auto& a = r["analysis"];
        const auto& c = a["conditions"];
        o << "  derived flag counts " << join(a["flag"]["generator_counts"]) << "\n";
        o << "  (Con) " << (c["con"].get<bool>() ? "holds" : "fails") << ", (Inv) "
          << (c["inv"].get<bool>() ? "holds" : "fails") << ", (Dim) " << (c["dim"].get<bool>() ? "holds" : "fails")
          << " on " << c["samples"].get<std::size_t>() << " samples\n";
        o << "  rho " << join(a["indices"]["rho"]) << ", kappa " << join(a["indices"]["kappa"])
          << (a["indices"]["advisory"].get<bool>() ? " (advisory)" : "") << "\n";
    }
    if (r.contains("solution")) {
        const auto& s = r["solution"];
        o << "  transverse output h = " << join(s["output"]["h"]) << "\n";
        o << "  relative degree " << join(s["output"]["kappa"]) << ", certificate "
          << (s["certificate"]["all"].get<bool>() ? "verified" : "FAILED") << "\n";
        o << "  Z^(1) = " << join(s["zero_dynamics"].back()["defs"]) << "\n";
        o << "  eta = " << join(s["normal_form"]["eta"]) << "\n";
    }
    for (const auto& w : r["warnings"]) o << "  warning: " << w.get<std::string>() << "\n";
    return o.str();
}

} // namespace tfl::cli
