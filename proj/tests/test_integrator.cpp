#include <algorithm>

#include "doctest.h"
#include "support/systems.hpp"
#include "tfl/cond/conditions.hpp"
#include "tfl/error.hpp"
#include "tfl/integ/integrator.hpp"

using namespace tfl;
using namespace tfl::integ;

namespace {

struct Fixture {
    LiftedSystem ls;
    cond::FlagData fd;
    cond::IndexProfile ip;
    explicit Fixture(const lift::ControlSystem& sys)
        : ls(lift::lift_system(sys)), fd(cond::flag_data(ls)), ip(cond::rho_indices(ls, fd)) {}
    Expr P(const char* s) const { return sym::parse_expr(s, ls.vs); }
    std::size_t target(std::size_t k) const {
        std::size_t t = 1;
        for (std::size_t i = k; i < ip.rho.size(); ++i) t += ip.rho[i];
        return t;
    }
};

const Fixture& sec5() {
    static const Fixture f(test::sec5_system());
    return f;
}

const Fixture& chain3() {
    static const Fixture f(test::brunovsky(3));
    return f;
}

PfaffianIdeal ideal_of(const Fixture& fx, const std::vector<Expr>& fs) {
    ext::Matrix rows;
    for (const auto& e : fs) rows.push_back(ext::gradient(fx.ls.vs, e));
    return PfaffianIdeal::make(fx.ls.vs, rows, fx.ls.p0, ext::Provenance::Explicit);
}

bool contains(const std::vector<Expr>& v, const Expr& e) { return std::find(v.begin(), v.end(), e) != v.end(); }

std::vector<Expr> leading(const SmoothMapAdapted& F) {
    return {F.components.begin(), F.components.begin() + static_cast<std::ptrdiff_t>(F.vanish_count)};
}

} // namespace

TEST_CASE("antiderivatives and potentials") {
    const auto& fx = sec5();
    auto x1 = fx.ls.vs.x(0), x4 = fx.ls.vs.x(3);
    auto a = antiderivative(fx.P("3*x1^2 + x2"), x1);
    REQUIRE(a);
    CHECK(sym::is_zero(sym::diff(*a, x1) - fx.P("3*x1^2 + x2")) == sym::ZeroTest::Zero);
    auto b = antiderivative(fx.P("x4*exp(-x4)"), x4);
    REQUIRE(b);
    CHECK(sym::is_zero(sym::diff(*b, x4) - fx.P("x4*exp(-x4)")) == sym::ZeroTest::Zero);
    CHECK_FALSE(antiderivative(fx.P("sin(x1^2)"), x1));

    auto p = potential({fx.P("x1"), fx.P("x7")}, {x1, fx.ls.vs.x(1)});
    REQUIRE(p);
    CHECK(sym::is_zero(sym::diff(*p, fx.ls.vs.x(1)) - fx.P("x7")) == sym::ZeroTest::Zero);
    CHECK_FALSE(potential({fx.P("x2"), fx.P("0")}, {x1, fx.ls.vs.x(1)}));
}

TEST_CASE("integration of the worked example closures") {
    const auto& fx = sec5();
    auto F2 = frobenius_integrate(fx.fd.closure[2], {}, 2);
    CHECK(F2.components == std::vector<Expr>{fx.P("x5+x7"), fx.P("t")});
    CHECK(F2.provenance.back() == Source::Time);
    CHECK(characteristic(F2));

    auto F1 = frobenius_integrate(fx.fd.closure[1], {}, 1);
    CHECK(F1.size() == 6);
    CHECK(characteristic(F1));
    auto printed = ideal_of(fx, {fx.P("x5+x7"), fx.P("x5+x6"), fx.P("1/2*x1^2+x2*x7-2"), fx.P("x2"),
                                 fx.P("x3*exp(-x4)-4"), fx.P("t")});
    CHECK(ext::same_span(ideal_of(fx, F1.components), printed) == ext::Membership::Member);
    for (const auto& c : F1.components) CHECK(sym::eval_at(c, fx.ls.p0) == 0.0);
    CHECK(F1.components.back() == fx.P("t"));

    for (std::size_t k = 0; k < 4; ++k) CHECK(characteristic(frobenius_integrate(fx.fd.closure[k], {}, k)));
}

TEST_CASE("integration of a coordinate ideal") {
    const auto& fx = chain3();
    auto I = ideal_of(fx, {fx.P("x1"), fx.P("x2"), fx.P("t")});
    auto F = frobenius_integrate(I);
    CHECK(F.components == std::vector<Expr>{fx.P("x1"), fx.P("x2"), fx.P("t")});
}

TEST_CASE("hints") {
    const auto& fx = sec5();
    auto F = frobenius_integrate(fx.fd.closure[2], {fx.P("2*x5+2*x7")}, 2);
    CHECK(F.components.front() == fx.P("2*x5+2*x7"));
    CHECK(F.provenance.front() == Source::Hint);
    CHECK_THROWS_AS(frobenius_integrate(fx.fd.closure[2], {fx.P("x1")}, 2), HintRejected);
    CHECK_THROWS_AS(frobenius_integrate(fx.fd.closure[2], {fx.P("x5+x7"), fx.P("3*x5+3*x7")}, 2), HintRejected);
}

TEST_CASE("integration failure reports the residual rows") {
    auto vs = sym::VariableSpace::standard(1, 2);
    sym::Point p0(vs, std::vector<mpq_class>{0, 0, 1, 0});
    ext::Row r(vs.dim());
    r[vs.x_index(0)] = Expr(1);
    r[vs.x_index(1)] = sym::parse_expr("sin(x1)*x1 + 1", vs);
    auto I = PfaffianIdeal::make(vs, {r}, p0, ext::Provenance::Explicit);
    try {
        frobenius_integrate(I, {}, 0);
        FAIL("expected IntegrationFailed");
    } catch (const IntegrationFailed& e) {
        CHECK(std::string(e.what()).find("sin(x1)") != std::string::npos);
    }
}

TEST_CASE("adaptation to L") {
    const auto& fx = sec5();
    auto F1 = frobenius_integrate(fx.fd.closure[1], {}, 1);
    auto A = adapt_to_L(F1, fx.ls, fx.target(1));
    CHECK(A.vanish_count == 4);
    CHECK(characteristic(A));
    CHECK(ext::same_span(ideal_of(fx, A.components), ideal_of(fx, F1.components)) == ext::Membership::Member);
    auto lead = leading(A);
    Expr combo = fx.P("x1^2+x2^2+2*x2*x7-x3*exp(-x4)");
    CHECK((contains(lead, combo) || contains(lead, -combo)));
    CHECK(contains(lead, fx.P("x5+x7")));
    CHECK(contains(lead, fx.P("t")));
    for (const auto& c : lead) CHECK(lift::vanishes_on_L(fx.ls, c) == sym::ZeroTest::Zero);
    for (std::size_t i = A.vanish_count; i < A.size(); ++i)
        CHECK(lift::vanishes_on_L(fx.ls, A.components[i]) == sym::ZeroTest::NonZero);
    // x5 + x6 lies in the span of the vanishing block.
    auto block = ideal_of(fx, lead);
    CHECK(ext::ideal_membership(ext::gradient(fx.ls.vs, fx.P("x5+x6")), block) == ext::Membership::Member);

    auto F2 = frobenius_integrate(fx.fd.closure[2], {}, 2);
    auto A2 = adapt_to_L(F2, fx.ls, fx.target(2));
    CHECK(A2.components == F2.components);
    CHECK(A2.vanish_count == 2);
    auto again = adapt_to_L(A, fx.ls, fx.target(1));
    CHECK(again.components == A.components);

    CHECK_THROWS_AS(adapt_to_L(F1, fx.ls, 3), AdaptationFailed);
}

TEST_CASE("subsumption") {
    const auto& fx = sec5();
    auto F1 = adapt_to_L(frobenius_integrate(fx.fd.closure[1], {}, 1), fx.ls, fx.target(1));
    auto F2 = adapt_to_L(frobenius_integrate(fx.fd.closure[2], {}, 2), fx.ls, fx.target(2));
    auto S = subsume(F1, F2);
    REQUIRE(S.size() == F1.size());
    CHECK(S.components[0] == fx.P("x5+x7"));
    CHECK(S.components[1] == fx.P("t"));
    CHECK(characteristic(S));
    auto same = subsume(F1, F1);
    CHECK(same.components == F1.components);
    CHECK_THROWS_AS(subsume(F2, F1), SubsumptionFailed);

    const auto& ch = chain3();
    auto F0 = frobenius_integrate(ideal_of(ch, {ch.P("x1"), ch.P("x2"), ch.P("x3"), ch.P("t")}));
    auto Fc = frobenius_integrate(ideal_of(ch, {ch.P("x1"), ch.P("x2"), ch.P("t")}));
    CHECK(subsume(F0, Fc).components == std::vector<Expr>{ch.P("x1"), ch.P("x2"), ch.P("t"), ch.P("x3")});
}

TEST_CASE("adaptation subordinate to a partial output") {
    const auto& fx = sec5();
    auto F1 = adapt_to_L(frobenius_integrate(fx.fd.closure[1], {}, 1), fx.ls, fx.target(1));
    auto S = adapt_subordinate(F1, {fx.P("x5+x7")}, {3}, fx.ls, 1);
    REQUIRE(S.size() >= 2);
    CHECK(S.components[0] == fx.P("x5+x7"));
    CHECK(S.components[1] == fx.P("x5+x6"));
    CHECK(S.provenance[0] == Source::LieDerivative);
    CHECK(characteristic(S));
    CHECK(adapt_subordinate(F1, {}, {}, fx.ls, 1).components == F1.components);

    const auto& ch = chain3();
    auto F0 = frobenius_integrate(ch.fd.closure[0], {}, 0);
    auto C = adapt_subordinate(F0, {ch.P("x1")}, {3}, ch.ls, 1);
    CHECK(C.components[0] == ch.P("x1"));
    CHECK(C.components[1] == ch.P("x2"));

    CHECK_THROWS_AS(adapt_subordinate(F1, {fx.P("x1")}, {3}, fx.ls, 1), AdaptationFailed);
}

TEST_CASE("property: rank of F_k on L at random points of L") {
    const auto& fx = sec5();
    int cases = 0;
    for (std::size_t k = 0; k < 4; ++k) {
        auto F = frobenius_integrate(fx.fd.closure[k], {}, k);
        const std::size_t expect = F.size() - fx.target(k);
        CHECK(rank_on_L(F, fx.ls, fx.ls.p0) == expect);
        for (const auto& p : cond::sample_on_L(fx.ls, 50, 0.3, 100 + k)) {
            CHECK(rank_on_L(F, fx.ls, p) == expect);
            ++cases;
        }
    }
    CHECK(cases == 200);
}
