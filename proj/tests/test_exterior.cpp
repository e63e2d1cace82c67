#include <cmath>
#include <random>

#include "doctest.h"
#include "support/random_expr.hpp"
#include "support/random_system.hpp"
#include "support/sec5.hpp"
#include "tfl/error.hpp"
#include "tfl/ext/ideal.hpp"
#include "tfl/num/dense.hpp"

using namespace tfl;
using namespace tfl::ext;
using sym::Expr;
using sym::ZeroTest;

namespace {

bool all_zero(const KForm& a) {
    for (const auto& [idx, c] : a.terms())
        if (sym::is_zero(c) != ZeroTest::Zero) return false;
    return true;
}

bool all_zero(const VectorField& X) {
    for (const auto& c : X.components())
        if (sym::is_zero(c) != ZeroTest::Zero) return false;
    return true;
}

KForm random_form(test::RandomExpr& gen, const sym::VariableSpace& vs, unsigned degree) {
    KForm a(vs, degree);
    for (int k = 0; k < 3; ++k) {
        Index idx;
        for (unsigned d = 0; d < degree; ++d) idx.push_back(static_cast<std::uint16_t>(gen.pick(vs.dim())));
        a.add_unsorted(idx, gen.polynomial(3, 2));
    }
    return a;
}

VectorField random_field(test::RandomExpr& gen, const sym::VariableSpace& vs) {
    VectorField X(vs);
    for (std::size_t i = 0; i < vs.dim(); ++i)
        if (gen.pick(2)) X[i] = gen.polynomial(2, 2);
    return X;
}

Eigen::MatrixXd numeric_rows(const Matrix& m, const sym::Point& p) {
    auto v = evaluate(m, p);
    Eigen::MatrixXd out(v.size(), p.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        for (std::size_t j = 0; j < p.size(); ++j) out(i, j) = v[i][j];
    return out;
}

bool same_pointwise_span(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return num::rank(a) == num::rank(b) && num::rank(a) == num::rank(num::stack(a, b));
}

} // namespace

TEST_CASE("wedge is graded-commutative") {
    test::Sec5 s;
    KForm dx1 = KForm::differential(s.vs, s.vs.x_index(0));
    KForm dx2 = KForm::differential(s.vs, s.vs.x_index(1));
    CHECK(wedge(dx1, dx1).is_zero());
    CHECK(wedge(dx1, dx2) == wedge(dx2, dx1) * Expr(-1));

    // dt ∧ d(L_f h) for h = x1·x2 on ẋ1 = x2, ẋ2 = 0: L_f h = x2², so the product is 2·x2 dt∧dx2.
    auto vs = sym::VariableSpace::standard(1, 2);
    VectorField f(vs);
    f[vs.x_index(0)] = Expr::symbol(vs.x(1));
    Expr h = Expr::symbol(vs.x(0)) * Expr::symbol(vs.x(1));
    KForm dLh = exterior_derivative(KForm::function(vs, lie_derivative(f, h)));
    KForm w = wedge(KForm::differential(vs, 0), dLh);
    CHECK(w.terms().size() == 1);
    CHECK(w.coefficient({0, static_cast<std::uint16_t>(vs.x_index(1))}) == Expr(2) * Expr::symbol(vs.x(1)));

    KForm top(vs, vs.dim());
    top.add({0, 1, 2, 3}, Expr(1));
    CHECK_THROWS_AS(wedge(top, KForm::differential(vs, 0)), DegreeOverflow);

    std::mt19937_64 rng(11);
    auto small = sym::VariableSpace::standard(1, 3);
    test::RandomExpr gen(small, rng, false);
    for (int k = 0; k < 200; ++k) {
        unsigned da = 1 + static_cast<unsigned>(gen.pick(2)), db = 1 + static_cast<unsigned>(gen.pick(2));
        KForm a = random_form(gen, small, da), b = random_form(gen, small, db);
        Expr sign = (da * db) % 2 ? Expr(-1) : Expr(1);
        CHECK(wedge(a, b) == wedge(b, a) * sign);
    }
}

TEST_CASE("exterior derivative examples") {
    test::Sec5 s;
    KForm a(s.vs, 1);
    a.add({static_cast<std::uint16_t>(s.vs.x_index(1))}, s.P("x1"));
    KForm expect(s.vs, 2);
    expect.add_unsorted({static_cast<std::uint16_t>(s.vs.x_index(0)), static_cast<std::uint16_t>(s.vs.x_index(1))}, Expr(1));
    CHECK(exterior_derivative(a) == expect);

    // dω³ = −(x4+u1) dx3∧dt − x3 dx4∧dt − x3 du1∧dt
    KForm d3 = exterior_derivative(KForm::one_form(s.vs, s.omega(2)));
    KForm want(s.vs, 2);
    auto ix = [&](const char* v) { return static_cast<std::uint16_t>(*s.vs.index_of(*s.vs.lookup(v))); };
    want.add_unsorted({ix("x3"), 0}, -s.P("x4+u1"));
    want.add_unsorted({ix("x4"), 0}, -s.P("x3"));
    want.add_unsorted({ix("u1"), 0}, -s.P("x3"));
    CHECK(d3 == want);
}

TEST_CASE("property: d∘d = 0") {
    std::mt19937_64 rng(21);
    auto vs = sym::VariableSpace::standard(1, 3);
    test::RandomExpr gen(vs, rng, false);
    for (int k = 0; k < 200; ++k) {
        unsigned deg = static_cast<unsigned>(gen.pick(3));
        KForm a = deg == 0 ? KForm::function(vs, gen.expr(3)) : random_form(gen, vs, deg);
        CHECK(all_zero(exterior_derivative(exterior_derivative(a))));
    }
}

TEST_CASE("property: Leibniz rule for d over wedge") {
    std::mt19937_64 rng(23);
    auto vs = sym::VariableSpace::standard(1, 3);
    test::RandomExpr gen(vs, rng, false);
    for (int k = 0; k < 200; ++k) {
        KForm a = random_form(gen, vs, 1), b = random_form(gen, vs, 1);
        KForm lhs = exterior_derivative(wedge(a, b));
        KForm rhs = wedge(exterior_derivative(a), b) - wedge(a, exterior_derivative(b));
        CHECK(all_zero(lhs - rhs));
    }
}

TEST_CASE("contraction examples and graded Leibniz rule") {
    test::Sec5 s;
    const auto x1 = s.vs.x_index(0);
    KForm dx1 = KForm::differential(s.vs, x1);
    CHECK(contract(VectorField::coordinate(s.vs, x1), dx1).as_function() == Expr(1));
    KForm dtdx1 = wedge(KForm::differential(s.vs, 0), dx1);
    CHECK(contract(VectorField::coordinate(s.vs, 0), dtdx1) == dx1);
    VectorField Y = s.trajectory();
    for (std::size_t i = 0; i < 7; ++i) CHECK(contract(Y, KForm::one_form(s.vs, s.omega(i))).is_zero());

    std::mt19937_64 rng(29);
    auto vs = sym::VariableSpace::standard(1, 3);
    test::RandomExpr gen(vs, rng, false);
    for (int k = 0; k < 200; ++k) {
        VectorField X = random_field(gen, vs);
        KForm a = random_form(gen, vs, 1), b = random_form(gen, vs, 2);
        // ι_X(a∧b) = (ι_X a) b − a ∧ ι_X b for a one-form a.
        KForm lhs = contract(X, wedge(a, b));
        KForm rhs = b * contract(X, a).as_function() - wedge(a, contract(X, b));
        CHECK(all_zero(lhs - rhs));
    }
}

TEST_CASE("Lie derivative examples") {
    test::Sec5 s;
    VectorField f = s.drift();
    Expr h = s.P("x5+x7");
    Expr l1 = lie_derivative(f, h);
    CHECK(l1 == s.P("x5+x6"));
    CHECK(lie_derivative(f, l1) == s.P("-x3*x5 + 2*x6 + x7"));
    CHECK(lie_derivative(f, Expr(1)).is_zero());
    CHECK(lie_derivative(f, KForm::function(s.vs, h)).as_function() == l1);
}

TEST_CASE("property: Cartan formula") {
    std::mt19937_64 rng(31);
    auto vs = sym::VariableSpace::standard(1, 3);
    test::RandomExpr gen(vs, rng, false);
    for (int k = 0; k < 200; ++k) {
        VectorField X = random_field(gen, vs);
        unsigned deg = 1 + static_cast<unsigned>(gen.pick(2));
        KForm a = random_form(gen, vs, deg);
        KForm cartan = contract(X, exterior_derivative(a)) + exterior_derivative(contract(X, a));
        CHECK(all_zero(lie_derivative(X, a) - cartan));
    }
}

TEST_CASE("Lie bracket examples") {
    test::Sec5 s;
    auto e1 = VectorField::coordinate(s.vs, s.vs.x_index(0));
    auto e2 = VectorField::coordinate(s.vs, s.vs.x_index(1));
    CHECK(lie_bracket(e1, e2).is_zero());

    auto vs = sym::VariableSpace::standard(1, 2);
    VectorField f(vs), g(vs);
    f[vs.x_index(0)] = Expr::symbol(vs.x(1));
    g[vs.x_index(1)] = Expr(1);
    VectorField b = lie_bracket(f, g);
    CHECK(b[vs.x_index(0)] == Expr(-1));
    CHECK(b[vs.x_index(1)].is_zero());

    // [g1, g2] against central differences at x0.
    VectorField g1 = s.input(0), g2 = s.input(1);
    VectorField br = lie_bracket(g1, g2);
    const double h = 1e-5;
    const auto& base = s.p0.values();
    auto jac_times = [&](const VectorField& A, const VectorField& B, std::size_t i) {
        // Σ_v ∂A^i/∂v · B^v
        double acc = 0;
        for (std::size_t v = 0; v < s.vs.dim(); ++v) {
            double bv = sym::eval_at(B[v], s.p0);
            if (bv == 0) continue;
            auto plus = base, minus = base;
            plus[v] += h;
            minus[v] -= h;
            double d = (sym::eval_at(A[i], s.p0.with_values(plus)) - sym::eval_at(A[i], s.p0.with_values(minus))) / (2 * h);
            acc += d * bv;
        }
        return acc;
    };
    for (std::size_t i = 0; i < s.vs.dim(); ++i) {
        double fd = jac_times(g2, g1, i) - jac_times(g1, g2, i);
        CHECK(std::abs(sym::eval_at(br[i], s.p0) - fd) < 1e-6);
    }
}

TEST_CASE("property: Jacobi identity and antisymmetry") {
    std::mt19937_64 rng(37);
    auto vs = sym::VariableSpace::standard(1, 3);
    test::RandomExpr gen(vs, rng, false);
    for (int k = 0; k < 200; ++k) {
        VectorField X = random_field(gen, vs), Y = random_field(gen, vs), Z = random_field(gen, vs);
        VectorField j = lie_bracket(lie_bracket(X, Y), Z) + lie_bracket(lie_bracket(Y, Z), X) + lie_bracket(lie_bracket(Z, X), Y);
        CHECK(all_zero(j));
        CHECK(all_zero(lie_bracket(X, Y) + lie_bracket(Y, X)));
    }
}

TEST_CASE("ideal membership") {
    test::Sec5 s;
    auto I0 = s.I0();
    CHECK(ideal_membership(dt_row(s.vs), I0) == Membership::NonMember);
    auto w12 = PfaffianIdeal::make(s.vs, {s.omega(0), s.omega(1)}, s.p0, Provenance::Explicit);
    Row comb(s.vs.dim());
    for (std::size_t j = 0; j < comb.size(); ++j) comb[j] = s.P("x1") * s.omega(0)[j] + s.omega(1)[j];
    CHECK(ideal_membership(comb, w12) == Membership::Member);
    CHECK(ideal_membership(s.omega(2), w12) == Membership::NonMember);
    const auto& I1 = test::sec5_flag().ideals.at(1);
    // dx5 + dx7 lies in I^(1) modulo dt: ω5 + ω7 is a member.
    Row w57(s.vs.dim());
    for (std::size_t j = 0; j < w57.size(); ++j) w57[j] = s.omega(4)[j] + s.omega(6)[j];
    CHECK(ideal_membership(w57, I1) == Membership::Member);
    auto I1dt = I1.with({dt_row(s.vs)});
    CHECK(ideal_membership(s.row({{"x5", "1"}, {"x7", "1"}}), I1dt) == Membership::Member);
}

TEST_CASE("derived system of the worked example") {
    test::Sec5 s;
    const auto& flag = test::sec5_flag();
    REQUIRE(flag.ideals.size() == 4);
    const auto& I1 = flag.ideals[1];
    CHECK(I1.size() == 5);
    CHECK(I1.provenance() == Provenance::Derived);
    // Listing modulo dt: x1 dx1 + x2 dx7, dx2, dx3 − x3 dx4, dx5 + dx7, dx6 − dx7.
    Matrix listing = {s.row({{"x1", "x1"}, {"x7", "x2"}}), s.row({{"x2", "1"}}), s.row({{"x3", "1"}, {"x4", "-x3"}}),
                      s.row({{"x5", "1"}, {"x7", "1"}}), s.row({{"x6", "1"}, {"x7", "-1"}})};
    auto with_dt = [&](Matrix m) {
        m.push_back(dt_row(s.vs));
        return numeric_rows(m, s.p0);
    };
    Matrix gens = I1.generators();
    CHECK(same_pointwise_span(with_dt(gens), with_dt(listing)));
    // Same identity at sample points, since the listing holds on a neighbourhood.
    auto q = s.p0.with_values({0, 0.3, -0.2, 1.9, 0.1, 4.1, 0.05, -0.1, 0.2, 0.07});
    CHECK(same_pointwise_span(numeric_rows([&] { auto m = gens; m.push_back(dt_row(s.vs)); return m; }(), q),
                              numeric_rows([&] { auto m = listing; m.push_back(dt_row(s.vs)); return m; }(), q)));
    // Every generator lies in I^(0) and is regular at p0.
    for (const auto& r : gens) {
        CHECK(ideal_membership(r, flag.ideals[0]) == Membership::Member);
        CHECK(row_regular_at(r, s.p0));
    }
    CHECK(num::rank(pointwise_span(I1, s.p0)) == 5);
    CHECK(flag.ideals[3].empty());
    CHECK(derived_system(flag.ideals[3]).empty());
    CHECK(pointwise_span(flag.ideals[3], s.p0).rows() == 0);
    CHECK(flag.counts() == std::vector<std::size_t>{7, 5, 3, 0});
    CHECK(flag.terminal() == 3);

    auto dx1 = PfaffianIdeal::make(s.vs, {s.row({{"x1", "1"}})}, s.p0, Provenance::Explicit);
    auto d = derived_system(dx1);
    CHECK(d.size() == 1);
    CHECK(same_span(d, dx1) == Membership::Member);
}

TEST_CASE("derived flags of small systems") {
    test::Sec5 s;
    auto two = PfaffianIdeal::make(s.vs, {s.row({{"x1", "1"}}), s.row({{"x2", "1"}})}, s.p0, Provenance::Explicit);
    CHECK(derived_flag(two).ideals.size() == 1);

    // ẋ1 = x2, ẋ2 = x3, ẋ3 = u.
    auto vs = sym::VariableSpace::standard(1, 3);
    sym::Point p0(vs, std::vector<mpq_class>{0, 0, 0, 0, 0});
    Matrix rows;
    std::vector<Expr> rhs = {Expr::symbol(vs.x(1)), Expr::symbol(vs.x(2)), Expr::symbol(vs.u(0))};
    for (std::size_t i = 0; i < 3; ++i) {
        Row r(vs.dim());
        r[vs.x_index(i)] = Expr(1);
        r[0] = -rhs[i];
        rows.push_back(r);
    }
    auto flag = derived_flag(PfaffianIdeal::make(vs, rows, p0, Provenance::System));
    CHECK(flag.counts() == std::vector<std::size_t>{3, 2, 1, 0});
    CHECK_THROWS_AS(derived_flag(PfaffianIdeal::make(vs, rows, p0, Provenance::System), 2), NoTermination);
}

TEST_CASE("differential closures of the worked example") {
    test::Sec5 s;
    const auto& flag = test::sec5_flag();
    auto dt = PfaffianIdeal::make(s.vs, {dt_row(s.vs)}, s.p0, Provenance::Explicit);
    auto cdt = differential_closure(dt);
    CHECK(cdt.size() == 1);
    CHECK(same_span(cdt, dt) == Membership::Member);
    Eigen::MatrixXd e = pointwise_span(dt, s.p0);
    REQUIRE(e.rows() == 1);
    CHECK(e(0, 0) == doctest::Approx(1.0));
    CHECK(e.row(0).tail(s.vs.dim() - 1).norm() == doctest::Approx(0.0));

    auto c2 = differential_closure(flag.ideals[2].with({dt_row(s.vs)}));
    CHECK(c2.provenance() == Provenance::Closure);
    auto want = PfaffianIdeal::make(s.vs, {s.row({{"x5", "1"}, {"x7", "1"}}), dt_row(s.vs)}, s.p0, Provenance::Explicit);
    CHECK(same_span(c2, want) == Membership::Member);

    auto c1 = differential_closure(flag.ideals[1].with({dt_row(s.vs)}));
    CHECK(c1.size() == 6);
    // Components of a first-integral map of this closure.
    for (const char* fn : {"x5+x7", "x5+x6", "x1^2/2 + x2*x7 - 2", "x2", "x3*exp(-x4) - 4", "t"}) {
        INFO(fn);
        CHECK(ideal_membership(gradient(s.vs, s.P(fn)), c1) == Membership::Member);
    }
    CHECK(ideal_membership(gradient(s.vs, s.P("-x3*x5 + 2*x6 + x7")), c1) == Membership::NonMember);
    for (const auto* c : {&c1, &c2, &cdt})
        for (const auto& g : c->forms()) CHECK(algebraic_membership(exterior_derivative(g), *c) == Membership::Member);
}

TEST_CASE("property: derived flags are monotone and nested") {
    std::mt19937_64 rng(41);
    int done = 0, irregular = 0;
    while (done < 200) {
        auto sys = test::random_system(rng, 2, 3);
        Flag flag;
        try {
            flag = derived_flag(sys.I0());
        } catch (const RegularityViolation&) {
            ++irregular;  // the random base point is singular for this system
            REQUIRE(irregular < 40);
            continue;
        }
        ++done;
        for (std::size_t k = 0; k + 1 < flag.ideals.size(); ++k) {
            CHECK(flag.ideals[k + 1].size() <= flag.ideals[k].size());
            for (const auto& r : flag.ideals[k + 1].generators())
                CHECK(ideal_membership(r, flag.ideals[k]) == Membership::Member);
        }
        auto c = differential_closure(flag.ideals[0].with({dt_row(sys.vs)}));
        for (const auto& g : c.forms()) CHECK(algebraic_membership(exterior_derivative(g), c) == Membership::Member);
    }
    MESSAGE("irregular random instances skipped: " << irregular);
}

TEST_CASE("regularity failures are detected") {
    test::Sec5 s;
    // x1 dx1 + x2 dx2 vanishes at the origin and has no common factor to remove.
    sym::Point origin(s.vs, std::vector<mpq_class>(s.vs.dim(), 0));
    CHECK_THROWS_AS(PfaffianIdeal::make(s.vs, {s.row({{"x1", "x1"}, {"x2", "x2"}})}, origin, Provenance::Explicit),
                    RegularityViolation);
    // A common factor is removed before regularity is judged.
    CHECK(PfaffianIdeal::make(s.vs, {s.row({{"x1", "x1"}, {"x2", "x1^2"}})}, origin, Provenance::Explicit).size() == 1);
    CHECK_THROWS_AS(PfaffianIdeal::make(s.vs, {Row(3)}, s.p0, Provenance::Explicit), DimensionMismatch);
}
