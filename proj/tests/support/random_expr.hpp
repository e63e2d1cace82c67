#pragma once

#include <random>

#include "tfl/sym/expr.hpp"

namespace tfl::test {

// Random expression generator for property tests.
class RandomExpr {
public:
    RandomExpr(const sym::VariableSpace& vs, std::mt19937_64& rng, bool kernels = true)
        : vs_(vs), rng_(rng), kernels_(kernels) {}

    sym::SymbolId variable() { return vs_[pick(vs_.dim())]; }

    sym::Expr constant() {
        long n = static_cast<long>(pick(9)) - 4;
        long d = 1 + static_cast<long>(pick(3));
        mpq_class q(n, d);
        q.canonicalize();
        return sym::Expr(q);
    }

    sym::Expr polynomial(unsigned terms, unsigned degree) {
        sym::Expr e;
        for (unsigned i = 0; i < terms; ++i) {
            sym::Expr t = constant();
            unsigned d = static_cast<unsigned>(pick(degree + 1));
            for (unsigned k = 0; k < d; ++k) t *= sym::Expr::symbol(variable());
            e += t;
        }
        return e;
    }

    sym::Expr expr(int depth) {
        if (depth <= 0) return pick(3) ? sym::Expr::symbol(variable()) : constant();
        switch (pick(kernels_ ? 7 : 5)) {
            case 0: return expr(depth - 1) + expr(depth - 1);
            case 1: return expr(depth - 1) * expr(depth - 1);
            case 2: return expr(depth - 1) - expr(depth - 1);
            case 3: {
                sym::Expr d = expr(depth - 1);
                if (d.is_zero()) return d;
                return expr(depth - 1) / (d * d + 1);
            }
            case 4: return sym::pow(expr(depth - 1), 2);
            case 5: return sym::exp(expr(depth - 1));
            default: return sym::sin(expr(depth - 1));
        }
    }

    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

private:
    const sym::VariableSpace& vs_;
    std::mt19937_64& rng_;
    bool kernels_;
};

} // namespace tfl::test
