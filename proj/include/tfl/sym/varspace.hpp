#pragma once

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tfl/sym/symbols.hpp"

namespace tfl::sym {

// Ordered coordinates of the lifted manifold: t, then controls, then states.
class VariableSpace {
public:
    VariableSpace() = default;
    VariableSpace(const std::vector<std::string>& inputs, const std::vector<std::string>& states,
                  const std::string& time = "t");
    static VariableSpace standard(std::size_t m, std::size_t n);

    std::size_t dim() const { return layout_ ? layout_->syms.size() : 0; }
    std::size_t m() const { return layout_ ? layout_->m : 0; }
    std::size_t n() const { return layout_ ? layout_->n : 0; }

    SymbolId operator[](std::size_t i) const { return layout_->syms[i]; }
    SymbolId t() const { return layout_->syms[0]; }
    SymbolId u(std::size_t j) const { return layout_->syms[1 + j]; }
    SymbolId x(std::size_t i) const { return layout_->syms[1 + m() + i]; }
    std::size_t u_index(std::size_t j) const { return 1 + j; }
    std::size_t x_index(std::size_t i) const { return 1 + m() + i; }

    std::optional<std::size_t> index_of(SymbolId s) const;
    std::optional<SymbolId> lookup(const std::string& name) const;
    const std::string& name(std::size_t i) const;
    const std::vector<SymbolId>& symbols() const { return layout_->syms; }

    bool operator==(const VariableSpace& o) const {
        return layout_ == o.layout_ || (layout_ && o.layout_ && layout_->syms == o.layout_->syms &&
                                        layout_->m == o.layout_->m);
    }

    struct Layout {
        std::vector<SymbolId> syms;
        std::size_t m = 0, n = 0;
        std::vector<int> slot;  // indexed by variable id, -1 when absent
    };
    const std::shared_ptr<const Layout>& layout() const { return layout_; }

private:
    std::shared_ptr<const Layout> layout_;
};

// Binding of every coordinate of a VariableSpace. Exact coordinates are kept
// when the point was built from rationals.
class Point {
public:
    Point() = default;
    Point(const VariableSpace& vs, std::vector<double> values);
    Point(const VariableSpace& vs, std::vector<mpq_class> values);

    std::size_t size() const { return values_.size(); }
    bool is_exact() const { return !exact_.empty(); }
    const std::vector<double>& values() const { return values_; }
    const std::vector<mpq_class>& exact_values() const { return exact_; }
    double operator[](std::size_t i) const { return values_[i]; }

    bool binds(SymbolId s) const;
    double value(SymbolId s) const;           // throws DomainError when unbound
    const mpq_class& exact(SymbolId s) const;  // requires is_exact()

    Point with_values(std::vector<double> values) const;

private:
    std::shared_ptr<const VariableSpace::Layout> layout_;
    std::vector<double> values_;
    std::vector<mpq_class> exact_;
    int slot(SymbolId s) const;
};

} // namespace tfl::sym
