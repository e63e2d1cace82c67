#include "tfl/sym/varspace.hpp"

#include <algorithm>
#include <set>

#include "tfl/error.hpp"

namespace tfl::sym {

VariableSpace::VariableSpace(const std::vector<std::string>& inputs,
                             const std::vector<std::string>& states, const std::string& time) {
    auto layout = std::make_shared<Layout>();
    std::set<std::string> seen;
    auto add = [&](const std::string& name) {
        if (!seen.insert(name).second) throw InvalidProblem("duplicate variable name '" + name + "'");
        layout->syms.push_back(symbols::variable(name));
    };
    add(time);
    for (const auto& u : inputs) add(u);
    for (const auto& x : states) add(x);
    layout->m = inputs.size();
    layout->n = states.size();
    SymbolId maxid = *std::max_element(layout->syms.begin(), layout->syms.end());
    layout->slot.assign(maxid + 1, -1);
    for (std::size_t i = 0; i < layout->syms.size(); ++i)
        layout->slot[layout->syms[i]] = static_cast<int>(i);
    layout_ = std::move(layout);
}

VariableSpace VariableSpace::standard(std::size_t m, std::size_t n) {
    std::vector<std::string> u, x;
    for (std::size_t j = 1; j <= m; ++j) u.push_back("u" + std::to_string(j));
    for (std::size_t i = 1; i <= n; ++i) x.push_back("x" + std::to_string(i));
    return VariableSpace(u, x);
}

std::optional<std::size_t> VariableSpace::index_of(SymbolId s) const {
    if (!layout_ || is_kernel(s) || s >= layout_->slot.size() || layout_->slot[s] < 0)
        return std::nullopt;
    return static_cast<std::size_t>(layout_->slot[s]);
}

std::optional<SymbolId> VariableSpace::lookup(const std::string& name) const {
    if (!layout_ || !symbols::has_variable(name)) return std::nullopt;
    SymbolId s = symbols::variable(name);
    if (index_of(s)) return s;
    return std::nullopt;
}

const std::string& VariableSpace::name(std::size_t i) const { return symbols::name(layout_->syms[i]); }

Point::Point(const VariableSpace& vs, std::vector<double> values)
    : layout_(vs.layout()), values_(std::move(values)) {
    if (values_.size() != vs.dim()) throw DimensionMismatch("point size does not match variable space");
}

Point::Point(const VariableSpace& vs, std::vector<mpq_class> values)
    : layout_(vs.layout()), exact_(std::move(values)) {
    if (exact_.size() != vs.dim()) throw DimensionMismatch("point size does not match variable space");
    values_.reserve(exact_.size());
    for (const auto& q : exact_) values_.push_back(q.get_d());
}

int Point::slot(SymbolId s) const {
    if (!layout_ || is_kernel(s) || s >= layout_->slot.size()) return -1;
    return layout_->slot[s];
}

bool Point::binds(SymbolId s) const { return slot(s) >= 0; }

double Point::value(SymbolId s) const {
    int k = slot(s);
    if (k < 0) throw DomainError("variable '" + symbols::name(s) + "' is not bound by the point");
    return values_[k];
}

const mpq_class& Point::exact(SymbolId s) const {
    int k = slot(s);
    if (k < 0 || exact_.empty()) throw DomainError("no exact binding for '" + symbols::name(s) + "'");
    return exact_[k];
}

Point Point::with_values(std::vector<double> values) const {
    Point p;
    p.layout_ = layout_;
    p.values_ = std::move(values);
    return p;
}

} // namespace tfl::sym
