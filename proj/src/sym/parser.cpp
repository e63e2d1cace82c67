#include "tfl/sym/parser.hpp"

#include <cctype>
#include <string>

#include "tfl/error.hpp"

namespace tfl::sym {

namespace {

constexpr const char* kOperand = "number, variable, function call, '(' or '-'";

class Parser {
public:
    Parser(std::string_view text, const VariableSpace& vars) : s_(text), vars_(vars) {}

    Expr run() {
        skip();
        if (pos_ == s_.size()) throw SyntaxError(pos_, kOperand);
        Expr e = expr();
        skip();
        if (pos_ != s_.size()) throw SyntaxError(pos_, "operator or end of input");
        return e;
    }

private:
    std::string_view s_;
    const VariableSpace& vars_;
    std::size_t pos_ = 0;

    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    Expr expr() {
        Expr e = term();
        for (;;) {
            if (eat('+')) {
                e = e + term();
            } else if (eat('-')) {
                e = e - term();
            } else {
                return e;
            }
        }
    }

    Expr term() {
        Expr e = unary();
        for (;;) {
            if (eat('*')) {
                e = e * unary();
            } else if (eat('/')) {
                std::size_t at = pos_;
                Expr d = unary();
                if (d.is_zero()) throw DomainError("division by zero at " + std::to_string(at));
                e = e / d;
            } else {
                return e;
            }
        }
    }

    Expr unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }

    Expr power() {
        Expr base = primary();
        if (eat('^')) return pow(base, exponent());
        return base;
    }

    long exponent() {
        skip();
        bool neg = false;
        if (eat('-')) {
            neg = true;
        } else {
            eat('+');
        }
        long v;
        skip();
        if (eat('(')) {
            v = exponent();
            if (!eat(')')) throw SyntaxError(pos_, "')'");
        } else {
            skip();
            std::size_t start = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (start == pos_) throw SyntaxError(pos_, "integer literal exponent");
            if (pos_ < s_.size() && s_[pos_] == '.') throw SyntaxError(pos_, "integer literal exponent");
            if (pos_ - start > 6) throw SyntaxError(start, "exponent of at most 6 digits");
            v = std::stol(std::string(s_.substr(start, pos_ - start)));
        }
        if (eat('^')) {
            long rhs = exponent();
            if (rhs < 0) throw SyntaxError(pos_, "non-negative integer exponent in exponent tower");
            long r = 1;
            for (long i = 0; i < rhs; ++i) {
                r *= v;
                if (r > 1000000 || r < -1000000) throw SyntaxError(pos_, "smaller exponent");
            }
            v = r;
        }
        return neg ? -v : v;
    }

    Expr number() {
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        std::string digits(s_.substr(start, pos_ - start));
        mpq_class value(mpz_class(digits.empty() ? "0" : digits));
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            std::size_t fs = pos_;
            while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
            if (fs == pos_ && digits.empty()) throw SyntaxError(fs, "digit");
            std::string frac(s_.substr(fs, pos_ - fs));
            if (!frac.empty()) {
                mpz_class scale;
                mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
                mpq_class f(mpz_class(frac), scale);
                f.canonicalize();
                value += f;
            }
        }
        return Expr(value);
    }

    Expr primary() {
        skip();
        if (pos_ == s_.size()) throw SyntaxError(pos_, kOperand);
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            if (!eat(')')) throw SyntaxError(pos_, "')'");
            return e;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
                ++pos_;
            std::string name(s_.substr(start, pos_ - start));
            std::size_t after = pos_;
            skip();
            bool call = pos_ < s_.size() && s_[pos_] == '(';
            if (call) {
                KernelFn fn;
                if (name == "exp") {
                    fn = KernelFn::Exp;
                } else if (name == "sin") {
                    fn = KernelFn::Sin;
                } else if (name == "cos") {
                    fn = KernelFn::Cos;
                } else if (name == "ln") {
                    fn = KernelFn::Ln;
                } else {
                    throw SyntaxError(start, "function name exp, sin, cos or ln");
                }
                ++pos_;
                Expr arg = expr();
                if (!eat(')')) throw SyntaxError(pos_, "')'");
                return apply_kernel(fn, arg);
            }
            pos_ = after;
            auto sym = vars_.lookup(name);
            if (!sym) throw UnknownVariable(name, start);
            return Expr::symbol(*sym);
        }
        throw SyntaxError(pos_, kOperand);
    }
};

} // namespace

Expr parse_expr(std::string_view text, const VariableSpace& vars) { return Parser(text, vars).run(); }

} // namespace tfl::sym
