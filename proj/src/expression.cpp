#include "polyvol/expression.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace polyvol {

namespace {

using Op = Expression::Op;

class Parser {
public:
    Parser(const std::string& text, Index d, Expression& out) : s_(text), d_(d), out_(out) {}

    int parse()
    {
        int root = expr();
        skip_space();
        if (pos_ < s_.size()) throw ExpressionSyntaxError(std::string("unexpected '") + s_[pos_] + "'", pos_);
        return root;
    }

private:
    const std::string& s_;
    Index d_;
    Expression& out_;
    std::size_t pos_ = 0;

    int add(Expression::Node n)
    {
        out_.nodes.push_back(n);
        return int(out_.nodes.size()) - 1;
    }

    void skip_space()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_space();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c)
    {
        if (!accept(c)) {
            if (pos_ >= s_.size()) throw ExpressionSyntaxError(std::string("expected '") + c + "', got end of input", pos_);
            throw ExpressionSyntaxError(std::string("expected '") + c + "'", pos_);
        }
    }

    int expr()
    {
        int lhs = term();
        while (true) {
            if (accept('+'))
                lhs = add({Op::add, 0, 0, lhs, term()});
            else if (accept('-'))
                lhs = add({Op::sub, 0, 0, lhs, term()});
            else
                return lhs;
        }
    }

    int term()
    {
        int lhs = unary();
        while (true) {
            if (accept('*'))
                lhs = add({Op::mul, 0, 0, lhs, unary()});
            else if (accept('/'))
                lhs = add({Op::div, 0, 0, lhs, unary()});
            else
                return lhs;
        }
    }

    int unary()
    {
        if (accept('-')) return add({Op::neg, 0, 0, unary(), -1});
        return power();
    }

    int power()
    {
        int base = primary();
        if (accept('^')) return add({Op::pow, 0, 0, base, unary()});
        return base;
    }

    int primary()
    {
        skip_space();
        if (pos_ >= s_.size()) throw ExpressionSyntaxError("unexpected end of input", pos_);
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            int inner = expr();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        throw ExpressionSyntaxError(std::string("unexpected '") + c + "'", pos_);
    }

    int number()
    {
        const char* begin = s_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) throw ExpressionSyntaxError("malformed number", pos_);
        pos_ += std::size_t(end - begin);
        return add({Op::number, v, 0, -1, -1});
    }

    int identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
        const std::string name = s_.substr(start, pos_ - start);
        if (name == "sum_sq") return add({Op::sum_sq, 0, 0, -1, -1});
        if (name.size() >= 2 && name[0] == 'x' &&
            name.find_first_not_of("0123456789", 1) == std::string::npos) {
            const long i = std::strtol(name.c_str() + 1, nullptr, 10);
            if (i < 1 || i > d_)
                throw ExpressionSyntaxError("coordinate " + name + " out of range for dimension " + std::to_string(d_),
                                            start);
            return add({Op::coord, 0, Index(i - 1), -1, -1});
        }
        static const std::pair<const char*, Op> funcs[] = {{"abs", Op::abs},   {"exp", Op::exp}, {"log", Op::log},
                                                           {"sqrt", Op::sqrt}, {"sin", Op::sin}, {"cos", Op::cos}};
        for (auto [fname, op] : funcs) {
            if (name != fname) continue;
            expect('(');
            int arg = expr();
            expect(')');
            return add({op, 0, 0, arg, -1});
        }
        throw ExpressionSyntaxError("unknown identifier '" + name + "'", start);
    }
};

double checked(double v, const char* what)
{
    if (!std::isfinite(v)) throw ExpressionDomainError(std::string("expression: non-finite result in ") + what);
    return v;
}

double eval(const Expression& e, int k, const Vec<double>& x)
{
    const Expression::Node& n = e.nodes[std::size_t(k)];
    switch (n.op) {
    case Op::number: return n.value;
    case Op::coord: return x(n.index);
    case Op::sum_sq: return x.squaredNorm();
    case Op::neg: return -eval(e, n.lhs, x);
    case Op::add: return checked(eval(e, n.lhs, x) + eval(e, n.rhs, x), "+");
    case Op::sub: return checked(eval(e, n.lhs, x) - eval(e, n.rhs, x), "-");
    case Op::mul: return checked(eval(e, n.lhs, x) * eval(e, n.rhs, x), "*");
    case Op::div: {
        const double a = eval(e, n.lhs, x), b = eval(e, n.rhs, x);
        if (b == 0) throw ExpressionDomainError("expression: division by zero");
        return checked(a / b, "/");
    }
    case Op::pow: return checked(std::pow(eval(e, n.lhs, x), eval(e, n.rhs, x)), "^");
    case Op::abs: return std::abs(eval(e, n.lhs, x));
    case Op::exp: return checked(std::exp(eval(e, n.lhs, x)), "exp");
    case Op::log: {
        const double a = eval(e, n.lhs, x);
        if (!(a > 0)) throw ExpressionDomainError("expression: log of a non-positive number");
        return std::log(a);
    }
    case Op::sqrt: {
        const double a = eval(e, n.lhs, x);
        if (a < 0) throw ExpressionDomainError("expression: sqrt of a negative number");
        return std::sqrt(a);
    }
    case Op::sin: return std::sin(eval(e, n.lhs, x));
    case Op::cos: return std::cos(eval(e, n.lhs, x));
    }
    throw ExpressionDomainError("expression: corrupt node");
}

}  // namespace

Expression parse_expression(const std::string& text, Index d)
{
    require(d >= 1, "expression: dimension must be positive");
    Expression e;
    e.dim = d;
    e.text = text;
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw ExpressionSyntaxError("empty expression", 0);
    Parser(text, d, e).parse();
    return e;
}

double eval_expression(const Expression& e, const Vec<double>& x)
{
    require_dim(x, e.dim, "eval_expression");
    return eval(e, int(e.nodes.size()) - 1, x);
}

}  // namespace polyvol
