#pragma once

// Integrands for the command line: arithmetic over x1..xd.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | x<i> | sum_sq | func '(' expr ')' | '(' expr ')'
//   func    := abs | exp | log | sqrt | sin | cos

#include "polyvol/core.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace polyvol {

class ExpressionSyntaxError : public InputError {
public:
    ExpressionSyntaxError(const std::string& what, std::size_t position)
        : InputError(what + " at position " + std::to_string(position)), position_(position)
    {
    }
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

/// Division by zero, log or sqrt outside the domain, non-finite results.
class ExpressionDomainError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

struct Expression {
    enum class Op { number, coord, sum_sq, neg, add, sub, mul, div, pow, abs, exp, log, sqrt, sin, cos };
    struct Node {
        Op op;
        double value = 0;  // number
        Index index = 0;   // coord, 0-based
        int lhs = -1;
        int rhs = -1;
    };
    std::vector<Node> nodes;  // children precede parents; the root is last
    Index dim = 0;
    std::string text;
};

Expression parse_expression(const std::string& text, Index d);

double eval_expression(const Expression& e, const Vec<double>& x);

}  // namespace polyvol
