#pragma once

#include "bva/discrete.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace bva {

/// Arithmetic expression over x1..xn (aliases x, y, z) with + - * / ^, the constant pi and
/// functions sin, cos, tan, exp, log, sqrt, abs, pow(a, b), min(a, b), max(a, b).
class Expression {
public:
    struct Node;

    /// Throws ParseError with the column of the offending token.
    static Expression parse(std::string_view text, int dim);

    Expression();
    ~Expression();
    Expression(Expression&&) noexcept;
    Expression& operator=(Expression&&) noexcept;
    Expression(const Expression&);
    Expression& operator=(const Expression&);

    int dim() const noexcept { return dim_; }
    const std::string& text() const noexcept { return text_; }
    double operator()(const Point& x) const;

private:
    std::shared_ptr<const Node> root_;
    int dim_ = 0;
    std::string text_;
};

/// Vector field from a component list "e1; e2" or "[e1, e2]".
class FieldExpression {
public:
    static FieldExpression parse(std::string_view text, int dim);

    int dim() const noexcept { return dim_; }
    int components() const noexcept { return static_cast<int>(parts_.size()); }
    const std::string& text() const noexcept { return text_; }

    /// Throws DomainError when a component is not finite at x.
    void evaluate(const Point& x, std::span<double> out) const;
    FieldFn function() const;

private:
    std::vector<Expression> parts_;
    int dim_ = 0;
    std::string text_;
};

}  // namespace bva
