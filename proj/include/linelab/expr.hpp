#pragma once

#include <memory>
#include <string>

namespace linelab {

/// Arithmetic expression in the variables s and t.
/// Grammar: + - * / ^ (right-assoc), unary minus, parentheses, numeric
/// literals, the constant pi, and the functions
/// sin cos cosh sinh exp ln sqrt.
class Expr {
  public:
    /// Parses the expression; throws ConfigError with a position diagnostic
    /// on malformed input.
    static Expr parse(const std::string &text);

    double eval(double s, double t) const;

    Expr() = default;

    struct Node;

  private:
    std::shared_ptr<const Node> root_;
};

} // namespace linelab
