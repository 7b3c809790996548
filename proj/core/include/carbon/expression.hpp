#pragma once

#include <memory>
#include <string>

namespace carbon {

/// Arithmetic expression in the variables p and y, parsed once and
/// evaluated many times. Supports + - * / ^, unary minus, parentheses,
/// numeric literals, the constant pi and the functions exp, log, sqrt, tanh,
/// abs, min(a, b) and max(a, b).
class Expression {
 public:
  /// Throws ValidationError with the offending position on syntax errors.
  static Expression parse(const std::string& text);

  double operator()(double p, double y) const;
  const std::string& text() const noexcept { return text_; }
  bool uses_y() const noexcept { return uses_y_; }

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
  bool uses_y_ = false;
};

}  // namespace carbon
