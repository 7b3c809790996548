#include "carbon/expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <sstream>
#include <vector>

#include "carbon/error.hpp"

namespace carbon {

struct Expression::Node {
  enum class Op { number, var_p, var_y, add, sub, mul, div, pow, neg, call1, call2 };
  Op op = Op::number;
  double value = 0.0;
  double (*fn1)(double) = nullptr;
  double (*fn2)(double, double) = nullptr;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(double p, double y) const {
    switch (op) {
      case Op::number: return value;
      case Op::var_p: return p;
      case Op::var_y: return y;
      case Op::add: return lhs->eval(p, y) + rhs->eval(p, y);
      case Op::sub: return lhs->eval(p, y) - rhs->eval(p, y);
      case Op::mul: return lhs->eval(p, y) * rhs->eval(p, y);
      case Op::div: return lhs->eval(p, y) / rhs->eval(p, y);
      case Op::pow: return std::pow(lhs->eval(p, y), rhs->eval(p, y));
      case Op::neg: return -lhs->eval(p, y);
      case Op::call1: return fn1(lhs->eval(p, y));
      case Op::call2: return fn2(lhs->eval(p, y), rhs->eval(p, y));
    }
    return 0.0;
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Op = Expression::Node::Op;

double f_exp(double x) { return std::exp(x); }
double f_log(double x) { return std::log(x); }
double f_sqrt(double x) { return std::sqrt(x); }
double f_tanh(double x) { return std::tanh(x); }
double f_abs(double x) { return std::abs(x); }
double f_min(double a, double b) { return std::min(a, b); }
double f_max(double a, double b) { return std::max(a, b); }

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected character");
    return n;
  }

  bool uses_y = false;

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "expression '" << s_ << "': " << msg << " at position " << pos_;
    throw ValidationError(os.str());
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) n = make(Op::add, n, term());
      else if (accept('-')) n = make(Op::sub, n, term());
      else return n;
    }
  }
  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = make(Op::mul, n, unary());
      else if (accept('/')) n = make(Op::div, n, unary());
      else return n;
    }
  }
  NodePtr unary() {
    if (accept('-')) return make(Op::neg, unary());
    if (accept('+')) return unary();
    return power();
  }
  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Op::pow, base, unary());  // right associative
    return base;
  }
  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    if (accept('(')) {
      NodePtr n = expr();
      expect(')');
      return n;
    }
    const char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) fail("bad number");
      pos_ += static_cast<std::size_t>(end - begin);
      auto n = std::make_shared<Expression::Node>();
      n->value = v;
      return n;
    }
    if (!std::isalpha(static_cast<unsigned char>(c))) fail("unexpected character");
    std::string name;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      name += s_[pos_++];
    if (name == "p") return make(Op::var_p);
    if (name == "y") {
      uses_y = true;
      return make(Op::var_y);
    }
    if (name == "pi") {
      auto n = std::make_shared<Expression::Node>();
      n->value = std::numbers::pi;
      return n;
    }
    double (*f1)(double) = nullptr;
    double (*f2)(double, double) = nullptr;
    if (name == "exp") f1 = f_exp;
    else if (name == "log") f1 = f_log;
    else if (name == "sqrt") f1 = f_sqrt;
    else if (name == "tanh") f1 = f_tanh;
    else if (name == "abs") f1 = f_abs;
    else if (name == "min") f2 = f_min;
    else if (name == "max") f2 = f_max;
    else fail("unknown identifier '" + name + "'");
    expect('(');
    auto n = std::make_shared<Expression::Node>();
    n->lhs = expr();
    if (f2) {
      expect(',');
      n->rhs = expr();
      n->op = Op::call2;
      n->fn2 = f2;
    } else {
      n->op = Op::call1;
      n->fn1 = f1;
    }
    expect(')');
    return n;
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(const std::string& text) {
  Parser parser(text);
  Expression e;
  e.root_ = parser.parse();
  e.text_ = text;
  e.uses_y_ = parser.uses_y;
  return e;
}

double Expression::operator()(double p, double y) const {
  if (!root_) throw ValidationError("empty expression");
  return root_->eval(p, y);
}

}  // namespace carbon
