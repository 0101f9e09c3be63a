#ifndef NLSPECTRAL_EXPRESSION_HPP
#define NLSPECTRAL_EXPRESSION_HPP

#include <cctype>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace nlspectral {

class ExpressionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Arithmetic expression in one variable x.
///
/// Grammar:
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := ('-' | '+') unary | power
///   power   := primary ('^' unary)?          right associative
///   primary := number | 'x' | name | func '(' expr ')' | '(' expr ')'
/// func is one of exp, sin, cos, abs. Names other than x are constants bound
/// at parse time (pi is always bound).
class Expression {
 public:
  static Expression parse(std::string_view text,
                          const std::map<std::string, double>& constants = {}) {
    Parser p{text, 0, constants};
    Expression e;
    auto nodes = std::make_shared<std::vector<Node>>();
    p.out = nodes.get();
    e.root_ = p.parse_expr();
    p.skip_space();
    if (p.pos != text.size()) p.fail("unexpected trailing input");
    e.nodes_ = std::move(nodes);
    e.text_ = std::string(text);
    return e;
  }

  double operator()(double x) const { return eval(root_, x); }
  const std::string& text() const { return text_; }

 private:
  enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Sin, Cos, Abs };
  struct Node {
    Op op;
    double value = 0.0;
    int lhs = -1;
    int rhs = -1;
  };

  struct Parser {
    std::string_view s;
    std::size_t pos;
    const std::map<std::string, double>& constants;
    std::vector<Node>* out = nullptr;

    [[noreturn]] void fail(const std::string& what) const {
      throw ExpressionError("expression: " + what + " at offset " + std::to_string(pos) +
                            " in '" + std::string(s) + "'");
    }
    void skip_space() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool accept(char c) {
      skip_space();
      if (pos < s.size() && s[pos] == c) {
        ++pos;
        return true;
      }
      return false;
    }
    int add(Op op, double v = 0.0, int l = -1, int r = -1) {
      out->push_back({op, v, l, r});
      return static_cast<int>(out->size()) - 1;
    }
    int parse_expr() {
      int lhs = parse_term();
      for (;;) {
        if (accept('+')) lhs = add(Op::Add, 0, lhs, parse_term());
        else if (accept('-')) lhs = add(Op::Sub, 0, lhs, parse_term());
        else return lhs;
      }
    }
    int parse_term() {
      int lhs = parse_unary();
      for (;;) {
        if (accept('*')) lhs = add(Op::Mul, 0, lhs, parse_unary());
        else if (accept('/')) lhs = add(Op::Div, 0, lhs, parse_unary());
        else return lhs;
      }
    }
    int parse_unary() {
      if (accept('-')) return add(Op::Neg, 0, parse_unary());
      if (accept('+')) return parse_unary();
      return parse_power();
    }
    int parse_power() {
      const int base = parse_primary();
      if (accept('^')) return add(Op::Pow, 0, base, parse_unary());
      return base;
    }
    int parse_primary() {
      skip_space();
      if (pos >= s.size()) fail("unexpected end of input");
      const char c = s[pos];
      if (accept('(')) {
        const int inner = parse_expr();
        if (!accept(')')) fail("expected ')'");
        return inner;
      }
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
      if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        const std::size_t start = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
        const std::string name(s.substr(start, pos - start));
        static const std::map<std::string, Op> functions = {
            {"exp", Op::Exp}, {"sin", Op::Sin}, {"cos", Op::Cos}, {"abs", Op::Abs}};
        if (auto f = functions.find(name); f != functions.end()) {
          if (!accept('(')) fail("expected '(' after " + name);
          const int arg = parse_expr();
          if (!accept(')')) fail("expected ')'");
          return add(f->second, 0, arg);
        }
        if (name == "x") return add(Op::Var);
        if (name == "pi") return add(Op::Const, std::numbers::pi);
        if (auto k = constants.find(name); k != constants.end()) return add(Op::Const, k->second);
        pos = start;
        fail("unknown name '" + name + "'");
      }
      fail(std::string("unexpected character '") + c + "'");
    }
    int parse_number() {
      const std::size_t start = pos;
      while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.')) ++pos;
      if (pos < s.size() && (s[pos] == 'e' || s[pos] == 'E')) {
        std::size_t p = pos + 1;
        if (p < s.size() && (s[p] == '+' || s[p] == '-')) ++p;
        if (p < s.size() && std::isdigit(static_cast<unsigned char>(s[p]))) {
          pos = p;
          while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) ++pos;
        }
      }
      const std::string token(s.substr(start, pos - start));
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(token, &used);
      } catch (const std::exception&) {
        pos = start;
        fail("malformed number");
      }
      if (used != token.size()) {
        pos = start;
        fail("malformed number");
      }
      return add(Op::Const, v);
    }
  };

  double eval(int i, double x) const {
    const Node& n = (*nodes_)[static_cast<std::size_t>(i)];
    switch (n.op) {
      case Op::Const: return n.value;
      case Op::Var: return x;
      case Op::Add: return eval(n.lhs, x) + eval(n.rhs, x);
      case Op::Sub: return eval(n.lhs, x) - eval(n.rhs, x);
      case Op::Mul: return eval(n.lhs, x) * eval(n.rhs, x);
      case Op::Div: return eval(n.lhs, x) / eval(n.rhs, x);
      case Op::Pow: return std::pow(eval(n.lhs, x), eval(n.rhs, x));
      case Op::Neg: return -eval(n.lhs, x);
      case Op::Exp: return std::exp(eval(n.lhs, x));
      case Op::Sin: return std::sin(eval(n.lhs, x));
      case Op::Cos: return std::cos(eval(n.lhs, x));
      case Op::Abs: return std::abs(eval(n.lhs, x));
    }
    return 0.0;
  }

  std::shared_ptr<const std::vector<Node>> nodes_;
  int root_ = -1;
  std::string text_;
};

}  // namespace nlspectral

#endif  // NLSPECTRAL_EXPRESSION_HPP
