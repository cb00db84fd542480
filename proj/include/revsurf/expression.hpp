#pragma once

// Closed-form descriptors for radial functions of one variable `t`.
//
// Grammar (usual precedence, `^` right associative):
//   expr    := sum [('<' | '<=' | '>' | '>=') sum]
//   sum     := term {('+' | '-') term}
//   term    := unary {('*' | '/') unary}
//   unary   := ('-' | '+') unary | power
//   power   := primary ['^' unary]
//   primary := number | 't' | 'pi' | 'e' | name '(' expr {',' expr} ')' | '(' expr ')'
//
// Functions: sin cos tan atan exp log sqrt sinh cosh tanh abs sign,
// min(a, b), max(a, b) and if(cond, a, b). Comparisons evaluate to 0 or 1.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "revsurf/error.hpp"

namespace revsurf {

class Expression {
 public:
  enum class Op {
    kConst, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg,
    kSin, kCos, kTan, kAtan, kExp, kLog, kSqrt, kSinh, kCosh, kTanh, kAbs, kSign,
    kMin, kMax, kIf, kLess, kLessEq, kGreater, kGreaterEq,
  };

  Expression() : Expression(constant(0.0)) {}

  static Expression constant(double c) { return Expression(make(Op::kConst, c, {})); }
  static Expression variable() { return Expression(make(Op::kVar, 0.0, {})); }

  static Expression parse(std::string_view text) {
    Parser p{text, 0};
    auto node = p.parse_expr();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("unexpected trailing input");
    return Expression(std::move(node));
  }

  double operator()(double t) const { return eval(*root_, t); }

  friend Expression operator-(const Expression& a) { return Expression(neg(a.root_)); }
  friend Expression operator/(const Expression& a, const Expression& b) { return Expression(div(a.root_, b.root_)); }
  /// if(t < at, below, above)
  static Expression switch_at(double at, const Expression& below, const Expression& above) {
    return Expression(branch(compare(Op::kLess, make(Op::kVar, 0, {}), cst(at)), below.root_, above.root_));
  }

  static Expression min(const Expression& a, const Expression& b) {
    return Expression(make(Op::kMin, 0, {a.root_, b.root_}));
  }

  Expression derivative() const { return Expression(diff(root_)); }

  bool is_constant() const { return root_->op == Op::kConst; }
  double constant_value() const { return root_->value; }

  /// Abscissae where an `if` switches on a plain `t` comparison; these are
  /// the points where a piecewise descriptor may be discontinuous.
  std::vector<double> breakpoints() const {
    std::vector<double> out;
    collect_breakpoints(*root_, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  std::string str() const {
    std::ostringstream os;
    os.precision(17);
    print(os, *root_);
    return os.str();
  }

 private:
  struct Node;
  using NodePtr = std::shared_ptr<const Node>;
  struct Node {
    Op op;
    double value;
    std::vector<NodePtr> args;
  };

  explicit Expression(NodePtr root) : root_(std::move(root)) {}

  static NodePtr make(Op op, double value, std::vector<NodePtr> args) {
    return std::make_shared<const Node>(Node{op, value, std::move(args)});
  }
  static NodePtr cst(double c) { return make(Op::kConst, c, {}); }
  static bool is_const(const NodePtr& n, double c) { return n->op == Op::kConst && n->value == c; }

  static bool is_unary_function(Op op) { return op >= Op::kSin && op <= Op::kSign; }
  static bool is_comparison(Op op) { return op >= Op::kLess; }

  static double eval(const Node& n, double t) {
    switch (n.op) {
      case Op::kConst: return n.value;
      case Op::kVar: return t;
      case Op::kAdd: return eval(*n.args[0], t) + eval(*n.args[1], t);
      case Op::kSub: return eval(*n.args[0], t) - eval(*n.args[1], t);
      case Op::kMul: return eval(*n.args[0], t) * eval(*n.args[1], t);
      case Op::kDiv: return eval(*n.args[0], t) / eval(*n.args[1], t);
      case Op::kPow: {
        const double b = eval(*n.args[0], t);
        const Node& e = *n.args[1];
        if (e.op == Op::kConst) {
          if (e.value == 2.0) return b * b;
          if (e.value == 3.0) return b * b * b;
          if (e.value == 1.0) return b;
          if (e.value == 0.5) return std::sqrt(b);
        }
        return std::pow(b, eval(e, t));
      }
      case Op::kNeg: return -eval(*n.args[0], t);
      case Op::kSin: return std::sin(eval(*n.args[0], t));
      case Op::kCos: return std::cos(eval(*n.args[0], t));
      case Op::kTan: return std::tan(eval(*n.args[0], t));
      case Op::kAtan: return std::atan(eval(*n.args[0], t));
      case Op::kExp: return std::exp(eval(*n.args[0], t));
      case Op::kLog: return std::log(eval(*n.args[0], t));
      case Op::kSqrt: return std::sqrt(eval(*n.args[0], t));
      case Op::kSinh: return std::sinh(eval(*n.args[0], t));
      case Op::kCosh: return std::cosh(eval(*n.args[0], t));
      case Op::kTanh: return std::tanh(eval(*n.args[0], t));
      case Op::kAbs: return std::abs(eval(*n.args[0], t));
      case Op::kSign: {
        const double v = eval(*n.args[0], t);
        return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
      }
      case Op::kMin: return std::min(eval(*n.args[0], t), eval(*n.args[1], t));
      case Op::kMax: return std::max(eval(*n.args[0], t), eval(*n.args[1], t));
      case Op::kIf: return eval(*n.args[0], t) != 0.0 ? eval(*n.args[1], t) : eval(*n.args[2], t);
      case Op::kLess: return eval(*n.args[0], t) < eval(*n.args[1], t) ? 1.0 : 0.0;
      case Op::kLessEq: return eval(*n.args[0], t) <= eval(*n.args[1], t) ? 1.0 : 0.0;
      case Op::kGreater: return eval(*n.args[0], t) > eval(*n.args[1], t) ? 1.0 : 0.0;
      case Op::kGreaterEq: return eval(*n.args[0], t) >= eval(*n.args[1], t) ? 1.0 : 0.0;
    }
    return 0.0;
  }

  // Builders with light constant folding so that repeated differentiation
  // stays compact.
  static NodePtr add(NodePtr a, NodePtr b) {
    if (is_const(a, 0)) return b;
    if (is_const(b, 0)) return a;
    if (a->op == Op::kConst && b->op == Op::kConst) return cst(a->value + b->value);
    return make(Op::kAdd, 0, {std::move(a), std::move(b)});
  }
  static NodePtr sub(NodePtr a, NodePtr b) {
    if (is_const(b, 0)) return a;
    if (is_const(a, 0)) return neg(std::move(b));
    if (a->op == Op::kConst && b->op == Op::kConst) return cst(a->value - b->value);
    return make(Op::kSub, 0, {std::move(a), std::move(b)});
  }
  static NodePtr mul(NodePtr a, NodePtr b) {
    if (is_const(a, 0) || is_const(b, 0)) return cst(0);
    if (is_const(a, 1)) return b;
    if (is_const(b, 1)) return a;
    if (a->op == Op::kConst && b->op == Op::kConst) return cst(a->value * b->value);
    return make(Op::kMul, 0, {std::move(a), std::move(b)});
  }
  static NodePtr div(NodePtr a, NodePtr b) {
    if (is_const(a, 0)) return cst(0);
    if (is_const(b, 1)) return a;
    if (a->op == Op::kConst && b->op == Op::kConst) return cst(a->value / b->value);
    return make(Op::kDiv, 0, {std::move(a), std::move(b)});
  }
  static NodePtr neg(NodePtr a) {
    if (a->op == Op::kConst) return cst(-a->value);
    if (a->op == Op::kNeg) return a->args[0];
    return make(Op::kNeg, 0, {std::move(a)});
  }
  static NodePtr pow(NodePtr a, NodePtr b) {
    if (is_const(b, 1)) return a;
    if (is_const(b, 0)) return cst(1);
    if (a->op == Op::kConst && b->op == Op::kConst) return cst(std::pow(a->value, b->value));
    return make(Op::kPow, 0, {std::move(a), std::move(b)});
  }
  static NodePtr fn(Op op, NodePtr a) {
    if (a->op == Op::kConst) return cst(eval(*make(op, 0, {a}), 0.0));
    return make(op, 0, {std::move(a)});
  }
  static NodePtr branch(NodePtr c, NodePtr a, NodePtr b) {
    if (c->op == Op::kConst) return c->value != 0.0 ? a : b;
    if (a->op == Op::kConst && b->op == Op::kConst && a->value == b->value) return a;
    return make(Op::kIf, 0, {std::move(c), std::move(a), std::move(b)});
  }
  static NodePtr compare(Op op, NodePtr a, NodePtr b) {
    if (a->op == Op::kConst && b->op == Op::kConst) return cst(eval(*make(op, 0, {a, b}), 0.0));
    return make(op, 0, {std::move(a), std::move(b)});
  }

  static NodePtr diff(const NodePtr& n) {
    const auto& a = n->args;
    switch (n->op) {
      case Op::kConst: return cst(0);
      case Op::kVar: return cst(1);
      case Op::kAdd: return add(diff(a[0]), diff(a[1]));
      case Op::kSub: return sub(diff(a[0]), diff(a[1]));
      case Op::kMul: return add(mul(diff(a[0]), a[1]), mul(a[0], diff(a[1])));
      case Op::kDiv:
        return div(sub(mul(diff(a[0]), a[1]), mul(a[0], diff(a[1]))), mul(a[1], a[1]));
      case Op::kPow: {
        if (a[1]->op == Op::kConst) {
          const double c = a[1]->value;
          return mul(mul(cst(c), pow(a[0], cst(c - 1.0))), diff(a[0]));
        }
        // d(u^v) = u^v (v' log u + v u'/u)
        return mul(n, add(mul(diff(a[1]), fn(Op::kLog, a[0])), div(mul(a[1], diff(a[0])), a[0])));
      }
      case Op::kNeg: return neg(diff(a[0]));
      case Op::kSin: return mul(fn(Op::kCos, a[0]), diff(a[0]));
      case Op::kCos: return neg(mul(fn(Op::kSin, a[0]), diff(a[0])));
      case Op::kTan: {
        auto c = fn(Op::kCos, a[0]);
        return div(diff(a[0]), mul(c, c));
      }
      case Op::kAtan: return div(diff(a[0]), add(cst(1), mul(a[0], a[0])));
      case Op::kExp: return mul(n, diff(a[0]));
      case Op::kLog: return div(diff(a[0]), a[0]);
      case Op::kSqrt: return div(diff(a[0]), mul(cst(2), n));
      case Op::kSinh: return mul(fn(Op::kCosh, a[0]), diff(a[0]));
      case Op::kCosh: return mul(fn(Op::kSinh, a[0]), diff(a[0]));
      case Op::kTanh: return mul(sub(cst(1), mul(n, n)), diff(a[0]));
      case Op::kAbs: return mul(fn(Op::kSign, a[0]), diff(a[0]));
      case Op::kSign: return cst(0);
      case Op::kMin: return branch(compare(Op::kLessEq, a[0], a[1]), diff(a[0]), diff(a[1]));
      case Op::kMax: return branch(compare(Op::kGreaterEq, a[0], a[1]), diff(a[0]), diff(a[1]));
      case Op::kIf: return branch(a[0], diff(a[1]), diff(a[2]));
      default: return cst(0);
    }
  }

  static void collect_breakpoints(const Node& n, std::vector<double>& out) {
    if (n.op == Op::kIf && is_comparison(n.args[0]->op)) {
      const Node& c = *n.args[0];
      if (c.args[0]->op == Op::kVar && c.args[1]->op == Op::kConst) out.push_back(c.args[1]->value);
      if (c.args[1]->op == Op::kVar && c.args[0]->op == Op::kConst) out.push_back(c.args[0]->value);
    }
    for (const auto& child : n.args) collect_breakpoints(*child, out);
  }

  static const char* name_of(Op op) {
    switch (op) {
      case Op::kSin: return "sin";
      case Op::kCos: return "cos";
      case Op::kTan: return "tan";
      case Op::kAtan: return "atan";
      case Op::kExp: return "exp";
      case Op::kLog: return "log";
      case Op::kSqrt: return "sqrt";
      case Op::kSinh: return "sinh";
      case Op::kCosh: return "cosh";
      case Op::kTanh: return "tanh";
      case Op::kAbs: return "abs";
      case Op::kSign: return "sign";
      case Op::kMin: return "min";
      case Op::kMax: return "max";
      case Op::kIf: return "if";
      default: return "?";
    }
  }

  static void print(std::ostream& os, const Node& n) {
    auto binary = [&](const char* sym) {
      os << '(';
      print(os, *n.args[0]);
      os << sym;
      print(os, *n.args[1]);
      os << ')';
    };
    switch (n.op) {
      case Op::kConst: os << n.value; return;
      case Op::kVar: os << 't'; return;
      case Op::kAdd: binary(" + "); return;
      case Op::kSub: binary(" - "); return;
      case Op::kMul: binary("*"); return;
      case Op::kDiv: binary("/"); return;
      case Op::kPow: binary("^"); return;
      case Op::kLess: binary(" < "); return;
      case Op::kLessEq: binary(" <= "); return;
      case Op::kGreater: binary(" > "); return;
      case Op::kGreaterEq: binary(" >= "); return;
      case Op::kNeg: os << "(-"; print(os, *n.args[0]); os << ')'; return;
      default:
        os << name_of(n.op) << '(';
        for (std::size_t i = 0; i < n.args.size(); ++i) {
          if (i) os << ", ";
          print(os, *n.args[i]);
        }
        os << ')';
    }
  }

  struct Parser {
    std::string_view s;
    std::size_t pos;

    [[noreturn]] void fail(const std::string& msg) const {
      throw ParseError("expression '" + std::string(s) + "': " + msg + " at column " +
                           std::to_string(pos + 1),
                       0);
    }
    void skip_ws() {
      while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool accept(std::string_view tok) {
      skip_ws();
      if (s.substr(pos, tok.size()) == tok) {
        pos += tok.size();
        return true;
      }
      return false;
    }
    void expect(char c) {
      if (!accept(std::string_view(&c, 1))) fail(std::string("expected '") + c + "'");
    }

    NodePtr parse_expr() {
      auto lhs = parse_sum();
      if (accept("<=")) return compare(Op::kLessEq, lhs, parse_sum());
      if (accept(">=")) return compare(Op::kGreaterEq, lhs, parse_sum());
      if (accept("<")) return compare(Op::kLess, lhs, parse_sum());
      if (accept(">")) return compare(Op::kGreater, lhs, parse_sum());
      return lhs;
    }
    NodePtr parse_sum() {
      auto lhs = parse_term();
      for (;;) {
        if (accept("+")) lhs = add(lhs, parse_term());
        else if (accept("-")) lhs = sub(lhs, parse_term());
        else return lhs;
      }
    }
    NodePtr parse_term() {
      auto lhs = parse_unary();
      for (;;) {
        if (accept("*")) lhs = mul(lhs, parse_unary());
        else if (accept("/")) lhs = div(lhs, parse_unary());
        else return lhs;
      }
    }
    NodePtr parse_unary() {
      if (accept("-")) return neg(parse_unary());
      if (accept("+")) return parse_unary();
      return parse_power();
    }
    NodePtr parse_power() {
      auto base = parse_primary();
      if (accept("^")) return pow(base, parse_unary());
      return base;
    }
    NodePtr parse_primary() {
      skip_ws();
      if (pos >= s.size()) fail("unexpected end of input");
      const char c = s[pos];
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        std::size_t end = pos;
        while (end < s.size() && (std::isdigit(static_cast<unsigned char>(s[end])) || s[end] == '.'))
          ++end;
        if (end < s.size() && (s[end] == 'e' || s[end] == 'E')) {
          std::size_t k = end + 1;
          if (k < s.size() && (s[k] == '+' || s[k] == '-')) ++k;
          if (k < s.size() && std::isdigit(static_cast<unsigned char>(s[k]))) {
            end = k;
            while (end < s.size() && std::isdigit(static_cast<unsigned char>(s[end]))) ++end;
          }
        }
        const std::string num(s.substr(pos, end - pos));
        std::size_t used = 0;
        double v = 0;
        try {
          v = std::stod(num, &used);
        } catch (const std::exception&) {
          fail("bad number '" + num + "'");
        }
        if (used != num.size()) fail("bad number '" + num + "'");
        pos = end;
        return cst(v);
      }
      if (c == '(') {
        ++pos;
        auto inner = parse_expr();
        expect(')');
        return inner;
      }
      if (std::isalpha(static_cast<unsigned char>(c))) {
        std::size_t end = pos;
        while (end < s.size() && (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '_'))
          ++end;
        const std::string name(s.substr(pos, end - pos));
        pos = end;
        if (name == "t") return make(Op::kVar, 0, {});
        if (name == "pi") return cst(std::numbers::pi);
        if (name == "e") return cst(std::numbers::e);
        static const std::pair<const char*, Op> kUnary[] = {
            {"sin", Op::kSin},   {"cos", Op::kCos},   {"tan", Op::kTan},   {"atan", Op::kAtan},
            {"exp", Op::kExp},   {"log", Op::kLog},   {"sqrt", Op::kSqrt}, {"sinh", Op::kSinh},
            {"cosh", Op::kCosh}, {"tanh", Op::kTanh}, {"abs", Op::kAbs},   {"sign", Op::kSign},
        };
        std::vector<NodePtr> args;
        expect('(');
        args.push_back(parse_expr());
        while (accept(",")) args.push_back(parse_expr());
        expect(')');
        for (const auto& [fname, op] : kUnary) {
          if (name == fname) {
            if (args.size() != 1) fail(name + " takes one argument");
            return fn(op, args[0]);
          }
        }
        if (name == "min" || name == "max") {
          if (args.size() != 2) fail(name + " takes two arguments");
          if (args[0]->op == Op::kConst && args[1]->op == Op::kConst)
            return cst(name == "min" ? std::min(args[0]->value, args[1]->value)
                                     : std::max(args[0]->value, args[1]->value));
          return make(name == "min" ? Op::kMin : Op::kMax, 0, std::move(args));
        }
        if (name == "if") {
          if (args.size() != 3) fail("if takes three arguments");
          return branch(args[0], args[1], args[2]);
        }
        fail("unknown function '" + name + "'");
      }
      fail(std::string("unexpected character '") + c + "'");
    }
  };

  NodePtr root_;
};

}  // namespace revsurf
