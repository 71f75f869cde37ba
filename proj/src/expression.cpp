// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
#include "expression.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "error.hpp"

namespace hd {

enum class Op { kConst, kVar, kAdd, kSub, kMul, kDiv, kPow, kNeg, kExp, kSin, kCos, kLog };

struct ExprNode {
  Op op = Op::kConst;
  double value = 0.0;
  int var = 0;
  std::shared_ptr<const ExprNode> a, b;
};

namespace {

using NodeP = std::shared_ptr<const ExprNode>;

NodeP make_const(double c) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::kConst;
  n->value = c;
  return n;
}

NodeP make_var(int v) {
  auto n = std::make_shared<ExprNode>();
  n->op = Op::kVar;
  n->var = v;
  return n;
}

bool is_const(const NodeP& n, double c) { return n->op == Op::kConst && n->value == c; }

// Light constant folding keeps derivative trees from exploding.
NodeP make(Op op, NodeP a, NodeP b = nullptr) {
  const bool ca = a && a->op == Op::kConst, cb = b && b->op == Op::kConst;
  switch (op) {
    case Op::kAdd:
      if (ca && cb) return make_const(a->value + b->value);
      if (is_const(a, 0)) return b;
      if (is_const(b, 0)) return a;
      break;
    case Op::kSub:
      if (ca && cb) return make_const(a->value - b->value);
      if (is_const(b, 0)) return a;
      if (is_const(a, 0)) return make(Op::kNeg, b);
      break;
    case Op::kMul:
      if (ca && cb) return make_const(a->value * b->value);
      if (is_const(a, 0) || is_const(b, 0)) return make_const(0);
      if (is_const(a, 1)) return b;
      if (is_const(b, 1)) return a;
      break;
    case Op::kDiv:
      if (ca && cb && b->value != 0) return make_const(a->value / b->value);
      if (is_const(a, 0)) return make_const(0);
      if (is_const(b, 1)) return a;
      break;
    case Op::kPow:
      if (ca && cb) return make_const(std::pow(a->value, b->value));
      if (is_const(b, 0)) return make_const(1);
      if (is_const(b, 1)) return a;
      break;
    case Op::kNeg:
      if (ca) return make_const(-a->value);
      if (a->op == Op::kNeg) return a->a;
      break;
    case Op::kExp:
      if (ca) return make_const(std::exp(a->value));
      break;
    case Op::kSin:
      if (ca) return make_const(std::sin(a->value));
      break;
    case Op::kCos:
      if (ca) return make_const(std::cos(a->value));
      break;
    case Op::kLog:
      if (ca && a->value > 0) return make_const(std::log(a->value));
      break;
    default:
      break;
  }
  auto n = std::make_shared<ExprNode>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

class Parser {
 public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodeP run() {
    NodeP n = expr();
    skip();
    if (pos_ != s_.size()) error("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorCode::kParse, "expression column " + std::to_string(pos_ + 1) + ": " + msg +
                                " in \"" + s_ + "\"");
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

  NodeP expr() {
    NodeP n = term();
    for (;;) {
      if (accept('+'))
        n = make(Op::kAdd, n, term());
      else if (accept('-'))
        n = make(Op::kSub, n, term());
      else
        return n;
    }
  }

  NodeP term() {
    NodeP n = unary();
    for (;;) {
      if (accept('*'))
        n = make(Op::kMul, n, unary());
      else if (accept('/'))
        n = make(Op::kDiv, n, unary());
      else
        return n;
    }
  }

  NodeP unary() {
    if (accept('-')) return make(Op::kNeg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodeP power() {
    NodeP base = atom();
    if (accept('^')) return make(Op::kPow, base, unary());
    return base;
  }

  NodeP atom() {
    skip();
    if (pos_ >= s_.size()) error("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NodeP n = expr();
      if (!accept(')')) error("expected ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      const char* begin = s_.c_str() + pos_;
      char* end = nullptr;
      const double v = std::strtod(begin, &end);
      if (end == begin) error("malformed number");
      pos_ += static_cast<size_t>(end - begin);
      return make_const(v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "x") return make_var(0);
      if (id == "y") return make_var(1);
      if (id == "z") return make_var(2);
      if (id == "pi") return make_const(M_PI);
      Op op;
      if (id == "exp")
        op = Op::kExp;
      else if (id == "sin")
        op = Op::kSin;
      else if (id == "cos")
        op = Op::kCos;
      else if (id == "log")
        op = Op::kLog;
      else {
        pos_ = start;
        error("unknown identifier '" + id + "'");
      }
      if (!accept('(')) error("expected '(' after " + id);
      NodeP arg = expr();
      if (!accept(')')) error("expected ')'");
      return make(op, arg);
    }
    error("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  size_t pos_ = 0;
};

double eval_node(const ExprNode& n, const double* x) {
  switch (n.op) {
    case Op::kConst: return n.value;
    case Op::kVar: return x[n.var];
    case Op::kAdd: return eval_node(*n.a, x) + eval_node(*n.b, x);
    case Op::kSub: return eval_node(*n.a, x) - eval_node(*n.b, x);
    case Op::kMul: return eval_node(*n.a, x) * eval_node(*n.b, x);
    case Op::kDiv: return eval_node(*n.a, x) / eval_node(*n.b, x);
    case Op::kPow: return std::pow(eval_node(*n.a, x), eval_node(*n.b, x));
    case Op::kNeg: return -eval_node(*n.a, x);
    case Op::kExp: return std::exp(eval_node(*n.a, x));
    case Op::kSin: return std::sin(eval_node(*n.a, x));
    case Op::kCos: return std::cos(eval_node(*n.a, x));
    case Op::kLog: return std::log(eval_node(*n.a, x));
  }
  return 0.0;
}

NodeP diff(const NodeP& n, int v) {
  switch (n->op) {
    case Op::kConst: return make_const(0);
    case Op::kVar: return make_const(n->var == v ? 1 : 0);
    case Op::kAdd: return make(Op::kAdd, diff(n->a, v), diff(n->b, v));
    case Op::kSub: return make(Op::kSub, diff(n->a, v), diff(n->b, v));
    case Op::kMul:
      return make(Op::kAdd, make(Op::kMul, diff(n->a, v), n->b),
                  make(Op::kMul, n->a, diff(n->b, v)));
    case Op::kDiv:
      return make(Op::kDiv,
                  make(Op::kSub, make(Op::kMul, diff(n->a, v), n->b),
                       make(Op::kMul, n->a, diff(n->b, v))),
                  make(Op::kMul, n->b, n->b));
    case Op::kPow: {
      const NodeP da = diff(n->a, v), db = diff(n->b, v);
      if (n->b->op == Op::kConst) {
        const double c = n->b->value;
        return make(Op::kMul, make(Op::kMul, make_const(c), make(Op::kPow, n->a, make_const(c - 1))),
                    da);
      }
      // d(a^b) = a^b (b' log a + b a'/a)
      return make(Op::kMul, n,
                  make(Op::kAdd, make(Op::kMul, db, make(Op::kLog, n->a)),
                       make(Op::kDiv, make(Op::kMul, n->b, da), n->a)));
    }
    case Op::kNeg: return make(Op::kNeg, diff(n->a, v));
    case Op::kExp: return make(Op::kMul, n, diff(n->a, v));
    case Op::kSin: return make(Op::kMul, make(Op::kCos, n->a), diff(n->a, v));
    case Op::kCos: return make(Op::kNeg, make(Op::kMul, make(Op::kSin, n->a), diff(n->a, v)));
    case Op::kLog: return make(Op::kDiv, diff(n->a, v), n->a);
  }
  return make_const(0);
}

int max_var(const ExprNode& n) {
  int m = n.op == Op::kVar ? n.var : -1;
  if (n.a) m = std::max(m, max_var(*n.a));
  if (n.b) m = std::max(m, max_var(*n.b));
  return m;
}

void print(const ExprNode& n, std::ostringstream& os) {
  auto bin = [&](const char* sym) {
    os << '(';
    print(*n.a, os);
    os << sym;
    print(*n.b, os);
    os << ')';
  };
  auto fn = [&](const char* name) {
    os << name << '(';
    print(*n.a, os);
    os << ')';
  };
  switch (n.op) {
    case Op::kConst: os << n.value; break;
    case Op::kVar: os << "xyz"[n.var]; break;
    case Op::kAdd: bin(" + "); break;
    case Op::kSub: bin(" - "); break;
    case Op::kMul: bin("*"); break;
    case Op::kDiv: bin("/"); break;
    case Op::kPow: bin("^"); break;
    case Op::kNeg: os << "(-"; print(*n.a, os); os << ')'; break;
    case Op::kExp: fn("exp"); break;
    case Op::kSin: fn("sin"); break;
    case Op::kCos: fn("cos"); break;
    case Op::kLog: fn("log"); break;
  }
}

}  // namespace

Expression::Expression() : node_(make_const(0)) {}

Expression Expression::parse(const std::string& text) { return Expression(Parser(text).run()); }

Expression Expression::constant(double c) { return Expression(make_const(c)); }

double Expression::eval(const double* x) const { return eval_node(*node_, x); }

Expression Expression::derivative(int var) const { return Expression(diff(node_, var)); }

int Expression::max_variable() const { return max_var(*node_); }

bool Expression::is_constant() const { return node_->op == Op::kConst; }

std::string Expression::to_string() const {
  std::ostringstream os;
  os.precision(17);
  print(*node_, os);
  return os.str();
}

}  // namespace hd
