// Copyright 2026 The hypodecay Authors
// SPDX-License-Identifier: Apache-2.0
//
// Small arithmetic grammar for potentials and diffusion coefficients:
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := ('+'|'-') unary | power
//   power  := atom ('^' unary)?          (right associative)
//   atom   := number | var | func '(' expr ')' | '(' expr ')'
// Variables are x, y, z (coordinates 0, 1, 2). Functions: exp, sin, cos, log.
#pragma once

#include <memory>
#include <string>

namespace hd {

struct ExprNode;

class Expression {
 public:
  Expression();  // the constant 0
  static Expression parse(const std::string& text);
  static Expression constant(double c);

  double eval(const double* x) const;
  double eval1(double x) const { return eval(&x); }

  Expression derivative(int var) const;
  int max_variable() const;  // -1 if constant
  bool is_constant() const;
  std::string to_string() const;

  explicit Expression(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
  const std::shared_ptr<const ExprNode>& node() const { return node_; }

 private:
  std::shared_ptr<const ExprNode> node_;
};

}  // namespace hd
