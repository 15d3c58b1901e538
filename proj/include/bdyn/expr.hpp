#pragma once
// Scalar-field expressions over named chart coordinates.
//
// Grammar (whitespace-insensitive):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | 'pi' | variable | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | sqrt | abs
// Exponents must be constant; they are folded to a number at parse time.
//
// The tree is stored flat in post-order (children precede parents, the root
// is last, every subtree is a contiguous range). Expressions are immutable
// and evaluation is reentrant.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bdyn/jet.hpp"

namespace bdyn {

enum class Op : std::uint8_t { Const, Var, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Sqrt, Abs };

struct Node {
  Op op = Op::Const;
  int lhs = -1;         // first child
  int rhs = -1;         // second child (binary ops)
  double value = 0.0;   // constant, or exponent for Pow
  int var = -1;         // variable index for Var

  bool operator==(const Node&) const = default;
};

class Expression {
 public:
  Expression() = default;

  static Expression parse(std::string_view src, std::vector<std::string> vars);
  static Expression constant(double c, std::vector<std::string> vars);
  static Expression variable(int index, std::vector<std::string> vars);

  // Value only. Checks division by zero, sqrt of negatives, and real powers.
  double eval(std::span<const double> point) const;
  // Value, gradient and Hessian in one pass. Additionally rejects points where
  // sqrt or abs are not differentiable.
  Jet2 eval_jet2(std::span<const double> point) const;

  std::string to_string() const;

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<std::string>& variables() const { return vars_; }
  bool empty() const { return nodes_.empty(); }
  bool depends_on(int var) const;
  bool is_constant() const;

  // Symbolic partial derivative; applies only trivial folding (0 and 1 identities).
  Expression derivative(int var) const;
  // Replaces every occurrence of variable `var` by `replacement`.
  Expression substitute(int var, const Expression& replacement) const;

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);
  friend Expression pow(const Expression& a, double p);
  friend Expression sin(const Expression& a);
  friend Expression cos(const Expression& a);
  friend Expression exp(const Expression& a);
  friend Expression sqrt(const Expression& a);
  friend Expression abs(const Expression& a);

  // Structural (AST) equality, including the variable list.
  bool operator==(const Expression&) const = default;

 private:
  Expression(std::vector<Node> nodes, std::vector<std::string> vars)
      : nodes_(std::move(nodes)), vars_(std::move(vars)) {}

  static Expression unary(Op op, const Expression& a, double value = 0.0);
  static Expression binary(Op op, const Expression& a, const Expression& b);
  Expression subtree(int root) const;
  int subtree_start(int root) const;

  std::vector<Node> nodes_;
  std::vector<std::string> vars_;

  friend class Parser;
};

}  // namespace bdyn
