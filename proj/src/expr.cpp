#include "bdyn/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <system_error>

namespace bdyn {

namespace {

struct FunctionName {
  std::string_view name;
  Op op;
};

constexpr std::array<FunctionName, 5> kFunctions{{
    {"sin", Op::Sin},
    {"cos", Op::Cos},
    {"exp", Op::Exp},
    {"sqrt", Op::Sqrt},
    {"abs", Op::Abs},
}};

const std::vector<std::string> kOperandStart{"number", "identifier", "(", "-", "+"};

std::string format_number(double x) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf.data(), ptr);
}

bool is_const(const Expression& e, double c) {
  return e.nodes().size() == 1 && e.nodes()[0].op == Op::Const && e.nodes()[0].value == c;
}

bool is_any_const(const Expression& e) { return e.nodes().size() == 1 && e.nodes()[0].op == Op::Const; }

double const_value(const Expression& e) { return e.nodes()[0].value; }

}  // namespace

// Recursive-descent parser emitting nodes in post-order.
class Parser {
 public:
  Parser(std::string_view src, const std::vector<std::string>& vars) : src_(src), vars_(vars) {}

  std::vector<Node> run() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("empty expression", pos_, kOperandStart);
    parse_expr();
    skip_ws();
    if (pos_ < src_.size()) {
      throw ParseError("unexpected character '" + std::string(1, src_[pos_]) + "'", pos_,
                       {"operator", "end of input"});
    }
    return std::move(nodes_);
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  int emit(Node n) {
    nodes_.push_back(n);
    return static_cast<int>(nodes_.size()) - 1;
  }

  int parse_expr() {
    int lhs = parse_term();
    for (;;) {
      if (accept('+')) {
        const int rhs = parse_term();
        lhs = emit({Op::Add, lhs, rhs});
      } else if (accept('-')) {
        const int rhs = parse_term();
        lhs = emit({Op::Sub, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int parse_term() {
    int lhs = parse_unary();
    for (;;) {
      if (accept('*')) {
        const int rhs = parse_unary();
        lhs = emit({Op::Mul, lhs, rhs});
      } else if (accept('/')) {
        const int rhs = parse_unary();
        lhs = emit({Op::Div, lhs, rhs});
      } else {
        return lhs;
      }
    }
  }

  int parse_unary() {
    if (accept('-')) {
      const int a = parse_unary();
      return emit({Op::Neg, a});
    }
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  int parse_power() {
    const int base = parse_primary();
    skip_ws();
    const std::size_t at = pos_;
    if (!accept('^')) return base;
    const std::size_t exp_begin = nodes_.size();
    parse_unary();
    std::vector<Node> sub(nodes_.begin() + static_cast<std::ptrdiff_t>(exp_begin), nodes_.end());
    for (auto& n : sub) {
      if (n.op == Op::Var) throw ParseError("exponent must be constant", at + 1, {"constant exponent"});
      if (n.lhs >= 0) n.lhs -= static_cast<int>(exp_begin);
      if (n.rhs >= 0) n.rhs -= static_cast<int>(exp_begin);
    }
    nodes_.resize(exp_begin);
    const double exponent = Expression(std::move(sub), {}).eval({});
    Node n{Op::Pow, base};
    n.value = exponent;
    return emit(n);
  }

  int parse_primary() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_, kOperandStart);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      const int inner = parse_expr();
      if (!accept(')')) {
        skip_ws();
        throw ParseError("expected ')'", pos_, {")", "operator"});
      }
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    throw ParseError("unexpected character '" + std::string(1, c) + "'", pos_, kOperandStart);
  }

  int parse_number() {
    const std::size_t begin = pos_;
    auto digits = [&] {
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + begin, src_.data() + pos_, value);
    if (ec != std::errc() || ptr != src_.data() + pos_) throw ParseError("malformed number", begin, {"number"});
    Node n{Op::Const};
    n.value = value;
    return emit(n);
  }

  int parse_identifier() {
    const std::size_t begin = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(begin, pos_ - begin);

    for (const auto& fn : kFunctions) {
      if (fn.name == name) {
        if (!accept('(')) {
          skip_ws();
          throw ParseError("expected '(' after function name", pos_, {"("});
        }
        const int arg = parse_expr();
        if (!accept(')')) {
          skip_ws();
          throw ParseError("expected ')'", pos_, {")", "operator"});
        }
        return emit({fn.op, arg});
      }
    }
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i] == name) {
        Node n{Op::Var};
        n.var = static_cast<int>(i);
        return emit(n);
      }
    }
    if (name == "pi") {
      Node n{Op::Const};
      n.value = std::numbers::pi;
      return emit(n);
    }
    throw UnknownIdentifier(std::string(name), begin);
  }

  std::string_view src_;
  const std::vector<std::string>& vars_;
  std::vector<Node> nodes_;
  std::size_t pos_ = 0;
};

Expression Expression::parse(std::string_view src, std::vector<std::string> vars) {
  Parser p(src, vars);
  std::vector<Node> nodes = p.run();
  return Expression(std::move(nodes), std::move(vars));
}

Expression Expression::constant(double c, std::vector<std::string> vars) {
  Node n{Op::Const};
  n.value = c;
  return Expression({n}, std::move(vars));
}

Expression Expression::variable(int index, std::vector<std::string> vars) {
  if (index < 0 || index >= static_cast<int>(vars.size())) throw std::out_of_range("variable index");
  Node n{Op::Var};
  n.var = index;
  return Expression({n}, std::move(vars));
}

double Expression::eval(std::span<const double> point) const {
  thread_local std::vector<double> scratch;
  scratch.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    double r = 0.0;
    switch (n.op) {
      case Op::Const: r = n.value; break;
      case Op::Var: r = point[static_cast<std::size_t>(n.var)]; break;
      case Op::Neg: r = -scratch[n.lhs]; break;
      case Op::Add: r = scratch[n.lhs] + scratch[n.rhs]; break;
      case Op::Sub: r = scratch[n.lhs] - scratch[n.rhs]; break;
      case Op::Mul: r = scratch[n.lhs] * scratch[n.rhs]; break;
      case Op::Div:
        if (scratch[n.rhs] == 0.0) throw DomainError("division by zero");
        r = scratch[n.lhs] / scratch[n.rhs];
        break;
      case Op::Pow: r = pow_checked(scratch[n.lhs], n.value); break;
      case Op::Sin: r = std::sin(scratch[n.lhs]); break;
      case Op::Cos: r = std::cos(scratch[n.lhs]); break;
      case Op::Exp: r = std::exp(scratch[n.lhs]); break;
      case Op::Sqrt:
        if (scratch[n.lhs] < 0.0) throw DomainError("sqrt of negative argument");
        r = std::sqrt(scratch[n.lhs]);
        break;
      case Op::Abs: r = std::abs(scratch[n.lhs]); break;
    }
    scratch[i] = r;
  }
  if (nodes_.empty()) return 0.0;
  const double out = scratch.back();
  if (!std::isfinite(out)) throw DomainError("non-finite expression value");
  return out;
}

Jet2 Expression::eval_jet2(std::span<const double> point) const {
  thread_local std::vector<Jet2> scratch;
  scratch.resize(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    switch (n.op) {
      case Op::Const: scratch[i] = Jet2::constant(n.value); break;
      case Op::Var: scratch[i] = Jet2::variable(point[static_cast<std::size_t>(n.var)], n.var); break;
      case Op::Neg: scratch[i] = -scratch[n.lhs]; break;
      case Op::Add: scratch[i] = scratch[n.lhs] + scratch[n.rhs]; break;
      case Op::Sub: scratch[i] = scratch[n.lhs] - scratch[n.rhs]; break;
      case Op::Mul: scratch[i] = scratch[n.lhs] * scratch[n.rhs]; break;
      case Op::Div: scratch[i] = scratch[n.lhs] / scratch[n.rhs]; break;
      case Op::Pow: scratch[i] = pow(scratch[n.lhs], n.value); break;
      case Op::Sin: scratch[i] = sin(scratch[n.lhs]); break;
      case Op::Cos: scratch[i] = cos(scratch[n.lhs]); break;
      case Op::Exp: scratch[i] = exp(scratch[n.lhs]); break;
      case Op::Sqrt: scratch[i] = sqrt(scratch[n.lhs]); break;
      case Op::Abs: scratch[i] = abs(scratch[n.lhs]); break;
    }
  }
  if (nodes_.empty()) return Jet2::constant(0.0);
  const Jet2 out = scratch.back();
  if (!std::isfinite(out.value())) throw DomainError("non-finite expression value");
  return out;
}

std::string Expression::to_string() const {
  if (nodes_.empty()) return "0";
  auto rec = [this](auto&& self, int i) -> std::string {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    switch (n.op) {
      case Op::Const:
        return n.value < 0.0 ? "(-" + format_number(-n.value) + ")" : format_number(n.value);
      case Op::Var: return vars_[static_cast<std::size_t>(n.var)];
      case Op::Neg: return "(-" + self(self, n.lhs) + ")";
      case Op::Add: return "(" + self(self, n.lhs) + " + " + self(self, n.rhs) + ")";
      case Op::Sub: return "(" + self(self, n.lhs) + " - " + self(self, n.rhs) + ")";
      case Op::Mul: return "(" + self(self, n.lhs) + " * " + self(self, n.rhs) + ")";
      case Op::Div: return "(" + self(self, n.lhs) + " / " + self(self, n.rhs) + ")";
      case Op::Pow: {
        const std::string e = n.value < 0.0 ? "(-" + format_number(-n.value) + ")" : format_number(n.value);
        return "(" + self(self, n.lhs) + "^" + e + ")";
      }
      case Op::Sin: return "sin(" + self(self, n.lhs) + ")";
      case Op::Cos: return "cos(" + self(self, n.lhs) + ")";
      case Op::Exp: return "exp(" + self(self, n.lhs) + ")";
      case Op::Sqrt: return "sqrt(" + self(self, n.lhs) + ")";
      case Op::Abs: return "abs(" + self(self, n.lhs) + ")";
    }
    return {};
  };
  return rec(rec, static_cast<int>(nodes_.size()) - 1);
}

bool Expression::depends_on(int var) const {
  return std::any_of(nodes_.begin(), nodes_.end(), [var](const Node& n) { return n.op == Op::Var && n.var == var; });
}

bool Expression::is_constant() const {
  return std::none_of(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.op == Op::Var; });
}

int Expression::subtree_start(int root) const {
  const Node& n = nodes_[static_cast<std::size_t>(root)];
  return n.lhs < 0 ? root : subtree_start(n.lhs);
}

Expression Expression::subtree(int root) const {
  const int start = subtree_start(root);
  std::vector<Node> out(nodes_.begin() + start, nodes_.begin() + root + 1);
  for (auto& n : out) {
    if (n.lhs >= 0) n.lhs -= start;
    if (n.rhs >= 0) n.rhs -= start;
  }
  return Expression(std::move(out), vars_);
}

Expression Expression::unary(Op op, const Expression& a, double value) {
  std::vector<Node> out = a.nodes_;
  Node n{op, static_cast<int>(out.size()) - 1};
  n.value = value;
  out.push_back(n);
  return Expression(std::move(out), a.vars_);
}

Expression Expression::binary(Op op, const Expression& a, const Expression& b) {
  if (a.vars_ != b.vars_) throw std::invalid_argument("expressions over different variable lists");
  std::vector<Node> out = a.nodes_;
  const int offset = static_cast<int>(out.size());
  for (Node n : b.nodes_) {
    if (n.lhs >= 0) n.lhs += offset;
    if (n.rhs >= 0) n.rhs += offset;
    out.push_back(n);
  }
  out.push_back({op, offset - 1, static_cast<int>(out.size()) - 1});
  return Expression(std::move(out), a.vars_);
}

Expression operator+(const Expression& a, const Expression& b) {
  if (is_any_const(a) && is_any_const(b)) return Expression::constant(const_value(a) + const_value(b), a.vars_);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return Expression::binary(Op::Add, a, b);
}

Expression operator-(const Expression& a, const Expression& b) {
  if (is_any_const(a) && is_any_const(b)) return Expression::constant(const_value(a) - const_value(b), a.vars_);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return -b;
  return Expression::binary(Op::Sub, a, b);
}

Expression operator*(const Expression& a, const Expression& b) {
  if (is_any_const(a) && is_any_const(b)) return Expression::constant(const_value(a) * const_value(b), a.vars_);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return Expression::constant(0.0, a.vars_);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return Expression::binary(Op::Mul, a, b);
}

Expression operator/(const Expression& a, const Expression& b) {
  if (is_const(b, 1.0)) return a;
  if (is_const(a, 0.0) && !is_const(b, 0.0)) return Expression::constant(0.0, a.vars_);
  return Expression::binary(Op::Div, a, b);
}

Expression operator-(const Expression& a) {
  if (is_any_const(a)) return Expression::constant(-const_value(a), a.vars_);
  if (a.nodes_.back().op == Op::Neg) return a.subtree(a.nodes_.back().lhs);
  return Expression::unary(Op::Neg, a);
}

Expression pow(const Expression& a, double p) {
  if (p == 0.0) return Expression::constant(1.0, a.vars_);
  if (p == 1.0) return a;
  return Expression::unary(Op::Pow, a, p);
}

Expression sin(const Expression& a) { return Expression::unary(Op::Sin, a); }
Expression cos(const Expression& a) { return Expression::unary(Op::Cos, a); }
Expression exp(const Expression& a) { return Expression::unary(Op::Exp, a); }
Expression sqrt(const Expression& a) { return Expression::unary(Op::Sqrt, a); }
Expression abs(const Expression& a) { return Expression::unary(Op::Abs, a); }

Expression Expression::derivative(int var) const {
  if (nodes_.empty()) return constant(0.0, vars_);
  auto rec = [&](auto&& self, int i) -> Expression {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    switch (n.op) {
      case Op::Const: return constant(0.0, vars_);
      case Op::Var: return constant(n.var == var ? 1.0 : 0.0, vars_);
      case Op::Neg: return -self(self, n.lhs);
      case Op::Add: return self(self, n.lhs) + self(self, n.rhs);
      case Op::Sub: return self(self, n.lhs) - self(self, n.rhs);
      case Op::Mul: {
        const Expression a = subtree(n.lhs), b = subtree(n.rhs);
        return self(self, n.lhs) * b + a * self(self, n.rhs);
      }
      case Op::Div: {
        const Expression a = subtree(n.lhs), b = subtree(n.rhs);
        return (self(self, n.lhs) * b - a * self(self, n.rhs)) / pow(b, 2.0);
      }
      case Op::Pow: {
        const Expression a = subtree(n.lhs);
        return constant(n.value, vars_) * pow(a, n.value - 1.0) * self(self, n.lhs);
      }
      case Op::Sin: return cos(subtree(n.lhs)) * self(self, n.lhs);
      case Op::Cos: return -(sin(subtree(n.lhs)) * self(self, n.lhs));
      case Op::Exp: return exp(subtree(n.lhs)) * self(self, n.lhs);
      case Op::Sqrt: return self(self, n.lhs) / (constant(2.0, vars_) * sqrt(subtree(n.lhs)));
      case Op::Abs: {
        const Expression a = subtree(n.lhs);
        return self(self, n.lhs) * a / abs(a);
      }
    }
    return constant(0.0, vars_);
  };
  return rec(rec, static_cast<int>(nodes_.size()) - 1);
}

Expression Expression::substitute(int var, const Expression& replacement) const {
  if (replacement.vars_ != vars_) throw std::invalid_argument("substitution over different variable lists");
  if (nodes_.empty()) return *this;
  auto rec = [&](auto&& self, int i) -> Expression {
    const Node& n = nodes_[static_cast<std::size_t>(i)];
    switch (n.op) {
      case Op::Const: return constant(n.value, vars_);
      case Op::Var: return n.var == var ? replacement : variable(n.var, vars_);
      case Op::Neg: return unary(Op::Neg, self(self, n.lhs));
      case Op::Pow: return unary(Op::Pow, self(self, n.lhs), n.value);
      case Op::Sin:
      case Op::Cos:
      case Op::Exp:
      case Op::Sqrt:
      case Op::Abs: return unary(n.op, self(self, n.lhs));
      case Op::Add:
      case Op::Sub:
      case Op::Mul:
      case Op::Div: return binary(n.op, self(self, n.lhs), self(self, n.rhs));
    }
    return constant(0.0, vars_);
  };
  return rec(rec, static_cast<int>(nodes_.size()) - 1);
}

}  // namespace bdyn
