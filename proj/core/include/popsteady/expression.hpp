#pragma once

// Arithmetic expressions for rate functions.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative, binds tighter than unary minus
//   primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//
// Functions: exp(x), log(x), min(x, y), max(x, y), indicator(lo, hi, x)
// (1 when lo <= x <= hi, else 0).

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace popsteady {

struct ExprNode;

/// Immutable parsed expression. Copies share the tree.
class Expression {
 public:
  /// Throws ParseError with a 1-based position.
  static Expression parse(std::string_view text);

  /// Fully parenthesized normal form; parse(unparse(e)) has the same normal form.
  std::string unparse() const;

  /// Free variable names, sorted.
  std::vector<std::string> variables() const;

  double evaluate(const std::map<std::string, double, std::less<>>& bindings) const;

  const ExprNode& root() const noexcept { return *root_; }

 private:
  explicit Expression(std::shared_ptr<const ExprNode> root) : root_(std::move(root)) {}
  std::shared_ptr<const ExprNode> root_;
  friend class CompiledExpression;
};

Expression parse_rate_expression(std::string_view text);

/// Throws UnboundVariable for a missing binding and DomainError for log of a
/// nonpositive number, division by zero or any non-finite result.
double eval_rate(const Expression& expr, const std::map<std::string, double, std::less<>>& bindings);

/// Stack-machine form of an expression with variables resolved to slots.
/// Variable-free subtrees are folded to constants.
class CompiledExpression {
 public:
  /// `slots` maps every accepted variable name to an index into the
  /// argument array; several names may share one slot. `constants` are
  /// folded in. Throws UnboundVariable for any other name.
  CompiledExpression(const Expression& expr, const std::map<std::string, int, std::less<>>& slots,
                     const std::map<std::string, double, std::less<>>& constants = {});

  /// Same error contract as eval_rate.
  double operator()(const double* args) const;

  bool is_constant() const noexcept { return ops_.size() == 1 && ops_[0].code == Op::Const; }
  /// Slots the expression reads.
  const std::vector<int>& used_slots() const noexcept { return used_; }

 private:
  enum class Op : unsigned char { Const, Load, Neg, Add, Sub, Mul, Div, Pow, Exp, Log, Min, Max, Indicator };
  struct Instr {
    Op code;
    int slot;
    double value;
  };
  void emit(const ExprNode& node, const std::map<std::string, int, std::less<>>& slots,
            const std::map<std::string, double, std::less<>>& constants);

  std::vector<Instr> ops_;
  std::vector<int> used_;
  int depth_ = 0;
};

}  // namespace popsteady
