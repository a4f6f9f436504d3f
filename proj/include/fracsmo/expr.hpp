#pragma once

// Scalar expressions over the plant state x1..xn and time t.
//
// Grammar (lowest to highest precedence):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | 'pi' | 't' | 'x'<index> | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | tan | exp | sqrt | abs | sign

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace fracsmo {

class Expr {
 public:
  struct Node;

  /// Throws ParseError (with a character offset) on malformed text or an
  /// unknown identifier.
  static Expr parse(std::string_view text);

  /// Evaluates with x_i = state[i - 1]. sign(0) is 0. Throws EvalError naming
  /// the offending subexpression when a result is not finite, and
  /// PreconditionError when `state` is shorter than max_state_index().
  double eval(std::span<const double> state, double time) const;

  /// Fully parenthesised text that parses back to an identical tree.
  std::string print() const;

  /// Largest i such that x_i appears; 0 when the state is not referenced.
  std::size_t max_state_index() const { return max_index_; }
  bool uses_time() const { return uses_time_; }

 private:
  explicit Expr(std::shared_ptr<const Node> root);

  std::shared_ptr<const Node> root_;
  std::size_t max_index_ = 0;
  bool uses_time_ = false;
};

inline Expr parse(std::string_view text) { return Expr::parse(text); }
inline double eval(const Expr& e, std::span<const double> state, double time) {
  return e.eval(state, time);
}
inline std::string print(const Expr& e) { return e.print(); }

}  // namespace fracsmo
