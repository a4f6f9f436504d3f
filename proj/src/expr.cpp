#include "fracsmo/expr.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cctype>
#include <cmath>
#include <numbers>
#include <utility>

#include "fracsmo/errors.hpp"

namespace fracsmo {

enum class Op { Literal, Pi, Time, State, Neg, Add, Sub, Mul, Div, Pow, Call };
enum class Func { Sin, Cos, Tan, Exp, Sqrt, Abs, Sign };

struct Expr::Node {
  Op op = Op::Literal;
  double value = 0.0;
  std::size_t index = 0;
  Func func = Func::Sin;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expr::Node>;

constexpr std::array<std::pair<std::string_view, Func>, 7> kFunctions{{
    {"sin", Func::Sin},
    {"cos", Func::Cos},
    {"tan", Func::Tan},
    {"exp", Func::Exp},
    {"sqrt", Func::Sqrt},
    {"abs", Func::Abs},
    {"sign", Func::Sign},
}};

std::string_view func_name(Func f) {
  for (const auto& [name, fn] : kFunctions)
    if (fn == f) return name;
  return "?";
}

NodePtr make(Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr) {
  auto n = std::make_shared<Expr::Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr run() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_);
    auto root = expression();
    skip_ws();
    if (pos_ != text_.size()) {
      throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    }
    return root;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) {
      if (pos_ == text_.size())
        throw ParseError(std::string("expected '") + c + "' but reached end of input", pos_);
      throw ParseError(std::string("expected '") + c + "'", pos_);
    }
  }

  NodePtr expression() {
    auto lhs = term();
    for (;;) {
      if (accept('+'))
        lhs = make(Op::Add, lhs, term());
      else if (accept('-'))
        lhs = make(Op::Sub, lhs, term());
      else
        return lhs;
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*'))
        lhs = make(Op::Mul, lhs, unary());
      else if (accept('/'))
        lhs = make(Op::Div, lhs, unary());
      else
        return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ == text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = expression();
      expect(')');
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto is_digit = [&](std::size_t i) {
      return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
    };
    while (is_digit(pos_)) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (is_digit(pos_)) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (is_digit(p)) {
        pos_ = p;
        while (is_digit(pos_)) ++pos_;
      }
    }
    double v = 0.0;
    const auto* first = text_.data() + start;
    const auto* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
      throw ParseError("malformed number '" + std::string(first, last) + "'", start);
    }
    auto n = std::make_shared<Expr::Node>();
    n->op = Op::Literal;
    n->value = v;
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    for (const auto& [fname, fn] : kFunctions) {
      if (name == fname) {
        if (!accept('(')) throw ParseError("expected '(' after " + std::string(name), pos_);
        auto arg = expression();
        expect(')');
        auto n = std::make_shared<Expr::Node>();
        n->op = Op::Call;
        n->func = fn;
        n->lhs = std::move(arg);
        return n;
      }
    }
    if (name == "pi") return make(Op::Pi);
    if (name == "t") return make(Op::Time);
    if (name.size() >= 2 && name[0] == 'x' && name[1] != '0') {
      std::size_t idx = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), idx);
      if (ec == std::errc{} && ptr == name.data() + name.size() && idx >= 1) {
        auto n = std::make_shared<Expr::Node>();
        n->op = Op::State;
        n->index = idx;
        return n;
      }
    }
    throw ParseError("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void print_node(const Expr::Node& n, std::string& out) {
  auto binary = [&](std::string_view sym) {
    out += '(';
    print_node(*n.lhs, out);
    out += ' ';
    out += sym;
    out += ' ';
    print_node(*n.rhs, out);
    out += ')';
  };
  switch (n.op) {
    case Op::Literal: {
      std::array<char, 64> buf{};
      auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), n.value);
      (void)ec;
      const std::string_view digits(buf.data(), ptr - buf.data());
      if (n.value < 0.0) {
        out += "(-";
        out += digits.substr(1);
        out += ')';
      } else {
        out += digits;
      }
      return;
    }
    case Op::Pi: out += "pi"; return;
    case Op::Time: out += 't'; return;
    case Op::State:
      out += 'x';
      out += std::to_string(n.index);
      return;
    case Op::Neg:
      out += "(-";
      print_node(*n.lhs, out);
      out += ')';
      return;
    case Op::Add: binary("+"); return;
    case Op::Sub: binary("-"); return;
    case Op::Mul: binary("*"); return;
    case Op::Div: binary("/"); return;
    case Op::Pow: binary("^"); return;
    case Op::Call:
      out += func_name(n.func);
      out += '(';
      print_node(*n.lhs, out);
      out += ')';
      return;
  }
}

double apply(Func f, double v) {
  switch (f) {
    case Func::Sin: return std::sin(v);
    case Func::Cos: return std::cos(v);
    case Func::Tan: return std::tan(v);
    case Func::Exp: return std::exp(v);
    case Func::Sqrt: return std::sqrt(v);
    case Func::Abs: return std::abs(v);
    case Func::Sign: return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
  }
  return 0.0;
}

double eval_node(const Expr::Node& n, std::span<const double> x, double t) {
  double v = 0.0;
  switch (n.op) {
    case Op::Literal: v = n.value; break;
    case Op::Pi: v = std::numbers::pi; break;
    case Op::Time: v = t; break;
    case Op::State: v = x[n.index - 1]; break;
    case Op::Neg: v = -eval_node(*n.lhs, x, t); break;
    case Op::Add: v = eval_node(*n.lhs, x, t) + eval_node(*n.rhs, x, t); break;
    case Op::Sub: v = eval_node(*n.lhs, x, t) - eval_node(*n.rhs, x, t); break;
    case Op::Mul: v = eval_node(*n.lhs, x, t) * eval_node(*n.rhs, x, t); break;
    case Op::Div: {
      const double num = eval_node(*n.lhs, x, t);
      const double den = eval_node(*n.rhs, x, t);
      if (den == 0.0) {
        std::string text;
        print_node(n, text);
        throw EvalError("division by zero in " + text);
      }
      v = num / den;
      break;
    }
    case Op::Pow: v = std::pow(eval_node(*n.lhs, x, t), eval_node(*n.rhs, x, t)); break;
    case Op::Call: v = apply(n.func, eval_node(*n.lhs, x, t)); break;
  }
  if (!std::isfinite(v)) {
    std::string text;
    print_node(n, text);
    throw EvalError("non-finite value in " + text);
  }
  return v;
}

void scan(const Expr::Node& n, std::size_t& max_index, bool& uses_time) {
  if (n.op == Op::State) max_index = std::max(max_index, n.index);
  if (n.op == Op::Time) uses_time = true;
  if (n.lhs) scan(*n.lhs, max_index, uses_time);
  if (n.rhs) scan(*n.rhs, max_index, uses_time);
}

}  // namespace

Expr::Expr(std::shared_ptr<const Node> root) : root_(std::move(root)) {
  scan(*root_, max_index_, uses_time_);
}

Expr Expr::parse(std::string_view text) { return Expr(Parser(text).run()); }

double Expr::eval(std::span<const double> state, double time) const {
  if (state.size() < max_index_) {
    throw PreconditionError("expression references x" + std::to_string(max_index_) +
                            " but the state has " + std::to_string(state.size()) + " entries");
  }
  return eval_node(*root_, state, time);
}

std::string Expr::print() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

}  // namespace fracsmo
