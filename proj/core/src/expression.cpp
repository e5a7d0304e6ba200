#include "popsteady/expression.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <set>

#include "popsteady/error.hpp"

namespace popsteady {

struct ExprNode {
  enum class Kind { Number, Variable, Negate, Binary, Call };
  Kind kind = Kind::Number;
  double value = 0.0;
  std::string name;  // variable or function name
  char op = 0;       // binary operator
  std::vector<std::shared_ptr<const ExprNode>> args;
};

namespace {

using NodePtr = std::shared_ptr<const ExprNode>;

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  (void)ec;
  return std::string(buf.data(), end);
}

int arity(std::string_view fn) {
  if (fn == "exp" || fn == "log") return 1;
  if (fn == "min" || fn == "max") return 2;
  if (fn == "indicator") return 3;
  return -1;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  NodePtr parse() {
    NodePtr e = expr();
    skip();
    if (pos_ < text_.size()) fail("operator or end of input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& expected) const { throw ParseError(pos_ + 1, expected); }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static NodePtr binary(char op, NodePtr a, NodePtr b) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Binary;
    n->op = op;
    n->args = {std::move(a), std::move(b)};
    return n;
  }

  NodePtr expr() {
    NodePtr left = term();
    for (;;) {
      if (accept('+')) {
        left = binary('+', left, term());
      } else if (accept('-')) {
        left = binary('-', left, term());
      } else {
        return left;
      }
    }
  }

  NodePtr term() {
    NodePtr left = unary();
    for (;;) {
      if (accept('*')) {
        left = binary('*', left, unary());
      } else if (accept('/')) {
        left = binary('/', left, unary());
      } else {
        return left;
      }
    }
  }

  NodePtr unary() {
    if (accept('-')) {
      auto n = std::make_shared<ExprNode>();
      n->kind = ExprNode::Kind::Negate;
      n->args = {unary()};
      return n;
    }
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return binary('^', base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= text_.size()) fail("number, name or '('");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expr();
      if (!accept(')')) fail("')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return name();
    fail("number, name or '('");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        digits();
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail("number");
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Number;
    n->value = v;
    return n;
  }

  NodePtr name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    std::string id(text_.substr(start, pos_ - start));
    skip();
    if (pos_ < text_.size() && text_[pos_] == '(') {
      const int n_args = arity(id);
      if (n_args < 0) {
        pos_ = start;
        fail("one of exp, log, min, max, indicator");
      }
      ++pos_;
      auto n = std::make_shared<ExprNode>();
      n->kind = ExprNode::Kind::Call;
      n->name = id;
      for (int i = 0; i < n_args; ++i) {
        if (i > 0 && !accept(',')) fail("','");
        n->args.push_back(expr());
      }
      if (!accept(')')) fail(n_args > 1 ? "')'" : "')' after the single argument");
      return n;
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprNode::Kind::Variable;
    n->name = std::move(id);
    return n;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

void unparse_into(const ExprNode& n, std::string& out) {
  switch (n.kind) {
    case ExprNode::Kind::Number: out += format_number(n.value); return;
    case ExprNode::Kind::Variable: out += n.name; return;
    case ExprNode::Kind::Negate:
      out += "(-";
      unparse_into(*n.args[0], out);
      out += ')';
      return;
    case ExprNode::Kind::Binary:
      out += '(';
      unparse_into(*n.args[0], out);
      out += ' ';
      out += n.op;
      out += ' ';
      unparse_into(*n.args[1], out);
      out += ')';
      return;
    case ExprNode::Kind::Call:
      out += n.name;
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i > 0) out += ", ";
        unparse_into(*n.args[i], out);
      }
      out += ')';
      return;
  }
}

void collect(const ExprNode& n, std::set<std::string>& names) {
  if (n.kind == ExprNode::Kind::Variable) names.insert(n.name);
  for (const auto& a : n.args) collect(*a, names);
}

[[noreturn]] void domain(const std::string& what) { throw Error(ErrorKind::DomainError, what); }

double apply_binary(char op, double a, double b) {
  switch (op) {
    case '+': return a + b;
    case '-': return a - b;
    case '*': return a * b;
    case '/':
      if (b == 0.0) domain("division by zero");
      return a / b;
    default: {
      const double r = std::pow(a, b);
      if (!std::isfinite(r)) domain(format_number(a) + " ^ " + format_number(b) + " is not a finite number");
      return r;
    }
  }
}

double apply_log(double x) {
  if (!(x > 0.0)) domain("log of nonpositive value " + format_number(x));
  return std::log(x);
}

double eval_node(const ExprNode& n, const std::map<std::string, double, std::less<>>& b) {
  switch (n.kind) {
    case ExprNode::Kind::Number: return n.value;
    case ExprNode::Kind::Variable: {
      auto it = b.find(n.name);
      if (it == b.end()) throw Error(ErrorKind::UnboundVariable, "variable '" + n.name + "' is not bound");
      return it->second;
    }
    case ExprNode::Kind::Negate: return -eval_node(*n.args[0], b);
    case ExprNode::Kind::Binary: return apply_binary(n.op, eval_node(*n.args[0], b), eval_node(*n.args[1], b));
    case ExprNode::Kind::Call: {
      std::vector<double> x;
      for (const auto& a : n.args) x.push_back(eval_node(*a, b));
      if (n.name == "exp") return std::exp(x[0]);
      if (n.name == "log") return apply_log(x[0]);
      if (n.name == "min") return std::min(x[0], x[1]);
      if (n.name == "max") return std::max(x[0], x[1]);
      return x[0] <= x[2] && x[2] <= x[1] ? 1.0 : 0.0;
    }
  }
  return 0.0;
}

double finite_or_throw(double v) {
  if (!std::isfinite(v)) domain("expression value is not finite");
  return v;
}

}  // namespace

Expression Expression::parse(std::string_view text) { return Expression(Parser(text).parse()); }

std::string Expression::unparse() const {
  std::string out;
  unparse_into(*root_, out);
  return out;
}

std::vector<std::string> Expression::variables() const {
  std::set<std::string> names;
  collect(*root_, names);
  return {names.begin(), names.end()};
}

double Expression::evaluate(const std::map<std::string, double, std::less<>>& bindings) const {
  return finite_or_throw(eval_node(*root_, bindings));
}

Expression parse_rate_expression(std::string_view text) { return Expression::parse(text); }

double eval_rate(const Expression& expr, const std::map<std::string, double, std::less<>>& bindings) {
  return expr.evaluate(bindings);
}

CompiledExpression::CompiledExpression(const Expression& expr, const std::map<std::string, int, std::less<>>& slots,
                                       const std::map<std::string, double, std::less<>>& constants) {
  emit(*expr.root_, slots, constants);
  int depth = 0;
  for (const auto& op : ops_) {
    switch (op.code) {
      case Op::Const:
      case Op::Load: ++depth; break;
      case Op::Neg:
      case Op::Exp:
      case Op::Log: break;
      case Op::Indicator: depth -= 2; break;
      default: --depth; break;
    }
    depth_ = std::max(depth_, depth);
  }
  std::sort(used_.begin(), used_.end());
  used_.erase(std::unique(used_.begin(), used_.end()), used_.end());
}

void CompiledExpression::emit(const ExprNode& node, const std::map<std::string, int, std::less<>>& slots,
                              const std::map<std::string, double, std::less<>>& constants) {
  const std::size_t start = ops_.size();
  switch (node.kind) {
    case ExprNode::Kind::Number: ops_.push_back({Op::Const, 0, node.value}); return;
    case ExprNode::Kind::Variable: {
      if (auto c = constants.find(node.name); c != constants.end()) {
        ops_.push_back({Op::Const, 0, c->second});
        return;
      }
      auto it = slots.find(node.name);
      if (it == slots.end()) {
        std::string known;
        for (const auto& [name, slot] : slots) known += (known.empty() ? "" : ", ") + name;
        throw Error(ErrorKind::UnboundVariable, "variable '" + node.name + "' is not bound here (allowed: " + known + ")");
      }
      ops_.push_back({Op::Load, it->second, 0.0});
      used_.push_back(it->second);
      return;
    }
    case ExprNode::Kind::Negate:
      emit(*node.args[0], slots, constants);
      ops_.push_back({Op::Neg, 0, 0.0});
      break;
    case ExprNode::Kind::Binary: {
      emit(*node.args[0], slots, constants);
      emit(*node.args[1], slots, constants);
      const Op code = node.op == '+'   ? Op::Add
                      : node.op == '-' ? Op::Sub
                      : node.op == '*' ? Op::Mul
                      : node.op == '/' ? Op::Div
                                       : Op::Pow;
      ops_.push_back({code, 0, 0.0});
      break;
    }
    case ExprNode::Kind::Call: {
      for (const auto& a : node.args) emit(*a, slots, constants);
      const Op code = node.name == "exp"   ? Op::Exp
                      : node.name == "log" ? Op::Log
                      : node.name == "min" ? Op::Min
                      : node.name == "max" ? Op::Max
                                           : Op::Indicator;
      ops_.push_back({code, 0, 0.0});
      break;
    }
  }
  // Fold a variable-free subtree; leave it alone if it fails so the error
  // surfaces on evaluation.
  const bool pure = std::all_of(ops_.begin() + start, ops_.end(), [](const Instr& i) { return i.code != Op::Load; });
  if (!pure) return;
  CompiledExpression sub = *this;
  sub.ops_.assign(ops_.begin() + start, ops_.end());
  sub.depth_ = static_cast<int>(sub.ops_.size());
  try {
    const double v = sub(nullptr);
    ops_.resize(start);
    ops_.push_back({Op::Const, 0, v});
  } catch (const Error&) {
  }
}

double CompiledExpression::operator()(const double* args) const {
  std::array<double, 32> small{};
  std::vector<double> big;
  double* stack = small.data();
  if (depth_ > static_cast<int>(small.size())) {
    big.resize(depth_);
    stack = big.data();
  }
  int top = -1;
  for (const Instr& in : ops_) {
    switch (in.code) {
      case Op::Const: stack[++top] = in.value; break;
      case Op::Load: stack[++top] = args[in.slot]; break;
      case Op::Neg: stack[top] = -stack[top]; break;
      case Op::Add: --top; stack[top] += stack[top + 1]; break;
      case Op::Sub: --top; stack[top] -= stack[top + 1]; break;
      case Op::Mul: --top; stack[top] *= stack[top + 1]; break;
      case Op::Div:
        --top;
        stack[top] = apply_binary('/', stack[top], stack[top + 1]);
        break;
      case Op::Pow:
        --top;
        stack[top] = apply_binary('^', stack[top], stack[top + 1]);
        break;
      case Op::Exp: stack[top] = std::exp(stack[top]); break;
      case Op::Log: stack[top] = apply_log(stack[top]); break;
      case Op::Min: --top; stack[top] = std::min(stack[top], stack[top + 1]); break;
      case Op::Max: --top; stack[top] = std::max(stack[top], stack[top + 1]); break;
      case Op::Indicator:
        top -= 2;
        stack[top] = stack[top] <= stack[top + 2] && stack[top + 2] <= stack[top + 1] ? 1.0 : 0.0;
        break;
    }
  }
  return finite_or_throw(stack[top]);
}

}  // namespace popsteady
