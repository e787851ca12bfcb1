#include "pdde/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

#include "pdde/errors.hpp"

namespace pdde {
namespace {

constexpr double kPi = 3.14159265358979323846;

enum Op {
  kConst = 0,
  kTime,
  kState,
  kAdd,
  kSub,
  kMul,
  kDiv,
  kNeg,
  kSin,
  kCos,
  kExp,
};

// Stack depth any well-formed program may need; nesting past this is
// rejected at parse time so evaluation can use a fixed buffer.
constexpr int kMaxDepth = 64;

struct Token {
  enum Kind { Number, Name, Plus, Minus, Star, Slash, LParen, RParen, End };
  Kind kind = End;
  size_t pos = 0;     // byte offset into the source
  std::string text;
  double value = 0.0;
};

[[noreturn]] void fail(size_t pos, const std::string& msg) {
  throw ValidationError("parse error at position " + std::to_string(pos + 1) +
                        ": " + msg);
}

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_])))
      ++i_;
    tok_ = Token{};
    tok_.pos = i_;
    if (i_ >= src_.size()) {
      tok_.kind = Token::End;
      return;
    }
    const char c = src_[i_];
    switch (c) {
      case '+': tok_.kind = Token::Plus; tok_.text = "+"; ++i_; return;
      case '-': tok_.kind = Token::Minus; tok_.text = "-"; ++i_; return;
      case '*': tok_.kind = Token::Star; tok_.text = "*"; ++i_; return;
      case '/': tok_.kind = Token::Slash; tok_.text = "/"; ++i_; return;
      case '(': tok_.kind = Token::LParen; tok_.text = "("; ++i_; return;
      case ')': tok_.kind = Token::RParen; tok_.text = ")"; ++i_; return;
      default: break;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && i_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[i_ + 1])))) {
      lex_number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i_;
      while (j < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[j])) || src_[j] == '_'))
        ++j;
      tok_.kind = Token::Name;
      tok_.text = src_.substr(i_, j - i_);
      i_ = j;
      return;
    }
    fail(i_, std::string("unexpected character '") + c + "'");
  }

  void lex_number() {
    size_t j = i_;
    while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j])))
      ++j;
    if (j < src_.size() && src_[j] == '.') {
      ++j;
      while (j < src_.size() && std::isdigit(static_cast<unsigned char>(src_[j])))
        ++j;
    }
    if (j < src_.size() && (src_[j] == 'e' || src_[j] == 'E')) {
      size_t k = j + 1;
      if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
      if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
        ++k;
        while (k < src_.size() &&
               std::isdigit(static_cast<unsigned char>(src_[k])))
          ++k;
        j = k;
      }
    }
    double v = 0.0;
    const auto res = std::from_chars(src_.data() + i_, src_.data() + j, v);
    if (res.ec != std::errc{} || res.ptr != src_.data() + j)
      fail(i_, "malformed number '" + src_.substr(i_, j - i_) + "'");
    tok_.kind = Token::Number;
    tok_.text = src_.substr(i_, j - i_);
    tok_.value = v;
    i_ = j;
  }

  const std::string& src_;
  size_t i_ = 0;
  Token tok_;
};

class Parser {
 public:
  explicit Parser(const std::string& src) : src_(src), lex_(src) {}

  void run() {
    if (lex_.peek().kind == Token::End) fail(0, "empty expression");
    parse_sum();
    const Token& t = lex_.peek();
    if (t.kind != Token::End)
      fail(t.pos, "unexpected trailing input '" + t.text + "'");
  }

  std::vector<Expr::Instr> take_program() { return std::move(prog_); }
  int max_state() const { return max_x_; }

 private:
  void emit(int op, double value = 0.0, int index = 0, size_t pos = 0) {
    prog_.push_back({op, value, index});
    if (op == kConst || op == kTime || op == kState) {
      if (++depth_ > kMaxDepth) fail(pos, "expression nesting too deep");
    } else if (op == kAdd || op == kSub || op == kMul || op == kDiv) {
      --depth_;
    }
  }

  void parse_sum() {
    parse_product();
    while (true) {
      const Token::Kind k = lex_.peek().kind;
      if (k != Token::Plus && k != Token::Minus) return;
      Token t = lex_.take();
      parse_product();
      emit(k == Token::Plus ? kAdd : kSub, 0.0, 0, t.pos);
    }
  }

  void parse_product() {
    parse_factor();
    while (true) {
      const Token::Kind k = lex_.peek().kind;
      if (k != Token::Star && k != Token::Slash) return;
      Token t = lex_.take();
      parse_factor();
      emit(k == Token::Star ? kMul : kDiv, 0.0, 0, t.pos);
    }
  }

  void parse_factor() {
    if (lex_.peek().kind == Token::Minus) {
      Token t = lex_.take();
      parse_factor();
      emit(kNeg, 0.0, 0, t.pos);
      return;
    }
    parse_primary();
  }

  void parse_primary() {
    Token t = lex_.take();
    switch (t.kind) {
      case Token::Number:
        emit(kConst, t.value, 0, t.pos);
        return;
      case Token::LParen:
        parse_sum();
        expect_rparen(t.pos);
        return;
      case Token::Name:
        parse_name(t);
        return;
      default:
        fail(t.pos, t.kind == Token::End
                        ? std::string("expected a value, input ended")
                        : "expected a value, got '" + t.text + "'");
    }
  }

  void parse_name(const Token& t) {
    if (t.text == "t") {
      emit(kTime, 0.0, 0, t.pos);
      return;
    }
    if (t.text == "pi") {
      emit(kConst, kPi, 0, t.pos);
      return;
    }
    int fn = -1;
    if (t.text == "sin") fn = kSin;
    else if (t.text == "cos") fn = kCos;
    else if (t.text == "exp") fn = kExp;
    if (fn >= 0) {
      Token open = lex_.take();
      if (open.kind != Token::LParen)
        fail(open.pos, "expected '(' after " + t.text);
      parse_sum();
      expect_rparen(open.pos);
      emit(fn, 0.0, 0, t.pos);
      return;
    }
    if (t.text.size() >= 2 && t.text[0] == 'x') {
      bool digits = true;
      for (size_t i = 1; i < t.text.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(t.text[i]))) digits = false;
      if (digits) {
        const long idx = std::strtol(t.text.c_str() + 1, nullptr, 10);
        if (idx < 1) fail(t.pos, "state variables are numbered from x1");
        if (idx > 64) fail(t.pos, "state index " + std::to_string(idx) + " is out of range");
        emit(kState, 0.0, int(idx), t.pos);
        if (int(idx) > max_x_) max_x_ = int(idx);
        return;
      }
    }
    fail(t.pos, "unknown name '" + t.text +
                    "'; allowed: t, pi, x1.., sin, cos, exp");
  }

  void expect_rparen(size_t open_pos) {
    Token t = lex_.take();
    if (t.kind != Token::RParen)
      fail(t.pos, "expected ')' to close '(' at position " +
                      std::to_string(open_pos + 1));
  }

  const std::string& src_;
  Lexer lex_;
  std::vector<Expr::Instr> prog_;
  int depth_ = 0;
  int max_x_ = 0;
};

}  // namespace

double Expr::operator()(double t, std::span<const double> x) const {
  double st[kMaxDepth];
  int top = 0;
  for (const Instr& in : prog_) {
    switch (in.op) {
      case kConst: st[top++] = in.value; break;
      case kTime: st[top++] = t; break;
      case kState:
        if (in.index > int(x.size()))
          throw ValidationError("expression '" + src_ + "' references x" +
                                std::to_string(in.index) + " but only " +
                                std::to_string(x.size()) +
                                " state components exist");
        st[top++] = x[size_t(in.index - 1)];
        break;
      case kAdd: --top; st[top - 1] += st[top]; break;
      case kSub: --top; st[top - 1] -= st[top]; break;
      case kMul: --top; st[top - 1] *= st[top]; break;
      case kDiv: --top; st[top - 1] /= st[top]; break;
      case kNeg: st[top - 1] = -st[top - 1]; break;
      case kSin: st[top - 1] = std::sin(st[top - 1]); break;
      case kCos: st[top - 1] = std::cos(st[top - 1]); break;
      case kExp: st[top - 1] = std::exp(st[top - 1]); break;
      default: throw ValidationError("corrupt expression program");
    }
  }
  if (top != 1) throw ValidationError("corrupt expression program");
  return st[0];
}

double Expr::operator()(double t) const {
  return (*this)(t, std::span<const double>{});
}

Expr parse_expression(const std::string& src) {
  Parser p(src);
  p.run();
  Expr e;
  e.prog_ = p.take_program();
  e.max_x_ = p.max_state();
  e.src_ = src;
  return e;
}

PeriodicFn periodic_from_expression(const std::string& src, double period) {
  Expr e = parse_expression(src);
  if (e.max_state_index() > 0)
    throw ValidationError("coefficient expression '" + src +
                          "' may only depend on t");
  PeriodicFn f;
  f.eval = [e](double t) { return e(t); };
  f.period = period;
  f.label = src;
  return f;
}

}  // namespace pdde
