#pragma once

// Complex-analytic expressions over the polarized chart variables
// z1..zn, zb1..zbn. zb_k is an independent symbol: nothing here conjugates.
//
// Grammar (precedence low to high: + -, * /, unary -, ^):
//   expr   := term (('+'|'-') term)*
//   term   := unary (('*'|'/') unary)*
//   unary  := '-' unary | factor
//   factor := base ('^' ['-'] integer)*          right-associative
//   base   := number ['i'] | 'i' | var | '(' expr ')' | ('log'|'exp') '(' expr ')'
//   var    := 'z' index | 'zb' index
//
// Subtrees built only from literals are folded into a single constant, so
// "1+2i" parses to one complex literal and printing round-trips.

#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "kstar/errors.hpp"
#include "kstar/jet.hpp"

namespace kstar {

/// Base point (z0, zb0). For points of a real chart zb0 = conj(z0), but the
/// two halves are stored independently so jets can be taken off the real slice.
struct ChartPoint {
  std::vector<Complex> z;
  std::vector<Complex> zb;

  static ChartPoint from_holomorphic(std::vector<Complex> z) {
    ChartPoint p;
    p.zb.reserve(z.size());
    for (const auto& c : z) p.zb.push_back(std::conj(c));
    p.z = std::move(z);
    return p;
  }

  int dimension() const noexcept { return static_cast<int>(z.size()); }
};

enum class NodeKind { constant, variable, add, sub, mul, div, neg, pow, log, exp };

enum class HolomorphyClass { constant, holomorphic, antiholomorphic, mixed };

inline const char* to_string(HolomorphyClass c) {
  switch (c) {
    case HolomorphyClass::constant: return "constant";
    case HolomorphyClass::holomorphic: return "holomorphic";
    case HolomorphyClass::antiholomorphic: return "antiholomorphic";
    case HolomorphyClass::mixed: return "mixed";
  }
  return "?";
}

/// Immutable expression tree with shared subtrees.
class Expr {
public:
  struct Node {
    NodeKind kind = NodeKind::constant;
    Complex value{};
    bool antiholomorphic = false;  // for variables
    int index = 0;                 // 1-based variable index
    int exponent = 0;              // for pow
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

  Expr() : Expr(constant(0.0)) {}

  static Expr constant(Complex c) {
    Node n;
    n.kind = NodeKind::constant;
    n.value = c;
    return Expr(std::make_shared<const Node>(std::move(n)));
  }

  static Expr z(int index) { return variable(false, index); }
  static Expr zb(int index) { return variable(true, index); }

  static Expr variable(bool antiholomorphic, int index) {
    if (index < 1) throw UsageError("variable indices start at 1");
    Node n;
    n.kind = NodeKind::variable;
    n.antiholomorphic = antiholomorphic;
    n.index = index;
    return Expr(std::make_shared<const Node>(std::move(n)));
  }

  static Expr binary(NodeKind kind, const Expr& a, const Expr& b) {
    Node n;
    n.kind = kind;
    n.lhs = a.node_;
    n.rhs = b.node_;
    return Expr(std::make_shared<const Node>(std::move(n)));
  }

  static Expr unary(NodeKind kind, const Expr& a, int exponent = 0) {
    Node n;
    n.kind = kind;
    n.lhs = a.node_;
    n.exponent = exponent;
    return Expr(std::make_shared<const Node>(std::move(n)));
  }

  const Node& node() const noexcept { return *node_; }
  NodeKind kind() const noexcept { return node_->kind; }
  Expr lhs() const { return Expr(node_->lhs); }
  Expr rhs() const { return Expr(node_->rhs); }

  friend Expr operator+(const Expr& a, const Expr& b) { return binary(NodeKind::add, a, b); }
  friend Expr operator-(const Expr& a, const Expr& b) { return binary(NodeKind::sub, a, b); }
  friend Expr operator*(const Expr& a, const Expr& b) { return binary(NodeKind::mul, a, b); }
  friend Expr operator/(const Expr& a, const Expr& b) { return binary(NodeKind::div, a, b); }
  friend Expr operator-(const Expr& a) { return unary(NodeKind::neg, a); }
  friend Expr pow(const Expr& a, int e) { return unary(NodeKind::pow, a, e); }
  friend Expr log(const Expr& a) { return unary(NodeKind::log, a); }
  friend Expr exp(const Expr& a) { return unary(NodeKind::exp, a); }

  /// Structural equality.
  friend bool operator==(const Expr& a, const Expr& b) { return equal(a.node_.get(), b.node_.get()); }

private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static bool equal(const Node* a, const Node* b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
      case NodeKind::constant: return a->value == b->value;
      case NodeKind::variable: return a->antiholomorphic == b->antiholomorphic && a->index == b->index;
      case NodeKind::pow: return a->exponent == b->exponent && equal(a->lhs.get(), b->lhs.get());
      case NodeKind::neg:
      case NodeKind::log:
      case NodeKind::exp: return equal(a->lhs.get(), b->lhs.get());
      default: return equal(a->lhs.get(), b->lhs.get()) && equal(a->rhs.get(), b->rhs.get());
    }
  }

  std::shared_ptr<const Node> node_;
};

/// c * z^hol * zb^anti
inline Expr monomial(Complex c, const MultiIndex& hol, const MultiIndex& anti) {
  Expr e = Expr::constant(c);
  for (std::size_t k = 0; k < hol.size(); ++k)
    if (hol[k] > 0) e = e * (hol[k] == 1 ? Expr::z(static_cast<int>(k) + 1) : pow(Expr::z(static_cast<int>(k) + 1), hol[k]));
  for (std::size_t l = 0; l < anti.size(); ++l)
    if (anti[l] > 0) e = e * (anti[l] == 1 ? Expr::zb(static_cast<int>(l) + 1) : pow(Expr::zb(static_cast<int>(l) + 1), anti[l]));
  return e;
}

namespace detail {

inline Complex int_power(Complex base, int e) {
  if (e < 0) return 1.0 / int_power(base, -e);
  Complex r = 1.0;
  for (int i = 0; i < e; ++i) r *= base;
  return r;
}

class Parser {
public:
  Parser(std::string_view src, int n) : src_(src), n_(n) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

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

  void expect(char c) {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  static bool is_const(const Expr& e) { return e.kind() == NodeKind::constant; }
  static Complex cval(const Expr& e) { return e.node().value; }

  static Expr fold(NodeKind kind, const Expr& a, const Expr& b) {
    if (is_const(a) && is_const(b)) {
      switch (kind) {
        case NodeKind::add: return Expr::constant(cval(a) + cval(b));
        case NodeKind::sub: return Expr::constant(cval(a) - cval(b));
        case NodeKind::mul: return Expr::constant(cval(a) * cval(b));
        case NodeKind::div:
          if (cval(b) != Complex{}) return Expr::constant(cval(a) / cval(b));
          break;
        default: break;
      }
    }
    return Expr::binary(kind, a, b);
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) e = fold(NodeKind::add, e, term());
      else if (accept('-')) e = fold(NodeKind::sub, e, term());
      else return e;
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) e = fold(NodeKind::mul, e, unary());
      else if (accept('/')) e = fold(NodeKind::div, e, unary());
      else return e;
    }
  }

  Expr unary() {
    if (accept('-')) {
      Expr inner = unary();
      return is_const(inner) ? Expr::constant(-cval(inner)) : -inner;
    }
    return factor();
  }

  int signed_integer() {
    skip_ws();
    bool negative = accept('-');
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer exponent");
    int value = 0;
    auto [ptr, ec] = std::from_chars(src_.data() + start, src_.data() + pos_, value);
    if (ec != std::errc{}) {
      pos_ = start;
      fail("exponent out of range");
    }
    return negative ? -value : value;
  }

  Expr factor() {
    Expr base = primary();
    std::vector<int> exps;
    while (accept('^')) exps.push_back(signed_integer());
    if (exps.empty()) return base;
    int e = exps.back();
    for (std::size_t k = exps.size() - 1; k-- > 0;) {
      if (e < 0) fail("negative exponent inside an exponent chain");
      double p = std::pow(static_cast<double>(exps[k]), e);
      if (std::abs(p) > 1e6) fail("exponent too large");
      e = static_cast<int>(p);
    }
    if (is_const(base) && !(e < 0 && cval(base) == Complex{})) return Expr::constant(int_power(cval(base), e));
    return pow(base, e);
  }

  Expr number() {
    const std::size_t start = pos_;
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
      if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) digits();
      else pos_ = save;
    }
    const std::string text(src_.substr(start, pos_ - start));
    if (text == ".") {
      pos_ = start;
      fail("malformed number");
    }
    double v = 0.0;
    try {
      v = std::stod(text);
    } catch (const std::exception&) {
      pos_ = start;
      fail("malformed number '" + text + "'");
    }
    if (pos_ < src_.size() && src_[pos_] == 'i' &&
        !(pos_ + 1 < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_ + 1])))) {
      ++pos_;
      return Expr::constant(Complex(0.0, v));
    }
    return Expr::constant(v);
  }

  Expr primary() {
    skip_ws();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      const std::string_view word = src_.substr(start, pos_ - start);
      if (word == "i") return Expr::constant(Complex(0.0, 1.0));
      if (word == "log" || word == "exp") {
        expect('(');
        Expr arg = expr();
        expect(')');
        return word == "log" ? log(arg) : exp(arg);
      }
      if (word == "z" || word == "zb") {
        const std::size_t istart = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (istart == pos_) fail("variable '" + std::string(word) + "' needs an index");
        int index = 0;
        std::from_chars(src_.data() + istart, src_.data() + pos_, index);
        if (index < 1 || index > n_) {
          pos_ = start;
          fail("variable index " + std::to_string(index) + " out of range 1.." + std::to_string(n_));
        }
        return Expr::variable(word == "zb", index);
      }
      pos_ = start;
      fail("unknown identifier '" + std::string(word) + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  std::string_view src_;
  int n_;
  std::size_t pos_ = 0;
};

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string format_constant(Complex c) {
  if (c.imag() == 0.0) {
    const auto s = format_double(c.real());
    return c.real() < 0 || std::signbit(c.real()) ? "(" + s + ")" : s;
  }
  if (c.real() == 0.0) {
    const auto s = format_double(c.imag()) + "i";
    return c.imag() < 0 ? "(" + s + ")" : s;
  }
  const auto im = format_double(std::abs(c.imag())) + "i";
  return "(" + format_double(c.real()) + (c.imag() < 0 ? "-" : "+") + im + ")";
}

}  // namespace detail

/// Parse `src` over a chart of dimension n.
inline Expr parse(std::string_view src, int n) { return detail::Parser(src, n).run(); }

/// A complex literal such as "0.3", "-2i" or "0.1-0.4i".
inline Complex parse_complex(std::string_view src) {
  const Expr e = parse(src, 0);
  if (e.kind() != NodeKind::constant) throw ParseError("expected a complex number", 0);
  return e.node().value;
}

/// Fully parenthesized text that parses back to a structurally equal tree.
inline std::string to_string(const Expr& e) {
  const auto& n = e.node();
  switch (n.kind) {
    case NodeKind::constant: return detail::format_constant(n.value);
    case NodeKind::variable: return (n.antiholomorphic ? "zb" : "z") + std::to_string(n.index);
    case NodeKind::add: return "(" + to_string(e.lhs()) + "+" + to_string(e.rhs()) + ")";
    case NodeKind::sub: return "(" + to_string(e.lhs()) + "-" + to_string(e.rhs()) + ")";
    case NodeKind::mul: return "(" + to_string(e.lhs()) + "*" + to_string(e.rhs()) + ")";
    case NodeKind::div: return "(" + to_string(e.lhs()) + "/" + to_string(e.rhs()) + ")";
    case NodeKind::neg: return "(-(" + to_string(e.lhs()) + "))";
    case NodeKind::pow: return "(" + to_string(e.lhs()) + "^" + std::to_string(n.exponent) + ")";
    case NodeKind::log: return "log(" + to_string(e.lhs()) + ")";
    case NodeKind::exp: return "exp(" + to_string(e.lhs()) + ")";
  }
  return {};
}

/// Largest variable index occurring in e (0 for constants).
inline int max_variable_index(const Expr& e) {
  const auto& n = e.node();
  switch (n.kind) {
    case NodeKind::constant: return 0;
    case NodeKind::variable: return n.index;
    case NodeKind::neg:
    case NodeKind::pow:
    case NodeKind::log:
    case NodeKind::exp: return max_variable_index(e.lhs());
    default: return std::max(max_variable_index(e.lhs()), max_variable_index(e.rhs()));
  }
}

inline HolomorphyClass classify(const Expr& e) {
  bool hol = false;
  bool anti = false;
  auto visit = [&](auto&& self, const Expr& x) -> void {
    const auto& n = x.node();
    if (n.kind == NodeKind::constant) return;
    if (n.kind == NodeKind::variable) {
      (n.antiholomorphic ? anti : hol) = true;
      return;
    }
    self(self, x.lhs());
    if (n.lhs && n.rhs) self(self, x.rhs());
  };
  visit(visit, e);
  if (hol && anti) return HolomorphyClass::mixed;
  if (hol) return HolomorphyClass::holomorphic;
  if (anti) return HolomorphyClass::antiholomorphic;
  return HolomorphyClass::constant;
}

/// Replace z_k by replacements[k-1] and zb_k by replacements[n+k-1].
inline Expr substitute(const Expr& e, std::span<const Expr> replacements) {
  if (replacements.size() % 2 != 0 || static_cast<int>(replacements.size()) < 2 * max_variable_index(e))
    throw UsageError("substitution needs one replacement for each of the 2n chart variables");
  const std::size_t n = replacements.size() / 2;
  auto go = [&](auto&& self, const Expr& x) -> Expr {
    const auto& node = x.node();
    switch (node.kind) {
      case NodeKind::constant: return x;
      case NodeKind::variable:
        return replacements[(node.antiholomorphic ? n : 0) + static_cast<std::size_t>(node.index) - 1];
      case NodeKind::neg:
      case NodeKind::log:
      case NodeKind::exp:
      case NodeKind::pow: return Expr::unary(node.kind, self(self, x.lhs()), node.exponent);
      default: return Expr::binary(node.kind, self(self, x.lhs()), self(self, x.rhs()));
    }
  };
  return go(go, e);
}

namespace detail {

class JetEvaluator {
public:
  JetEvaluator(const ChartPoint& point, int order) : point_(point), n_(point.dimension()), order_(order) {}

  Jet operator()(const Expr& x) {
    const auto* key = &x.node();
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    Jet j = compute(x);
    memo_.emplace(key, j);
    return j;
  }

private:
  Jet compute(const Expr& x) {
    const auto& node = x.node();
    switch (node.kind) {
      case NodeKind::constant: return Jet::constant(n_, order_, node.value);
      case NodeKind::variable: {
        const auto k = static_cast<std::size_t>(node.index - 1);
        return node.antiholomorphic ? Jet::coordinate(n_, order_, n_ + node.index - 1, point_.zb[k])
                                    : Jet::coordinate(n_, order_, node.index - 1, point_.z[k]);
      }
      case NodeKind::add: return (*this)(x.lhs()) + (*this)(x.rhs());
      case NodeKind::sub: return (*this)(x.lhs()) - (*this)(x.rhs());
      case NodeKind::mul: return (*this)(x.lhs()) * (*this)(x.rhs());
      case NodeKind::div: {
        const Jet den = (*this)(x.rhs());
        if (std::abs(den.value()) <= kPoleThreshold) throw PoleError("division by zero at the base point: " + to_string(x));
        return (*this)(x.lhs()) / den;
      }
      case NodeKind::neg: return -(*this)(x.lhs());
      case NodeKind::pow: return kstar::pow((*this)(x.lhs()), node.exponent);
      case NodeKind::log: return kstar::log((*this)(x.lhs()));
      case NodeKind::exp: return kstar::exp((*this)(x.lhs()));
    }
    return Jet(n_, order_);
  }

  const ChartPoint& point_;
  int n_;
  int order_;
  // Shared subtrees (a replacement reused by substitute, say) are evaluated once.
  std::unordered_map<const Expr::Node*, Jet> memo_;
};

}  // namespace detail

/// Jet of e at `point`, truncated at total degree `order`.
inline Jet eval_jet(const Expr& e, const ChartPoint& point, int order) {
  const int n = point.dimension();
  if (static_cast<int>(point.zb.size()) != n) throw UsageError("base point halves differ in length");
  if (max_variable_index(e) > n)
    throw UsageError("expression uses variable index " + std::to_string(max_variable_index(e)) + " on a chart of dimension " +
                     std::to_string(n));
  return detail::JetEvaluator(point, order)(e);
}

/// Value of e at `point`.
inline Complex evaluate(const Expr& e, const ChartPoint& point) { return eval_jet(e, point, 0).value(); }

}  // namespace kstar
