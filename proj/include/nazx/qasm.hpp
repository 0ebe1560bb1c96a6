#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "nazx/circuit.hpp"
#include "nazx/phase.hpp"

namespace nazx {

/// Error raised while reading OpenQASM. `line`/`column` are 1-based.
class QasmError : public std::runtime_error {
 public:
  enum class Kind { Syntax, Unsupported, Angle };

  QasmError(Kind kind, int line, int column, const std::string& what)
      : std::runtime_error(decorate(kind, line, column, what)),
        kind_(kind),
        line_(line),
        column_(column) {}

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] int line() const { return line_; }
  [[nodiscard]] int column() const { return column_; }

 private:
  static std::string decorate(Kind k, int line, int col,
                              const std::string& what) {
    const char* tag = k == Kind::Syntax        ? "syntax error"
                      : k == Kind::Unsupported ? "unsupported feature"
                                               : "angle error";
    return std::string(tag) + " at " + std::to_string(line) + ":" +
           std::to_string(col) + ": " + what;
  }

  Kind kind_;
  int line_;
  int column_;
};

namespace qasm_detail {

struct Token {
  enum class Kind { Ident, Int, Real, String, Symbol, End };
  Kind kind = Kind::End;
  std::string text;
  int line = 0;
  int column = 0;
  std::size_t offset = 0;
};

inline std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      advance(2);
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) {
        advance(1);
      }
      advance(2);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    t.offset = i;
    std::size_t j = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) ||
              src[j] == '_')) {
        ++j;
      }
      t.kind = Token::Kind::Ident;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '.' && i + 1 < src.size() &&
                std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
      bool real = false;
      while (j < src.size() &&
             std::isdigit(static_cast<unsigned char>(src[j]))) {
        ++j;
      }
      if (j < src.size() && src[j] == '.') {
        real = true;
        ++j;
        while (j < src.size() &&
               std::isdigit(static_cast<unsigned char>(src[j]))) {
          ++j;
        }
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() &&
            std::isdigit(static_cast<unsigned char>(src[k]))) {
          real = true;
          j = k;
          while (j < src.size() &&
                 std::isdigit(static_cast<unsigned char>(src[j]))) {
            ++j;
          }
        }
      }
      t.kind = real ? Token::Kind::Real : Token::Kind::Int;
    } else if (c == '"') {
      j = i + 1;
      while (j < src.size() && src[j] != '"') ++j;
      if (j >= src.size()) {
        throw QasmError(QasmError::Kind::Syntax, line, col,
                        "unterminated string");
      }
      ++j;
      t.kind = Token::Kind::String;
    } else {
      t.kind = Token::Kind::Symbol;
      j = i + 1;
      if ((c == '-' && j < src.size() && src[j] == '>') ||
          (c == '=' && j < src.size() && src[j] == '=')) {
        ++j;
      }
    }
    t.text = std::string(src.substr(i, j - i));
    advance(j - i);
    out.push_back(std::move(t));
  }
  Token end;
  end.kind = Token::Kind::End;
  end.line = line;
  end.column = col;
  end.offset = src.size();
  out.push_back(end);
  return out;
}

/// Value of a classical parameter expression. Exact values are tracked as a
/// rational times pi^pi_power so that `pi/4` maps to a Phase without
/// floating-point rationalization.
struct Value {
  double real = 0.0;
  bool exact = false;
  std::int64_t num = 0;
  std::int64_t den = 1;
  int pi_power = 0;

  static Value integer(std::int64_t v) {
    return {static_cast<double>(v), true, v, 1, 0};
  }
  static Value inexact(double v) { return {v, false, 0, 1, 0}; }
};

inline std::optional<std::pair<std::int64_t, std::int64_t>> reduce(
    __int128 n, __int128 d) {
  if (d == 0) return std::nullopt;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 g = detail::gcd_wide(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX) return std::nullopt;
  return std::pair{static_cast<std::int64_t>(n), static_cast<std::int64_t>(d)};
}

inline Value make_exact(double real, __int128 n, __int128 d, int pi_power) {
  if (n == 0) return Value::integer(0);
  auto r = reduce(n, d);
  if (!r || pi_power < 0 || pi_power > 1) return Value::inexact(real);
  return {real, true, r->first, r->second, pi_power};
}

struct Expr {
  enum class Kind { Literal, Param, Unary, Binary, Call };
  Kind kind = Kind::Literal;
  Value literal;
  std::string name;  // parameter / function name, operator for Binary
  std::vector<std::shared_ptr<Expr>> args;
  std::string source;
  int line = 0;
  int column = 0;
};
using ExprPtr = std::shared_ptr<Expr>;

using Env = std::unordered_map<std::string, Value>;

inline Value evaluate(const Expr& e, const Env& env) {
  auto fail = [&](const std::string& what) -> Value {
    throw QasmError(QasmError::Kind::Syntax, e.line, e.column, what);
  };
  switch (e.kind) {
    case Expr::Kind::Literal:
      return e.literal;
    case Expr::Kind::Param: {
      auto it = env.find(e.name);
      if (it == env.end()) return fail("unknown parameter '" + e.name + "'");
      return it->second;
    }
    case Expr::Kind::Unary: {
      Value v = evaluate(*e.args[0], env);
      v.real = -v.real;
      v.num = -v.num;
      return v;
    }
    case Expr::Kind::Binary: {
      Value a = evaluate(*e.args[0], env);
      Value b = evaluate(*e.args[1], env);
      const char op = e.name[0];
      const bool both = a.exact && b.exact;
      switch (op) {
        case '+':
        case '-': {
          double r = op == '+' ? a.real + b.real : a.real - b.real;
          if (both && a.num == 0) {
            Value out = b;
            if (op == '-') out.num = -out.num;
            out.real = r;
            return out;
          }
          if (both && b.num == 0) {
            a.real = r;
            return a;
          }
          if (both && a.pi_power == b.pi_power) {
            __int128 sb = op == '+' ? b.num : -static_cast<__int128>(b.num);
            return make_exact(r,
                              static_cast<__int128>(a.num) * b.den + sb * a.den,
                              static_cast<__int128>(a.den) * b.den,
                              a.pi_power);
          }
          return Value::inexact(r);
        }
        case '*':
          if (both) {
            return make_exact(a.real * b.real,
                              static_cast<__int128>(a.num) * b.num,
                              static_cast<__int128>(a.den) * b.den,
                              a.pi_power + b.pi_power);
          }
          return Value::inexact(a.real * b.real);
        case '/':
          if (b.real == 0.0) return fail("division by zero");
          if (both) {
            return make_exact(a.real / b.real,
                              static_cast<__int128>(a.num) * b.den,
                              static_cast<__int128>(a.den) * b.num,
                              a.pi_power - b.pi_power);
          }
          return Value::inexact(a.real / b.real);
        case '^': {
          double r = std::pow(a.real, b.real);
          if (both && b.pi_power == 0 && b.den == 1 && b.num >= 0 &&
              b.num <= 62 && a.pi_power == 0) {
            __int128 n = 1, d = 1;
            for (std::int64_t k = 0; k < b.num; ++k) {
              n *= a.num;
              d *= a.den;
              if (n > INT64_MAX || n < INT64_MIN || d > INT64_MAX) {
                return Value::inexact(r);
              }
            }
            return make_exact(r, n, d, 0);
          }
          return Value::inexact(r);
        }
        default:
          return fail("unknown operator");
      }
    }
    case Expr::Kind::Call: {
      double x = evaluate(*e.args[0], env).real;
      double r = 0;
      if (e.name == "sin") r = std::sin(x);
      else if (e.name == "cos") r = std::cos(x);
      else if (e.name == "tan") r = std::tan(x);
      else if (e.name == "exp") r = std::exp(x);
      else if (e.name == "ln") r = std::log(x);
      else if (e.name == "sqrt") r = std::sqrt(x);
      else return fail("unknown function '" + e.name + "'");
      return Value::inexact(r);
    }
  }
  return fail("bad expression");
}

struct GateCall {
  std::string name;
  std::vector<ExprPtr> params;
  std::vector<std::string> args;
  int line = 0;
  int column = 0;
};

struct GateDef {
  std::vector<std::string> params;
  std::vector<std::string> args;
  std::vector<GateCall> body;
};

/// Parses an `ncp<m>` / `ncz<m>` name; returns m or 0.
inline int native_arity(std::string_view name, std::string_view prefix) {
  if (name.size() <= prefix.size() || name.substr(0, prefix.size()) != prefix) {
    return 0;
  }
  int m = 0;
  for (char c : name.substr(prefix.size())) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return 0;
    m = m * 10 + (c - '0');
    if (m > 1000) return 0;
  }
  return m >= 2 ? m : 0;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : src_(src), toks_(tokenize(src)) {}

  Circuit run() {
    if (peek().kind == Token::Kind::Ident && peek().text == "OPENQASM") {
      next();
      const Token& v = next();
      if (v.kind != Token::Kind::Real && v.kind != Token::Kind::Int) {
        syntax(v, "expected version number");
      }
      if (v.text.substr(0, 1) != "2") {
        throw QasmError(QasmError::Kind::Unsupported, v.line, v.column,
                        "only OpenQASM 2.0 is supported");
      }
      expect(";");
    }
    while (peek().kind != Token::Kind::End) statement();
    Circuit c(num_qubits_);
    for (auto& g : gates_) c.add(std::move(g));
    std::vector<int> measured(measured_.begin(), measured_.end());
    c.set_measured(std::move(measured));
    return c;
  }

 private:
  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  [[noreturn]] static void syntax(const Token& t, const std::string& what) {
    throw QasmError(QasmError::Kind::Syntax, t.line, t.column, what);
  }
  [[noreturn]] static void unsupported(const Token& t,
                                       const std::string& what) {
    throw QasmError(QasmError::Kind::Unsupported, t.line, t.column, what);
  }
  bool accept(std::string_view sym) {
    if (peek().kind == Token::Kind::Symbol && peek().text == sym) {
      next();
      return true;
    }
    return false;
  }
  void expect(std::string_view sym) {
    if (!accept(sym)) {
      syntax(peek(), "expected '" + std::string(sym) + "' but found '" +
                         peek().text + "'");
    }
  }
  std::string ident() {
    const Token& t = next();
    if (t.kind != Token::Kind::Ident) {
      syntax(t, "expected identifier but found '" + t.text + "'");
    }
    return t.text;
  }
  std::int64_t integer() {
    const Token& t = next();
    if (t.kind != Token::Kind::Int) syntax(t, "expected integer");
    return std::stoll(t.text);
  }

  void statement() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident) syntax(t, "unexpected '" + t.text + "'");
    const std::string& kw = t.text;
    if (kw == "include") {
      next();
      if (next().kind != Token::Kind::String) syntax(t, "expected file name");
      expect(";");
    } else if (kw == "qreg" || kw == "creg") {
      next();
      std::string name = ident();
      expect("[");
      std::int64_t size = integer();
      expect("]");
      expect(";");
      if (size <= 0) syntax(t, "register size must be positive");
      if (kw == "qreg") {
        if (qregs_.count(name)) syntax(t, "duplicate register " + name);
        qregs_[name] = {num_qubits_, static_cast<int>(size)};
        num_qubits_ += static_cast<int>(size);
      } else {
        cregs_[name] = static_cast<int>(size);
      }
    } else if (kw == "gate") {
      next();
      gate_definition();
    } else if (kw == "opaque" || kw == "reset" || kw == "if") {
      unsupported(t, "'" + kw + "' statements are not supported");
    } else if (kw == "barrier") {
      next();
      while (peek().kind != Token::Kind::End && !accept(";")) next();
    } else if (kw == "measure") {
      next();
      auto qs = argument();
      expect("->");
      ident();
      if (accept("[")) {
        integer();
        expect("]");
      }
      expect(";");
      for (int q : qs) measured_.insert(q);
    } else {
      gate_statement();
    }
  }

  void gate_definition() {
    std::string name = ident();
    GateDef def;
    if (accept("(")) {
      if (!accept(")")) {
        do def.params.push_back(ident());
        while (accept(","));
        expect(")");
      }
    }
    do def.args.push_back(ident());
    while (accept(","));
    expect("{");
    while (!accept("}")) {
      const Token& t = peek();
      if (t.kind == Token::Kind::End) syntax(t, "unterminated gate body");
      if (t.kind == Token::Kind::Ident && t.text == "barrier") {
        next();
        while (peek().kind != Token::Kind::End && !accept(";")) next();
        continue;
      }
      GateCall call;
      call.line = t.line;
      call.column = t.column;
      call.name = ident();
      if (accept("(")) {
        if (!accept(")")) {
          do call.params.push_back(expression());
          while (accept(","));
          expect(")");
        }
      }
      do call.args.push_back(ident());
      while (accept(","));
      expect(";");
      def.body.push_back(std::move(call));
    }
    defs_[name] = std::move(def);
  }

  std::vector<int> argument() {
    const Token& t = peek();
    std::string reg = ident();
    auto it = qregs_.find(reg);
    if (it == qregs_.end()) syntax(t, "unknown quantum register " + reg);
    auto [base, size] = it->second;
    if (accept("[")) {
      std::int64_t idx = integer();
      expect("]");
      if (idx < 0 || idx >= size) syntax(t, "qubit index out of range");
      return {base + static_cast<int>(idx)};
    }
    std::vector<int> all(static_cast<std::size_t>(size));
    for (int k = 0; k < size; ++k) all[static_cast<std::size_t>(k)] = base + k;
    return all;
  }

  void gate_statement() {
    const Token& head = peek();
    GateCall call;
    call.line = head.line;
    call.column = head.column;
    call.name = ident();
    if (accept("(")) {
      if (!accept(")")) {
        do call.params.push_back(expression());
        while (accept(","));
        expect(")");
      }
    }
    std::vector<std::vector<int>> args;
    do args.push_back(argument());
    while (accept(","));
    expect(";");

    std::vector<Value> params;
    for (const auto& e : call.params) params.push_back(evaluate(*e, {}));

    std::size_t width = 1;
    for (const auto& a : args) {
      if (a.size() > 1) {
        if (width > 1 && a.size() != width) {
          syntax(head, "register size mismatch in broadcast");
        }
        width = a.size();
      }
    }
    for (std::size_t k = 0; k < width; ++k) {
      std::vector<int> qs;
      for (const auto& a : args) qs.push_back(a.size() == 1 ? a[0] : a[k]);
      for (int q : qs) {
        if (measured_.count(q)) {
          unsupported(head, "gate after measurement (mid-circuit measure)");
        }
      }
      apply(call.name, params, call.params, qs, head.line, head.column, 0);
    }
  }

  Phase angle(const Value& v, const ExprPtr& e, int line, int col) const {
    if (v.exact && v.pi_power == 1) return Phase(v.num, v.den);
    if (v.exact && v.num == 0) return Phase::zero();
    auto p = Phase::from_radians(v.real);
    if (!p) {
      throw QasmError(QasmError::Kind::Angle, line, col,
                      "angle '" + (e ? e->source : std::to_string(v.real)) +
                          "' is not a rational multiple of pi within "
                          "tolerance");
    }
    return *p;
  }

  void emit(Gate g, int line, int col) {
    for (int q : g.qubits) {
      if (q < 0 || q >= num_qubits_) {
        throw QasmError(QasmError::Kind::Syntax, line, col, "bad qubit");
      }
    }
    for (std::size_t i = 0; i < g.qubits.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (g.qubits[i] == g.qubits[j]) {
          throw QasmError(QasmError::Kind::Syntax, line, col,
                          "repeated qubit argument");
        }
      }
    }
    gates_.push_back(std::move(g));
  }

  void apply(const std::string& name, const std::vector<Value>& params,
             const std::vector<ExprPtr>& exprs, const std::vector<int>& qs,
             int line, int col, int depth) {
    if (depth > 64) {
      throw QasmError(QasmError::Kind::Syntax, line, col,
                      "gate definitions nest too deeply");
    }
    auto need = [&](std::size_t np, std::size_t nq) {
      if (params.size() != np || qs.size() != nq) {
        throw QasmError(QasmError::Kind::Syntax, line, col,
                        "wrong number of parameters or qubits for '" + name +
                            "'");
      }
    };
    auto ang = [&](std::size_t i) {
      return angle(params[i], i < exprs.size() ? exprs[i] : nullptr, line,
                   col);
    };
    const Phase half_pi(1, 2);
    using K = GateKind;
    static const std::map<std::string, K, std::less<>> fixed1 = {
        {"h", K::H},   {"x", K::X},     {"y", K::Y}, {"z", K::Z},
        {"s", K::S},   {"sdg", K::Sdg}, {"t", K::T}, {"tdg", K::Tdg}};
    if (auto it = fixed1.find(name); it != fixed1.end()) {
      need(0, 1);
      emit(Gate::single(it->second, qs[0]), line, col);
    } else if (name == "id") {
      need(0, 1);
    } else if (name == "rx" || name == "ry" || name == "rz") {
      need(1, 1);
      K k = name == "rx" ? K::Rx : name == "ry" ? K::Ry : K::Rz;
      emit(Gate::single(k, qs[0], ang(0)), line, col);
    } else if (name == "u1" || name == "p") {
      need(1, 1);
      emit(Gate::rz(qs[0], ang(0)), line, col);
    } else if (name == "u2") {
      need(2, 1);
      emit(Gate::rz(qs[0], ang(1)), line, col);
      emit(Gate::ry(qs[0], half_pi), line, col);
      emit(Gate::rz(qs[0], ang(0)), line, col);
    } else if (name == "u3" || name == "u" || name == "U") {
      need(3, 1);
      emit(Gate::rz(qs[0], ang(2)), line, col);
      emit(Gate::ry(qs[0], ang(0)), line, col);
      emit(Gate::rz(qs[0], ang(1)), line, col);
    } else if (name == "cx" || name == "CX") {
      need(0, 2);
      emit(Gate::cx(qs[0], qs[1]), line, col);
    } else if (name == "cz") {
      need(0, 2);
      emit(Gate::cz(qs[0], qs[1]), line, col);
    } else if (name == "cp" || name == "cu1") {
      need(1, 2);
      emit(Gate::ncp({qs[0], qs[1]}, ang(0)), line, col);
    } else if (name == "ccx") {
      need(0, 3);
      emit(Gate::h(qs[2]), line, col);
      emit(Gate::ncz({qs[0], qs[1], qs[2]}), line, col);
      emit(Gate::h(qs[2]), line, col);
    } else if (name == "ccz") {
      need(0, 3);
      emit(Gate::ncz({qs[0], qs[1], qs[2]}), line, col);
    } else if (name == "swap") {
      need(0, 2);
      emit(Gate::cx(qs[0], qs[1]), line, col);
      emit(Gate::cx(qs[1], qs[0]), line, col);
      emit(Gate::cx(qs[0], qs[1]), line, col);
    } else if (int m = native_arity(name, "ncp"); m > 0) {
      need(1, static_cast<std::size_t>(m));
      emit(Gate::ncp(qs, ang(0)), line, col);
    } else if (int m2 = native_arity(name, "ncz"); m2 > 0) {
      need(0, static_cast<std::size_t>(m2));
      emit(Gate::ncz(qs), line, col);
    } else if (auto it2 = defs_.find(name); it2 != defs_.end()) {
      const GateDef& def = it2->second;
      need(def.params.size(), def.args.size());
      Env env;
      for (std::size_t i = 0; i < def.params.size(); ++i) {
        env[def.params[i]] = params[i];
      }
      std::unordered_map<std::string, int> qmap;
      for (std::size_t i = 0; i < def.args.size(); ++i) {
        qmap[def.args[i]] = qs[i];
      }
      for (const auto& call : def.body) {
        std::vector<Value> sub;
        for (const auto& e : call.params) sub.push_back(evaluate(*e, env));
        std::vector<int> subq;
        for (const auto& a : call.args) {
          auto q = qmap.find(a);
          if (q == qmap.end()) {
            throw QasmError(QasmError::Kind::Syntax, call.line, call.column,
                            "unknown gate argument '" + a + "'");
          }
          subq.push_back(q->second);
        }
        apply(call.name, sub, call.params, subq, call.line, call.column,
              depth + 1);
      }
    } else {
      throw QasmError(QasmError::Kind::Unsupported, line, col,
                      "unknown gate '" + name + "'");
    }
  }

  // expression := term (('+'|'-') term)*
  ExprPtr expression() {
    std::size_t start = peek().offset;
    ExprPtr lhs = term();
    while (peek().kind == Token::Kind::Symbol &&
           (peek().text == "+" || peek().text == "-")) {
      const Token& op = next();
      lhs = binary(op, lhs, term());
    }
    lhs->source = std::string(src_.substr(start, peek().offset - start));
    return lhs;
  }
  ExprPtr term() {
    ExprPtr lhs = unary();
    while (peek().kind == Token::Kind::Symbol &&
           (peek().text == "*" || peek().text == "/")) {
      const Token& op = next();
      lhs = binary(op, lhs, unary());
    }
    return lhs;
  }
  ExprPtr unary() {
    if (peek().kind == Token::Kind::Symbol && peek().text == "-") {
      const Token& t = next();
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Unary;
      e->line = t.line;
      e->column = t.column;
      e->args.push_back(unary());
      return e;
    }
    if (accept("+")) return unary();
    ExprPtr base = primary();
    if (peek().kind == Token::Kind::Symbol && peek().text == "^") {
      const Token& op = next();
      return binary(op, base, unary());
    }
    return base;
  }
  ExprPtr binary(const Token& op, ExprPtr a, ExprPtr b) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Binary;
    e->name = op.text;
    e->line = op.line;
    e->column = op.column;
    e->args = {std::move(a), std::move(b)};
    return e;
  }
  ExprPtr primary() {
    const Token& t = next();
    auto e = std::make_shared<Expr>();
    e->line = t.line;
    e->column = t.column;
    e->source = t.text;
    if (t.kind == Token::Kind::Int) {
      e->literal = Value::integer(std::stoll(t.text));
    } else if (t.kind == Token::Kind::Real) {
      e->literal = decimal(t.text);
    } else if (t.kind == Token::Kind::Ident) {
      if (t.text == "pi") {
        e->literal = {std::numbers::pi, true, 1, 1, 1};
      } else if (peek().kind == Token::Kind::Symbol && peek().text == "(") {
        next();
        e->kind = Expr::Kind::Call;
        e->name = t.text;
        e->args.push_back(expression());
        expect(")");
      } else {
        e->kind = Expr::Kind::Param;
        e->name = t.text;
      }
    } else if (t.kind == Token::Kind::Symbol && t.text == "(") {
      auto inner = expression();
      expect(")");
      return inner;
    } else {
      syntax(t, "unexpected '" + t.text + "' in expression");
    }
    return e;
  }
  static Value decimal(const std::string& text) {
    double v = std::stod(text);
    // Plain decimals with few digits are kept exact.
    if (text.find_first_of("eE") == std::string::npos && text.size() <= 16) {
      std::int64_t num = 0, den = 1;
      bool frac = false;
      for (char c : text) {
        if (c == '.') {
          frac = true;
          continue;
        }
        num = num * 10 + (c - '0');
        if (frac) den *= 10;
      }
      return make_exact(v, num, den, 0);
    }
    return Value::inexact(v);
  }

  std::string_view src_;
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int num_qubits_ = 0;
  std::map<std::string, std::pair<int, int>> qregs_;
  std::map<std::string, int> cregs_;
  std::map<std::string, GateDef> defs_;
  std::set<int> measured_;
  std::vector<Gate> gates_;
};

}  // namespace qasm_detail

/// Reads an OpenQASM 2.0 program. Final measurements are stripped and
/// recorded in Circuit::measured(); u1/u2/u3/p lower to Rz/Ry, swap to three
/// CX, ccx to an H-conjugated NCZ, and `ncp<m>` / `ncz<m>` map to NCP / NCZ.
inline Circuit parse_qasm(std::string_view text) {
  return qasm_detail::Parser(text).run();
}

/// Serializes a circuit. NCP/NCZ gates of arity m are emitted as calls to
/// `ncp<m>(lambda)` / `ncz<m>` whose definitions are included in the header,
/// written out as the parity-phase product that realizes diag(1,...,e^{i
/// lambda}) with CX and u1 gates.
inline std::string write_qasm(const Circuit& c) {
  std::ostringstream os;
  os << "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
  std::set<int> ncp_arity, ncz_arity;
  for (const auto& g : c.gates()) {
    if (g.kind == GateKind::NCP && g.qubits.size() > 2) {
      ncp_arity.insert(static_cast<int>(g.qubits.size()));
    }
    if (g.kind == GateKind::NCZ) {
      ncz_arity.insert(static_cast<int>(g.qubits.size()));
      ncp_arity.insert(static_cast<int>(g.qubits.size()));
    }
  }
  for (int m : ncp_arity) {
    os << "// ncp" << m << "(lambda): " << m
       << "-qubit controlled phase diag(1,...,1,exp(i*lambda))\n";
    os << "gate ncp" << m << "(lambda) ";
    for (int i = 0; i < m; ++i) os << (i ? "," : "") << "a" << i;
    os << " {";
    const std::int64_t scale = std::int64_t{1} << (m - 1);
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
      std::vector<int> members;
      for (int i = 0; i < m; ++i) {
        if (mask & (1u << i)) members.push_back(i);
      }
      const bool negative = members.size() % 2 == 0;
      const int last = members.back();
      for (std::size_t k = 0; k + 1 < members.size(); ++k) {
        os << " cx a" << members[k] << ",a" << last << ";";
      }
      os << " u1(" << (negative ? "-" : "") << "lambda/" << scale << ") a"
         << last << ";";
      for (std::size_t k = members.size() - 1; k-- > 0;) {
        os << " cx a" << members[k] << ",a" << last << ";";
      }
    }
    os << " }\n";
  }
  for (int m : ncz_arity) {
    os << "gate ncz" << m << " ";
    for (int i = 0; i < m; ++i) os << (i ? "," : "") << "a" << i;
    os << " { ncp" << m << "(pi) ";
    for (int i = 0; i < m; ++i) os << (i ? "," : "") << "a" << i;
    os << "; }\n";
  }
  if (c.num_qubits() > 0) os << "qreg q[" << c.num_qubits() << "];\n";
  if (!c.measured().empty()) os << "creg c[" << c.num_qubits() << "];\n";
  for (const auto& g : c.gates()) {
    auto q = [&](std::size_t i) {
      return "q[" + std::to_string(g.qubits[i]) + "]";
    };
    switch (g.kind) {
      case GateKind::NCP:
        os << (g.qubits.size() == 2 ? std::string("cp")
                                    : "ncp" + std::to_string(g.qubits.size()))
           << "(" << g.angle.to_qasm() << ") ";
        break;
      case GateKind::NCZ:
        os << "ncz" << g.qubits.size() << " ";
        break;
      default:
        os << gate_name(g.kind);
        if (has_angle(g.kind)) os << "(" << g.angle.to_qasm() << ")";
        os << " ";
    }
    for (std::size_t i = 0; i < g.qubits.size(); ++i) {
      os << (i ? "," : "") << q(i);
    }
    os << ";\n";
  }
  for (int m : c.measured()) {
    os << "measure q[" << m << "] -> c[" << m << "];\n";
  }
  return os.str();
}

}  // namespace nazx
