#pragma once

#include <charconv>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "actree/error.hpp"
#include "actree/model.hpp"

namespace actree {

namespace detail {

enum class Tok { Ident, String, Number, LBrace, RBrace, LParen, RParen, Semi, Comma, Equals, End };

struct Token {
  Tok kind;
  std::string text;  // identifier, unescaped string body, or number spelling
  std::size_t line;
  std::size_t column;
};

inline std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::Ident: return "identifier '" + t.text + "'";
    case Tok::String: return "string \"" + t.text + "\"";
    case Tok::Number: return "number " + t.text;
    case Tok::End: return "end of input";
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_blank();
    const std::size_t line = line_, col = col_;
    if (pos_ >= src_.size()) return {Tok::End, "", line, col};
    const char c = src_[pos_];

    auto single = [&](Tok k) {
      advance();
      return Token{k, std::string(1, c), line, col};
    };
    switch (c) {
      case '{': return single(Tok::LBrace);
      case '}': return single(Tok::RBrace);
      case '(': return single(Tok::LParen);
      case ')': return single(Tok::RParen);
      case ';': return single(Tok::Semi);
      case ',': return single(Tok::Comma);
      case '=': return single(Tok::Equals);
      case '"': return string_literal(line, col);
      default: break;
    }
    if (is_ident_start(c)) {
      std::size_t start = pos_;
      while (pos_ < src_.size() && (is_ident_start(src_[pos_]) || is_digit(src_[pos_]))) advance();
      return {Tok::Ident, std::string(src_.substr(start, pos_ - start)), line, col};
    }
    if (is_digit(c) || c == '.' || c == '-' || c == '+') return number(line, col);
    throw ParseError(line, col, "character '" + std::string(1, c) + "'", {});
  }

 private:
  static bool is_ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
  static bool is_digit(char c) { return c >= '0' && c <= '9'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_blank() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token string_literal(std::size_t line, std::size_t col) {
    advance();  // opening quote
    std::string body;
    while (true) {
      if (pos_ >= src_.size()) throw ParseError(line, col, "unterminated string", {"'\"'"});
      const char c = src_[pos_];
      if (c == '"') {
        advance();
        return {Tok::String, std::move(body), line, col};
      }
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size() || (src_[pos_] != '"' && src_[pos_] != '\\')) {
          throw ParseError(line_, col_, "invalid escape sequence", {"'\\\"'", "'\\\\'"});
        }
      }
      body.push_back(src_[pos_]);
      advance();
    }
  }

  Token number(std::size_t line, std::size_t col) {
    std::size_t start = pos_;
    if (src_[pos_] == '-' || src_[pos_] == '+') advance();
    bool digits = false;
    while (pos_ < src_.size() && is_digit(src_[pos_])) advance(), digits = true;
    if (pos_ < src_.size() && src_[pos_] == '.') {
      advance();
      while (pos_ < src_.size() && is_digit(src_[pos_])) advance(), digits = true;
    }
    if (digits && pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      advance();
      if (pos_ < src_.size() && (src_[pos_] == '-' || src_[pos_] == '+')) advance();
      bool exp_digits = false;
      while (pos_ < src_.size() && is_digit(src_[pos_])) advance(), exp_digits = true;
      if (!exp_digits) throw ParseError(line_, col_, "malformed exponent", {"digit"});
    }
    std::string text(src_.substr(start, pos_ - start));
    if (!digits) {
      // A bare sign may prefix `inf`.
      if (text.size() == 1 && (text == "-" || text == "+") && src_.substr(pos_, 3) == "inf") {
        for (int i = 0; i < 3; ++i) advance();
        return {Tok::Number, text + "inf", line, col};
      }
      throw ParseError(line, col, "'" + text + "'", {"number"});
    }
    return {Tok::Number, std::move(text), line, col};
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

struct PendingDef {
  std::string name;
  std::string label;
  enum class Kind { And, Or, Cm, Attack, Detect, Mitigate } kind;
  std::vector<Token> refs;
  LeafTiming timing;
  Token where;
};

class Parser {
 public:
  explicit Parser(std::string_view text) : lex_(text) { shift(); }

  Act parse() {
    expect_keyword("act");
    Act act;
    act.title = expect(Tok::String, "string").text;
    expect(Tok::LBrace, "'{'");
    expect_keyword("root");
    const Token root = expect(Tok::Ident, "identifier");
    expect(Tok::Semi, "';'");

    std::vector<PendingDef> defs;
    do {
      defs.push_back(definition());
    } while (cur_.kind == Tok::Ident);
    expect(Tok::RBrace, {"identifier", "'}'"});
    if (cur_.kind != Tok::End) fail({"end of input"});

    return bind(std::move(act), root, std::move(defs));
  }

 private:
  PendingDef definition() {
    PendingDef d;
    d.where = expect(Tok::Ident, "identifier");
    d.name = d.where.text;
    if (cur_.kind == Tok::String) {
      d.label = cur_.text;
      shift();
    }
    expect(Tok::Equals, {"'='", "string"});

    const Token head = expect(Tok::Ident, {"AND", "OR", "CM", "ATTACK", "DETECT", "MITIGATE"});
    using K = PendingDef::Kind;
    if (head.text == "AND" || head.text == "OR") {
      d.kind = head.text == "AND" ? K::And : K::Or;
      expect(Tok::LParen, "'('");
      d.refs.push_back(expect(Tok::Ident, "identifier"));
      while (cur_.kind == Tok::Comma) {
        shift();
        d.refs.push_back(expect(Tok::Ident, "identifier"));
      }
      expect(Tok::RParen, {"','", "')'"});
    } else if (head.text == "CM") {
      d.kind = K::Cm;
      expect(Tok::LParen, "'('");
      d.refs.push_back(expect(Tok::Ident, "identifier"));
      expect(Tok::Comma, "','");
      d.refs.push_back(expect(Tok::Ident, "identifier"));
      expect(Tok::RParen, "')'");
    } else if (head.text == "ATTACK" || head.text == "DETECT" || head.text == "MITIGATE") {
      d.kind = head.text == "ATTACK" ? K::Attack : head.text == "DETECT" ? K::Detect : K::Mitigate;
      d.timing = params();
    } else {
      throw ParseError(head.line, head.column, describe(head),
                       {"AND", "OR", "CM", "ATTACK", "DETECT", "MITIGATE"});
    }
    expect(Tok::Semi, "';'");
    return d;
  }

  LeafTiming params() {
    LeafTiming t;
    expect(Tok::LParen, "'('");
    expect_keyword("p");
    expect(Tok::Equals, "'='");
    t.p = number();
    if (cur_.kind == Tok::Comma) {
      shift();
      const Token key = expect(Tok::Ident, {"t", "lambda"});
      if (key.text != "t" && key.text != "lambda") throw ParseError(key.line, key.column, describe(key), {"t", "lambda"});
      expect(Tok::Equals, "'='");
      const double v = number();
      if (key.text == "t") {
        t.horizon = v;
      } else if (v == std::numeric_limits<double>::infinity()) {
        t.instantaneous = true;
      } else {
        t.rate = v;
      }
    }
    expect(Tok::RParen, {"','", "')'"});
    return t;
  }

  double number() {
    if (cur_.kind == Tok::Ident && cur_.text == "inf") {
      shift();
      return std::numeric_limits<double>::infinity();
    }
    const Token tok = expect(Tok::Number, "number");
    std::string_view s = tok.text;
    bool neg = false;
    if (!s.empty() && (s.front() == '+' || s.front() == '-')) {
      neg = s.front() == '-';
      s.remove_prefix(1);
    }
    if (s == "inf") return neg ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw ParseError(tok.line, tok.column, describe(tok), {"number"});
    }
    return neg ? -v : v;
  }

  Act bind(Act act, const Token& root, std::vector<PendingDef> defs) {
    std::vector<Diagnostic> diags;
    std::map<std::string, NodeId, std::less<>> index;
    for (std::size_t i = 0; i < defs.size(); ++i) {
      auto [it, fresh] = index.emplace(defs[i].name, NodeId{static_cast<std::uint32_t>(i)});
      if (!fresh) {
        diags.push_back({DiagCode::DuplicateDefinition, defs[i].name,
                         "redefined at " + position(defs[i].where) + " (first defined at " +
                             position(defs[it->second.value].where) + ")"});
      }
    }
    auto resolve = [&](const Token& ref) -> NodeId {
      auto it = index.find(ref.text);
      if (it == index.end()) {
        diags.push_back({DiagCode::UndefinedReference, ref.text, "referenced at " + position(ref) + " but never defined"});
        return NodeId{};
      }
      return it->second;
    };

    act.root = resolve(root);
    act.nodes.reserve(defs.size());
    for (auto& d : defs) {
      using K = PendingDef::Kind;
      Node node{std::move(d.name), std::move(d.label), AttackLeaf{}};
      switch (d.kind) {
        case K::And:
        case K::Or: {
          std::vector<NodeId> kids;
          for (const auto& r : d.refs) kids.push_back(resolve(r));
          if (d.kind == K::And) node.kind = AndGate{std::move(kids)};
          else node.kind = OrGate{std::move(kids)};
          break;
        }
        case K::Cm: node.kind = CmGate{resolve(d.refs[0]), resolve(d.refs[1])}; break;
        case K::Attack: node.kind = AttackLeaf{d.timing}; break;
        case K::Detect: node.kind = DetectLeaf{d.timing}; break;
        case K::Mitigate: node.kind = MitigateLeaf{d.timing}; break;
      }
      act.nodes.push_back(std::move(node));
    }
    if (!diags.empty()) throw ValidationError(std::move(diags));
    ensure_valid(act);
    return act;
  }

  static std::string position(const Token& t) { return std::to_string(t.line) + ":" + std::to_string(t.column); }

  void shift() { cur_ = lex_.next(); }

  [[noreturn]] void fail(std::vector<std::string> expected) {
    throw ParseError(cur_.line, cur_.column, describe(cur_), std::move(expected));
  }

  Token expect(Tok kind, std::vector<std::string> expected) {
    if (cur_.kind != kind) fail(std::move(expected));
    Token t = std::move(cur_);
    shift();
    return t;
  }
  Token expect(Tok kind, const char* expected) { return expect(kind, std::vector<std::string>{expected}); }

  void expect_keyword(std::string_view word) {
    if (cur_.kind != Tok::Ident || cur_.text != word) fail({"'" + std::string(word) + "'"});
    shift();
  }

  Lexer lex_;
  Token cur_{Tok::End, "", 1, 1};
};

}  // namespace detail

/// Parses and validates an ACT description.
///
/// Throws ParseError on malformed input and ValidationError (with
/// machine-readable diagnostic codes) on undefined references, duplicate
/// definitions, or structural violations.
inline Act parse_act(std::string_view text) { return detail::Parser(text).parse(); }

}  // namespace actree
