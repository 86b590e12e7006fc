#include <cctype>
#include <charconv>

#include "rosyn/error.hpp"
#include "rosyn/logic/formula.hpp"

namespace rosyn::logic {

namespace {

class Parser {
 public:
  Parser(std::string_view text, const Alphabet& atoms) : text_(text), atoms_(atoms) {}

  Formula parse() {
    Formula f = parse_or();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  static bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  std::string_view peek_ident() {
    skip_space();
    if (pos_ >= text_.size() || !ident_start(text_[pos_])) return {};
    std::size_t end = pos_;
    while (end < text_.size() && ident_char(text_[end])) ++end;
    return text_.substr(pos_, end - pos_);
  }

  bool is_keyword(std::string_view id) const {
    return id == "X" || id == "U" || id == "F" || id == "G" || id == "true";
  }

  Formula parse_or() {
    Formula lhs = parse_and();
    while (eat('|')) lhs = Formula::disj(std::move(lhs), parse_and());
    return lhs;
  }

  Formula parse_and() {
    Formula lhs = parse_until();
    while (eat('&')) lhs = Formula::conj(std::move(lhs), parse_until());
    return lhs;
  }

  Formula parse_until() {
    Formula lhs = parse_unary();
    if (peek_ident() == "U") {
      pos_ += 1;
      return Formula::until(std::move(lhs), parse_until());
    }
    return lhs;
  }

  int parse_bound() {
    skip_space();
    if (text_.substr(pos_, 2) != "<=") fail("expected '<=' after bounded operator");
    pos_ += 2;
    skip_space();
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    int n = 0;
    auto [ptr, ec] = std::from_chars(first, last, n);
    if (ec != std::errc{}) fail("expected integer bound");
    pos_ += static_cast<std::size_t>(ptr - first);
    return n;
  }

  Formula parse_unary() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const std::size_t start = pos_;
    if (eat('!')) {
      const std::string_view id = peek_ident();
      if (id.empty() || is_keyword(id)) {
        pos_ = start;
        fail("negation may only be applied to an atomic proposition");
      }
      return Formula::negated(atom_index(id));
    }
    const std::string_view id = peek_ident();
    if (id == "X") {
      pos_ += 1;
      return Formula::next(parse_unary());
    }
    if (id == "F") {
      pos_ += 1;
      skip_space();
      if (text_.substr(pos_, 2) == "<=") {
        const int n = parse_bound();
        return Formula::eventually_within(n, parse_unary());
      }
      return Formula::eventually(parse_unary());
    }
    if (id == "G") {
      pos_ += 1;
      skip_space();
      if (text_.substr(pos_, 2) != "<=") fail("unbounded G is not co-safe; use G<=n");
      const int n = parse_bound();
      return Formula::always_within(n, parse_unary());
    }
    return parse_primary();
  }

  Formula parse_primary() {
    if (eat('(')) {
      Formula f = parse_or();
      if (!eat(')')) fail("expected ')'");
      return f;
    }
    const std::string_view id = peek_ident();
    if (id.empty()) fail("expected formula");
    if (id == "true") {
      pos_ += id.size();
      return Formula::truth();
    }
    if (is_keyword(id)) fail("unexpected operator '" + std::string(id) + "'");
    return Formula::prop(atom_index(id));
  }

  int atom_index(std::string_view id) {
    const int i = atoms_.index_of(std::string(id));
    if (i < 0) fail("unknown atom '" + std::string(id) + "'");
    pos_ += id.size();
    return i;
  }

  std::string_view text_;
  const Alphabet& atoms_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_scltl(std::string_view text, const Alphabet& atoms) { return Parser(text, atoms).parse(); }

}  // namespace rosyn::logic
