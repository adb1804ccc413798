#pragma once

// Recursive-descent parser shared by scalar strings and defining-equation
// right-hand sides. The Builder supplies the value type and the meaning of
// names; the grammar here is fixed:
//
//   expr    := ['+'|'-'] term { ('+'|'-') term }
//   term    := factor { ('*'|'/') factor }
//   factor  := primary [ '^' INT ]
//   primary := NUMBER | NAME | 'conj' '(' expr ')' | '(' expr ')'
//   NUMBER  := INT [ '/' INT ] [ 'i' ]  |  'i'
//
// Numeric tokens absorb a following 'i' (2i, 3/4i); a bare 'i' is the
// imaginary unit. All errors carry kind "SyntaxError" and a position.

#include <cctype>
#include <string>

#include "crmoduli/algebra.hpp"

namespace crmoduli::detail {

template <class Builder>
class ExprParser {
 public:
  using Value = typename Builder::Value;

  ExprParser(const std::string& text, Builder& b) : s_(text), b_(b) {}

  Value parse() {
    Value v = expr();
    skip_ws();
    if (pos_ != s_.size()) err("unexpected trailing input");
    return v;
  }

 private:
  const std::string& s_;
  Builder& b_;
  size_t pos_ = 0;

  [[noreturn]] void err(const std::string& msg) const {
    fail("SyntaxError", msg + " at position " + std::to_string(pos_));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  BigInt integer() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == start) err("expected an integer");
    return BigInt(s_.substr(start, pos_ - start));
  }

  Value expr() {
    bool neg = false;
    skip_ws();
    if (peek() == '+' || peek() == '-') neg = s_[pos_++] == '-';
    Value v = term();
    if (neg) v = b_.neg(std::move(v));
    while (true) {
      char c = peek();
      if (c == '+') {
        ++pos_;
        v = b_.add(std::move(v), term());
      } else if (c == '-') {
        ++pos_;
        v = b_.sub(std::move(v), term());
      } else {
        return v;
      }
    }
  }

  Value term() {
    Value v = factor();
    while (true) {
      char c = peek();
      if (c == '*') {
        ++pos_;
        v = b_.mul(std::move(v), factor());
      } else if (c == '/') {
        ++pos_;
        size_t at = pos_;
        v = b_.div(std::move(v), factor(), at);
      } else {
        return v;
      }
    }
  }

  Value factor() {
    Value v = primary();
    if (peek() == '^') {
      ++pos_;
      bool neg = eat('-');
      BigInt e = integer();
      if (e > 64) err("exponent too large");
      v = b_.pow(std::move(v), neg ? -static_cast<int>(e.convert_to<long>())
                                   : static_cast<int>(e.convert_to<long>()),
                 pos_);
    }
    return v;
  }

  Value primary() {
    skip_ws();
    if (pos_ >= s_.size()) err("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Value v = expr();
      if (!eat(')')) err("expected ')'");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      if (name == "i") return b_.number(GaussianRational::i());
      if (name == "conj") {
        if (!eat('(')) err("expected '(' after conj");
        Value v = expr();
        if (!eat(')')) err("expected ')'");
        return b_.conj(std::move(v), start);
      }
      return b_.name(name, start);
    }
    err(std::string("unexpected character '") + c + "'");
  }

  Value number() {
    BigInt n = integer();
    BigInt d = 1;
    if (pos_ < s_.size() && s_[pos_] == '/') {
      // Only a digit run may follow for this to be a rational literal;
      // otherwise leave the '/' for the term level.
      size_t save = pos_;
      ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        d = integer();
        if (d == 0) err("zero denominator in literal");
      } else {
        pos_ = save;
      }
    }
    BigRat q(n, d);
    if (pos_ < s_.size() && s_[pos_] == 'i' &&
        (pos_ + 1 >= s_.size() ||
         !(std::isalnum(static_cast<unsigned char>(s_[pos_ + 1])) || s_[pos_ + 1] == '_'))) {
      ++pos_;
      return b_.number(GaussianRational(BigRat(0), q));
    }
    return b_.number(GaussianRational(q));
  }
};

template <class Builder>
typename Builder::Value parse_expression(const std::string& text, Builder& b) {
  return ExprParser<Builder>(text, b).parse();
}

}  // namespace crmoduli::detail
