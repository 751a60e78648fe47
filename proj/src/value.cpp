#include "ilab/value.hpp"

#include <cctype>

#include "ilab/error.hpp"

namespace ilab {

Value::Value(const Rational& r) {
  if (auto i = r.to_int64()) {
    data_ = *i;
  } else {
    data_ = r;
  }
}

Value Value::str(std::string s) {
  Value v;
  v.data_ = std::move(s);
  return v;
}

Value Value::tuple(Tuple items) {
  Value v;
  v.data_ = std::move(items);
  return v;
}

Value::Kind Value::kind() const { return static_cast<Kind>(data_.index()); }

std::int64_t Value::as_int() const {
  if (const auto* i = std::get_if<std::int64_t>(&data_)) return *i;
  throw Error(ErrorCode::InvalidArgument, "value " + text() + " is not an integer");
}

Rational Value::as_rational() const {
  if (const auto* i = std::get_if<std::int64_t>(&data_)) return Rational(*i);
  if (const auto* r = std::get_if<Rational>(&data_)) return *r;
  throw Error(ErrorCode::InvalidArgument, "value " + text() + " is not a number");
}

const std::string& Value::as_str() const {
  if (const auto* s = std::get_if<std::string>(&data_)) return *s;
  throw Error(ErrorCode::InvalidArgument, "value " + text() + " is not a string");
}

const Value::Tuple& Value::items() const {
  if (const auto* t = std::get_if<Tuple>(&data_)) return *t;
  throw Error(ErrorCode::InvalidArgument, "value " + text() + " is not a tuple");
}

namespace {

bool is_identifier(const std::string& s) {
  if (s.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  for (char c : s) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-')) return false;
  }
  return true;
}

}  // namespace

std::string Value::text() const {
  switch (kind()) {
    case Kind::Int:
      return std::to_string(std::get<std::int64_t>(data_));
    case Kind::Rat:
      return std::get<Rational>(data_).str();
    case Kind::Str: {
      const auto& s = std::get<std::string>(data_);
      if (is_identifier(s)) return s;
      std::string out = "\"";
      for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out + "\"";
    }
    case Kind::Tuple: {
      std::string out = "(";
      const auto& t = std::get<Tuple>(data_);
      for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ", ";
        out += t[i].text();
      }
      return out + ")";
    }
  }
  return {};
}

int kind_family(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Int:
    case Value::Kind::Rat:
      return 0;
    case Value::Kind::Str:
      return 1;
    case Value::Kind::Tuple:
      return 2;
  }
  return 3;
}

std::strong_ordering operator<=>(const Value& a, const Value& b) {
  const int fa = kind_family(a);
  const int fb = kind_family(b);
  if (fa != fb) return fa <=> fb;
  switch (fa) {
    case 0: {
      if (a.kind() == Value::Kind::Int && b.kind() == Value::Kind::Int) return a.as_int() <=> b.as_int();
      return a.as_rational() <=> b.as_rational();
    }
    case 1:
      return a.as_str().compare(b.as_str()) <=> 0;
    default: {
      const auto& ta = a.items();
      const auto& tb = b.items();
      const std::size_t n = std::min(ta.size(), tb.size());
      for (std::size_t i = 0; i < n; ++i) {
        if (auto c = ta[i] <=> tb[i]; c != 0) return c;
      }
      return ta.size() <=> tb.size();
    }
  }
}

namespace {

class LiteralParser {
 public:
  explicit LiteralParser(std::string_view text) : text_(text) {}

  Value parse_all() {
    Value v = parse();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return v;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw Error(ErrorCode::SyntaxError,
                "column " + std::to_string(pos_ + 1) + ": " + what + " in literal '" + std::string(text_) + "'");
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  Value parse() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of literal");
    const char c = text_[pos_];
    if (c == '(') return parse_tuple();
    if (c == '"') return parse_quoted();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  Value parse_tuple() {
    ++pos_;
    Value::Tuple items;
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == ')') {
      ++pos_;
      return Value::tuple(std::move(items));
    }
    while (true) {
      items.push_back(parse());
      skip_space();
      if (pos_ >= text_.size()) fail("unterminated tuple");
      if (text_[pos_] == ',') {
        ++pos_;
        continue;
      }
      if (text_[pos_] == ')') {
        ++pos_;
        return Value::tuple(std::move(items));
      }
      // whitespace-separated elements are accepted as well
      if (pos_ > 0 && std::isspace(static_cast<unsigned char>(text_[pos_ - 1]))) continue;
      fail("expected ',' or ')'");
    }
  }

  Value parse_quoted() {
    ++pos_;
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) ++pos_;
      out += text_[pos_++];
    }
    if (pos_ >= text_.size()) fail("unterminated string");
    ++pos_;
    return Value::str(std::move(out));
  }

  Value parse_number() {
    const std::size_t start = pos_;
    if (text_[pos_] == '-' || text_[pos_] == '+') ++pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '/' ||
                                   text_[pos_] == '.')) {
      ++pos_;
    }
    const std::string_view token = text_.substr(start, pos_ - start);
    if (token.find('.') != std::string_view::npos) {
      pos_ = start;
      fail("decimal numbers are not allowed, write an exact fraction such as 1/2");
    }
    auto r = Rational::parse(token);
    if (!r) {
      pos_ = start;
      fail("malformed number '" + std::string(token) + "'");
    }
    return Value(*r);
  }

  Value parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                                   text_[pos_] == '.' || text_[pos_] == '-')) {
      ++pos_;
    }
    return Value::str(std::string(text_.substr(start, pos_ - start)));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Value parse_value(std::string_view text) { return LiteralParser(text).parse_all(); }

}  // namespace ilab
