// Copyright 2026 The Geostore Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "geostore/query.hpp"

#include <algorithm>
#include <array>

#include "geostore/text.hpp"

namespace geostore::query {

bool Logical::operator==(const Logical& other) const {
  return op == other.op && children == other.children;
}

std::string_view to_string(LogicalOp op) {
  switch (op) {
    case LogicalOp::kAnd: return "AND";
    case LogicalOp::kOr: return "OR";
    case LogicalOp::kNot: return "NOT";
  }
  return "?";
}

std::string_view to_string(CompareOp op) {
  switch (op) {
    case CompareOp::kEq: return "EQ";
    case CompareOp::kGt: return "GT";
    case CompareOp::kGte: return "GTE";
    case CompareOp::kLt: return "LT";
    case CompareOp::kLte: return "LTE";
  }
  return "?";
}

Node match_all() { return Node{MatchAll{}}; }
Node text(std::string token) { return Node{Term{Text{std::move(token)}}}; }
Node bbox(double min_x, double min_y, double max_x, double max_y) {
  return Node{Term{BoundingBox::make(min_x, min_y, max_x, max_y)}};
}
Node date(std::string_view iso) {
  auto d = DateValue::parse(iso);
  if (!d) throw Error(ErrorCode::kInvalidArgument, "not an ISO date");
  return Node{Term{*d}};
}
Node logical(LogicalOp op, std::vector<Node> children) {
  if (children.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "logical node without children");
  }
  return Node{Logical{op, std::move(children)}};
}
Node compare(CompareOp op, std::string key, TypedValue value) {
  if (key.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "comparison with empty key");
  }
  return Node{Comparison{op, std::move(key), std::move(value)}};
}

// ---------------------------------------------------------------------------
// Term classification

namespace {

std::optional<BoundingBox> try_bbox(std::string_view token, bool& has_shape) {
  has_shape = std::count(token.begin(), token.end(), ',') == 3;
  if (!has_shape) return std::nullopt;
  std::array<double, 4> v{};
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    auto next = token.find(',', pos);
    if (next == std::string_view::npos) next = token.size();
    auto n = parse_number(token.substr(pos, next - pos));
    if (!n) return std::nullopt;
    v[i] = *n;
    pos = next + 1;
  }
  if (v[0] > v[2] || v[1] > v[3]) return std::nullopt;
  return BoundingBox{v[0], v[1], v[2], v[3]};
}

}  // namespace

Term classify_term(std::string_view token) {
  bool bbox_shape = false;
  if (auto box = try_bbox(token, bbox_shape)) return Term{*box};
  if (bbox_shape) {
    throw Error(ErrorCode::kMalformedBbox,
                "malformed bounding box '" + std::string(token) +
                    "' (expected minX,minY,maxX,maxY)");
  }
  if (auto d = DateValue::parse(token)) return Term{*d};
  return Term{Text{std::string(token)}};
}

TypedValue classify_value(std::string_view token) { return parse_typed(token); }

// ---------------------------------------------------------------------------
// Lexer

namespace {

constexpr std::size_t kMaxDepth = 200;

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

struct Token {
  enum class Kind { kLParen, kRParen, kWord, kEnd } kind = Kind::kEnd;
  std::string text;
  bool quoted = false;
  bool paren_follows = false;  // `(` immediately after the word
  std::size_t offset = 0;
};

class Lexer {
 public:
  explicit Lexer(std::string_view input) : in_(input) {}

  Token next() {
    while (pos_ < in_.size() && is_space(in_[pos_])) ++pos_;
    Token t;
    t.offset = pos_;
    if (pos_ == in_.size()) return t;
    const char c = in_[pos_];
    if (c == '(') {
      ++pos_;
      t.kind = Token::Kind::kLParen;
      return t;
    }
    if (c == ')') {
      ++pos_;
      t.kind = Token::Kind::kRParen;
      return t;
    }
    t.kind = Token::Kind::kWord;
    if (c == '"') {
      t.quoted = true;
      ++pos_;
      for (;;) {
        if (pos_ == in_.size()) {
          throw Error(ErrorCode::kParseError, "unterminated quoted string",
                      t.offset);
        }
        const char q = in_[pos_++];
        if (q == '"') break;
        if (q == '\\' && pos_ < in_.size() &&
            (in_[pos_] == '"' || in_[pos_] == '\\')) {
          t.text += in_[pos_++];
        } else {
          t.text += q;
        }
      }
    } else {
      const std::size_t start = pos_;
      while (pos_ < in_.size() && !is_space(in_[pos_]) && in_[pos_] != '(' &&
             in_[pos_] != ')') {
        ++pos_;
      }
      t.text = std::string(in_.substr(start, pos_ - start));
    }
    t.paren_follows = pos_ < in_.size() && in_[pos_] == '(';
    return t;
  }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

std::optional<LogicalOp> logical_head(std::string_view s) {
  if (s == "AND") return LogicalOp::kAnd;
  if (s == "OR") return LogicalOp::kOr;
  if (s == "NOT") return LogicalOp::kNot;
  return std::nullopt;
}

std::optional<CompareOp> compare_head(std::string_view s) {
  if (s == "EQ") return CompareOp::kEq;
  if (s == "GT") return CompareOp::kGt;
  if (s == "GTE") return CompareOp::kGte;
  if (s == "LT") return CompareOp::kLt;
  if (s == "LTE") return CompareOp::kLte;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view input) : lexer_(input) { advance(); }

  Node parse() {
    std::vector<Node> exprs;
    while (current_.kind != Token::Kind::kEnd) {
      if (current_.kind == Token::Kind::kRParen) {
        throw Error(ErrorCode::kParseError, "unbalanced ')'", current_.offset);
      }
      exprs.push_back(parse_expr(0));
    }
    if (exprs.empty()) return match_all();
    if (exprs.size() == 1) return std::move(exprs.front());
    return Node{Logical{kImplicitTopLevelOp, std::move(exprs)}};
  }

 private:
  void advance() { current_ = lexer_.next(); }

  [[noreturn]] void fail(const std::string& message, std::size_t offset) {
    throw Error(ErrorCode::kParseError, message, offset);
  }

  Node parse_expr(std::size_t depth) {
    if (depth > kMaxDepth) fail("query nested too deeply", current_.offset);
    if (current_.kind == Token::Kind::kLParen) {
      fail("unexpected '(' (operators are written as NAME(...))",
           current_.offset);
    }
    if (current_.kind != Token::Kind::kWord) {
      fail("expected an expression", current_.offset);
    }
    Token head = std::move(current_);
    advance();
    if (head.quoted || !head.paren_follows) return parse_term(head);

    advance();  // consume '('
    if (auto op = logical_head(head.text)) {
      std::vector<Node> children;
      while (current_.kind != Token::Kind::kRParen) {
        if (current_.kind == Token::Kind::kEnd) {
          fail("missing ')' for " + head.text + " opened here", head.offset);
        }
        children.push_back(parse_expr(depth + 1));
      }
      if (children.empty()) {
        fail(head.text + " requires at least one operand", head.offset);
      }
      advance();
      return Node{Logical{*op, std::move(children)}};
    }
    if (auto op = compare_head(head.text)) {
      std::vector<Token> args;
      while (current_.kind == Token::Kind::kWord) {
        if (!current_.quoted && current_.paren_follows) {
          fail("operands of " + head.text + " must be plain tokens",
               current_.offset);
        }
        args.push_back(std::move(current_));
        advance();
      }
      if (current_.kind == Token::Kind::kEnd) {
        fail("missing ')' for " + head.text + " opened here", head.offset);
      }
      if (current_.kind == Token::Kind::kLParen) {
        fail("unexpected '(' inside " + head.text, current_.offset);
      }
      if (args.size() != 2) {
        fail(head.text + " takes exactly 2 arguments (key value), got " +
                 std::to_string(args.size()),
             head.offset);
      }
      if (args[0].text.empty()) fail("empty comparison key", args[0].offset);
      advance();
      TypedValue value = args[1].quoted ? TypedValue{args[1].text}
                                        : classify_value(args[1].text);
      return Node{Comparison{*op, std::move(args[0].text), std::move(value)}};
    }
    fail("unknown operator '" + head.text + "'", head.offset);
  }

  Node parse_term(const Token& token) {
    if (token.text.empty()) fail("empty term", token.offset);
    if (token.quoted) return Node{Term{Text{token.text}}};
    try {
      return Node{classify_term(token.text)};
    } catch (const Error& e) {
      fail(e.message(), token.offset);
    }
  }

  Lexer lexer_;
  Token current_;
};

}  // namespace

Node parse_query(std::string_view text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Rendering

namespace {

std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

bool plain_word(std::string_view s) {
  if (s.empty() || s.front() == '"') return false;
  return std::none_of(s.begin(), s.end(), [](char c) {
    return is_space(c) || c == '(' || c == ')';
  });
}

std::string render_text_term(const std::string& token) {
  if (plain_word(token)) {
    try {
      const Term t = classify_term(token);
      if (std::holds_alternative<Text>(t.value)) return token;
    } catch (const Error&) {
    }
  }
  return quote(token);
}

std::string render_key(const std::string& key) {
  return plain_word(key) ? key : quote(key);
}

std::string render_value(const TypedValue& value) {
  if (const auto* s = std::get_if<std::string>(&value)) {
    if (plain_word(*s) && is_text(classify_value(*s))) return *s;
    return quote(*s);
  }
  return to_text(value);
}

void render_into(const Node& node, std::string& out) {
  std::visit(
      [&out](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, MatchAll>) {
          // nothing: blank input parses to MatchAll
        } else if constexpr (std::is_same_v<T, Term>) {
          if (const auto* t = std::get_if<Text>(&n.value)) {
            out += render_text_term(t->token);
          } else if (const auto* b = std::get_if<BoundingBox>(&n.value)) {
            out += format_number(b->min_x) + ',' + format_number(b->min_y) +
                   ',' + format_number(b->max_x) + ',' +
                   format_number(b->max_y);
          } else {
            out += std::get<DateValue>(n.value).str();
          }
        } else if constexpr (std::is_same_v<T, Logical>) {
          out += to_string(n.op);
          out += '(';
          for (std::size_t i = 0; i < n.children.size(); ++i) {
            if (i) out += ' ';
            render_into(n.children[i], out);
          }
          out += ')';
        } else {
          out += to_string(n.op);
          out += '(';
          out += render_key(n.key);
          out += ' ';
          out += render_value(n.value);
          out += ')';
        }
      },
      node.value);
}

}  // namespace

std::string render(const Node& node) {
  std::string out;
  render_into(node, out);
  return out;
}

// ---------------------------------------------------------------------------
// Comparison and evaluation

namespace {

template <typename T>
bool ordered(CompareOp op, const T& l, const T& r) {
  switch (op) {
    case CompareOp::kEq: return l == r;
    case CompareOp::kGt: return l > r;
    case CompareOp::kGte: return l >= r;
    case CompareOp::kLt: return l < r;
    case CompareOp::kLte: return l <= r;
  }
  return false;
}

bool compare_text(CompareOp op, const std::string& l, const std::string& r) {
  if (op == CompareOp::kEq) return text::to_lower(l) == text::to_lower(r);
  return ordered(op, l, r);
}

bool compare_dates(CompareOp op, const DateValue& l, const DateValue& r) {
  const auto l_lo = l.lower_bound(), l_hi = l.upper_bound();
  const auto r_lo = r.lower_bound(), r_hi = r.upper_bound();
  switch (op) {
    case CompareOp::kEq: return l_lo < r_hi && r_lo < l_hi;
    case CompareOp::kLt: return l_hi <= r_lo;
    case CompareOp::kLte: return l_lo < r_hi;
    case CompareOp::kGt: return l_lo >= r_hi;
    case CompareOp::kGte: return l_hi > r_lo;
  }
  return false;
}

bool term_matches(const Term& term, const IndexDocument& doc) {
  if (const auto* t = std::get_if<Text>(&term.value)) {
    const std::string lowered = text::to_lower(t->token);
    for (const auto& tag : doc.metadata.tags) {
      if (text::to_lower(tag) == lowered) return true;
    }
    const auto wanted = text::tokenize(t->token);
    if (wanted.empty()) return false;
    std::vector<std::string> property_tokens;
    for (const auto& [key, value] : doc.metadata.properties) {
      text::tokenize(value, property_tokens);
    }
    return std::all_of(wanted.begin(), wanted.end(), [&](const std::string& w) {
      return doc.has_token(w) ||
             std::find(property_tokens.begin(), property_tokens.end(), w) !=
                 property_tokens.end();
    });
  }
  if (const auto* b = std::get_if<BoundingBox>(&term.value)) {
    return doc.bbox && doc.bbox->intersects(*b);
  }
  const auto& d = std::get<DateValue>(term.value);
  const auto ts = doc.metadata.import_timestamp;
  return d.lower_bound() <= ts && ts < d.upper_bound();
}

bool comparison_matches(const Comparison& c, const IndexDocument& doc) {
  for (const auto& attr : doc.attributes) {
    if (attr.key == c.key && compare_typed(c.op, attr.value, c.value)) {
      return true;
    }
  }
  auto it = doc.metadata.properties.find(c.key);
  return it != doc.metadata.properties.end() &&
         compare_typed(c.op, parse_typed(it->second), c.value);
}

}  // namespace

bool compare_typed(CompareOp op, const TypedValue& left,
                   const TypedValue& right) {
  if (left.index() == right.index()) {
    switch (left.index()) {
      case 0:
        return compare_text(op, std::get<std::string>(left),
                            std::get<std::string>(right));
      case 1:
        return ordered(op, std::get<double>(left), std::get<double>(right));
      default:
        return compare_dates(op, std::get<DateValue>(left),
                             std::get<DateValue>(right));
    }
  }
  if (is_text(left) || is_text(right)) {
    return compare_text(op, to_text(left), to_text(right));
  }
  return false;
}

bool evaluate(const Node& node, const IndexDocument& doc) {
  return std::visit(
      [&doc](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, MatchAll>) {
          return true;
        } else if constexpr (std::is_same_v<T, Term>) {
          return term_matches(n, doc);
        } else if constexpr (std::is_same_v<T, Logical>) {
          switch (n.op) {
            case LogicalOp::kAnd:
              return std::all_of(
                  n.children.begin(), n.children.end(),
                  [&doc](const Node& c) { return evaluate(c, doc); });
            case LogicalOp::kOr:
              return std::any_of(
                  n.children.begin(), n.children.end(),
                  [&doc](const Node& c) { return evaluate(c, doc); });
            case LogicalOp::kNot:
              return std::none_of(
                  n.children.begin(), n.children.end(),
                  [&doc](const Node& c) { return evaluate(c, doc); });
          }
          return false;
        } else {
          return comparison_matches(n, doc);
        }
      },
      node.value);
}

}  // namespace geostore::query

namespace geostore {

bool IndexDocument::has_token(std::string_view token) const {
  return std::binary_search(tokens.begin(), tokens.end(), token);
}

}  // namespace geostore
