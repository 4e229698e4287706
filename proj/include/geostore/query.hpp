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

#ifndef GEOSTORE_QUERY_HPP_
#define GEOSTORE_QUERY_HPP_

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "geostore/document.hpp"
#include "geostore/model.hpp"

namespace geostore::query {

enum class LogicalOp { kAnd, kOr, kNot };
enum class CompareOp { kEq, kGt, kGte, kLt, kLte };

std::string_view to_string(LogicalOp op);
std::string_view to_string(CompareOp op);

struct MatchAll {
  bool operator==(const MatchAll&) const = default;
};

struct Text {
  std::string token;
  bool operator==(const Text&) const = default;
};

/// A bare search term: free text, a bounding box or a date.
struct Term {
  std::variant<Text, BoundingBox, DateValue> value;
  bool operator==(const Term&) const = default;
};

struct Comparison {
  CompareOp op = CompareOp::kEq;
  std::string key;
  TypedValue value;
  bool operator==(const Comparison&) const = default;
};

struct Node;

struct Logical {
  LogicalOp op = LogicalOp::kAnd;
  std::vector<Node> children;  // never empty
  bool operator==(const Logical& other) const;
};

struct Node {
  std::variant<MatchAll, Term, Logical, Comparison> value;
  bool operator==(const Node&) const = default;
};

// Construction helpers, mostly for tests and programmatic queries.
Node match_all();
Node text(std::string token);
Node bbox(double min_x, double min_y, double max_x, double max_y);
Node date(std::string_view iso);
Node logical(LogicalOp op, std::vector<Node> children);
Node compare(CompareOp op, std::string key, TypedValue value);

/// Parses the query language:
///
///   query      := expr*
///   expr       := logical | comparison | term
///   logical    := ("AND"|"OR"|"NOT") "(" expr+ ")"
///   comparison := ("EQ"|"GT"|"GTE"|"LT"|"LTE") "(" token token ")"
///   term       := token
///
/// An operator name is only an operator when `(` follows it immediately.
/// Tokens with spaces or parentheses are written in double quotes, with `\`
/// escaping `"` and `\`; quoted tokens are always text. Several top-level
/// expressions are combined with OR; blank input is MatchAll.
///
/// Throws Error(kParseError) carrying the byte offset of the problem.
Node parse_query(std::string_view text);

/// The combinator applied to several top-level expressions.
inline constexpr LogicalOp kImplicitTopLevelOp = LogicalOp::kOr;

/// bbox if exactly four numbers separated by three commas, then an ISO date,
/// otherwise text. Throws Error(kMalformedBbox) for three commas that do not
/// form a valid box.
Term classify_term(std::string_view token);

/// Comparison values: ISO date, then number, then text.
TypedValue classify_value(std::string_view token);

/// Deterministic pretty-printer; parse_query(render(q)) == q for parsed q.
std::string render(const Node& node);

/// Typed comparison `left <op> right`, where `left` is the document side.
///   - numbers compare numerically
///   - dates compare as intervals: LT means left ends before right starts,
///     LTE means left starts before right ends, EQ means they overlap
///   - text: EQ is case-insensitive, ordering is bytewise
///   - text against a number or date compares the canonical text forms
///   - number against date is false
bool compare_typed(CompareOp op, const TypedValue& left,
                   const TypedValue& right);

/// Reference semantics of a query against one document. The index must
/// return exactly the documents for which this is true.
bool evaluate(const Node& node, const IndexDocument& doc);

}  // namespace geostore::query

#endif  // GEOSTORE_QUERY_HPP_
