#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "gridunit/cellref.hpp"

namespace gridunit {

enum class UnaryOp { Negate, Percent };
enum class BinaryOp { Add, Sub, Mul, Div, Pow, Concat, Eq, Ne, Lt, Le, Gt, Ge };

std::string_view binary_op_token(BinaryOp op);

struct Expr;
// Nodes are immutable after construction, so subtrees are shared freely.
using ExprPtr = std::shared_ptr<const Expr>;

struct NumberLit { double value = 0; };  // always non-negative; '-' is a Unary node
struct TextLit { std::string value; };
struct BoolLit { bool value = false; };
struct RefExpr { CellRef ref; };
// Endpoints are on the same sheet and normalized: per axis, the smaller
// coordinate first (relative before absolute on ties).
struct RangeRef { CellRef first, second; };
struct UnaryExpr { UnaryOp op; ExprPtr operand; };
struct BinaryExpr { BinaryOp op; ExprPtr lhs, rhs; };
struct CallExpr { std::string name;  /* uppercase */ std::vector<ExprPtr> args; };

struct Expr {
    std::variant<NumberLit, TextLit, BoolLit, RefExpr, RangeRef, UnaryExpr, BinaryExpr, CallExpr> node;
};

template <class Node>
ExprPtr make_node(Node n) {
    return std::make_shared<const Expr>(Expr{std::move(n)});
}

RangeRef normalize_range(const CellRef& a, const CellRef& b);

// ----- tokens ---------------------------------------------------------------

enum class TokenKind {
    Number, String, Ident, Ref,
    LParen, RParen, Comma, Colon,
    Ampersand, Percent, Caret, Star, Slash, Plus, Minus,
    Equal, NotEqual, Less, LessEqual, Greater, GreaterEqual,
    End,
};

struct Token {
    TokenKind kind = TokenKind::End;
    std::size_t pos = 0;  // 0-based offset into the formula body
    std::string text;     // identifier name, decoded string, or raw lexeme
    double number = 0;
    // Ref payload; sheet is unresolved here (nullopt = take the default).
    std::optional<std::string> sheet;
    std::int32_t col = 0, row = 0;
    bool col_abs = false, row_abs = false;
};

// `src` is the formula body, i.e. everything after the leading '='.
std::vector<Token> tokenize(std::string_view src);

// ----- parse / print --------------------------------------------------------

// Precedence, lowest to highest: comparisons (non-associative); & ; + - ;
// * / ; unary minus; ^ (right-associative); postfix %.
ExprPtr parse_formula(std::string_view src, std::string_view default_sheet = "Sheet1");

// Minimal parentheses; parse_formula(print_formula(a)) == a structurally.
std::string print_formula(const Expr& ast, std::string_view default_sheet = "Sheet1");

bool ast_equal(const Expr& a, const Expr& b);
inline bool ast_equal(const ExprPtr& a, const ExprPtr& b) { return ast_equal(*a, *b); }

// ----- reference utilities --------------------------------------------------

using RefOrRange = std::variant<CellRef, RangeRef>;

// Left-to-right source order, duplicates preserved.
std::vector<RefOrRange> collect_refs(const Expr& ast);

// Shifts every relative axis of every reference by (drow, dcol); absolute
// axes and sheet names stay put. Throws GridError naming the reference when
// a shifted axis leaves the grid.
ExprPtr translate_refs(const Expr& ast, std::int32_t drow, std::int32_t dcol);

CellRef translate_cellref(const CellRef& ref, std::int32_t drow, std::int32_t dcol);

// Renders the formula with relative axes as offsets from `host`, so two
// formulas get the same signature exactly when one is a fill-translation of
// the other.
std::string translation_signature(const Expr& ast, Coord host);

}  // namespace gridunit
