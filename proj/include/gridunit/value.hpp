#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace gridunit {

enum class ErrorKind { Div0, Value, Name, Ref, Cycle };

// Blank is its own state, distinct from Number(0) and Text("").
using Blank = std::monostate;

// The universal result type of evaluation and comparison. Numbers stored here
// are always finite; evaluation maps overflow/NaN to Error(Value) first.
using CellValue = std::variant<Blank, double, std::string, bool, ErrorKind>;

inline bool is_blank(const CellValue& v) { return std::holds_alternative<Blank>(v); }
inline bool is_number(const CellValue& v) { return std::holds_alternative<double>(v); }
inline bool is_text(const CellValue& v) { return std::holds_alternative<std::string>(v); }
inline bool is_boolean(const CellValue& v) { return std::holds_alternative<bool>(v); }
inline bool is_error(const CellValue& v) { return std::holds_alternative<ErrorKind>(v); }

std::string_view error_token(ErrorKind k);  // "#DIV/0!", "#VALUE!", ...
std::optional<ErrorKind> parse_error_token(std::string_view s);

// Shortest decimal text that parses back to exactly the same double.
std::string format_number(double v);

// Full-string decimal number: optional sign, fraction, exponent. Finite only.
std::optional<double> parse_number(std::string_view s);

// ASCII case utilities; text comparison in the engine is case-insensitive.
std::string fold_case(std::string_view s);
bool text_equal_ci(std::string_view a, std::string_view b);
int compare_text_ci(std::string_view a, std::string_view b);

// Literal classification for unquoted content: number, then TRUE/FALSE
// (case-insensitive), then bare text. Quoted strings are decoded by the file
// readers before this is called.
CellValue classify_bare_literal(std::string_view s);

// Renders a value the way the file formats and reports spell it. Text is
// quoted when the bare form would reparse as something else, or always when
// requested. Blank renders as "(blank)" and only appears in reports.
std::string render_literal(const CellValue& v, bool always_quote_text = false);

// Total order behind the comparison operators: all Numbers < all Texts <
// FALSE < TRUE. Text compares case-insensitively. Blank takes the other
// side's empty value (0, "", or FALSE). Neither side may be an error.
int compare_values(const CellValue& a, const CellValue& b);  // -1 / 0 / +1

// Scans a double-quoted string starting at s[pos] == '"', with "" escaping
// the quote. Returns decoded text and the index just past the closing quote,
// or nullopt when unterminated.
std::optional<std::pair<std::string, std::size_t>> scan_quoted(std::string_view s, std::size_t pos);

}  // namespace gridunit
