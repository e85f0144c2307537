#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace gridunit {

// Standard grid limits, enforced when parsing and when translating references.
inline constexpr std::int32_t kMaxRows = 1'048'576;
inline constexpr std::int32_t kMaxCols = 16'384;

// Row-major cell coordinate inside one sheet. 1-based.
struct Coord {
    std::int32_t row = 1;
    std::int32_t col = 1;
    auto operator<=>(const Coord&) const = default;
};

// A1-style address: sheet name (matched case-insensitively, preserved as
// written), 1-based column/row, and per-axis absolute flags.
struct CellRef {
    std::string sheet = "Sheet1";
    std::int32_t col = 1;
    std::int32_t row = 1;
    bool col_abs = false;
    bool row_abs = false;

    Coord coord() const { return {row, col}; }
    bool same_addr(const CellRef& o) const;  // ignores the $ flags
    bool operator==(const CellRef& o) const;
};

std::string column_letters(std::int32_t col);
// nullopt for empty input, non-letters, or columns past the grid limit.
std::optional<std::int32_t> column_number(std::string_view letters);

// Parses "[Sheet!][$]letters[$]digits". Throws ParseError with a 1-based
// column position on malformed input.
CellRef parse_cellref(std::string_view input, std::string_view default_sheet = "Sheet1");

// Inverse of parse_cellref: the Sheet! prefix is omitted when the sheet
// matches default_sheet case-insensitively.
std::string render_cellref(const CellRef& ref, std::string_view default_sheet = "Sheet1");

}  // namespace gridunit
