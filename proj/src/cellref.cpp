#include "gridunit/cellref.hpp"

#include "gridunit/errors.hpp"
#include "gridunit/value.hpp"

namespace gridunit {

bool CellRef::same_addr(const CellRef& o) const {
    return col == o.col && row == o.row && text_equal_ci(sheet, o.sheet);
}

bool CellRef::operator==(const CellRef& o) const {
    return same_addr(o) && col_abs == o.col_abs && row_abs == o.row_abs;
}

std::string column_letters(std::int32_t col) {
    std::string out;
    while (col > 0) {
        std::int32_t rem = (col - 1) % 26;
        out.insert(out.begin(), static_cast<char>('A' + rem));
        col = (col - 1) / 26;
    }
    return out;
}

std::optional<std::int32_t> column_number(std::string_view letters) {
    if (letters.empty()) return std::nullopt;
    std::int64_t col = 0;
    for (char c : letters) {
        if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
        if (c < 'A' || c > 'Z') return std::nullopt;
        col = col * 26 + (c - 'A' + 1);
        if (col > kMaxCols) return std::nullopt;
    }
    return static_cast<std::int32_t>(col);
}

CellRef parse_cellref(std::string_view input, std::string_view default_sheet) {
    if (input.empty()) throw ParseError("empty cell reference");

    CellRef ref;
    std::string_view rest = input;
    std::size_t base = 0;  // offset of `rest` within `input`, for positions

    if (auto bang = input.find('!'); bang != std::string_view::npos) {
        std::string_view sheet = input.substr(0, bang);
        if (sheet.empty()) throw ParseError("empty sheet name in reference", 0, 1);
        ref.sheet = std::string(sheet);
        rest = input.substr(bang + 1);
        base = bang + 1;
        if (rest.find('!') != std::string_view::npos)
            throw ParseError("unexpected '!' in reference", 0, base + rest.find('!') + 1);
    } else {
        ref.sheet = std::string(default_sheet);
    }

    std::size_t i = 0;
    auto fail = [&](const std::string& msg) -> void {
        throw ParseError(msg, 0, base + i + 1);
    };

    if (i < rest.size() && rest[i] == '$') {
        ref.col_abs = true;
        ++i;
    }
    std::size_t letters_begin = i;
    while (i < rest.size() && ((rest[i] >= 'A' && rest[i] <= 'Z') || (rest[i] >= 'a' && rest[i] <= 'z'))) ++i;
    if (i == letters_begin) fail("expected column letters");
    auto col = column_number(rest.substr(letters_begin, i - letters_begin));
    if (!col) fail("column out of range");
    ref.col = *col;

    if (i < rest.size() && rest[i] == '$') {
        ref.row_abs = true;
        ++i;
    }
    std::size_t digits_begin = i;
    while (i < rest.size() && rest[i] >= '0' && rest[i] <= '9') ++i;
    if (i == digits_begin) fail("expected row digits");
    std::int64_t row = 0;
    for (std::size_t k = digits_begin; k < i; ++k) {
        row = row * 10 + (rest[k] - '0');
        if (row > kMaxRows) {
            i = digits_begin;
            fail("row out of range");
        }
    }
    if (row < 1) {
        i = digits_begin;
        fail("row out of range");
    }
    ref.row = static_cast<std::int32_t>(row);

    if (i != rest.size()) fail("unexpected characters in reference");
    return ref;
}

std::string render_cellref(const CellRef& ref, std::string_view default_sheet) {
    std::string out;
    if (!text_equal_ci(ref.sheet, default_sheet)) {
        out += ref.sheet;
        out += '!';
    }
    if (ref.col_abs) out += '$';
    out += column_letters(ref.col);
    if (ref.row_abs) out += '$';
    out += std::to_string(ref.row);
    return out;
}

}  // namespace gridunit
