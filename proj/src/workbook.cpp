#include "gridunit/workbook.hpp"

#include <cassert>

#include "gridunit/errors.hpp"

namespace gridunit {

Cell Cell::literal(CellValue v) {
    assert(!is_blank(v) && !gridunit::is_error(v));
    Cell c;
    c.value_ = std::move(v);
    return c;
}

Cell Cell::formula(std::string source, ExprPtr ast) {
    assert(ast);
    Cell c;
    c.source_ = std::move(source);
    c.ast_ = std::move(ast);
    return c;
}

bool Cell::operator==(const Cell& o) const {
    if (is_formula() != o.is_formula()) return false;
    if (is_formula()) return source_ == o.source_;
    return value_ == o.value_;
}

Workbook::Workbook() { sheets_.push_back({"Sheet1", {}}); }

int Workbook::find_sheet(std::string_view name) const {
    for (int i = 0; i < sheet_count(); ++i)
        if (text_equal_ci(sheets_[i].name, name)) return i;
    return -1;
}

int Workbook::add_sheet(std::string name) {
    if (name.empty()) throw GridError("sheet name must not be empty");
    if (name.find('!') != std::string::npos)
        throw GridError("sheet name must not contain '!'");
    if (find_sheet(name) >= 0) throw GridError("duplicate sheet name '" + name + "'");
    sheets_.push_back({std::move(name), {}});
    return sheet_count() - 1;
}

const Cell* Workbook::cell_at(int sheet, Coord rc) const {
    const auto& cells = sheets_[sheet].cells;
    auto it = cells.find(rc);
    return it == cells.end() ? nullptr : &it->second;
}

const Cell* Workbook::cell_at(const CellRef& ref) const {
    int s = find_sheet(ref.sheet);
    if (s < 0) return nullptr;
    return cell_at(s, ref.coord());
}

void Workbook::put_cell(const CellRef& ref, Cell cell) {
    int s = find_sheet(ref.sheet);
    if (s < 0) throw GridError("unknown sheet '" + ref.sheet + "'");
    if (ref.col < 1 || ref.col > kMaxCols || ref.row < 1 || ref.row > kMaxRows)
        throw GridError("cell outside the grid");
    sheets_[s].cells.insert_or_assign(ref.coord(), std::move(cell));
}

void Workbook::clear_cell(const CellRef& ref) {
    int s = find_sheet(ref.sheet);
    if (s < 0) return;
    sheets_[s].cells.erase(ref.coord());
}

bool Workbook::operator==(const Workbook& o) const { return sheets_ == o.sheets_; }

std::optional<Cell> set_literal(Workbook& wb, const CellRef& ref, const CellValue& v, bool force) {
    if (is_blank(v) || is_error(v))
        throw GridError("literal value must be a number, text, or boolean");
    // the file format is line-oriented; a value no line can hold stays out
    if (is_text(v) && std::get<std::string>(v).find_first_of("\n\r") != std::string::npos)
        throw GridError("literal text must not contain line breaks");
    if (wb.find_sheet(ref.sheet) < 0) throw GridError("unknown sheet '" + ref.sheet + "'");

    std::optional<Cell> prior;
    if (const Cell* cur = wb.cell_at(ref)) {
        if (cur->is_formula() && !force)
            throw GridError("substituting over a formula cell " + render_cellref(ref, ref.sheet));
        prior = *cur;
    }
    wb.put_cell(ref, Cell::literal(v));
    return prior;
}

// ----- .grid reader / writer --------------------------------------------------

namespace {

// Strict cell-line reference: plain letters+digits, no '$', no sheet prefix.
Coord parse_cell_line_ref(std::string_view token, std::size_t line_no) {
    std::size_t i = 0;
    while (i < token.size() && ((token[i] >= 'A' && token[i] <= 'Z') || (token[i] >= 'a' && token[i] <= 'z')))
        ++i;
    if (i == 0 || i == token.size())
        throw ParseError("malformed cell reference '" + std::string(token) + "'", line_no);
    auto col = column_number(token.substr(0, i));
    if (!col) throw ParseError("column out of range in '" + std::string(token) + "'", line_no);
    std::int64_t row = 0;
    for (std::size_t k = i; k < token.size(); ++k) {
        if (token[k] < '0' || token[k] > '9')
            throw ParseError("malformed cell reference '" + std::string(token) + "'", line_no);
        row = row * 10 + (token[k] - '0');
        if (row > kMaxRows) throw ParseError("row out of range in '" + std::string(token) + "'", line_no);
    }
    if (row < 1) throw ParseError("row out of range in '" + std::string(token) + "'", line_no);
    return Coord{static_cast<std::int32_t>(row), *col};
}

bool blank_line(std::string_view line) {
    for (char c : line)
        if (c != ' ' && c != '\t') return false;
    return true;
}

}  // namespace

Workbook parse_workbook(std::string_view text) {
    Workbook wb{0};  // starts with no sheets; the default appears on demand
    int current = -1;

    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

        if (line.empty() || blank_line(line) || line.front() == '#') continue;

        if (line.front() == '[') {
            constexpr std::string_view kPrefix = "[sheet ";
            if (line.substr(0, kPrefix.size()) != kPrefix || line.back() != ']')
                throw ParseError("malformed sheet header", line_no);
            std::string name(line.substr(kPrefix.size(), line.size() - kPrefix.size() - 1));
            if (name.empty() || blank_line(name))
                throw ParseError("empty sheet name", line_no);
            try {
                current = wb.add_sheet(std::move(name));
            } catch (const GridError& e) {
                throw ParseError(e.what(), line_no);
            }
            continue;
        }

        std::size_t space = line.find(' ');
        if (space == std::string_view::npos)
            throw ParseError("cell line has no content", line_no);
        Coord rc = parse_cell_line_ref(line.substr(0, space), line_no);
        std::string_view content = line.substr(space + 1);

        if (current < 0) current = wb.add_sheet("Sheet1");
        CellRef ref{wb.sheet_name(current), rc.col, rc.row, false, false};
        if (wb.cell_at(current, rc))
            throw ParseError("duplicate cell " + render_cellref(ref, ref.sheet), line_no);

        if (!content.empty() && content.front() == '=') {
            std::string source(content.substr(1));
            ExprPtr ast;
            try {
                ast = parse_formula(source, wb.sheet_name(current));
            } catch (const ParseError& e) {
                throw ParseError("in " + render_cellref(ref, ref.sheet) + ": " + e.what(), line_no);
            }
            wb.put_cell(ref, Cell::formula(std::move(source), std::move(ast)));
        } else if (!content.empty() && content.front() == '"') {
            auto res = scan_quoted(content, 0);
            if (!res) throw ParseError("unterminated string", line_no);
            if (res->second != content.size())
                throw ParseError("unexpected characters after string", line_no);
            wb.put_cell(ref, Cell::literal(std::move(res->first)));
        } else {
            wb.put_cell(ref, Cell::literal(classify_bare_literal(content)));
        }
    }

    if (wb.sheet_count() == 0) wb.add_sheet("Sheet1");
    return wb;
}

std::string serialize_workbook(const Workbook& wb) {
    std::string out;
    for (int s = 0; s < wb.sheet_count(); ++s) {
        out += "[sheet ";
        out += wb.sheet_name(s);
        out += "]\n";
        for (const auto& [rc, cell] : wb.sheet_cells(s)) {
            out += column_letters(rc.col);
            out += std::to_string(rc.row);
            out += ' ';
            if (cell.is_formula()) {
                out += '=';
                out += cell.formula_source();
            } else {
                out += render_literal(cell.literal_value());
            }
            out += '\n';
        }
    }
    return out;
}

}  // namespace gridunit
