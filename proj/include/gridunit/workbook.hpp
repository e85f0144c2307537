#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gridunit/cellref.hpp"
#include "gridunit/formula.hpp"
#include "gridunit/value.hpp"

namespace gridunit {

// A stored cell: either a literal (never Blank, never an error) or a formula.
// Formula cells keep the exact source text they were parsed from and the
// workbook serializer emits it verbatim.
class Cell {
public:
    static Cell literal(CellValue v);
    static Cell formula(std::string source, ExprPtr ast);

    bool is_formula() const { return static_cast<bool>(ast_); }
    bool is_literal() const { return !is_formula(); }
    const CellValue& literal_value() const { return value_; }
    const std::string& formula_source() const { return source_; }  // without '='
    const ExprPtr& ast() const { return ast_; }

    bool operator==(const Cell& o) const;

private:
    CellValue value_;
    std::string source_;
    ExprPtr ast_;
};

// Ordered sheets of sparse cells. Unset cells are Blank; the maps never store
// Blank explicitly. Sheet names are unique case-insensitively.
class Workbook {
public:
    Workbook();  // one empty sheet named "Sheet1"

    int sheet_count() const { return static_cast<int>(sheets_.size()); }
    const std::string& sheet_name(int i) const { return sheets_[i].name; }
    const std::map<Coord, Cell>& sheet_cells(int i) const { return sheets_[i].cells; }

    int find_sheet(std::string_view name) const;  // -1 when absent
    int add_sheet(std::string name);              // throws on duplicates / bad names

    // nullptr means blank (or, for the CellRef overload, a missing sheet;
    // call find_sheet to tell those apart).
    const Cell* cell_at(int sheet, Coord rc) const;
    const Cell* cell_at(const CellRef& ref) const;

    void put_cell(const CellRef& ref, Cell cell);  // throws on unknown sheet
    void clear_cell(const CellRef& ref);

    bool operator==(const Workbook& o) const;

private:
    struct SheetData {
        std::string name;
        std::map<Coord, Cell> cells;
        bool operator==(const SheetData&) const = default;
    };
    std::vector<SheetData> sheets_;

    // The default-constructed workbook starts empty of sheets only here.
    explicit Workbook(int) {}
    friend Workbook parse_workbook(std::string_view text);
};

// Replaces the target cell with a literal and returns what was stored before
// (nullopt when it was blank) so the caller can restore it. Substituting over
// a formula cell is refused unless forced.
std::optional<Cell> set_literal(Workbook& wb, const CellRef& ref, const CellValue& v,
                                bool force = false);

// The .grid text format: '#' comment lines, '[sheet <name>]' section headers,
// and '<A1> <content>' cell lines where content starting with '=' is a
// formula kept verbatim and anything else is a literal.
Workbook parse_workbook(std::string_view text);

// Canonical form: sheets in declaration order, cells row-major. Feeding the
// result back through parse_workbook yields an equal workbook.
std::string serialize_workbook(const Workbook& wb);

}  // namespace gridunit
