#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "gridunit/workbook.hpp"

namespace gridunit {

struct EngineConfig {
    // Seed for the RAND() stream. Equal seed + equal workbook gives
    // bit-for-bit identical results.
    std::uint64_t rand_seed = 0;
};

// Engine-internal cell identity: sheet index + coordinate.
struct CellId {
    int sheet = 0;
    Coord rc;
    auto operator<=>(const CellId&) const = default;
};

// Precedents of every formula cell with ranges expanded to member cells,
// a deterministic topological order over the acyclic formula cells, and the
// set of cells on or downstream of a cycle.
struct DepGraph {
    std::map<CellId, std::vector<CellId>> precedents;
    std::map<CellId, std::vector<CellId>> dependents;  // reverse edges
    std::vector<CellId> topo_order;
    std::set<CellId> cyclic;
    // Set when a range was too large to expand blank members; dirty
    // recalculation then falls back to a full pass.
    bool conservative = false;
};

// Computed values for every non-blank cell, per sheet.
class ValueMap {
public:
    ValueMap() = default;
    explicit ValueMap(int sheet_count) : sheets_(sheet_count) {}

    const CellValue* find(CellId id) const;
    void set(CellId id, CellValue v);
    void erase(CellId id);
    int sheet_count() const { return static_cast<int>(sheets_.size()); }
    const std::map<Coord, CellValue>& sheet_values(int i) const { return sheets_[i]; }

    // Blank for unset cells, Error(Ref) for unknown sheets.
    CellValue get(const Workbook& wb, const CellRef& ref) const;

    bool operator==(const ValueMap&) const = default;

private:
    std::vector<std::map<Coord, CellValue>> sheets_;
};

DepGraph build_dep_graph(const Workbook& wb);

ValueMap recalc(const Workbook& wb, const EngineConfig& cfg = {});
ValueMap recalc(const Workbook& wb, const DepGraph& graph, const EngineConfig& cfg = {});

// Recomputes only the transitive dependents of `changed` (literal cells whose
// values were replaced after `prev` was computed). Falls back to a full
// recalculation when the workbook contains RAND().
ValueMap recalc_dirty(const Workbook& wb, const DepGraph& graph,
                      std::span<const CellRef> changed, const ValueMap& prev,
                      const EngineConfig& cfg = {});
ValueMap recalc_dirty(const Workbook& wb, std::span<const CellRef> changed, const ValueMap& prev,
                      const EngineConfig& cfg = {});

bool workbook_uses_rand(const Workbook& wb);

// Value environment for expression evaluation.
class EvalContext {
public:
    virtual ~EvalContext() = default;
    // Blank for unset cells; Error(Ref) when the sheet does not exist.
    virtual CellValue lookup(std::string_view sheet, Coord rc) = 0;
    // One uniform [0,1) draw for the given RAND() call site.
    virtual double rand_draw(const void* site) = 0;
};

// Evaluates with spreadsheet semantics: arithmetic coercion (Blank -> 0,
// booleans -> 1/0, numeric text -> number), short-circuiting IF, the
// Numbers < Texts < FALSE < TRUE comparison order, and error values instead
// of exceptions.
CellValue eval_formula(const Expr& ast, EvalContext& ctx);

// A scalar or a range argument, as builtins receive them.
using ArgValue = std::variant<CellValue, RangeRef>;

CellValue call_builtin(std::string_view name, std::span<const ArgValue> args, EvalContext& ctx,
                       const void* rand_site = nullptr);

// Copies src's formula into every cell of dst with relative references
// shifted per cell. All-or-nothing: on any out-of-bounds translation the
// workbook is left untouched. src is skipped when it lies inside dst.
void fill_formula(Workbook& wb, const CellRef& src, const RangeRef& dst);

}  // namespace gridunit
