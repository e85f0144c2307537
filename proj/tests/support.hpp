#pragma once

#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gridunit/engine.hpp"
#include "gridunit/testspec.hpp"
#include "gridunit/workbook.hpp"

namespace testsupport {

// ----- driving the CLI binary -------------------------------------------------

inline std::string cli_path() {
#ifdef GRIDUNIT_BIN_PATH
    return GRIDUNIT_BIN_PATH;
#else
    return "gridunit";
#endif
}

struct CommandResult {
    int exit_code = -1;
    std::string output;
};

inline CommandResult run_command(const std::string& cmd) {
    CommandResult result;
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return result;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, n);
    int status = pclose(pipe);
    if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
    return result;
}

class TempDir {
public:
    TempDir() {
        auto base = std::filesystem::temp_directory_path();
        static std::mt19937_64 gen(std::random_device{}());
        path_ = base / ("gridunit-" + std::to_string(gen()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::filesystem::path file(const std::string& name) const { return path_ / name; }
    std::string write(const std::string& name, const std::string& content) const {
        auto p = file(name);
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p.string();
    }
    static std::string read(const std::filesystem::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        return buf.str();
    }

private:
    std::filesystem::path path_;
};

// ----- random generators --------------------------------------------------------

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::mt19937_64& rng() { return rng_; }
    int int_in(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    bool chance(double p) { return std::uniform_real_distribution<double>(0, 1)(rng_) < p; }

    std::string text(int max_len = 8) {
        static constexpr char alphabet[] =
            "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789 \"<>=,.#$!%&()-";
        int len = int_in(0, max_len);
        std::string out;
        for (int i = 0; i < len; ++i)
            out += alphabet[int_in(0, static_cast<int>(sizeof alphabet) - 2)];
        return out;
    }

    double number() {
        switch (int_in(0, 3)) {
            case 0: return int_in(0, 100);
            case 1: return real(0, 1000);
            case 2: return real(0, 1) * 1e-3;
            default: return int_in(0, 9) + 0.5;
        }
    }

    gridunit::CellValue literal_value() {
        switch (int_in(0, 3)) {
            case 0: return number();
            case 1: return -number();
            case 2: return text();
            default: return chance(0.5);
        }
    }

private:
    std::mt19937_64 rng_;
};

// Random AST obeying the structural invariants (non-negative number literals,
// normalized ranges, uppercase call names).
class AstGen {
public:
    explicit AstGen(Gen& g) : g_(g) {}

    gridunit::ExprPtr expr(int depth) {
        using namespace gridunit;
        if (depth <= 0 || g_.chance(0.35)) return leaf();
        switch (g_.int_in(0, 3)) {
            case 0:
                return make_node(UnaryExpr{g_.chance(0.6) ? UnaryOp::Negate : UnaryOp::Percent,
                                           expr(depth - 1)});
            case 1: {
                static constexpr BinaryOp ops[] = {
                    BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul, BinaryOp::Div, BinaryOp::Pow,
                    BinaryOp::Concat, BinaryOp::Eq, BinaryOp::Ne, BinaryOp::Lt, BinaryOp::Le,
                    BinaryOp::Gt, BinaryOp::Ge};
                BinaryOp op = ops[g_.int_in(0, 11)];
                ExprPtr lhs = expr(depth - 1);
                ExprPtr rhs = expr(depth - 1);
                // comparisons do not chain; wrap comparison children only in
                // structurally legal spots (the printer adds the parens)
                return make_node(BinaryExpr{op, std::move(lhs), std::move(rhs)});
            }
            case 2: {
                static constexpr const char* names[] = {"IF", "AND", "OR", "NOT", "SUM",
                                                        "AVERAGE", "MIN", "MAX", "COUNT",
                                                        "ABS", "ROUND", "COUNTIF", "FOO"};
                CallExpr call{names[g_.int_in(0, 12)], {}};
                int argc = g_.int_in(0, 3);
                for (int i = 0; i < argc; ++i) call.args.push_back(expr(depth - 1));
                return make_node(std::move(call));
            }
            default:
                return leaf();
        }
    }

    gridunit::CellRef ref() {
        using namespace gridunit;
        CellRef r;
        r.sheet = g_.chance(0.7) ? "Sheet1" : "Data";
        r.col = g_.int_in(1, 30);
        r.row = g_.int_in(1, 50);
        r.col_abs = g_.chance(0.3);
        r.row_abs = g_.chance(0.3);
        return r;
    }

    gridunit::ExprPtr leaf() {
        using namespace gridunit;
        switch (g_.int_in(0, 4)) {
            case 0: return make_node(NumberLit{std::fabs(g_.number())});
            case 1: return make_node(TextLit{g_.text()});
            case 2: return make_node(BoolLit{g_.chance(0.5)});
            case 3: return make_node(RefExpr{ref()});
            default: {
                CellRef a = ref();
                CellRef b = ref();
                b.sheet = a.sheet;
                return make_node(normalize_range(a, b));
            }
        }
    }

private:
    Gen& g_;
};

// Random acyclic workbook: literals anywhere, formulas that only look at
// strictly earlier rows (or earlier sheets), so a fixpoint oracle converges.
class WorkbookGen {
public:
    WorkbookGen(Gen& g, int max_cells) : g_(g), max_cells_(max_cells) {}

    gridunit::Workbook generate() {
        using namespace gridunit;
        Workbook wb;
        int sheets = g_.int_in(1, 2);
        if (sheets == 2) wb.add_sheet("Data");

        int cells = g_.int_in(2, max_cells_);
        int literal_target = std::max(1, cells / 2);

        std::vector<std::pair<int, Coord>> open;
        for (int s = 0; s < sheets; ++s)
            for (int r = 1; r <= 9; ++r)
                for (int c = 1; c <= 6; ++c) open.push_back({s, Coord{r, c}});
        std::shuffle(open.begin(), open.end(), g_.rng());

        int placed = 0;
        for (auto [s, rc] : open) {
            if (placed >= cells) break;
            CellRef ref{wb.sheet_name(s), rc.col, rc.row, false, false};
            if (placed < literal_target || rc.row < 2) {
                wb.put_cell(ref, Cell::literal(g_.literal_value()));
            } else {
                ExprPtr ast = formula(wb, s, rc, 2);
                wb.put_cell(ref, Cell::formula(print_formula(*ast, ref.sheet), ast));
            }
            ++placed;
        }
        return wb;
    }

    // Picks literal or blank target cells and new values; never touches
    // formula cells.
    std::vector<std::pair<gridunit::CellRef, gridunit::CellValue>> changes(
        const gridunit::Workbook& wb, int count) {
        using namespace gridunit;
        std::vector<std::pair<CellRef, CellValue>> out;
        for (int attempts = 0; attempts < 100 && static_cast<int>(out.size()) < count; ++attempts) {
            int s = g_.int_in(0, wb.sheet_count() - 1);
            Coord rc{g_.int_in(1, 9), g_.int_in(1, 6)};
            const Cell* cell = wb.cell_at(s, rc);
            if (cell && cell->is_formula()) continue;
            CellRef ref{wb.sheet_name(s), rc.col, rc.row, false, false};
            bool dup = false;
            for (const auto& [r, v] : out)
                if (r.same_addr(ref)) dup = true;
            if (dup) continue;
            out.emplace_back(ref, g_.literal_value());
        }
        return out;
    }

private:
    // A reference to any cell strictly above `rc` on sheet `s`, or anywhere
    // on an earlier sheet.
    gridunit::CellRef earlier_ref(const gridunit::Workbook& wb, int s, gridunit::Coord rc) {
        using namespace gridunit;
        int target_sheet = (s > 0 && g_.chance(0.3)) ? g_.int_in(0, s - 1) : s;
        int max_row = target_sheet == s ? rc.row - 1 : 9;
        CellRef ref;
        ref.sheet = wb.sheet_name(target_sheet);
        ref.row = g_.int_in(1, std::max(1, max_row));
        ref.col = g_.int_in(1, 6);
        ref.col_abs = g_.chance(0.2);
        ref.row_abs = g_.chance(0.2);
        return ref;
    }

    gridunit::RangeRef earlier_range(const gridunit::Workbook& wb, int s, gridunit::Coord rc) {
        using namespace gridunit;
        CellRef a = earlier_ref(wb, s, rc);
        CellRef b = a;
        int max_row = text_equal_ci(a.sheet, wb.sheet_name(s)) ? rc.row - 1 : 9;
        b.row = std::min(max_row < 1 ? 1 : max_row, b.row + g_.int_in(0, 2));
        b.col = std::min(6, b.col + g_.int_in(0, 2));
        return normalize_range(a, b);
    }

    gridunit::ExprPtr formula(const gridunit::Workbook& wb, int s, gridunit::Coord rc, int depth) {
        using namespace gridunit;
        if (depth <= 0 || g_.chance(0.3)) {
            switch (g_.int_in(0, 3)) {
                case 0: return make_node(NumberLit{std::fabs(g_.number())});
                case 1: return make_node(TextLit{g_.text(5)});
                case 2: return make_node(BoolLit{g_.chance(0.5)});
                default: return make_node(RefExpr{earlier_ref(wb, s, rc)});
            }
        }
        switch (g_.int_in(0, 5)) {
            case 0:
                return make_node(UnaryExpr{g_.chance(0.7) ? UnaryOp::Negate : UnaryOp::Percent,
                                           formula(wb, s, rc, depth - 1)});
            case 1: {
                static constexpr BinaryOp ops[] = {BinaryOp::Add, BinaryOp::Sub, BinaryOp::Mul,
                                                   BinaryOp::Div, BinaryOp::Concat, BinaryOp::Lt,
                                                   BinaryOp::Ge, BinaryOp::Eq};
                return make_node(BinaryExpr{ops[g_.int_in(0, 7)], formula(wb, s, rc, depth - 1),
                                            formula(wb, s, rc, depth - 1)});
            }
            case 2: {
                CallExpr call{"IF", {}};
                call.args.push_back(formula(wb, s, rc, depth - 1));
                call.args.push_back(formula(wb, s, rc, depth - 1));
                if (g_.chance(0.7)) call.args.push_back(formula(wb, s, rc, depth - 1));
                return make_node(std::move(call));
            }
            case 3: {
                static constexpr const char* names[] = {"SUM", "AVERAGE", "MIN", "MAX", "COUNT"};
                CallExpr call{names[g_.int_in(0, 4)], {}};
                call.args.push_back(make_node(earlier_range(wb, s, rc)));
                if (g_.chance(0.3)) call.args.push_back(formula(wb, s, rc, 0));
                return make_node(std::move(call));
            }
            case 4: {
                CallExpr call{"COUNTIF", {}};
                call.args.push_back(make_node(earlier_range(wb, s, rc)));
                static constexpr const char* crits[] = {"<3", ">=1", "<>0", "5", "x"};
                call.args.push_back(make_node(TextLit{crits[g_.int_in(0, 4)]}));
                return make_node(std::move(call));
            }
            default: {
                static constexpr const char* names[] = {"AND", "OR", "NOT", "ABS"};
                const char* name = names[g_.int_in(0, 3)];
                CallExpr call{name, {}};
                int argc = (std::string_view(name) == "NOT" || std::string_view(name) == "ABS")
                               ? 1
                               : g_.int_in(1, 2);
                for (int i = 0; i < argc; ++i) call.args.push_back(formula(wb, s, rc, depth - 1));
                return make_node(std::move(call));
            }
        }
    }

    Gen& g_;
    int max_cells_;
};

// Independent reference evaluator: repeatedly re-evaluates every formula cell
// against the current value map until nothing moves. Ignores dependency
// order entirely, so it cross-checks the graph machinery.
inline gridunit::ValueMap fixpoint_oracle(const gridunit::Workbook& wb) {
    using namespace gridunit;

    struct OracleContext final : EvalContext {
        const Workbook& wb;
        const ValueMap& values;
        OracleContext(const Workbook& w, const ValueMap& v) : wb(w), values(v) {}
        CellValue lookup(std::string_view sheet, Coord rc) override {
            int s = wb.find_sheet(sheet);
            if (s < 0) return ErrorKind::Ref;
            if (const CellValue* v = values.find({s, rc})) return *v;
            return Blank{};
        }
        double rand_draw(const void*) override { return 0; }  // oracle workbooks have no RAND
    };

    ValueMap current(wb.sheet_count());
    for (int s = 0; s < wb.sheet_count(); ++s)
        for (const auto& [rc, cell] : wb.sheet_cells(s))
            if (cell.is_literal()) current.set({s, rc}, cell.literal_value());

    int limit = 0;
    for (int s = 0; s < wb.sheet_count(); ++s)
        limit += static_cast<int>(wb.sheet_cells(s).size());
    limit += 2;

    for (int pass = 0; pass < limit; ++pass) {
        ValueMap next = current;
        OracleContext ctx(wb, current);
        for (int s = 0; s < wb.sheet_count(); ++s)
            for (const auto& [rc, cell] : wb.sheet_cells(s))
                if (cell.is_formula()) next.set({s, rc}, eval_formula(*cell.ast(), ctx));
        if (next == current) return next;
        current = std::move(next);
    }
    return current;
}

// Random suite structures for serializer round-trips.
inline std::vector<gridunit::TestSuite> gen_suites(Gen& g) {
    using namespace gridunit;
    AstGen ast(g);
    std::vector<TestSuite> suites;
    int n_suites = g.int_in(1, 3);
    for (int i = 0; i < n_suites; ++i) {
        TestSuite suite;
        suite.name = "suite " + std::to_string(i) + g.text(4);
        if (g.chance(0.3)) suite.atol = std::fabs(g.number()) + 0.001;
        if (g.chance(0.2)) suite.rtol = std::fabs(g.number()) * 1e-3;
        int n_tests = g.int_in(1, 4);
        for (int j = 0; j < n_tests; ++j) {
            TestCase t;
            t.name = "t" + std::to_string(j) + g.text(4);
            int n_sets = g.int_in(0, 3);
            std::vector<CellRef> used;
            for (int k = 0; k < n_sets; ++k) {
                CellRef r = ast.ref();
                bool dup = false;
                for (const CellRef& u : used)
                    if (u.same_addr(r)) dup = true;
                if (dup) continue;
                used.push_back(r);
                t.sets.emplace_back(r, g.literal_value());
            }
            int n_expects = g.int_in(0, 2);
            for (int k = 0; k < n_expects; ++k) {
                Expectation e;
                e.target = ast.ref();
                e.expected = g.chance(0.15) ? CellValue(ErrorKind::Div0) : g.literal_value();
                if (g.chance(0.3)) e.atol_override = std::fabs(g.number());
                t.expects.push_back(std::move(e));
            }
            if (t.expects.empty() || g.chance(0.3))
                t.locks.emplace_back(ast.ref(), g.literal_value());
            suite.tests.push_back(std::move(t));
        }
        suites.push_back(std::move(suite));
    }
    return suites;
}

}  // namespace testsupport
