#include "gridunit/testspec.hpp"

#include <algorithm>
#include <cassert>
#include <set>

#include "gridunit/errors.hpp"

namespace gridunit {

// ----- .sst reader -------------------------------------------------------------

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

struct LineScanner {
    std::string_view text;
    std::size_t pos = 0;
    std::size_t line_no = 0;

    std::optional<std::string_view> next() {
        while (pos < text.size()) {
            std::size_t eol = text.find('\n', pos);
            if (eol == std::string_view::npos) eol = text.size();
            std::string_view line = text.substr(pos, eol - pos);
            pos = eol + 1;
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            line = trim(line);
            if (line.empty() || line.front() == '#') continue;
            return line;
        }
        return std::nullopt;
    }
};

std::string parse_quoted_name(std::string_view rest, std::size_t line_no, const char* what) {
    rest = trim(rest);
    if (rest.empty() || rest.front() != '"')
        throw ParseError(std::string(what) + " name must be double-quoted", line_no);
    auto res = scan_quoted(rest, 0);
    if (!res) throw ParseError("unterminated name", line_no);
    if (res->second != rest.size()) throw ParseError("unexpected characters after name", line_no);
    if (res->first.empty()) throw ParseError(std::string(what) + " name must not be empty", line_no);
    return std::move(res->first);
}

// Literal with an optional trailing `tol <num>`; bare text containing
// " tol " must be quoted to dodge the suffix rule.
std::pair<CellValue, std::optional<double>> parse_sst_literal(std::string_view raw,
                                                              std::size_t line_no,
                                                              bool allow_tol) {
    raw = trim(raw);
    if (raw.empty()) throw ParseError("missing value", line_no);

    auto take_tol = [&](std::string_view tail) -> std::optional<double> {
        tail = trim(tail);
        if (tail.empty()) return std::nullopt;
        if (!allow_tol) throw ParseError("unexpected characters after value", line_no);
        constexpr std::string_view kTol = "tol";
        if (tail.substr(0, kTol.size()) != kTol)
            throw ParseError("unexpected characters after value", line_no);
        auto numtext = trim(tail.substr(kTol.size()));
        auto n = parse_number(numtext);
        if (!n || *n < 0) throw ParseError("malformed tol value", line_no);
        return *n;
    };

    if (raw.front() == '"') {
        auto res = scan_quoted(raw, 0);
        if (!res) throw ParseError("unterminated string", line_no);
        return {std::move(res->first), take_tol(raw.substr(res->second))};
    }

    std::optional<double> tol;
    if (allow_tol) {
        if (auto at = raw.rfind(" tol "); at != std::string_view::npos) {
            if (auto n = parse_number(trim(raw.substr(at + 5)))) {
                if (*n < 0) throw ParseError("malformed tol value", line_no);
                tol = *n;
                raw = trim(raw.substr(0, at));
                if (raw.empty()) throw ParseError("missing value", line_no);
            }
        }
    }

    if (auto err = parse_error_token(raw)) return {*err, tol};
    return {classify_bare_literal(raw), tol};
}

// `<keyword> <cellref> = <value...>` -> (ref, value text)
std::pair<CellRef, std::string_view> split_assignment(std::string_view rest, std::size_t line_no) {
    auto eq = rest.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected '='", line_no);
    std::string_view ref_text = trim(rest.substr(0, eq));
    if (ref_text.empty()) throw ParseError("missing cell reference", line_no);
    CellRef ref;
    try {
        ref = parse_cellref(ref_text, "Sheet1");
    } catch (const ParseError& e) {
        throw ParseError(e.what(), line_no);
    }
    return {std::move(ref), rest.substr(eq + 1)};
}

bool keyword(std::string_view line, std::string_view kw, std::string_view& rest) {
    if (line.substr(0, kw.size()) != kw) return false;
    if (line.size() > kw.size() && line[kw.size()] != ' ' && line[kw.size()] != '\t') return false;
    rest = line.size() > kw.size() ? line.substr(kw.size() + 1) : std::string_view{};
    return true;
}

}  // namespace

std::vector<TestSuite> parse_testfile(std::string_view text) {
    std::vector<TestSuite> suites;
    LineScanner scanner{text};

    TestSuite* suite = nullptr;
    TestCase* test = nullptr;
    std::set<std::string> suite_names;
    std::set<std::string> test_names;
    std::set<std::string> set_targets;

    while (auto line_opt = scanner.next()) {
        std::string_view line = *line_opt;
        std::size_t ln = scanner.line_no;
        std::string_view rest;

        if (keyword(line, "suite", rest)) {
            if (suite) throw ParseError("suites do not nest", ln);
            std::string name = parse_quoted_name(rest, ln, "suite");
            if (!suite_names.insert(fold_case(name)).second)
                throw ParseError("duplicate suite name \"" + name + "\"", ln);
            suites.emplace_back();
            suites.back().name = std::move(name);
            suite = &suites.back();
            test_names.clear();
            continue;
        }
        if (keyword(line, "endsuite", rest)) {
            if (!suite) throw ParseError("'endsuite' outside a suite", ln);
            if (test) throw ParseError("unterminated test", ln);
            if (!trim(rest).empty()) throw ParseError("unexpected characters after 'endsuite'", ln);
            suite = nullptr;
            continue;
        }
        if (!suite) throw ParseError("expected 'suite'", ln);

        if (keyword(line, "tolerance", rest)) {
            if (test) throw ParseError("'tolerance' belongs at suite scope", ln);
            if (!suite->tests.empty())
                throw ParseError("'tolerance' must precede the suite's tests", ln);
            bool saw = false;
            for (std::string_view part = trim(rest); !part.empty();) {
                std::size_t sp = part.find(' ');
                std::string_view item = part.substr(0, sp);
                part = sp == std::string_view::npos ? std::string_view{} : trim(part.substr(sp + 1));
                double* slot = nullptr;
                std::string_view numtext;
                if (item.substr(0, 5) == "atol=") { slot = &suite->atol; numtext = item.substr(5); }
                else if (item.substr(0, 5) == "rtol=") { slot = &suite->rtol; numtext = item.substr(5); }
                else throw ParseError("expected atol=<num> or rtol=<num>", ln);
                auto n = parse_number(numtext);
                if (!n || *n < 0) throw ParseError("malformed tolerance value", ln);
                *slot = *n;
                saw = true;
            }
            if (!saw) throw ParseError("expected atol=<num> or rtol=<num>", ln);
            continue;
        }

        if (keyword(line, "test", rest)) {
            if (test) throw ParseError("tests do not nest", ln);
            std::string name = parse_quoted_name(rest, ln, "test");
            if (!test_names.insert(fold_case(name)).second)
                throw ParseError("duplicate test name \"" + name + "\"", ln);
            suite->tests.emplace_back();
            suite->tests.back().name = std::move(name);
            test = &suite->tests.back();
            set_targets.clear();
            continue;
        }
        if (keyword(line, "end", rest)) {
            if (!test) throw ParseError("'end' outside a test", ln);
            if (!trim(rest).empty()) throw ParseError("unexpected characters after 'end'", ln);
            if (test->expects.empty() && test->locks.empty())
                throw ParseError("test \"" + test->name + "\" has no expect or assert lines", ln);
            test = nullptr;
            continue;
        }
        if (!test) throw ParseError("expected 'test' or 'endsuite'", ln);

        if (keyword(line, "set", rest)) {
            auto [ref, value_text] = split_assignment(rest, ln);
            auto [value, tol] = parse_sst_literal(value_text, ln, /*allow_tol=*/false);
            if (is_error(value)) throw ParseError("cannot set an error value", ln);
            if (!set_targets.insert(fold_case(render_cellref(ref, "Sheet1"))).second)
                throw ParseError("duplicate set target " + render_cellref(ref, "Sheet1"), ln);
            test->sets.emplace_back(std::move(ref), std::move(value));
            (void)tol;
            continue;
        }
        if (keyword(line, "expect", rest)) {
            auto [ref, value_text] = split_assignment(rest, ln);
            auto [value, tol] = parse_sst_literal(value_text, ln, /*allow_tol=*/true);
            test->expects.push_back(Expectation{std::move(ref), std::move(value), tol});
            continue;
        }
        if (keyword(line, "assert", rest)) {
            auto [ref, value_text] = split_assignment(rest, ln);
            auto [value, tol] = parse_sst_literal(value_text, ln, /*allow_tol=*/false);
            test->locks.emplace_back(std::move(ref), std::move(value));
            (void)tol;
            continue;
        }
        throw ParseError("unknown keyword", ln);
    }

    if (test) throw ParseError("unterminated test", scanner.line_no);
    if (suite) throw ParseError("unterminated suite", scanner.line_no);
    return suites;
}

std::string serialize_testfile(std::span<const TestSuite> suites) {
    std::string out;
    auto quote = [](const std::string& s) {
        std::string q = "\"";
        for (char c : s) {
            if (c == '"') q += "\"\"";
            else q += c;
        }
        q += '"';
        return q;
    };

    for (const TestSuite& suite : suites) {
        out += "suite " + quote(suite.name) + "\n";
        if (suite.atol != kDefaultAtol || suite.rtol != kDefaultRtol) {
            out += "  tolerance atol=" + format_number(suite.atol);
            if (suite.rtol != kDefaultRtol) out += " rtol=" + format_number(suite.rtol);
            out += '\n';
        }
        for (const TestCase& t : suite.tests) {
            out += "  test " + quote(t.name) + "\n";
            for (const auto& [ref, v] : t.sets)
                out += "    set " + render_cellref(ref) + " = " + render_literal(v, true) + "\n";
            for (const auto& [ref, v] : t.locks)
                out += "    assert " + render_cellref(ref) + " = " + render_literal(v, true) + "\n";
            for (const Expectation& e : t.expects) {
                out += "    expect " + render_cellref(e.target) + " = " +
                       render_literal(e.expected, true);
                if (e.atol_override) out += " tol " + format_number(*e.atol_override);
                out += '\n';
            }
            out += "  end\n";
        }
        out += "endsuite\n";
    }
    return out;
}

// ----- translation -------------------------------------------------------------

TestCase translate_test(const TestCase& t, const CellRef& anchor, const CellRef& target,
                        bool allow_cross_sheet) {
    bool anchored = std::any_of(t.expects.begin(), t.expects.end(), [&](const Expectation& e) {
        return e.target.same_addr(anchor);
    });
    if (!anchored)
        throw GridError("anchor " + render_cellref(anchor, anchor.sheet) +
                        " is not an expectation target of test \"" + t.name + "\"");
    if (!allow_cross_sheet && !text_equal_ci(anchor.sheet, target.sheet))
        throw GridError("translation target " + render_cellref(target, target.sheet) +
                        " is on a different sheet than the anchor");

    std::int32_t drow = target.row - anchor.row;
    std::int32_t dcol = target.col - anchor.col;

    TestCase out;
    out.name = t.name + "@" + render_cellref(CellRef{target.sheet, target.col, target.row},
                                             anchor.sheet);
    for (const auto& [ref, v] : t.sets)
        out.sets.emplace_back(translate_cellref(ref, drow, dcol), v);
    for (const Expectation& e : t.expects)
        out.expects.push_back(Expectation{translate_cellref(e.target, drow, dcol), e.expected,
                                          e.atol_override});
    for (const auto& [ref, v] : t.locks)
        out.locks.emplace_back(translate_cellref(ref, drow, dcol), v);
    return out;
}

// ----- capture -----------------------------------------------------------------

CaptureResult capture_test(const Workbook& wb, const ValueMap& values,
                           std::span<const CellRef> inputs, const CellRef& output,
                           std::string name) {
    const Cell* out_cell = wb.cell_at(output);
    if (wb.find_sheet(output.sheet) < 0)
        throw GridError("unknown sheet '" + output.sheet + "'");
    if (!out_cell || !out_cell->is_formula())
        throw GridError("output cell " + render_cellref(output, output.sheet) +
                        " holds no formula");

    if (name.empty() || name.find_first_of("\n\r") != std::string::npos)
        throw GridError("test name must be non-empty and single-line");

    CaptureResult result;
    result.test.name = std::move(name);
    for (const CellRef& in : inputs) {
        if (wb.find_sheet(in.sheet) < 0) throw GridError("unknown sheet '" + in.sheet + "'");
        bool seen = false;
        for (const auto& [ref, v] : result.test.sets)
            if (ref.same_addr(in)) seen = true;
        if (seen) continue;
        const Cell* cell = wb.cell_at(in);
        if (cell && cell->is_formula())
            throw GridError("input cell " + render_cellref(in, in.sheet) + " holds a formula");
        if (!cell) {
            result.warnings.push_back("input " + render_cellref(in, in.sheet) +
                                      " is blank; captured as 0");
            result.test.sets.emplace_back(in, 0.0);
        } else {
            result.test.sets.emplace_back(in, cell->literal_value());
        }
    }
    CellValue current = values.get(wb, output);
    result.test.expects.push_back(Expectation{output, std::move(current), std::nullopt});
    return result;
}

// ----- boundary suggestion -------------------------------------------------------

namespace {

// A lone reference, or a numeric constant possibly behind unary minus.
const CellRef* as_plain_ref(const Expr& e) {
    if (const RefExpr* r = std::get_if<RefExpr>(&e.node)) return &r->ref;
    return nullptr;
}

std::optional<double> as_numeric_const(const Expr& e) {
    if (const NumberLit* n = std::get_if<NumberLit>(&e.node)) return n->value;
    if (const UnaryExpr* u = std::get_if<UnaryExpr>(&e.node)) {
        if (u->op == UnaryOp::Negate)
            if (const NumberLit* n = std::get_if<NumberLit>(&u->operand->node)) return -n->value;
    }
    return std::nullopt;
}

bool is_comparison_op(BinaryOp op) {
    return op == BinaryOp::Eq || op == BinaryOp::Ne || op == BinaryOp::Lt ||
           op == BinaryOp::Le || op == BinaryOp::Gt || op == BinaryOp::Ge;
}

void walk_comparisons(const Expr& e, std::vector<std::pair<CellRef, double>>& out) {
    struct V {
        std::vector<std::pair<CellRef, double>>& out;
        void operator()(const NumberLit&) const {}
        void operator()(const TextLit&) const {}
        void operator()(const BoolLit&) const {}
        void operator()(const RefExpr&) const {}
        void operator()(const RangeRef&) const {}
        void operator()(const UnaryExpr& u) const { walk_comparisons(*u.operand, out); }
        void operator()(const BinaryExpr& b) const {
            if (is_comparison_op(b.op)) {
                const CellRef* ref = as_plain_ref(*b.lhs);
                auto c = as_numeric_const(*b.rhs);
                if (!ref || !c) {
                    ref = as_plain_ref(*b.rhs);
                    c = as_numeric_const(*b.lhs);
                }
                if (ref && c) out.emplace_back(*ref, *c);
            }
            walk_comparisons(*b.lhs, out);
            walk_comparisons(*b.rhs, out);
        }
        void operator()(const CallExpr& c) const {
            for (const auto& a : c.args) walk_comparisons(*a, out);
        }
    };
    std::visit(V{out}, e.node);
}

}  // namespace

std::vector<std::pair<CellRef, CellValue>> suggest_boundaries(const Workbook& wb,
                                                              const CellRef& cell, double delta) {
    const Cell* c = wb.cell_at(cell);
    if (!c || !c->is_formula())
        throw GridError("cell " + render_cellref(cell, cell.sheet) + " holds no formula");
    assert(delta > 0);

    std::vector<std::pair<CellRef, double>> comparisons;
    walk_comparisons(*c->ast(), comparisons);

    // (ref, value) keyed by address; the $ flags play no role here.
    auto key = [](const CellRef& r, double v) {
        return std::tuple{fold_case(r.sheet), r.row, r.col, v};
    };
    std::vector<std::pair<CellRef, CellValue>> out;
    std::set<std::tuple<std::string, std::int32_t, std::int32_t, double>> seen;
    for (const auto& [ref, bound] : comparisons) {
        for (double v : {bound - delta, bound, bound + delta}) {
            if (seen.insert(key(ref, v)).second) {
                CellRef plain{ref.sheet, ref.col, ref.row, false, false};
                out.emplace_back(std::move(plain), v);
            }
        }
    }
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
        auto ka = std::tuple{fold_case(a.first.sheet), a.first.row, a.first.col,
                             std::get<double>(a.second)};
        auto kb = std::tuple{fold_case(b.first.sheet), b.first.row, b.first.col,
                             std::get<double>(b.second)};
        return ka < kb;
    });
    return out;
}

}  // namespace gridunit
