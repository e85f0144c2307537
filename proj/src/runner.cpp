#include "gridunit/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>

#include "gridunit/errors.hpp"

namespace gridunit {

bool values_equal(const CellValue& expected, const CellValue& actual, double atol, double rtol) {
    if (expected.index() != actual.index()) return false;
    if (is_number(expected)) {
        double e = std::get<double>(expected);
        double a = std::get<double>(actual);
        return std::fabs(a - e) <= atol + rtol * std::fabs(e);
    }
    if (is_text(expected))
        return text_equal_ci(std::get<std::string>(expected), std::get<std::string>(actual));
    return expected == actual;  // Blank, Boolean, Error(kind)
}

namespace {

struct Pristine {
    DepGraph graph;
    ValueMap values;
};

// Lock actuals come from the untouched workbook: the stored literal, the
// computed value for formula cells, Blank otherwise.
CellValue lock_actual(const Workbook& wb, const Pristine& p, const CellRef& ref) {
    const Cell* cell = wb.cell_at(ref);
    if (cell && cell->is_literal()) return cell->literal_value();
    return p.values.get(wb, ref);
}

TestResult run_one(Workbook& wb, const TestSuite& suite, const TestCase& t, const Pristine& p,
                   const EngineConfig& cfg) {
    TestResult result;
    result.name = t.name;

    // Validate before touching anything so an errored test leaves the
    // workbook untouched.
    auto check_sheet = [&](const CellRef& ref) -> bool {
        if (wb.find_sheet(ref.sheet) >= 0) return true;
        result.status = TestStatus::Error;
        result.error = "unknown sheet '" + ref.sheet + "' in " + render_cellref(ref, ref.sheet);
        return false;
    };
    for (const auto& [ref, v] : t.sets) {
        if (!check_sheet(ref)) return result;
        const Cell* cell = wb.cell_at(ref);
        if (cell && cell->is_formula()) {
            result.status = TestStatus::Error;
            result.error = "substituting over a formula cell " + render_cellref(ref, ref.sheet);
            return result;
        }
    }
    for (const auto& [ref, v] : t.locks)
        if (!check_sheet(ref)) return result;
    for (const Expectation& e : t.expects)
        if (!check_sheet(e.target)) return result;

    for (const auto& [ref, expected] : t.locks) {
        CellValue actual = lock_actual(wb, p, ref);
        bool ok = values_equal(expected, actual, suite.atol, suite.rtol);
        result.assertions.push_back({ref, AssertKind::Lock, expected, actual, ok});
    }

    std::vector<std::pair<CellRef, std::optional<Cell>>> priors;
    std::vector<CellRef> changed;
    priors.reserve(t.sets.size());
    for (const auto& [ref, v] : t.sets) {
        priors.emplace_back(ref, set_literal(wb, ref, v));
        changed.push_back(ref);
    }

    ValueMap values = t.sets.empty() ? p.values : recalc_dirty(wb, p.graph, changed, p.values, cfg);

    for (const Expectation& e : t.expects) {
        CellValue actual = values.get(wb, e.target);
        double atol = e.atol_override.value_or(suite.atol);
        bool ok = values_equal(e.expected, actual, atol, suite.rtol);
        result.assertions.push_back({e.target, AssertKind::Expect, e.expected, actual, ok});
    }

    for (auto it = priors.rbegin(); it != priors.rend(); ++it) {
        if (it->second) wb.put_cell(it->first, *it->second);
        else wb.clear_cell(it->first);
    }

    bool all_passed = std::all_of(result.assertions.begin(), result.assertions.end(),
                                  [](const AssertionResult& a) { return a.passed; });
    result.status = all_passed ? TestStatus::Green : TestStatus::Red;
    return result;
}

}  // namespace

std::pair<std::vector<AssertionResult>, Workbook> run_test(const Workbook& wb, const TestCase& t,
                                                           const EngineConfig& cfg) {
    Workbook copy = wb;
    Pristine p{build_dep_graph(copy), {}};
    p.values = recalc(copy, p.graph, cfg);
    TestSuite defaults;
    TestResult r = run_one(copy, defaults, t, p, cfg);
    if (r.status == TestStatus::Error) throw GridError(r.error);
    return {std::move(r.assertions), std::move(copy)};
}

RunReport run_suites(const Workbook& wb, std::span<const TestSuite> suites, const RunFilter& filter,
                     const EngineConfig& cfg) {
    if (filter.suite) {
        bool found = std::any_of(suites.begin(), suites.end(), [&](const TestSuite& s) {
            return text_equal_ci(s.name, *filter.suite);
        });
        if (!found) throw GridError("no suite named \"" + *filter.suite + "\"");
    }
    if (filter.test) {
        bool found = false;
        for (const TestSuite& s : suites) {
            if (filter.suite && !text_equal_ci(s.name, *filter.suite)) continue;
            for (const TestCase& t : s.tests)
                if (text_equal_ci(t.name, *filter.test)) found = true;
        }
        if (!found) throw GridError("no test named \"" + *filter.test + "\"");
    }

    auto started = std::chrono::steady_clock::now();

    // One pristine copy for the whole batch; every test restores on exit.
    Workbook work = wb;
    Pristine p{build_dep_graph(work), {}};
    p.values = recalc(work, p.graph, cfg);

    RunReport report;
    for (const TestSuite& suite : suites) {
        if (filter.suite && !text_equal_ci(suite.name, *filter.suite)) continue;
        SuiteResult sr;
        sr.name = suite.name;
        for (const TestCase& t : suite.tests) {
            if (filter.test && !text_equal_ci(t.name, *filter.test)) continue;
            TestResult r = run_one(work, suite, t, p, cfg);
            switch (r.status) {
                case TestStatus::Green: ++report.passed; break;
                case TestStatus::Red: ++report.failed; break;
                case TestStatus::Error: ++report.errored; break;
            }
            sr.tests.push_back(std::move(r));
        }
        report.suites.push_back(std::move(sr));
    }

    report.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                               started)
                         .count();
    return report;
}

CoverageReport coverage(const Workbook& wb, std::span<const TestSuite> suites,
                        const RunReport& report) {
    // Target address -> covering tests and their outcomes.
    struct Covering {
        std::vector<std::string> labels;
        bool any_not_green = false;
    };
    std::map<std::tuple<std::string, std::int32_t, std::int32_t>, Covering> covered;

    auto addr_key = [](const CellRef& r) {
        return std::tuple{fold_case(r.sheet), r.row, r.col};
    };

    for (const SuiteResult& sr : report.suites) {
        const TestSuite* suite = nullptr;
        for (const TestSuite& s : suites)
            if (text_equal_ci(s.name, sr.name)) suite = &s;
        if (!suite) continue;
        for (const TestResult& tr : sr.tests) {
            const TestCase* tc = nullptr;
            for (const TestCase& t : suite->tests)
                if (text_equal_ci(t.name, tr.name)) tc = &t;
            if (!tc) continue;
            for (const Expectation& e : tc->expects) {
                Covering& c = covered[addr_key(e.target)];
                c.labels.push_back(sr.name + "/" + tr.name);
                if (tr.status != TestStatus::Green) c.any_not_green = true;
            }
        }
    }

    CoverageReport out;
    for (int s = 0; s < wb.sheet_count(); ++s) {
        for (const auto& [rc, cell] : wb.sheet_cells(s)) {
            if (!cell.is_formula()) continue;
            CoverageEntry entry;
            entry.cell = CellRef{wb.sheet_name(s), rc.col, rc.row, false, false};
            auto it = covered.find(addr_key(entry.cell));
            if (it == covered.end()) {
                entry.status = CoverageStatus::Untested;
                ++out.untested;
            } else if (it->second.any_not_green) {
                entry.status = CoverageStatus::Red;
                entry.tests = it->second.labels;
                ++out.red;
            } else {
                entry.status = CoverageStatus::Green;
                entry.tests = it->second.labels;
                ++out.green;
            }
            out.entries.push_back(std::move(entry));
        }
    }
    return out;
}

}  // namespace gridunit
