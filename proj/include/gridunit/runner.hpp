#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gridunit/engine.hpp"
#include "gridunit/testspec.hpp"
#include "gridunit/workbook.hpp"

namespace gridunit {

enum class AssertKind { Expect, Lock };

struct AssertionResult {
    CellRef target;
    AssertKind kind = AssertKind::Expect;
    CellValue expected;
    CellValue actual;
    bool passed = false;
};

enum class TestStatus { Green, Red, Error };

struct TestResult {
    std::string name;
    TestStatus status = TestStatus::Green;
    std::vector<AssertionResult> assertions;  // locks first, then expects, file order
    std::string error;                        // set when status == Error
};

struct SuiteResult {
    std::string name;
    std::vector<TestResult> tests;
};

struct RunReport {
    std::vector<SuiteResult> suites;
    int passed = 0;
    int failed = 0;
    int errored = 0;
    double wall_ms = 0;
};

// Numbers within |actual - expected| <= atol + rtol*|expected|; text
// case-insensitive; booleans, blanks strict; errors equal on kind; no
// cross-variant coercion.
bool values_equal(const CellValue& expected, const CellValue& actual, double atol = kDefaultAtol,
                  double rtol = kDefaultRtol);

// Substitute, recalculate, compare, restore. The returned workbook serializes
// byte-identically to the input. Uses the default tolerances; run_suites
// applies suite-level ones.
std::pair<std::vector<AssertionResult>, Workbook> run_test(const Workbook& wb, const TestCase& t,
                                                           const EngineConfig& cfg = {});

struct RunFilter {
    std::optional<std::string> suite;
    std::optional<std::string> test;
};

// Runs tests in file order, each against pristine workbook state. Throws
// GridError when a filter matches nothing.
RunReport run_suites(const Workbook& wb, std::span<const TestSuite> suites,
                     const RunFilter& filter = {}, const EngineConfig& cfg = {});

enum class CoverageStatus { Green, Red, Untested };

struct CoverageEntry {
    CellRef cell;
    CoverageStatus status = CoverageStatus::Untested;
    std::vector<std::string> tests;  // "suite/test" labels of covering tests
};

struct CoverageReport {
    std::vector<CoverageEntry> entries;  // every formula cell, document order
    int green = 0;
    int red = 0;
    int untested = 0;
};

// A formula cell is covered when at least one expect targets it; green only
// when every covering test passed.
CoverageReport coverage(const Workbook& wb, std::span<const TestSuite> suites,
                        const RunReport& report);

}  // namespace gridunit
