#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "gridunit/engine.hpp"
#include "gridunit/workbook.hpp"

namespace gridunit {

inline constexpr double kDefaultAtol = 1e-9;
inline constexpr double kDefaultRtol = 0.0;

struct Expectation {
    CellRef target;
    CellValue expected;
    // Per-expectation `tol` value; the suite's atol applies when absent.
    std::optional<double> atol_override;
    bool operator==(const Expectation&) const = default;
};

// A named set of input substitutions, dynamic expectations, and static locks.
// Locks pin stored values and are checked before any substitution happens.
struct TestCase {
    std::string name;
    std::vector<std::pair<CellRef, CellValue>> sets;
    std::vector<Expectation> expects;
    std::vector<std::pair<CellRef, CellValue>> locks;
    bool operator==(const TestCase&) const = default;
};

struct TestSuite {
    std::string name;
    double atol = kDefaultAtol;
    double rtol = kDefaultRtol;
    std::vector<TestCase> tests;
    bool operator==(const TestSuite&) const = default;
};

// The .sst text format. Cell references resolve against default sheet
// "Sheet1"; qualify with `Sheet!` for anything else.
std::vector<TestSuite> parse_testfile(std::string_view text);
std::string serialize_testfile(std::span<const TestSuite> suites);

// Shifts every relative axis of every reference in the test by
// (target - anchor) and suffixes the name with "@<target>". The anchor must
// be one of the test's expectation targets.
TestCase translate_test(const TestCase& t, const CellRef& anchor, const CellRef& target,
                        bool allow_cross_sheet = false);

struct CaptureResult {
    TestCase test;
    std::vector<std::string> warnings;
};

// Builds a test from live workbook state: sets from the inputs' current
// literals (Blank becomes 0 with a warning), one expectation pinning the
// output's current computed value.
CaptureResult capture_test(const Workbook& wb, const ValueMap& values,
                           std::span<const CellRef> inputs, const CellRef& output,
                           std::string name);

// For every comparison of one reference against a numeric constant c in the
// cell's formula, suggests inputs c, c-delta, and c+delta. Deduplicated and
// sorted; expected outputs are up to the developer.
std::vector<std::pair<CellRef, CellValue>> suggest_boundaries(const Workbook& wb,
                                                              const CellRef& cell, double delta);

}  // namespace gridunit
