#include <doctest.h>

#include <algorithm>

#include "gridunit/errors.hpp"
#include "gridunit/report.hpp"
#include "gridunit/runner.hpp"
#include "support.hpp"

#include <json.hpp>

using namespace gridunit;

namespace {

const char* kReorderGrid = "C10 500\nC11 700\nG11 =C10+C11+3300\n";

const char* kGradeGridFig2 =
    "[sheet Sheet1]\nA2 0\nB2 =IF(A2<40,\"FAIL\",IF(A2<70,\"PASS\",\"HONOR\"))\n";

const char* kGradeGridFinal =
    "[sheet Sheet1]\nA2 0\n"
    "B2 =IF(AND(A2<40,A2>=0),\"FAIL\",IF(AND(A2>=40,A2<70),\"PASS\","
    "IF(AND(A2>=70,A2<=100),\"HONOR\",\"NOT VALID\")))\n";

std::string ten_test_suite() {
    struct Row {
        const char* name;
        const char* input;
        const char* expected;
    };
    static constexpr Row rows[] = {
        {"fail mid", "20.5", "\"FAIL\""},   {"pass mid", "55.31", "\"PASS\""},
        {"honor mid", "78.85", "\"HONOR\""}, {"fail floor", "0", "\"FAIL\""},
        {"pass floor", "40", "\"PASS\""},    {"honor floor", "70", "\"HONOR\""},
        {"honor ceil", "100", "\"HONOR\""},  {"below range", "-1.5", "\"NOT VALID\""},
        {"above range", "124.45", "\"NOT VALID\""}, {"text input", "\"TEST\"", "\"NOT VALID\""},
    };
    std::string out = "suite \"Grades\"\n";
    for (const Row& r : rows) {
        out += std::string("  test \"") + r.name + "\"\n";
        out += std::string("    set A2 = ") + r.input + "\n";
        out += std::string("    expect B2 = ") + r.expected + "\n";
        out += "  end\n";
    }
    out += "endsuite\n";
    return out;
}

TestCase reorder_test() {
    auto suites = parse_testfile(
        "suite \"s\"\n  test \"reordLvl\"\n    set C11 = 1900\n    set C10 = 2900\n"
        "    expect G11 = 8100\n  end\nendsuite\n");
    return suites[0].tests[0];
}

}  // namespace

TEST_CASE("values_equal tolerance arithmetic") {
    // |actual - expected| <= atol + rtol*|expected|
    CHECK(values_equal(CellValue(8100.0), CellValue(8100.000001), 1e-9, 0) == false);
    CHECK(values_equal(CellValue(8100.0), CellValue(8100.000001), 1e-5, 0) == true);
    CHECK(values_equal(CellValue(8100.0), CellValue(8100.0000000001), 1e-9, 0) == true);
    CHECK(values_equal(CellValue(8100.0), CellValue(8100.0000000001), 1e-11, 0) == false);
    CHECK(values_equal(CellValue(8100.0), CellValue(8100.5), 0, 1e-4) == true);
    CHECK(values_equal(CellValue(8100.0), CellValue(8100.0)));

    CHECK(values_equal(CellValue(std::string("FAIL")), CellValue(std::string("fail"))));
    CHECK_FALSE(values_equal(CellValue(std::string("FAIL")), CellValue(std::string("FAIL "))));
    CHECK(values_equal(CellValue(true), CellValue(true)));
    CHECK_FALSE(values_equal(CellValue(true), CellValue(false)));
    CHECK(values_equal(CellValue(Blank{}), CellValue(Blank{})));
    CHECK(values_equal(CellValue(ErrorKind::Div0), CellValue(ErrorKind::Div0)));
    CHECK_FALSE(values_equal(CellValue(ErrorKind::Div0), CellValue(ErrorKind::Value)));

    // no cross-variant coercion
    CHECK_FALSE(values_equal(CellValue(0.0), CellValue(Blank{})));
    CHECK_FALSE(values_equal(CellValue(40.0), CellValue(std::string("40"))));
    CHECK_FALSE(values_equal(CellValue(true), CellValue(1.0)));
}

TEST_CASE("run_test substitutes, checks, and restores byte-identically") {
    Workbook wb = parse_workbook(kReorderGrid);
    std::string before = serialize_workbook(wb);

    auto [assertions, restored] = run_test(wb, reorder_test());
    REQUIRE(assertions.size() == 1);
    CHECK(assertions[0].passed);
    CHECK(assertions[0].actual == CellValue(8100.0));
    CHECK(serialize_workbook(restored) == before);
}

TEST_CASE("run_test reports red with the actual value") {
    Workbook wb = parse_workbook(kGradeGridFig2);
    auto suites = parse_testfile(
        "suite \"s\"\n  test \"high\"\n    set A2 = 78.85\n    expect B2 = \"HONOR\"\n  end\n"
        "  test \"text\"\n    set A2 = \"TEST\"\n    expect B2 = \"NOT VALID\"\n  end\nendsuite\n");

    auto [honor, wb1] = run_test(wb, suites[0].tests[0]);
    CHECK(honor[0].passed);  // figure-2 formula grades 78.85 as HONOR

    auto [text, wb2] = run_test(wb, suites[0].tests[1]);
    CHECK_FALSE(text[0].passed);
    CHECK(text[0].actual == CellValue(std::string("HONOR")));
    CHECK(serialize_workbook(wb2) == serialize_workbook(wb));
}

TEST_CASE("run_test refuses to substitute over formulas, untouched workbook") {
    Workbook wb = parse_workbook(kGradeGridFig2);
    auto suites = parse_testfile(
        "suite \"s\"\n  test \"bad\"\n    set B2 = 5\n    expect B2 = 5\n  end\nendsuite\n");
    CHECK_THROWS_AS(run_test(wb, suites[0].tests[0]), GridError);

    RunReport report = run_suites(wb, suites);
    CHECK(report.errored == 1);
    CHECK(report.suites[0].tests[0].status == TestStatus::Error);
    CHECK(report.suites[0].tests[0].error.find("B2") != std::string::npos);
}

TEST_CASE("unresolvable refs make a test errored, not red") {
    Workbook wb = parse_workbook(kGradeGridFig2);
    auto suites = parse_testfile(
        "suite \"s\"\n  test \"ghost\"\n    set Ghost!A1 = 5\n    expect B2 = \"FAIL\"\n  end\n"
        "endsuite\n");
    RunReport report = run_suites(wb, suites);
    CHECK(report.errored == 1);
    CHECK(report.failed == 0);
}

TEST_CASE("locks check stored state before substitution") {
    Workbook wb = parse_workbook(kReorderGrid);
    auto suites = parse_testfile(
        "suite \"s\"\n"
        "  test \"pins\"\n"
        "    assert C10 = 500\n"       // stored literal
        "    assert G11 = 4500\n"      // computed from stored inputs
        "    set C10 = 2900\n"
        "    set C11 = 1900\n"
        "    expect G11 = 8100\n"
        "  end\n"
        "  test \"stale pin\"\n"
        "    set C10 = 2900\n"
        "    assert C10 = 2900\n"      // stored value is 500: red, not green
        "  end\n"
        "endsuite\n");
    RunReport report = run_suites(wb, suites);
    CHECK(report.passed == 1);
    CHECK(report.failed == 1);
    const TestResult& pins = report.suites[0].tests[0];
    CHECK(pins.status == TestStatus::Green);
    REQUIRE(pins.assertions.size() == 3);
    CHECK(pins.assertions[0].kind == AssertKind::Lock);
    CHECK(pins.assertions[2].kind == AssertKind::Expect);

    const TestResult& stale = report.suites[0].tests[1];
    CHECK(stale.status == TestStatus::Red);
    CHECK(stale.assertions[0].actual == CellValue(500.0));
}

TEST_CASE("the ten-test progression: 10/10 on the final formula, 7/3 before") {
    std::string tests = ten_test_suite();

    RunReport final_report = run_suites(parse_workbook(kGradeGridFinal), parse_testfile(tests));
    CHECK(final_report.passed == 10);
    CHECK(final_report.failed == 0);
    CHECK(final_report.errored == 0);

    RunReport fig2_report = run_suites(parse_workbook(kGradeGridFig2), parse_testfile(tests));
    CHECK(fig2_report.passed == 7);
    CHECK(fig2_report.failed == 3);

    // the three reds are exactly the out-of-range additions
    std::vector<std::string> red_names;
    for (const TestResult& t : fig2_report.suites[0].tests)
        if (t.status == TestStatus::Red) red_names.push_back(t.name);
    CHECK(red_names == std::vector<std::string>{"below range", "above range", "text input"});
}

TEST_CASE("filters narrow the run and reject unknown names") {
    Workbook wb = parse_workbook(kGradeGridFinal);
    auto suites = parse_testfile(ten_test_suite());

    RunFilter one_test;
    one_test.test = "pass floor";
    RunReport report = run_suites(wb, suites, one_test);
    CHECK(report.passed == 1);
    REQUIRE(report.suites.size() == 1);
    REQUIRE(report.suites[0].tests.size() == 1);
    CHECK(report.suites[0].tests[0].name == "pass floor");

    RunFilter bad_suite;
    bad_suite.suite = "Nope";
    CHECK_THROWS_AS(run_suites(wb, suites, bad_suite), GridError);
    RunFilter bad_test;
    bad_test.test = "nope";
    CHECK_THROWS_AS(run_suites(wb, suites, bad_test), GridError);
}

TEST_CASE("suite isolation: order never changes outcomes") {
    Workbook wb = parse_workbook(kGradeGridFig2);
    auto suites = parse_testfile(ten_test_suite());

    RunReport baseline = run_suites(wb, suites);
    std::map<std::string, TestStatus> expected;
    for (const TestResult& t : baseline.suites[0].tests) expected[t.name] = t.status;

    testsupport::Gen g(808);
    for (int round = 0; round < 10; ++round) {
        auto shuffled = suites;
        std::shuffle(shuffled[0].tests.begin(), shuffled[0].tests.end(), g.rng());
        RunReport report = run_suites(wb, shuffled);
        for (const TestResult& t : report.suites[0].tests) CHECK(expected[t.name] == t.status);
    }
}

TEST_CASE("green on capture") {
    testsupport::Gen g(809);
    int captured = 0;
    for (int i = 0; i < 100 && captured < 25; ++i) {
        testsupport::WorkbookGen wg(g, 16);
        Workbook wb = wg.generate();
        ValueMap values = recalc(wb);
        DepGraph graph = build_dep_graph(wb);
        if (graph.topo_order.empty()) continue;

        // capture each formula cell against its stored literal precedents;
        // pinning those to their own current values must stay green
        CellId id = graph.topo_order[g.int_in(0, static_cast<int>(graph.topo_order.size()) - 1)];
        CellRef output{wb.sheet_name(id.sheet), id.rc.col, id.rc.row, false, false};
        std::vector<CellRef> inputs;
        for (const CellId& p : graph.precedents.at(id)) {
            const Cell* cell = wb.cell_at(p.sheet, p.rc);
            if (cell && cell->is_literal())
                inputs.push_back(CellRef{wb.sheet_name(p.sheet), p.rc.col, p.rc.row, false, false});
        }
        CaptureResult cap = capture_test(wb, values, inputs, output, "cap");
        REQUIRE(cap.warnings.empty());

        auto [assertions, restored] = run_test(wb, cap.test);
        ++captured;
        for (const AssertionResult& a : assertions) {
            if (!a.passed) {
                CAPTURE(serialize_workbook(wb));
                CAPTURE(render_cellref(output));
            }
            CHECK(a.passed);
        }
        CHECK(serialize_workbook(restored) == serialize_workbook(wb));
    }
    CHECK(captured >= 25);
}

TEST_CASE("coverage colors formula cells by their tests") {
    Workbook wb = parse_workbook(kGradeGridFinal);
    auto suites = parse_testfile(ten_test_suite());
    RunReport report = run_suites(wb, suites);
    CoverageReport cov = coverage(wb, suites, report);
    REQUIRE(cov.entries.size() == 1);
    CHECK(cov.entries[0].status == CoverageStatus::Green);
    CHECK(cov.entries[0].tests.size() == 10);
    CHECK(cov.green == 1);
    CHECK(cov.untested == 0);

    // two formula cells, tests on one
    Workbook two = parse_workbook("A1 1\nB1 =A1+1\nC1 =B1+1\n");
    auto one_suite = parse_testfile(
        "suite \"s\"\n  test \"b\"\n    set A1 = 2\n    expect B1 = 3\n  end\nendsuite\n");
    RunReport r2 = run_suites(two, one_suite);
    CoverageReport cov2 = coverage(two, one_suite, r2);
    CHECK(cov2.green == 1);
    CHECK(cov2.untested == 1);
    CHECK(cov2.green + cov2.red + cov2.untested == 2);

    // a red covering test turns its cell red
    Workbook fig2 = parse_workbook(kGradeGridFig2);
    RunReport r3 = run_suites(fig2, suites);
    CoverageReport cov3 = coverage(fig2, suites, r3);
    CHECK(cov3.red == 1);
}

TEST_CASE("text and quiet rendering") {
    Workbook wb = parse_workbook(kGradeGridFig2);
    auto suites = parse_testfile(ten_test_suite());
    RunReport report = run_suites(wb, suites);

    std::string text = render_report(report, OutputMode::Text);
    CHECK(text.find("GREEN Grades :: fail mid") != std::string::npos);
    CHECK(text.find("RED   Grades :: text input") != std::string::npos);
    CHECK(text.find("B2: expected \"NOT VALID\", got \"HONOR\"") != std::string::npos);
    CHECK(text.find("7 passed, 3 failed, 0 errored") != std::string::npos);
    CHECK(text.find("\x1b[") == std::string::npos);

    std::string colored = render_report(report, OutputMode::Text, true);
    CHECK(colored.find("\x1b[31m") != std::string::npos);
    CHECK(colored.find("\x1b[32m") != std::string::npos);

    std::string quiet = render_report(report, OutputMode::Quiet);
    CHECK(quiet == "7 passed, 3 failed, 0 errored\n");

    RunReport empty;
    CHECK(render_report(empty, OutputMode::Quiet) == "0 passed, 0 failed, 0 errored\n");
}

TEST_CASE("json rendering is valid, stable, and matches the text counts") {
    Workbook wb = parse_workbook(kGradeGridFig2);
    auto suites = parse_testfile(ten_test_suite());
    RunReport report = run_suites(wb, suites);

    std::string a = render_report(report, OutputMode::Json);
    std::string b = render_report(run_suites(wb, suites), OutputMode::Json);
    CHECK(a == b);  // wall time never leaks into the json

    auto doc = nlohmann::json::parse(a);
    CHECK(doc["summary"]["passed"] == 7);
    CHECK(doc["summary"]["failed"] == 3);
    CHECK(doc["summary"]["errored"] == 0);
    REQUIRE(doc["suites"].size() == 1);
    CHECK(doc["suites"][0]["name"] == "Grades");
    CHECK(doc["suites"][0]["tests"].size() == 10);
    const auto& first = doc["suites"][0]["tests"][0];
    CHECK(first["status"] == "green");
    CHECK(first["assertions"][0]["cell"] == "B2");
    CHECK(first["assertions"][0]["kind"] == "expect");
    CHECK(first["assertions"][0]["expected"] == "FAIL");
    CHECK(first["assertions"][0]["passed"] == true);

    // numbers come through as json numbers, errors as tokens, blanks as null
    Workbook err_wb = parse_workbook("A1 0\nB1 =1/A1\n");
    auto err_suites = parse_testfile(
        "suite \"e\"\n  test \"t\"\n    expect B1 = #DIV/0!\n    expect G9 = 1\n"
        "    expect A1 = 0\n  end\nendsuite\n");
    auto err_doc =
        nlohmann::json::parse(render_report(run_suites(err_wb, err_suites), OutputMode::Json));
    const auto& asserts = err_doc["suites"][0]["tests"][0]["assertions"];
    CHECK(asserts[0]["actual"] == "#DIV/0!");
    CHECK(asserts[1]["actual"].is_null());
    CHECK(asserts[2]["expected"] == 0.0);
    CHECK(asserts[2]["expected"].is_number());
}

TEST_CASE("coverage rendering in both modes") {
    Workbook wb = parse_workbook("A1 1\nB1 =A1+1\nC1 =B1+1\n");
    auto suites = parse_testfile(
        "suite \"s\"\n  test \"b\"\n    set A1 = 2\n    expect B1 = 3\n  end\nendsuite\n");
    RunReport report = run_suites(wb, suites);
    CoverageReport cov = coverage(wb, suites, report);

    std::string text = render_report(cov, OutputMode::Text);
    CHECK(text.find("GREEN    B1  (s/b)") != std::string::npos);
    CHECK(text.find("UNTESTED C1") != std::string::npos);
    CHECK(text.find("1 green, 0 red, 1 untested") != std::string::npos);

    auto doc = nlohmann::json::parse(render_report(cov, OutputMode::Json));
    CHECK(doc["summary"]["green"] == 1);
    CHECK(doc["summary"]["untested"] == 1);
    CHECK(doc["cells"][0]["cell"] == "B1");
    CHECK(doc["cells"][0]["tests"][0] == "s/b");
}

TEST_CASE("reports are deterministic for equal seeds, workbook, suites") {
    Workbook wb = parse_workbook("A1 =RAND()\nB1 =A1*100\n");
    auto suites = parse_testfile(
        "suite \"r\"\n  test \"range\"\n    expect B1 = 50 tol 50\n  end\nendsuite\n");
    std::string a = render_report(run_suites(wb, suites, {}, EngineConfig{42}), OutputMode::Json);
    std::string b = render_report(run_suites(wb, suites, {}, EngineConfig{42}), OutputMode::Json);
    CHECK(a == b);
}
