#include <unistd.h>

#include <chrono>
#include <csignal>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "gridunit/engine.hpp"
#include "gridunit/errors.hpp"
#include "gridunit/report.hpp"
#include "gridunit/runner.hpp"
#include "gridunit/testspec.hpp"
#include "gridunit/workbook.hpp"

namespace fs = std::filesystem;
using namespace gridunit;

namespace {

constexpr int kExitGreen = 0;
constexpr int kExitRed = 1;
constexpr int kExitTrouble = 2;  // errored tests, parse failures, bad usage

struct GlobalOpts {
    std::uint64_t seed = 0;
    std::string color = "auto";
    bool json = false;
    bool quiet = false;
};

OutputMode output_mode(const GlobalOpts& g) {
    if (g.json) return OutputMode::Json;
    if (g.quiet) return OutputMode::Quiet;
    return OutputMode::Text;
}

bool use_color(const GlobalOpts& g) {
    if (g.color == "always") return true;
    if (g.color == "never") return false;
    return isatty(STDOUT_FILENO) != 0;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GridError("cannot read '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return std::move(buf).str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw GridError("cannot write '" + path + "'");
    out << content;
    if (!out) throw GridError("cannot write '" + path + "'");
}

RangeRef parse_range_arg(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        CellRef one = parse_cellref(text);
        return normalize_range(one, one);
    }
    CellRef first = parse_cellref(text.substr(0, colon));
    CellRef second = parse_cellref(text.substr(colon + 1), first.sheet);
    if (!text_equal_ci(first.sheet, second.sheet))
        throw GridError("range endpoints on different sheets");
    return normalize_range(first, second);
}

std::vector<CellRef> parse_input_list(const std::string& text) {
    std::vector<CellRef> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string item = text.substr(pos, comma == std::string::npos ? std::string::npos
                                                                       : comma - pos);
        pos = comma == std::string::npos ? text.size() + 1 : comma + 1;
        if (item.empty()) continue;
        RangeRef r = parse_range_arg(item);
        for (std::int32_t row = r.first.row; row <= r.second.row; ++row)
            for (std::int32_t col = r.first.col; col <= r.second.col; ++col)
                out.push_back(CellRef{r.first.sheet, col, row, false, false});
    }
    return out;
}

int exit_code_for(const RunReport& report) {
    if (report.errored > 0) return kExitTrouble;
    if (report.failed > 0) return kExitRed;
    return kExitGreen;
}

// ----- run / coverage --------------------------------------------------------

struct RunArgs {
    std::string workbook_path;
    std::string tests_path;
    std::string suite_filter;
    std::string test_filter;
};

RunReport run_files(const RunArgs& a, const GlobalOpts& g, std::vector<TestSuite>* suites_out,
                    Workbook* wb_out) {
    Workbook wb = parse_workbook(read_file(a.workbook_path));
    std::vector<TestSuite> suites = parse_testfile(read_file(a.tests_path));
    RunFilter filter;
    if (!a.suite_filter.empty()) filter.suite = a.suite_filter;
    if (!a.test_filter.empty()) filter.test = a.test_filter;
    RunReport report = run_suites(wb, suites, filter, EngineConfig{g.seed});
    if (suites_out) *suites_out = std::move(suites);
    if (wb_out) *wb_out = std::move(wb);
    return report;
}

int cmd_run(const RunArgs& a, const GlobalOpts& g) {
    RunReport report = run_files(a, g, nullptr, nullptr);
    std::cout << render_report(report, output_mode(g), use_color(g));
    return exit_code_for(report);
}

int cmd_coverage(const RunArgs& a, const GlobalOpts& g) {
    std::vector<TestSuite> suites;
    Workbook wb;
    RunReport report = run_files(a, g, &suites, &wb);
    CoverageReport cov = coverage(wb, suites, report);
    std::cout << render_report(cov, output_mode(g), use_color(g));
    return exit_code_for(report);
}

// ----- check -------------------------------------------------------------------

int cmd_check(const std::string& workbook_path) {
    Workbook wb = parse_workbook(read_file(workbook_path));
    DepGraph graph = build_dep_graph(wb);

    int literals = 0;
    int formulas = 0;
    std::set<std::string> signatures;
    for (int s = 0; s < wb.sheet_count(); ++s) {
        int sheet_lit = 0, sheet_form = 0;
        for (const auto& [rc, cell] : wb.sheet_cells(s)) {
            if (cell.is_formula()) {
                ++sheet_form;
                // keyed by the offset-canonical form alone: fill-equivalence
                // does not care which sheet hosts the copy
                signatures.insert(translation_signature(*cell.ast(), rc));
            } else {
                ++sheet_lit;
            }
        }
        std::cout << "sheet " << wb.sheet_name(s) << ": " << sheet_lit << " literal cell"
                  << (sheet_lit == 1 ? "" : "s") << ", " << sheet_form << " formula cell"
                  << (sheet_form == 1 ? "" : "s") << "\n";
        literals += sheet_lit;
        formulas += sheet_form;
    }

    std::size_t distinct = signatures.size();
    std::cout << formulas << " formula cell" << (formulas == 1 ? "" : "s") << ", " << distinct
              << " distinct formula" << (distinct == 1 ? "" : "s") << ", " << graph.cyclic.size()
              << " cell" << (graph.cyclic.size() == 1 ? "" : "s") << " in cycles\n";

    if (!graph.cyclic.empty()) {
        for (const CellId& id : graph.cyclic) {
            CellRef ref{wb.sheet_name(id.sheet), id.rc.col, id.rc.row, false, false};
            std::cerr << "cycle: " << render_cellref(ref) << "\n";
        }
        return kExitTrouble;
    }
    return kExitGreen;
}

// ----- copy-test -----------------------------------------------------------------

struct CopyArgs {
    std::string tests_path;
    std::string test_name;
    std::string suite_name;
    std::string anchor;
    std::string to;
    bool append = false;
};

int cmd_copy_test(const CopyArgs& a) {
    std::vector<TestSuite> suites = parse_testfile(read_file(a.tests_path));

    TestSuite* suite = nullptr;
    const TestCase* source = nullptr;
    for (TestSuite& s : suites) {
        if (!a.suite_name.empty() && !text_equal_ci(s.name, a.suite_name)) continue;
        for (const TestCase& t : s.tests) {
            if (!text_equal_ci(t.name, a.test_name)) continue;
            if (source) throw GridError("test name \"" + a.test_name +
                                        "\" is ambiguous; pass --suite");
            suite = &s;
            source = &t;
        }
    }
    if (!source) throw GridError("no test named \"" + a.test_name + "\"");

    CellRef anchor = parse_cellref(a.anchor);
    RangeRef to = parse_range_arg(a.to);

    std::vector<TestCase> copies;
    for (std::int32_t row = to.first.row; row <= to.second.row; ++row) {
        for (std::int32_t col = to.first.col; col <= to.second.col; ++col) {
            if (text_equal_ci(to.first.sheet, anchor.sheet) && row == anchor.row &&
                col == anchor.col)
                continue;  // no self-copy
            CellRef target{to.first.sheet, col, row, false, false};
            copies.push_back(translate_test(*source, anchor, target));
        }
    }

    if (a.append) {
        std::set<std::string> names;
        for (const TestCase& t : suite->tests) names.insert(fold_case(t.name));
        for (TestCase& c : copies) {
            if (!names.insert(fold_case(c.name)).second)
                throw GridError("test \"" + c.name + "\" already exists in suite \"" +
                                suite->name + "\"");
            suite->tests.push_back(std::move(c));
        }
        write_file(a.tests_path, serialize_testfile(suites));
        std::cerr << "appended " << copies.size() << " test" << (copies.size() == 1 ? "" : "s")
                  << " to \"" << suite->name << "\"\n";
    } else {
        TestSuite preview;
        preview.name = "preview";
        preview.tests = std::move(copies);
        std::string text = serialize_testfile(std::span{&preview, 1});
        // Print the bare test blocks, without the wrapping suite lines.
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            if (line.rfind("suite ", 0) == 0 || line == "endsuite") continue;
            std::cout << (line.rfind("  ", 0) == 0 ? line.substr(2) : line) << "\n";
        }
    }
    return kExitGreen;
}

// ----- capture / suggest / fill ---------------------------------------------------

int cmd_capture(const std::string& workbook_path, const std::string& inputs,
                const std::string& output, const std::string& name, const GlobalOpts& g) {
    Workbook wb = parse_workbook(read_file(workbook_path));
    ValueMap values = recalc(wb, EngineConfig{g.seed});
    std::vector<CellRef> input_refs = parse_input_list(inputs);
    CaptureResult res = capture_test(wb, values, input_refs, parse_cellref(output), name);
    for (const std::string& w : res.warnings) std::cerr << "warning: " << w << "\n";

    TestSuite wrapper;
    wrapper.name = "captured";
    wrapper.tests.push_back(std::move(res.test));
    std::string text = serialize_testfile(std::span{&wrapper, 1});
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("suite ", 0) == 0 || line == "endsuite") continue;
        std::cout << (line.rfind("  ", 0) == 0 ? line.substr(2) : line) << "\n";
    }
    return kExitGreen;
}

int cmd_suggest(const std::string& workbook_path, const std::string& cell, double delta) {
    Workbook wb = parse_workbook(read_file(workbook_path));
    CellRef target = parse_cellref(cell);
    auto suggestions = suggest_boundaries(wb, target, delta);

    std::cout << "# boundary candidates for " << render_cellref(target) << " (delta "
              << format_number(delta) << ")\n";
    std::cout << "# pair each set with an expect whose value you work out yourself\n";
    std::string current;
    for (const auto& [ref, v] : suggestions) {
        std::string name = render_cellref(ref);
        if (name != current) {
            std::cout << "# input " << name << "\n";
            current = name;
        }
        std::cout << "set " << name << " = " << render_literal(v, true) << "\n";
    }
    return kExitGreen;
}

int cmd_fill(const std::string& workbook_path, const std::string& from, const std::string& to,
             const std::string& out_path, bool in_place) {
    Workbook wb = parse_workbook(read_file(workbook_path));
    fill_formula(wb, parse_cellref(from), parse_range_arg(to));
    std::string text = serialize_workbook(wb);
    if (in_place) write_file(workbook_path, text);
    else if (!out_path.empty()) write_file(out_path, text);
    else std::cout << text;
    return kExitGreen;
}

// ----- watch ---------------------------------------------------------------------

volatile std::sig_atomic_t g_stop = 0;

void handle_stop(int) { g_stop = 1; }

struct FileStamp {
    std::int64_t mtime = -1;
    std::uintmax_t size = 0;
    bool operator==(const FileStamp&) const = default;
};

FileStamp stamp_of(const std::string& path) {
    std::error_code ec;
    auto t = fs::last_write_time(path, ec);
    if (ec) return {};
    auto sz = fs::file_size(path, ec);
    if (ec) sz = 0;
    return {t.time_since_epoch().count(), sz};
}

int cmd_watch(const RunArgs& a, const GlobalOpts& g, int interval_ms) {
    std::signal(SIGINT, handle_stop);
    std::signal(SIGTERM, handle_stop);

    FileStamp last_wb, last_tests;
    bool first = true;
    while (!g_stop) {
        FileStamp wb_stamp = stamp_of(a.workbook_path);
        FileStamp tests_stamp = stamp_of(a.tests_path);
        if (first || wb_stamp != last_wb || tests_stamp != last_tests) {
            first = false;
            last_wb = wb_stamp;
            last_tests = tests_stamp;

            std::time_t now = std::time(nullptr);
            char when[16];
            std::strftime(when, sizeof when, "%H:%M:%S", std::localtime(&now));
            std::cout << "[" << when << "] " << a.workbook_path << " + " << a.tests_path << "\n";
            try {
                RunReport report = run_files(a, g, nullptr, nullptr);
                std::cout << render_report(report, output_mode(g), use_color(g));
            } catch (const GridError& e) {
                std::cerr << "error: " << e.what() << "\n";
            }
            std::cout.flush();
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(interval_ms));
    }
    return kExitGreen;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Test-driven development for spreadsheet workbooks"};
    app.require_subcommand(1);
    app.fallthrough();  // global flags may follow the subcommand

    GlobalOpts g;
    app.add_option("--seed", g.seed, "Seed for the RAND() stream")->capture_default_str();
    app.add_option("--color", g.color, "Color output: auto, always, never")
        ->check(CLI::IsMember({"auto", "always", "never"}))
        ->capture_default_str();
    app.add_flag("--json", g.json, "Machine-readable report");
    app.add_flag("--quiet", g.quiet, "Summary line only");

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "Run test suites against a workbook");
    run->add_option("workbook", run_args.workbook_path, "Workbook (.grid)")->required();
    run->add_option("tests", run_args.tests_path, "Test file (.sst)")->required();
    run->add_option("--suite", run_args.suite_filter, "Only this suite");
    run->add_option("--test", run_args.test_filter, "Only tests with this name");

    std::string check_path;
    CLI::App* check = app.add_subcommand("check", "Inspect a workbook: counts, cycles");
    check->add_option("workbook", check_path, "Workbook (.grid)")->required();

    RunArgs cov_args;
    CLI::App* cov = app.add_subcommand("coverage", "Which formula cells the tests touch");
    cov->add_option("workbook", cov_args.workbook_path, "Workbook (.grid)")->required();
    cov->add_option("tests", cov_args.tests_path, "Test file (.sst)")->required();
    cov->add_option("--suite", cov_args.suite_filter, "Only this suite");
    cov->add_option("--test", cov_args.test_filter, "Only tests with this name");

    CopyArgs copy_args;
    CLI::App* copy = app.add_subcommand("copy-test", "Translate a test across a range of cells");
    copy->add_option("tests", copy_args.tests_path, "Test file (.sst)")->required();
    copy->add_option("--test", copy_args.test_name, "Test to copy")->required();
    copy->add_option("--suite", copy_args.suite_name, "Suite holding the test");
    copy->add_option("--anchor", copy_args.anchor, "Expectation cell the copy pivots on")->required();
    copy->add_option("--to", copy_args.to, "Target cell or range")->required();
    copy->add_flag("--append", copy_args.append, "Write the copies back into the file");

    std::string cap_wb, cap_inputs, cap_output, cap_name;
    CLI::App* capture = app.add_subcommand("capture", "Build a test from current workbook values");
    capture->add_option("workbook", cap_wb, "Workbook (.grid)")->required();
    capture->add_option("--inputs", cap_inputs, "Input cells/ranges, comma separated")->required();
    capture->add_option("--output", cap_output, "Formula cell to pin")->required();
    capture->add_option("--name", cap_name, "Test name")->required();

    std::string sug_wb, sug_cell;
    double sug_delta = 0.01;
    CLI::App* suggest = app.add_subcommand("suggest", "Boundary-value inputs for a formula cell");
    suggest->add_option("workbook", sug_wb, "Workbook (.grid)")->required();
    suggest->add_option("--cell", sug_cell, "Formula cell to analyze")->required();
    suggest->add_option("--delta", sug_delta, "Distance of the neighboring probes")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    std::string fill_wb, fill_from, fill_to, fill_out;
    bool fill_in_place = false;
    CLI::App* fill = app.add_subcommand("fill", "Copy a formula across a range");
    fill->add_option("workbook", fill_wb, "Workbook (.grid)")->required();
    fill->add_option("--from", fill_from, "Source formula cell")->required();
    fill->add_option("--to", fill_to, "Target range")->required();
    fill->add_option("--out", fill_out, "Write the result here (default: stdout)");
    fill->add_flag("--in-place", fill_in_place, "Overwrite the input workbook");

    RunArgs watch_args;
    int watch_interval = 250;
    CLI::App* watch = app.add_subcommand("watch", "Re-run the suites whenever a file changes");
    watch->add_option("workbook", watch_args.workbook_path, "Workbook (.grid)")->required();
    watch->add_option("tests", watch_args.tests_path, "Test file (.sst)")->required();
    watch->add_option("--suite", watch_args.suite_filter, "Only this suite");
    watch->add_option("--test", watch_args.test_filter, "Only tests with this name");
    watch->add_option("--interval", watch_interval, "Polling interval in ms")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitTrouble;
    }

    try {
        if (*run) return cmd_run(run_args, g);
        if (*check) return cmd_check(check_path);
        if (*cov) return cmd_coverage(cov_args, g);
        if (*copy) return cmd_copy_test(copy_args);
        if (*capture) return cmd_capture(cap_wb, cap_inputs, cap_output, cap_name, g);
        if (*suggest) return cmd_suggest(sug_wb, sug_cell, sug_delta);
        if (*fill) return cmd_fill(fill_wb, fill_from, fill_to, fill_out, fill_in_place);
        if (*watch) return cmd_watch(watch_args, g, watch_interval);
    } catch (const GridError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTrouble;
    }
    return kExitTrouble;
}
