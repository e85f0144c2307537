#include "gridunit/report.hpp"

#include <cstdio>

namespace gridunit {

namespace {

constexpr const char* kGreen = "\x1b[32m";
constexpr const char* kRed = "\x1b[31m";
constexpr const char* kYellow = "\x1b[33m";
constexpr const char* kReset = "\x1b[0m";

std::string colored(const char* color, std::string_view text, bool use_color) {
    if (!use_color) return std::string(text);
    return std::string(color) + std::string(text) + kReset;
}

std::string json_escape(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            case '\t': out += "\\t"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof buf, "\\u%04x", c);
                    out += buf;
                } else {
                    out += c;
                }
        }
    }
    out += '"';
    return out;
}

// Numbers as shortest round-trip decimals, text as JSON strings, errors as
// their tokens, Blank as null.
std::string json_value(const CellValue& v) {
    struct V {
        std::string operator()(Blank) const { return "null"; }
        std::string operator()(double d) const { return format_number(d); }
        std::string operator()(const std::string& s) const { return json_escape(s); }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
        std::string operator()(ErrorKind k) const { return json_escape(error_token(k)); }
    };
    return std::visit(V{}, v);
}

std::string summary_line(const RunReport& r) {
    return std::to_string(r.passed) + " passed, " + std::to_string(r.failed) + " failed, " +
           std::to_string(r.errored) + " errored";
}

std::string status_label(TestStatus s) {
    switch (s) {
        case TestStatus::Green: return "GREEN";
        case TestStatus::Red: return "RED";
        default: return "ERROR";
    }
}

const char* status_color(TestStatus s) {
    switch (s) {
        case TestStatus::Green: return kGreen;
        case TestStatus::Red: return kRed;
        default: return kYellow;
    }
}

std::string render_run_text(const RunReport& report, bool use_color) {
    std::string out;
    for (const SuiteResult& sr : report.suites) {
        for (const TestResult& tr : sr.tests) {
            std::string label = status_label(tr.status);
            label.resize(5, ' ');
            out += colored(status_color(tr.status), label, use_color);
            out += ' ';
            out += sr.name + " :: " + tr.name + "\n";
            if (tr.status == TestStatus::Error) {
                out += "      error: " + tr.error + "\n";
                continue;
            }
            for (const AssertionResult& a : tr.assertions) {
                if (a.passed) continue;
                out += "      " + render_cellref(a.target) + ": expected " +
                       render_literal(a.expected, true) + ", got " +
                       render_literal(a.actual, true);
                if (a.kind == AssertKind::Lock) out += " (lock)";
                out += '\n';
            }
        }
    }
    out += summary_line(report) + "\n";
    return out;
}

std::string render_run_json(const RunReport& report) {
    std::string out = "{\"suites\":[";
    bool first_suite = true;
    for (const SuiteResult& sr : report.suites) {
        if (!first_suite) out += ',';
        first_suite = false;
        out += "{\"name\":" + json_escape(sr.name) + ",\"tests\":[";
        bool first_test = true;
        for (const TestResult& tr : sr.tests) {
            if (!first_test) out += ',';
            first_test = false;
            const char* status = tr.status == TestStatus::Green ? "green"
                                 : tr.status == TestStatus::Red ? "red"
                                                                : "error";
            out += "{\"name\":" + json_escape(tr.name) + ",\"status\":\"" + status +
                   "\",\"assertions\":[";
            bool first_assert = true;
            for (const AssertionResult& a : tr.assertions) {
                if (!first_assert) out += ',';
                first_assert = false;
                out += "{\"cell\":" + json_escape(render_cellref(a.target)) + ",\"kind\":\"" +
                       (a.kind == AssertKind::Expect ? "expect" : "lock") +
                       "\",\"expected\":" + json_value(a.expected) +
                       ",\"actual\":" + json_value(a.actual) +
                       ",\"passed\":" + (a.passed ? "true" : "false") + "}";
            }
            out += "]}";
        }
        out += "]}";
    }
    out += "],\"summary\":{\"passed\":" + std::to_string(report.passed) +
           ",\"failed\":" + std::to_string(report.failed) +
           ",\"errored\":" + std::to_string(report.errored) + "}}";
    out += '\n';
    return out;
}

}  // namespace

std::string render_report(const RunReport& report, OutputMode mode, bool use_color) {
    switch (mode) {
        case OutputMode::Json: return render_run_json(report);
        case OutputMode::Quiet: return summary_line(report) + "\n";
        default: return render_run_text(report, use_color);
    }
}

namespace {

std::string coverage_status_label(CoverageStatus s) {
    switch (s) {
        case CoverageStatus::Green: return "GREEN";
        case CoverageStatus::Red: return "RED";
        default: return "UNTESTED";
    }
}

const char* coverage_status_color(CoverageStatus s) {
    switch (s) {
        case CoverageStatus::Green: return kGreen;
        case CoverageStatus::Red: return kRed;
        default: return kYellow;
    }
}

std::string coverage_summary(const CoverageReport& r) {
    return std::to_string(r.green) + " green, " + std::to_string(r.red) + " red, " +
           std::to_string(r.untested) + " untested";
}

}  // namespace

std::string render_report(const CoverageReport& report, OutputMode mode, bool use_color) {
    if (mode == OutputMode::Json) {
        std::string out = "{\"cells\":[";
        bool first = true;
        for (const CoverageEntry& e : report.entries) {
            if (!first) out += ',';
            first = false;
            const char* status = e.status == CoverageStatus::Green ? "green"
                                 : e.status == CoverageStatus::Red ? "red"
                                                                   : "untested";
            out += "{\"cell\":" + json_escape(render_cellref(e.cell)) + ",\"status\":\"" + status +
                   "\",\"tests\":[";
            for (std::size_t i = 0; i < e.tests.size(); ++i) {
                if (i) out += ',';
                out += json_escape(e.tests[i]);
            }
            out += "]}";
        }
        out += "],\"summary\":{\"green\":" + std::to_string(report.green) +
               ",\"red\":" + std::to_string(report.red) +
               ",\"untested\":" + std::to_string(report.untested) + "}}\n";
        return out;
    }
    if (mode == OutputMode::Quiet) return coverage_summary(report) + "\n";

    std::string out;
    for (const CoverageEntry& e : report.entries) {
        std::string label = coverage_status_label(e.status);
        label.resize(8, ' ');
        out += colored(coverage_status_color(e.status), label, use_color);
        out += ' ';
        out += render_cellref(e.cell);
        if (!e.tests.empty()) {
            out += "  (";
            for (std::size_t i = 0; i < e.tests.size(); ++i) {
                if (i) out += ", ";
                out += e.tests[i];
            }
            out += ')';
        }
        out += '\n';
    }
    out += coverage_summary(report) + "\n";
    return out;
}

}  // namespace gridunit
