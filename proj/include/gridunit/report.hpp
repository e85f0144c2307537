#pragma once

#include <string>

#include "gridunit/runner.hpp"

namespace gridunit {

enum class OutputMode { Text, Json, Quiet };

// Text mode: one GREEN/RED/ERROR line per test, failure detail lines, and a
// "N passed, M failed, K errored" summary. Quiet mode: the summary line only.
// Json mode: the stable schema documented in the README; byte-identical for
// equal inputs and seed (no timestamps).
std::string render_report(const RunReport& report, OutputMode mode, bool use_color = false);

std::string render_report(const CoverageReport& report, OutputMode mode, bool use_color = false);

}  // namespace gridunit
