#pragma once

// Command dispatch: validates an ExperimentConfig, runs the owning module,
// renders the result in the requested format, and writes result + manifest
// atomically.  Also the claim-table report over previously written results.

#include "lmlab/config.hpp"

namespace lmlab {

struct RunOutcome {
    int exit_code = kExitOk;
    std::string result_path;    // empty when the result went to stdout_text
    std::string manifest_path;  // empty when no file was written
    std::string stdout_text;    // result payload (stdout mode) or report text
    std::string error;          // diagnostic when exit_code != 0
};

RunOutcome run(const ExperimentConfig& config);

// One row of the verification report: measured value against its reference
// interval.  Claims with no matching result are reported as "not run".
struct ReportRow {
    std::string claim;
    double lo = 0.0, hi = 0.0;  // reference interval [lo, hi]
    std::optional<double> measured;
    std::string verdict;  // "pass" | "fail" | "not run"
};

std::vector<ReportRow> build_report(const std::vector<json>& results);
std::string render_report(const std::vector<ReportRow>& rows);

}  // namespace lmlab
