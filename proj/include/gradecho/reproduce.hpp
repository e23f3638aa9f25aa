// Claim-by-claim reproduction of the published worked examples and the
// derived validation suite. Shared by the `reproduce-paper` CLI subcommand
// and the acceptance test binary; writes plot-ready CSV artifacts plus a JSON
// summary into an output directory.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace gradecho {

struct CheckResult {
    std::string id;     // e.g. "1", "6b"
    std::string name;
    bool gated = true;  // stretch rows are reported but never fail the run
    bool pass = false;
    double value = 0;
    double target = 0;
    std::string detail;
};

struct ReproduceOptions {
    std::string out_dir; // empty: no artifacts written
    uint64_t seed = 1;
    bool quick = false;  // skip the slow optimizer/propagation criteria (dev aid)
};

std::vector<CheckResult> run_reproduction(const ReproduceOptions& options);

bool all_passed(const std::vector<CheckResult>& results);
std::string format_report(const std::vector<CheckResult>& results);

} // namespace gradecho
