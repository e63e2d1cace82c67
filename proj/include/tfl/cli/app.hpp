#pragma once

#include <exception>
#include <ostream>

#include "tfl/cli/report.hpp"

namespace tfl::cli {

// One exit code per outcome.
enum ExitCode : int {
    kOk = 0,
    kUsage = 2,        // bad arguments, unreadable or invalid problem file
    kConditions = 3,   // (Con), (Inv), (Dim) or a regularity hypothesis fails
    kIntegration = 4,  // IntegrationFailed or HintRejected
    kAdaptation = 5,   // AdaptationFailed or InconclusiveZeroTest
    kInternal = 6,     // CertificateMismatch and every other unexpected error
};

Status classify(const std::exception& e);
int exit_code(Status s);

// `tfl check|solve <file> [--seed N] [--samples N] [--ansatz-degree D]
// [--json OUT] [--quiet] [--timings]`. OUT may be "-" for standard output.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace tfl::cli
