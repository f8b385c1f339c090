#pragma once

#include "igabem/analysis.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace igabem {

/// One line of a verification table.
struct Check {
    std::string name;
    double value = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    std::string measure;  ///< how value is compared ("rel", "abs", "max")
    bool pass = false;
};

struct VerifyReport {
    std::vector<Check> checks;
    AnalysisResult result;
    double runtime = 0.0;  ///< wall-clock seconds of the analysis
    bool pass() const;
};

void print_checks(std::ostream& os, const std::vector<Check>& checks);

/// Elastic circular tunnel: sample-line displacements against the plane-strain hole solution
/// (R = 1 assumed, far field taken from the model's virgin stress). Passes at 2% worst-case
/// relative error and a runtime below `max_runtime` seconds.
VerifyReport verify_kirsch(const Model& model, int threads = 1, double max_runtime = 60.0);

/// Plastic annulus model: wall radial displacement at eight angles against `reference_u`
/// (1%), outermost grid radius with plastic flow in the last increment (1.3 +- 0.1),
/// iterations per increment (<= 9) and runtime (< `max_runtime` s).
VerifyReport verify_duncan_fama(const Model& model, int threads = 1, double reference_u = 1.262,
                                double max_runtime = 600.0);

}  // namespace igabem
