#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fanova/design.hpp"
#include "fanova/manova.hpp"

namespace fanova {

// Multivariate sphericity check of the contrast-restricted residual
// covariance against the structure I_q kron Gamma, plus the epsilon
// used to shrink degrees of freedom when the structure is rejected.
struct SphericityResult {
    double lr = 0.0;      // likelihood-ratio statistic, >= 0
    double df = 0.0;      // chi-square degrees of freedom
    double p_value = 1.0;
    double epsilon = 1.0; // in [1/q, 1]; 1 exactly under sphericity
    Matrix gamma_hat;     // p x p common block estimate
};

struct Dims {
    int n = 0; // subjects
    int g = 0; // groups
    int m = 0; // treatments
    int p = 0; // basis dimension
    int s = 0; // group-contrast count
    int q = 0; // treatment-contrast count
};

struct TestReport {
    Hypothesis hypothesis = Hypothesis::Treatment;
    std::string method; // "DMM", "MMM", "MMM-adjusted", "permutation"
    Dims dims;
    std::vector<StatisticValue> statistics;
    std::optional<SphericityResult> sphericity;
    std::vector<std::string> notes;
};

// Fixed-width human-readable rendering: statistics and F values to 6
// significant digits, p-values to 4 decimals.
std::string render_report(const TestReport& report);

// Machine-readable JSON rendering (one object per report).
std::string report_json(const std::vector<TestReport>& reports);

// Shared numeric formatting used by every text writer so that equal
// numbers always render to equal bytes.
std::string format_number(double x);  // 6 significant digits
std::string format_pvalue(double p);  // 4 decimals

} // namespace fanova
