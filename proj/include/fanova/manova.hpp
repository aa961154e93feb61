#pragma once

#include <array>
#include <string>

#include "fanova/basis.hpp"

namespace fanova {

// Hypothesis and error SSCP matrices (same square dimension) with
// their degrees of freedom. `error` must be positive definite.
struct SSCPPair {
    Matrix hypothesis;
    Matrix error;
    int df_h = 0;
    int df_e = 0;

    int dim() const { return static_cast<int>(error.rows()); }
};

enum class StatisticKind { Wilks, LawleyHotelling, Pillai, Roy };

const char* statistic_name(StatisticKind k);

struct StatisticValue {
    StatisticKind kind;
    double value = 0.0;
    double f = 0.0;
    double df1 = 0.0;
    double df2 = 0.0;
    double p_value = 1.0;
    // Roy's F approximation is an upper bound, so its p-value is a
    // lower bound.
    bool p_is_lower_bound = false;
};

// Eigenvalues of S_h S_e^{-1} in descending order, computed from the
// symmetric form L^{-1} S_h L^{-T} with S_e = L L'. Throws
// SingularMatrixError when S_e is not positive definite. Tiny negative
// values are clamped to zero.
Vector manova_eigenvalues(const SSCPPair& sscp);

// Statistic value from the eigenvalues of S_h S_e^{-1}:
//   Wilks            prod 1/(1+lambda)
//   Lawley-Hotelling sum lambda
//   Pillai           sum lambda/(1+lambda)
//   Roy              max lambda
double statistic_from_eigenvalues(StatisticKind kind, const Vector& lambdas);

// P-value of Wilks' Lambda via Rao's F approximation. Throws
// ConfigError when a degree of freedom is nonpositive or the
// approximation's denominator df comes out nonpositive.
double wilks_pvalue(double wilks, int dim, int df_h, int df_e);

// All four statistics with their F approximations (the conventions
// implemented by the usual MANOVA summaries: Rao's F for Wilks,
// Pillai/Lawley-Hotelling moment approximations, Roy's upper bound).
// Order: Wilks, Lawley-Hotelling, Pillai, Roy.
std::array<StatisticValue, 4> manova_statistics(const SSCPPair& sscp);

} // namespace fanova
