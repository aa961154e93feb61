#pragma once

#include "fanova/design.hpp"
#include "fanova/manova.hpp"
#include "fanova/report.hpp"

namespace fanova {

// Responses in wide form: one row per subject (dataset order), columns
// in treatment-major blocks, so column (i * p + h) holds coefficient h
// under treatment i.
struct WideResponse {
    Matrix values;
    int treatments = 0;
    int basis_dim = 0;

    int n() const { return static_cast<int>(values.rows()); }
};

WideResponse assemble_wide(const RMDataset& data);

// Least-squares coefficient matrix (X'X)^- X'Y (minimum-norm when X is
// rank deficient). For the indicator design this is the matrix of
// group mean rows.
Matrix fit_b(const WideResponse& wide, const Matrix& x);

// Hypothesis/error SSCP of the doubly multivariate model for the
// hypothesis G' B (T kron I_p) = 0. Both matrices are q*p square;
// df_h = s, df_e = n - rank(X). The contrast restriction is applied
// blockwise, never through an explicit Kronecker product. Requires
// n > m * p (otherwise the error SSCP is singular by construction).
SSCPPair dmm_sscp(const WideResponse& wide, const Matrix& x,
                  const ContrastPair& contrasts);

// Full doubly-multivariate test of a hypothesis on the dataset.
TestReport dmm_test(const RMDataset& data, Hypothesis hypothesis);

} // namespace fanova
