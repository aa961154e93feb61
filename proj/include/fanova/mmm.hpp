#pragma once

#include "fanova/design.hpp"
#include "fanova/dmm.hpp"
#include "fanova/manova.hpp"
#include "fanova/report.hpp"

namespace fanova {

// Responses stacked subject-major: subject i occupies m consecutive
// rows (one per treatment, dataset order), each of length p, so that
// reading subject i's block row by row gives back its wide-form row.
struct StackedResponse {
    Matrix values; // (n m) x p
    int treatments = 0;

    int n() const {
        return static_cast<int>(values.rows()) / treatments;
    }
    int basis_dim() const { return static_cast<int>(values.cols()); }
};

StackedResponse rearrange(const WideResponse& wide);

// Hypothesis/error SSCP of the mixed multivariate model: p x p
// matrices with df_h = q * s and df_e = q * (n - rank(X)). Requires
// n * m > p. Equals the sum of the q diagonal p x p blocks of the
// doubly-multivariate SSCP under the same contrasts.
SSCPPair mmm_sscp(const StackedResponse& stacked, const Matrix& x,
                  const ContrastPair& contrasts);

// Likelihood-ratio test of Omega = I_q kron Gamma on the restricted
// residual covariance Omega (q p square, df n - rank(X)), plus an
// epsilon in [1/q, 1] for degree-of-freedom shrinkage. Requires
// n - rank(X) >= q p residual degrees of freedom (throws
// NotEstimableError otherwise). With q = 1 the structure always holds
// and the result is lr = 0, p = 1, epsilon = 1.
SphericityResult sphericity_test(const StackedResponse& stacked, const Matrix& x,
                                 const ContrastPair& contrasts);

enum class Adjust { None, Auto, Always };

// Full mixed-model test. Adjust::Auto runs the sphericity test and
// multiplies both F degrees of freedom of every statistic by epsilon
// when sphericity is rejected at the 0.05 level (noted in the report;
// when sphericity is not estimable the test runs unadjusted with a
// note). Adjust::Always applies the epsilon unconditionally and
// propagates NotEstimableError if it cannot be computed.
TestReport mmm_test(const RMDataset& data, Hypothesis hypothesis,
                    Adjust adjust = Adjust::None);

} // namespace fanova
