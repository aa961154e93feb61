#include "fanova/dmm.hpp"

#include <string>

#include <Eigen/QR>

#include "fanova/errors.hpp"

namespace fanova {

namespace {

void check_design(const WideResponse& wide, const Matrix& x) {
    if (x.rows() != wide.values.rows())
        throw ConfigError("dmm: design matrix row count does not match subjects");
    if (x.cols() < 1) throw ConfigError("dmm: empty design matrix");
}

} // namespace

WideResponse assemble_wide(const RMDataset& data) {
    data.validate();
    WideResponse wide;
    wide.treatments = data.treatments();
    wide.basis_dim = data.p();
    wide.values.resize(data.n(), wide.treatments * wide.basis_dim);
    for (int k = 0; k < data.n(); ++k)
        for (int i = 0; i < wide.treatments; ++i)
            wide.values.block(k, i * wide.basis_dim, 1, wide.basis_dim) =
                data.coefficients[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)]
                    .transpose();
    return wide;
}

Matrix fit_b(const WideResponse& wide, const Matrix& x) {
    check_design(wide, x);
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(x);
    return cod.solve(wide.values);
}

// Applies the treatment contrast blockwise: column block u of the
// result is sum_i T(i, u) * (block i of `rows`).
static Matrix restrict_columns(const Matrix& rows, const Matrix& t, int basis_dim) {
    const int m = static_cast<int>(t.rows());
    const int q = static_cast<int>(t.cols());
    Matrix out = Matrix::Zero(rows.rows(), static_cast<Eigen::Index>(q) * basis_dim);
    for (int u = 0; u < q; ++u)
        for (int i = 0; i < m; ++i) {
            const double w = t(i, u);
            if (w != 0.0)
                out.middleCols(u * basis_dim, basis_dim) +=
                    w * rows.middleCols(i * basis_dim, basis_dim);
        }
    return out;
}

SSCPPair dmm_sscp(const WideResponse& wide, const Matrix& x,
                  const ContrastPair& contrasts) {
    check_design(wide, x);
    const int n = wide.n();
    const int m = wide.treatments;
    const int p = wide.basis_dim;
    if (contrasts.T.rows() != m)
        throw ConfigError("dmm: treatment contrast has wrong row count");
    if (contrasts.G.rows() != x.cols())
        throw ConfigError("dmm: group contrast has wrong row count");
    if (n <= m * p)
        throw DimensionError("dmm: needs n > m*p subjects (n = " + std::to_string(n) +
                             ", m*p = " + std::to_string(m * p) + ")");

    const Matrix restricted = restrict_columns(wide.values, contrasts.T, p);

    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(x);
    const Matrix b = cod.solve(restricted); // g x (q p)
    const Matrix resid = restricted - x * b;

    SSCPPair out;
    out.error = resid.transpose() * resid;
    out.df_e = n - static_cast<int>(cod.rank());

    // S_h = (G'B)' [G'(X'X)^- G]^{-1} (G'B)
    const Matrix xtx = x.transpose() * x;
    Eigen::CompleteOrthogonalDecomposition<Matrix> xtx_cod(xtx);
    const Matrix c = contrasts.G.transpose() * xtx_cod.pseudoInverse() * contrasts.G;
    const Matrix theta = contrasts.G.transpose() * b; // s x (q p)
    Eigen::LLT<Matrix> c_llt(((c + c.transpose()) / 2.0).eval());
    if (c_llt.info() != Eigen::Success)
        throw SingularMatrixError(
            "dmm: hypothesis scaling matrix G'(X'X)^-G is singular");
    out.hypothesis = theta.transpose() * c_llt.solve(theta);
    out.df_h = contrasts.s();
    return out;
}

TestReport dmm_test(const RMDataset& data, Hypothesis hypothesis) {
    data.validate();
    const ContrastPair contrasts =
        contrast_for(hypothesis, data.groups(), data.treatments());
    const WideResponse wide = assemble_wide(data);
    const Matrix x = build_design_matrix(data);
    const SSCPPair sscp = dmm_sscp(wide, x, contrasts);
    const auto stats = manova_statistics(sscp);

    TestReport report;
    report.hypothesis = hypothesis;
    report.method = "DMM";
    report.dims = {data.n(), data.groups(), data.treatments(), data.p(),
                   contrasts.s(), contrasts.q()};
    report.statistics.assign(stats.begin(), stats.end());
    return report;
}

} // namespace fanova
