#include "fanova/mmm.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "fanova/errors.hpp"
#include "fanova/special_functions.hpp"

namespace fanova {

namespace {

// Per-subject restriction Z_i = T' Y_i, flattened back to one row per
// subject with contrast-major blocks: row i of the result is
// (Z_i row 1, ..., Z_i row q). With T = I this is the wide layout.
Matrix restrict_subjects(const StackedResponse& stacked, const Matrix& t) {
    const int m = stacked.treatments;
    const int n = stacked.n();
    const int p = stacked.basis_dim();
    const int q = static_cast<int>(t.cols());
    Matrix out = Matrix::Zero(n, static_cast<Eigen::Index>(q) * p);
    for (int i = 0; i < n; ++i) {
        const auto block = stacked.values.middleRows(i * m, m); // m x p
        for (int u = 0; u < q; ++u)
            out.block(i, u * p, 1, p) = t.col(u).transpose() * block;
    }
    return out;
}

struct RestrictedFit {
    Matrix resid; // n x (q p)
    Matrix theta; // s x (q p), = G' B
    Matrix c;     // s x s, = G'(X'X)^- G
    int rank_x = 0;
};

RestrictedFit restricted_fit(const Matrix& restricted, const Matrix& x,
                             const Matrix& g) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(x);
    RestrictedFit fit;
    const Matrix b = cod.solve(restricted);
    fit.resid = restricted - x * b;
    fit.rank_x = static_cast<int>(cod.rank());
    const Matrix xtx = x.transpose() * x;
    Eigen::CompleteOrthogonalDecomposition<Matrix> xtx_cod(xtx);
    fit.c = g.transpose() * xtx_cod.pseudoInverse() * g;
    fit.theta = g.transpose() * b;
    return fit;
}

void check_layout(const StackedResponse& stacked, const Matrix& x,
                  const ContrastPair& contrasts) {
    if (stacked.treatments < 1 ||
        stacked.values.rows() % stacked.treatments != 0)
        throw ConfigError("mmm: stacked response rows not a multiple of m");
    if (x.rows() != stacked.n())
        throw ConfigError("mmm: design matrix row count does not match subjects");
    if (contrasts.T.rows() != stacked.treatments)
        throw ConfigError("mmm: treatment contrast has wrong row count");
    if (contrasts.G.rows() != x.cols())
        throw ConfigError("mmm: group contrast has wrong row count");
}

} // namespace

StackedResponse rearrange(const WideResponse& wide) {
    StackedResponse stacked;
    stacked.treatments = wide.treatments;
    stacked.values.resize(static_cast<Eigen::Index>(wide.n()) * wide.treatments,
                          wide.basis_dim);
    for (int k = 0; k < wide.n(); ++k)
        for (int i = 0; i < wide.treatments; ++i)
            stacked.values.row(static_cast<Eigen::Index>(k) * wide.treatments + i) =
                wide.values.block(k, i * wide.basis_dim, 1, wide.basis_dim);
    return stacked;
}

SSCPPair mmm_sscp(const StackedResponse& stacked, const Matrix& x,
                  const ContrastPair& contrasts) {
    check_layout(stacked, x, contrasts);
    const int n = stacked.n();
    const int m = stacked.treatments;
    const int p = stacked.basis_dim();
    const int q = contrasts.q();
    if (n * m <= p)
        throw DimensionError("mmm: needs n*m > p observations (n*m = " +
                             std::to_string(n * m) + ", p = " + std::to_string(p) +
                             ")");

    const Matrix restricted = restrict_subjects(stacked, contrasts.T);
    const RestrictedFit fit = restricted_fit(restricted, x, contrasts.G);

    Eigen::LLT<Matrix> c_llt(((fit.c + fit.c.transpose()) / 2.0).eval());
    if (c_llt.info() != Eigen::Success)
        throw SingularMatrixError(
            "mmm: hypothesis scaling matrix G'(X'X)^-G is singular");

    SSCPPair out;
    out.error = Matrix::Zero(p, p);
    out.hypothesis = Matrix::Zero(p, p);
    for (int u = 0; u < q; ++u) {
        const auto r_u = fit.resid.middleCols(u * p, p);
        out.error += r_u.transpose() * r_u;
        const Matrix th_u = fit.theta.middleCols(u * p, p);
        out.hypothesis += th_u.transpose() * c_llt.solve(th_u);
    }
    out.df_e = q * (n - fit.rank_x);
    out.df_h = q * contrasts.s();
    return out;
}

SphericityResult sphericity_test(const StackedResponse& stacked, const Matrix& x,
                                 const ContrastPair& contrasts) {
    check_layout(stacked, x, contrasts);
    const int n = stacked.n();
    const int p = stacked.basis_dim();
    const int q = contrasts.q();

    const Matrix restricted = restrict_subjects(stacked, contrasts.T);
    const RestrictedFit fit = restricted_fit(restricted, x, contrasts.G);
    const int df_resid = n - fit.rank_x;
    if (df_resid < q * p)
        throw NotEstimableError(
            "sphericity: needs n - rank(X) >= q*p residual degrees of freedom (" +
            std::to_string(df_resid) + " < " + std::to_string(q * p) + ")");

    const Matrix omega =
        (fit.resid.transpose() * fit.resid) / static_cast<double>(df_resid);

    SphericityResult result;
    result.gamma_hat = Matrix::Zero(p, p);
    for (int u = 0; u < q; ++u)
        result.gamma_hat += omega.block(u * p, u * p, p, p);
    result.gamma_hat /= static_cast<double>(q);

    if (q == 1) return result; // structure holds trivially

    Eigen::LLT<Matrix> gamma_llt(result.gamma_hat);
    Eigen::LLT<Matrix> omega_llt(((omega + omega.transpose()) / 2.0).eval());
    if (gamma_llt.info() != Eigen::Success || omega_llt.info() != Eigen::Success)
        throw SingularMatrixError(
            "sphericity: restricted residual covariance is not positive definite");
    const double logdet_gamma =
        2.0 * gamma_llt.matrixLLT().diagonal().array().log().sum();
    const double logdet_omega =
        2.0 * omega_llt.matrixLLT().diagonal().array().log().sum();

    result.lr = df_resid * (q * logdet_gamma - logdet_omega);
    if (result.lr < 0.0) result.lr = 0.0; // roundoff; q*logdet(Gamma) >= logdet(Omega)
    result.df = (q - 1.0) * p * (p + 1.0) / 2.0 + double(p) * p * q * (q - 1.0) / 2.0;
    result.p_value = chi_square_tail(result.lr, result.df);

    // epsilon from the q x q matrix of normalized block traces
    // b[u,v] = tr(Gamma^{-1} Omega_uv) / p: the spread of its
    // eigenvalues measures how far Omega is from I_q kron Gamma.
    Matrix b(q, q);
    for (int u = 0; u < q; ++u)
        for (int v = 0; v < q; ++v)
            b(u, v) =
                gamma_llt.solve(omega.block(u * p, v * p, p, p)).trace() / p;
    b = ((b + b.transpose()) / 2.0).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(b);
    const Vector ev = eig.eigenvalues();
    const double sum = ev.sum();
    const double sum_sq = ev.squaredNorm();
    double eps = sum * sum / (q * sum_sq);
    eps = std::min(1.0, std::max(1.0 / q, eps));
    result.epsilon = eps;
    return result;
}

TestReport mmm_test(const RMDataset& data, Hypothesis hypothesis, Adjust adjust) {
    data.validate();
    const ContrastPair contrasts =
        contrast_for(hypothesis, data.groups(), data.treatments());
    const StackedResponse stacked = rearrange(assemble_wide(data));
    const Matrix x = build_design_matrix(data);
    const SSCPPair sscp = mmm_sscp(stacked, x, contrasts);
    const auto stats = manova_statistics(sscp);

    TestReport report;
    report.hypothesis = hypothesis;
    report.method = "MMM";
    report.dims = {data.n(), data.groups(), data.treatments(), data.p(),
                   contrasts.s(), contrasts.q()};
    report.statistics.assign(stats.begin(), stats.end());

    if (adjust == Adjust::None) return report;

    try {
        report.sphericity = sphericity_test(stacked, x, contrasts);
    } catch (const NotEstimableError& e) {
        if (adjust == Adjust::Always) throw;
        report.notes.push_back(std::string("sphericity not estimable: ") + e.what() +
                               "; no adjustment applied");
        return report;
    }

    const SphericityResult& sph = *report.sphericity;
    const bool rejected = sph.p_value < 0.05;
    const bool apply = adjust == Adjust::Always || rejected;
    if (!apply) {
        report.notes.push_back("sphericity not rejected (p = " +
                               format_pvalue(sph.p_value) + "); no adjustment");
        return report;
    }

    report.method = "MMM-adjusted";
    report.notes.push_back(
        (rejected ? "sphericity rejected (p = " + format_pvalue(sph.p_value) + ")"
                  : "adjustment forced") +
        "; F degrees of freedom multiplied by epsilon = " + format_number(sph.epsilon));
    for (StatisticValue& sv : report.statistics) {
        sv.df1 *= sph.epsilon;
        sv.df2 *= sph.epsilon;
        sv.p_value = f_tail(sv.f, sv.df1, sv.df2);
    }
    return report;
}

} // namespace fanova
