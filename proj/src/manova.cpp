#include "fanova/manova.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "fanova/errors.hpp"
#include "fanova/special_functions.hpp"

namespace fanova {

const char* statistic_name(StatisticKind k) {
    switch (k) {
        case StatisticKind::Wilks: return "Wilks";
        case StatisticKind::LawleyHotelling: return "Lawley-Hotelling";
        case StatisticKind::Pillai: return "Pillai";
        case StatisticKind::Roy: return "Roy";
    }
    return "?";
}

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void check_pair(const SSCPPair& sscp) {
    if (sscp.error.rows() == 0 || sscp.error.rows() != sscp.error.cols())
        throw ConfigError("manova: error matrix must be square and nonempty");
    if (sscp.hypothesis.rows() != sscp.error.rows() ||
        sscp.hypothesis.cols() != sscp.error.cols())
        throw ConfigError("manova: hypothesis and error dimensions differ");
    if (!sscp.error.allFinite() || !sscp.hypothesis.allFinite())
        throw ConfigError("manova: SSCP matrices contain non-finite entries");
    if (sscp.df_h < 1 || sscp.df_e < 1)
        throw ConfigError("manova: degrees of freedom must be positive");
}

Eigen::LLT<Matrix> cholesky_of_error(const Matrix& error) {
    const Matrix sym = ((error + error.transpose()) / 2.0).eval();
    Eigen::LLT<Matrix> llt(sym);
    // LLT reports Success for some singular PSD inputs (e.g. the zero
    // matrix), so the pivots need an explicit check as well.
    const double scale = std::max(sym.diagonal().maxCoeff(), 1.0);
    const double floor = std::sqrt(scale) * 1e-12;
    if (llt.info() != Eigen::Success ||
        llt.matrixLLT().diagonal().minCoeff() <= floor)
        throw SingularMatrixError(
            "manova: error SSCP matrix is not positive definite");
    return llt;
}

double log_det_of_llt(const Eigen::LLT<Matrix>& llt) {
    return 2.0 * llt.matrixLLT().diagonal().array().log().sum();
}

} // namespace

Vector manova_eigenvalues(const SSCPPair& sscp) {
    check_pair(sscp);
    const auto llt = cholesky_of_error(sscp.error);
    const Matrix l = llt.matrixL();
    // A = L^{-1} S_h L^{-T}, symmetric PSD; its eigenvalues are those
    // of S_h S_e^{-1}.
    Matrix a = l.triangularView<Eigen::Lower>().solve(
        ((sscp.hypothesis + sscp.hypothesis.transpose()) / 2.0).eval());
    a = l.triangularView<Eigen::Lower>().solve(a.transpose().eval());
    a = ((a + a.transpose()) / 2.0).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
    if (eig.info() != Eigen::Success)
        throw SingularMatrixError("manova: eigenvalue computation failed");
    Vector lambdas = eig.eigenvalues().reverse();
    for (Eigen::Index i = 0; i < lambdas.size(); ++i)
        if (lambdas[i] < 0.0) lambdas[i] = 0.0;
    return lambdas;
}

double statistic_from_eigenvalues(StatisticKind kind, const Vector& lambdas) {
    if (lambdas.size() == 0) throw ConfigError("manova: no eigenvalues");
    switch (kind) {
        case StatisticKind::Wilks: {
            double w = 1.0;
            for (Eigen::Index i = 0; i < lambdas.size(); ++i) w /= 1.0 + lambdas[i];
            return w;
        }
        case StatisticKind::LawleyHotelling:
            return lambdas.sum();
        case StatisticKind::Pillai: {
            double v = 0.0;
            for (Eigen::Index i = 0; i < lambdas.size(); ++i)
                v += lambdas[i] / (1.0 + lambdas[i]);
            return v;
        }
        case StatisticKind::Roy:
            return lambdas[0];
    }
    throw ConfigError("manova: unknown statistic");
}

double wilks_pvalue(double wilks, int dim, int df_h, int df_e) {
    if (dim < 1) throw ConfigError("wilks: dimension must be positive");
    if (df_h < 1 || df_e < 1)
        throw ConfigError("wilks: degrees of freedom must be positive");
    if (!(wilks > 0.0) || wilks > 1.0 + 1e-9)
        throw ConfigError("wilks: statistic must lie in (0, 1]");
    if (wilks > 1.0) wilks = 1.0;

    const double d = dim;
    const double vh = df_h;
    const double ve = df_e;
    const double denom = d * d + vh * vh - 5.0;
    const double t = denom > 0.0 ? std::sqrt((d * d * vh * vh - 4.0) / denom) : 1.0;
    const double w = ve - (d - vh + 1.0) / 2.0;
    const double df1 = d * vh;
    const double df2 = w * t - (d * vh - 2.0) / 2.0;
    if (!(df2 > 0.0))
        throw ConfigError("wilks: approximation has nonpositive denominator df");
    const double log_scaled = -std::log(wilks) / t;
    const double f = log_scaled > 700.0 ? inf : std::expm1(log_scaled) * df2 / df1;
    return f_tail(f, df1, df2);
}

std::array<StatisticValue, 4> manova_statistics(const SSCPPair& sscp) {
    check_pair(sscp);
    const Vector lambdas = manova_eigenvalues(sscp);

    const double d = sscp.dim();
    const double vh = sscp.df_h;
    const double ve = sscp.df_e;
    const double s = std::min(d, vh);
    const double mm = (std::fabs(d - vh) - 1.0) / 2.0;
    const double nn = (ve - d - 1.0) / 2.0;

    std::array<StatisticValue, 4> out;

    // Wilks: value from log-determinants (Cholesky), p from Rao's F.
    {
        StatisticValue& sv = out[0];
        sv.kind = StatisticKind::Wilks;
        const auto llt_e = cholesky_of_error(sscp.error);
        const auto llt_t = cholesky_of_error(sscp.error + sscp.hypothesis);
        double w = std::exp(log_det_of_llt(llt_e) - log_det_of_llt(llt_t));
        if (w > 1.0) w = 1.0;
        sv.value = w;
        const double denom = d * d + vh * vh - 5.0;
        const double t = denom > 0.0 ? std::sqrt((d * d * vh * vh - 4.0) / denom) : 1.0;
        const double ww = ve - (d - vh + 1.0) / 2.0;
        sv.df1 = d * vh;
        sv.df2 = ww * t - (d * vh - 2.0) / 2.0;
        if (!(sv.df2 > 0.0))
            throw ConfigError("manova: Wilks approximation has nonpositive df");
        const double log_scaled = -std::log(w) / t;
        sv.f = log_scaled > 700.0 ? inf : std::expm1(log_scaled) * sv.df2 / sv.df1;
        sv.p_value = f_tail(sv.f, sv.df1, sv.df2);
    }

    // Lawley-Hotelling trace.
    {
        StatisticValue& sv = out[1];
        sv.kind = StatisticKind::LawleyHotelling;
        sv.value = statistic_from_eigenvalues(sv.kind, lambdas);
        sv.df1 = s * (2.0 * mm + s + 1.0);
        sv.df2 = 2.0 * (s * nn + 1.0);
        if (!(sv.df2 > 0.0))
            throw ConfigError("manova: Lawley-Hotelling approximation has nonpositive df");
        sv.f = sv.value * sv.df2 / (s * sv.df1);
        sv.p_value = f_tail(sv.f, sv.df1, sv.df2);
    }

    // Pillai's trace.
    {
        StatisticValue& sv = out[2];
        sv.kind = StatisticKind::Pillai;
        sv.value = statistic_from_eigenvalues(sv.kind, lambdas);
        sv.df1 = s * (2.0 * mm + s + 1.0);
        sv.df2 = s * (2.0 * nn + s + 1.0);
        if (!(sv.df2 > 0.0))
            throw ConfigError("manova: Pillai approximation has nonpositive df");
        const double gap = s - sv.value;
        sv.f = gap > 1e-12 ? (2.0 * nn + s + 1.0) / (2.0 * mm + s + 1.0) * sv.value / gap
                           : inf;
        sv.p_value = f_tail(sv.f, sv.df1, sv.df2);
    }

    // Roy's largest root: F bound, so the p-value is a lower bound.
    {
        StatisticValue& sv = out[3];
        sv.kind = StatisticKind::Roy;
        sv.value = lambdas[0];
        sv.df1 = std::max(d, vh);
        sv.df2 = ve - std::max(d, vh) + vh;
        if (!(sv.df2 > 0.0))
            throw ConfigError("manova: Roy approximation has nonpositive df");
        sv.f = sv.value * sv.df2 / sv.df1;
        sv.p_value = f_tail(sv.f, sv.df1, sv.df2);
        sv.p_is_lower_bound = true;
    }

    return out;
}

} // namespace fanova
