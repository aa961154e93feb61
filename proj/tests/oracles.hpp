// Independent reference implementations: everything here evaluates the
// defining formulas directly (dense Kronecker products, naive
// recursions, brute-force sums) so the library's optimized paths can
// be checked against them.
#pragma once

#include <vector>

#include <Eigen/Dense>

#include "fanova/design.hpp"
#include "fanova/rng.hpp"

namespace oracle {

using fanova::Matrix;
using fanova::Vector;

// Naive one-function Cox-de Boor recursion over an explicit knot
// vector. The last nonempty interval is treated as closed on the right
// (so the basis still sums to one at the domain end).
inline double bspline(const std::vector<double>& knots, int order, int h, double t) {
    const double b = knots.back();
    if (order == 1) {
        const double lo = knots[static_cast<std::size_t>(h)];
        const double hi = knots[static_cast<std::size_t>(h) + 1];
        if (lo >= hi) return 0.0;
        if (t >= lo && t < hi) return 1.0;
        if (t == b && hi == b) return 1.0;
        return 0.0;
    }
    const double u_h = knots[static_cast<std::size_t>(h)];
    const double u_hk1 = knots[static_cast<std::size_t>(h + order - 1)];
    const double u_h1 = knots[static_cast<std::size_t>(h) + 1];
    const double u_hk = knots[static_cast<std::size_t>(h + order)];
    double left = 0.0, right = 0.0;
    if (u_hk1 > u_h)
        left = (t - u_h) / (u_hk1 - u_h) * bspline(knots, order - 1, h, t);
    if (u_hk > u_h1)
        right = (u_hk - t) / (u_hk - u_h1) * bspline(knots, order - 1, h + 1, t);
    return left + right;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Matrix pinv(const Matrix& a) {
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(a);
    return cod.pseudoInverse();
}

struct SSCP {
    Matrix hypothesis;
    Matrix error;
};

// Literal doubly-multivariate formulas with explicit Kronecker
// products; Y is n x (m p) treatment-major.
inline SSCP dmm_sscp(const Matrix& y, const Matrix& x, const Matrix& g,
                     const Matrix& t, int p) {
    const Matrix ip = Matrix::Identity(p, p);
    const Matrix tkron = kron(t, ip); // (m p) x (q p)
    const Matrix xtx_pinv = pinv(x.transpose() * x);
    const Matrix hat = x * xtx_pinv * x.transpose();
    const Matrix q_proj = Matrix::Identity(x.rows(), x.rows()) - hat;
    const Matrix b = xtx_pinv * x.transpose() * y;
    const Matrix c_inv = (g.transpose() * xtx_pinv * g).inverse();
    SSCP out;
    out.error = tkron.transpose() * y.transpose() * q_proj * y * tkron;
    out.hypothesis = tkron.transpose() * b.transpose() * g * c_inv *
                     g.transpose() * b * tkron;
    return out;
}

// Literal mixed-model formulas; y_star is (n m) x p subject-major.
inline SSCP mmm_sscp(const Matrix& y_star, const Matrix& x, const Matrix& g,
                     const Matrix& t) {
    const Matrix tt = t * t.transpose(); // m x m
    const Matrix xtx_pinv = pinv(x.transpose() * x);
    const Matrix hat = x * xtx_pinv * x.transpose();
    const Matrix q_proj = Matrix::Identity(x.rows(), x.rows()) - hat;
    const Matrix c_inv = (g.transpose() * xtx_pinv * g).inverse();
    const Matrix m_proj = x * xtx_pinv * g * c_inv * g.transpose() * xtx_pinv *
                          x.transpose();
    SSCP out;
    out.error = y_star.transpose() * kron(q_proj, tt) * y_star;
    out.hypothesis = y_star.transpose() * kron(m_proj, tt) * y_star;
    return out;
}

// Brute-force effect decomposition straight from the definitions,
// with groups weighted equally.
struct Effects {
    Vector mu;
    std::vector<Vector> alpha, beta;
    std::vector<std::vector<Vector>> theta; // [i][j]
};

inline Effects effects(const fanova::RMDataset& data) {
    const int g = data.groups();
    const int m = data.treatments();
    const int p = data.p();
    auto cell_mean = [&](int i, int j) {
        Vector sum = Vector::Zero(p);
        int offset = 0;
        for (int jj = 0; jj < j; ++jj) offset += data.group_sizes[static_cast<std::size_t>(jj)];
        const int nj = data.group_sizes[static_cast<std::size_t>(j)];
        for (int k = 0; k < nj; ++k)
            sum += data.coefficients[static_cast<std::size_t>(offset + k)]
                                    [static_cast<std::size_t>(i)];
        return Vector((sum / nj).eval());
    };
    Effects e;
    e.mu = Vector::Zero(p);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < g; ++j) e.mu += cell_mean(i, j);
    e.mu /= static_cast<double>(m * g);
    e.alpha.assign(static_cast<std::size_t>(m), Vector::Zero(p));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < g; ++j) e.alpha[static_cast<std::size_t>(i)] += cell_mean(i, j);
        e.alpha[static_cast<std::size_t>(i)] =
            e.alpha[static_cast<std::size_t>(i)] / g - e.mu;
    }
    e.beta.assign(static_cast<std::size_t>(g), Vector::Zero(p));
    for (int j = 0; j < g; ++j) {
        for (int i = 0; i < m; ++i) e.beta[static_cast<std::size_t>(j)] += cell_mean(i, j);
        e.beta[static_cast<std::size_t>(j)] =
            e.beta[static_cast<std::size_t>(j)] / m - e.mu;
    }
    e.theta.assign(static_cast<std::size_t>(m),
                   std::vector<Vector>(static_cast<std::size_t>(g)));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < g; ++j)
            e.theta[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                cell_mean(i, j) - e.mu - e.alpha[static_cast<std::size_t>(i)] -
                e.beta[static_cast<std::size_t>(j)];
    return e;
}

// Random dataset with the given layout; entries are standard normal
// plus a shared per-subject shift so treatments are correlated.
inline fanova::RMDataset random_dataset(fanova::Rng& rng, int g, int m, int p,
                                        const std::vector<int>& sizes) {
    fanova::RMDataset data;
    data.group_sizes = sizes;
    int n = 0;
    for (int s : sizes) n += s;
    data.coefficients.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        const double shift = rng.normal(0.0, 0.7);
        data.coefficients[static_cast<std::size_t>(k)].resize(static_cast<std::size_t>(m));
        for (int i = 0; i < m; ++i) {
            Vector v(p);
            for (int h = 0; h < p; ++h) v[h] = shift + rng.normal();
            data.coefficients[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] = v;
        }
    }
    (void)g;
    return data;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
    return (a - b).cwiseAbs().maxCoeff();
}

} // namespace oracle
