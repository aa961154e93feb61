#pragma once

#include <vector>

#include <Eigen/Dense>

namespace fanova {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// One observed curve: values[r] sampled at grid[r]; grid strictly
// increasing inside the basis domain.
struct SampledCurve {
    Vector grid;
    Vector values;
};

// B-spline basis on [a, b] with clamped, equally spaced knots. The
// first and last knots are repeated `order` times and the remaining
// dimension - order interior knots are equally spaced, so the basis is
// fully determined by (domain, dimension, order).
class BSplineBasis {
public:
    // order = polynomial degree + 1 (4 = cubic).
    BSplineBasis(double a, double b, int dimension, int order = 4);

    int dimension() const { return dimension_; }
    int order() const { return order_; }
    double domain_min() const { return a_; }
    double domain_max() const { return b_; }
    const std::vector<double>& knots() const { return knots_; }

    // All basis functions at t (throws DomainError outside [a, b]).
    // At most `order` entries are nonzero; they sum to one.
    Vector evaluate(double t) const;

    // The `order` possibly-nonzero values at t. Writes them to
    // values[0..order-1] and returns the index of the first one.
    int evaluate_local(double t, double* values) const;

    // Rows = evaluate(grid[r]). Grid entries must be inside the domain.
    Matrix evaluation_matrix(const Vector& grid) const;

private:
    int knot_span(double t) const;

    double a_, b_;
    int dimension_, order_;
    std::vector<double> knots_; // size dimension_ + order_
};

// Least-squares coefficients of one curve in the given basis (QR).
// Throws SingularFitError if the evaluation matrix is rank deficient.
Vector fit_curve(const BSplineBasis& basis, const SampledCurve& curve);

// Fits many curves sharing one grid; factorizes once.
class CurveFitter {
public:
    CurveFitter(const BSplineBasis& basis, const Vector& grid);

    Vector fit(const Vector& values) const;
    const Matrix& evaluation() const { return eval_; }

private:
    Matrix eval_;
    Eigen::ColPivHouseholderQR<Matrix> qr_;
};

// Smallest-GCV basis dimension among `candidates` for the curves. GCV
// of one curve with n points and p coefficients is n * RSS / (n - p)^2
// (the fit hat matrix has trace p); the score of a candidate is the
// mean over curves. Ties go to the smaller dimension.
int gcv_select(double a, double b, const std::vector<int>& candidates,
               const std::vector<SampledCurve>& curves, int order = 4);

} // namespace fanova
