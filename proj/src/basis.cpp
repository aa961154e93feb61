#include "fanova/basis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fanova/errors.hpp"

namespace fanova {

BSplineBasis::BSplineBasis(double a, double b, int dimension, int order)
    : a_(a), b_(b), dimension_(dimension), order_(order) {
    if (!(a < b)) throw ConfigError("basis: domain must satisfy a < b");
    if (order < 1) throw ConfigError("basis: order must be at least 1");
    if (dimension < order)
        throw ConfigError("basis: dimension must be at least the order");
    const int interior = dimension - order;
    knots_.reserve(static_cast<std::size_t>(dimension + order));
    for (int i = 0; i < order; ++i) knots_.push_back(a);
    for (int i = 1; i <= interior; ++i)
        knots_.push_back(a + (b - a) * i / (interior + 1));
    for (int i = 0; i < order; ++i) knots_.push_back(b);
}

int BSplineBasis::knot_span(double t) const {
    // Last span [knots_[dimension_-1], knots_[dimension_]] is closed at b.
    if (t >= knots_[static_cast<std::size_t>(dimension_)]) return dimension_ - 1;
    const auto begin = knots_.begin() + order_;
    const auto end = knots_.begin() + dimension_;
    return static_cast<int>(std::upper_bound(begin, end, t) - knots_.begin()) - 1;
}

int BSplineBasis::evaluate_local(double t, double* values) const {
    if (!(t >= a_ && t <= b_))
        throw DomainError("basis: evaluation point outside domain");
    const int span = knot_span(t);
    // Cox-de Boor triangle for the `order` splines ending at `span`.
    values[0] = 1.0;
    std::vector<double> left(static_cast<std::size_t>(order_));
    std::vector<double> right(static_cast<std::size_t>(order_));
    for (int j = 1; j < order_; ++j) {
        left[static_cast<std::size_t>(j)] = t - knots_[static_cast<std::size_t>(span + 1 - j)];
        right[static_cast<std::size_t>(j)] = knots_[static_cast<std::size_t>(span + j)] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double denom = right[static_cast<std::size_t>(r + 1)] +
                                 left[static_cast<std::size_t>(j - r)];
            const double temp = values[r] / denom;
            values[r] = saved + right[static_cast<std::size_t>(r + 1)] * temp;
            saved = left[static_cast<std::size_t>(j - r)] * temp;
        }
        values[j] = saved;
    }
    return span - order_ + 1;
}

Vector BSplineBasis::evaluate(double t) const {
    std::vector<double> local(static_cast<std::size_t>(order_));
    const int first = evaluate_local(t, local.data());
    Vector out = Vector::Zero(dimension_);
    for (int j = 0; j < order_; ++j) out[first + j] = local[static_cast<std::size_t>(j)];
    return out;
}

Matrix BSplineBasis::evaluation_matrix(const Vector& grid) const {
    Matrix out = Matrix::Zero(grid.size(), dimension_);
    std::vector<double> local(static_cast<std::size_t>(order_));
    for (Eigen::Index r = 0; r < grid.size(); ++r) {
        const int first = evaluate_local(grid[r], local.data());
        for (int j = 0; j < order_; ++j)
            out(r, first + j) = local[static_cast<std::size_t>(j)];
    }
    return out;
}

CurveFitter::CurveFitter(const BSplineBasis& basis, const Vector& grid)
    : eval_(basis.evaluation_matrix(grid)), qr_(eval_) {
    if (qr_.rank() < basis.dimension())
        throw SingularFitError(
            "fit: rank-deficient evaluation matrix (dimension " +
            std::to_string(basis.dimension()) + ", " +
            std::to_string(grid.size()) + " grid points)");
}

Vector CurveFitter::fit(const Vector& values) const {
    if (values.size() != eval_.rows())
        throw ConfigError("fit: value count does not match the grid");
    return qr_.solve(values);
}

Vector fit_curve(const BSplineBasis& basis, const SampledCurve& curve) {
    if (curve.grid.size() != curve.values.size())
        throw ConfigError("fit: grid and value lengths differ");
    if (curve.grid.size() == 0) throw ConfigError("fit: empty curve");
    return CurveFitter(basis, curve.grid).fit(curve.values);
}

int gcv_select(double a, double b, const std::vector<int>& candidates,
               const std::vector<SampledCurve>& curves, int order) {
    if (candidates.empty())
        throw ConfigError("gcv: empty candidate list");
    if (curves.empty())
        throw ConfigError("gcv: no curves supplied");

    std::vector<int> dims = candidates;
    std::sort(dims.begin(), dims.end());
    dims.erase(std::unique(dims.begin(), dims.end()), dims.end());

    int best_dim = -1;
    double best_score = std::numeric_limits<double>::infinity();
    for (int p : dims) {
        const BSplineBasis basis(a, b, p, order);
        double score = 0.0;
        for (const auto& curve : curves) {
            const Eigen::Index n_pts = curve.grid.size();
            if (n_pts <= p)
                throw ConfigError("gcv: candidate dimension " + std::to_string(p) +
                                  " needs more than " + std::to_string(p) +
                                  " grid points");
            const Vector coef = fit_curve(basis, curve);
            const double rss =
                (curve.values - basis.evaluation_matrix(curve.grid) * coef)
                    .squaredNorm();
            const double denom = static_cast<double>(n_pts - p);
            score += static_cast<double>(n_pts) * rss / (denom * denom);
        }
        score /= static_cast<double>(curves.size());
        if (score < best_score) { // ascending order: ties keep the smaller p
            best_score = score;
            best_dim = p;
        }
    }
    return best_dim;
}

} // namespace fanova
