#include "fanova/design.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "fanova/errors.hpp"

namespace fanova {

int RMDataset::group_of(int subject) const {
    int upper = 0;
    for (int j = 0; j < groups(); ++j) {
        upper += group_sizes[static_cast<std::size_t>(j)];
        if (subject < upper) return j;
    }
    throw DatasetError("dataset: subject index out of range");
}

void RMDataset::validate() const {
    if (group_sizes.empty()) throw DatasetError("dataset: no groups");
    int total = 0;
    for (int sz : group_sizes) {
        if (sz < 1) throw DatasetError("dataset: group with no subjects");
        total += sz;
    }
    if (total != n())
        throw DatasetError("dataset: group sizes sum to " + std::to_string(total) +
                           " but " + std::to_string(n()) + " subjects are present");
    if (coefficients.empty()) throw DatasetError("dataset: no subjects");
    const std::size_t m = coefficients[0].size();
    if (m == 0) throw DatasetError("dataset: no treatments");
    const Eigen::Index dim = coefficients[0][0].size();
    if (dim == 0) throw DatasetError("dataset: empty coefficient vectors");
    for (std::size_t k = 0; k < coefficients.size(); ++k) {
        if (coefficients[k].size() != m)
            throw DatasetError("dataset: subject " + std::to_string(k) +
                               " has a different treatment count");
        for (const Vector& c : coefficients[k])
            if (c.size() != dim)
                throw DatasetError("dataset: subject " + std::to_string(k) +
                                   " has a coefficient vector of different length");
    }
}

const char* hypothesis_name(Hypothesis h) {
    switch (h) {
        case Hypothesis::Interaction: return "interaction";
        case Hypothesis::Treatment: return "treatment";
        case Hypothesis::Group: return "group";
    }
    return "?";
}

Matrix build_design_matrix(const RMDataset& data) {
    data.validate();
    Matrix x = Matrix::Zero(data.n(), data.groups());
    int row = 0;
    for (int j = 0; j < data.groups(); ++j)
        for (int k = 0; k < data.group_sizes[static_cast<std::size_t>(j)]; ++k)
            x(row++, j) = 1.0;
    return x;
}

namespace {

// Orthonormal polynomial contrasts on 1..m, degrees 1..m-1, negated.
// Modified Gram-Schmidt with one re-orthogonalization pass; the sign
// of each column is fixed before negation so that its last entry is
// positive.
Matrix treatment_contrasts(int m) {
    Matrix v(m, m);
    for (int i = 0; i < m; ++i) {
        double x = 1.0;
        for (int k = 0; k < m; ++k) {
            v(i, k) = x;
            x *= static_cast<double>(i + 1);
        }
    }
    for (int k = 0; k < m; ++k) {
        for (int pass = 0; pass < 2; ++pass)
            for (int l = 0; l < k; ++l)
                v.col(k) -= v.col(l).dot(v.col(k)) * v.col(l);
        v.col(k).normalize();
    }
    Matrix t(m, m - 1);
    for (int k = 1; k < m; ++k) {
        Vector col = v.col(k);
        if (col[m - 1] < 0.0) col = -col;
        t.col(k - 1) = -col;
    }
    return t;
}

// Successive-difference coding over groups: column j is e_j - e_{j+1}.
Matrix group_coding(int g) {
    Matrix coding = Matrix::Zero(g, g - 1);
    for (int j = 0; j + 1 < g; ++j) {
        coding(j, j) = 1.0;
        coding(j + 1, j) = -1.0;
    }
    return coding;
}

} // namespace

ContrastPair contrast_for(Hypothesis h, int g, int m) {
    if (g < 1 || m < 1)
        throw ConfigError("contrasts: need at least one group and one treatment");
    const bool needs_groups = (h == Hypothesis::Interaction || h == Hypothesis::Group);
    const bool needs_treatments = (h == Hypothesis::Interaction || h == Hypothesis::Treatment);
    if (needs_groups && g < 2)
        throw HypothesisError(std::string(hypothesis_name(h)) +
                              " hypothesis needs at least 2 groups, got " +
                              std::to_string(g));
    if (needs_treatments && m < 2)
        throw HypothesisError(std::string(hypothesis_name(h)) +
                              " hypothesis needs at least 2 treatments, got " +
                              std::to_string(m));
    ContrastPair c;
    c.G = needs_groups ? group_coding(g) : Matrix::Identity(g, g);
    c.T = needs_treatments ? treatment_contrasts(m) : Matrix::Identity(m, m);
    return c;
}

EffectEstimates estimate_effects(const RMDataset& data) {
    data.validate();
    const int g = data.groups();
    const int m = data.treatments();
    const int p = data.p();

    // Cell means over subjects within each (treatment, group) cell.
    std::vector<std::vector<Vector>> cell(static_cast<std::size_t>(m),
                                          std::vector<Vector>(static_cast<std::size_t>(g),
                                                              Vector::Zero(p)));
    int row = 0;
    for (int j = 0; j < g; ++j) {
        const int nj = data.group_sizes[static_cast<std::size_t>(j)];
        for (int k = 0; k < nj; ++k, ++row)
            for (int i = 0; i < m; ++i)
                cell[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
                    data.coefficients[static_cast<std::size_t>(row)][static_cast<std::size_t>(i)];
        for (int i = 0; i < m; ++i)
            cell[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] /= nj;
    }

    EffectEstimates est;
    est.grand_mean = Vector::Zero(p);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < g; ++j)
            est.grand_mean += cell[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    est.grand_mean /= static_cast<double>(m) * g;

    est.treatment_effects.assign(static_cast<std::size_t>(m), Vector::Zero(p));
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < g; ++j)
            est.treatment_effects[static_cast<std::size_t>(i)] +=
                cell[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        est.treatment_effects[static_cast<std::size_t>(i)] /= g;
        est.treatment_effects[static_cast<std::size_t>(i)] -= est.grand_mean;
    }

    est.group_effects.assign(static_cast<std::size_t>(g), Vector::Zero(p));
    for (int j = 0; j < g; ++j) {
        for (int i = 0; i < m; ++i)
            est.group_effects[static_cast<std::size_t>(j)] +=
                cell[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        est.group_effects[static_cast<std::size_t>(j)] /= m;
        est.group_effects[static_cast<std::size_t>(j)] -= est.grand_mean;
    }

    est.interaction_effects.assign(
        static_cast<std::size_t>(m),
        std::vector<Vector>(static_cast<std::size_t>(g), Vector::Zero(p)));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < g; ++j)
            est.interaction_effects[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
                cell[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] -
                est.grand_mean - est.treatment_effects[static_cast<std::size_t>(i)] -
                est.group_effects[static_cast<std::size_t>(j)];

    est.residuals.assign(static_cast<std::size_t>(data.n()),
                         std::vector<Vector>(static_cast<std::size_t>(m)));
    row = 0;
    for (int j = 0; j < g; ++j)
        for (int k = 0; k < data.group_sizes[static_cast<std::size_t>(j)]; ++k, ++row)
            for (int i = 0; i < m; ++i)
                est.residuals[static_cast<std::size_t>(row)][static_cast<std::size_t>(i)] =
                    data.coefficients[static_cast<std::size_t>(row)][static_cast<std::size_t>(i)] -
                    cell[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return est;
}

} // namespace fanova
