#pragma once

#include <vector>

#include "fanova/basis.hpp"

namespace fanova {

// Repeated-measures dataset after basis expansion: every subject is
// observed under all m treatments; each observation is a coefficient
// vector of length p. Subjects are stored group-major: group 1's
// subjects first, then group 2's, and so on.
struct RMDataset {
    std::vector<int> group_sizes;                  // per group, all >= 1
    std::vector<std::vector<Vector>> coefficients; // [subject][treatment]

    int groups() const { return static_cast<int>(group_sizes.size()); }
    int n() const { return static_cast<int>(coefficients.size()); }
    int treatments() const {
        return coefficients.empty() ? 0 : static_cast<int>(coefficients[0].size());
    }
    int p() const {
        return (coefficients.empty() || coefficients[0].empty())
                   ? 0
                   : static_cast<int>(coefficients[0][0].size());
    }

    int group_of(int subject) const;

    // Throws DatasetError on structural problems (group sizes not
    // matching the subject count, ragged treatment or coefficient
    // counts, empty dataset).
    void validate() const;
};

enum class Hypothesis { Interaction, Treatment, Group };

const char* hypothesis_name(Hypothesis h);

// Between-subject indicator matrix: row per subject (dataset order),
// column per group; entry 1 when the subject belongs to the group.
Matrix build_design_matrix(const RMDataset& data);

// Hypothesis specification G' B (T kron I_p) = 0: G selects group
// contrasts (g x s, full column rank) and T treatment contrasts
// (m x q; orthonormal columns when it is a real contrast, identity
// when the hypothesis keeps all treatments).
struct ContrastPair {
    Matrix G;
    Matrix T;

    int s() const { return static_cast<int>(G.cols()); }
    int q() const { return static_cast<int>(T.cols()); }
};

// Contrasts for the standard two-way repeated-measures hypotheses:
//   interaction: G = successive group differences, T = treatment contrasts
//   treatment:   G = I_g,                          T = treatment contrasts
//   group:       G = successive group differences, T = I_m
// Treatment contrasts are orthonormal polynomial contrasts on
// equally spaced points (sign convention: negated, so for m = 3 the
// columns are (1,0,-1)/sqrt(2) and (-1,2,-1)/sqrt(6)). Throws
// HypothesisError when the layout cannot carry the hypothesis
// (group/interaction with g < 2, treatment/interaction with m < 2).
ContrastPair contrast_for(Hypothesis h, int g, int m);

// Cell-mean decomposition with groups weighted equally regardless of
// group size: mu + alpha_i + beta_j + theta_ij + residual. Each alpha,
// beta and theta set sums to zero, and residuals sum to zero within
// every (treatment, group) cell.
struct EffectEstimates {
    Vector grand_mean;                                  // p
    std::vector<Vector> treatment_effects;              // m
    std::vector<Vector> group_effects;                  // g
    std::vector<std::vector<Vector>> interaction_effects; // [i][j]
    std::vector<std::vector<Vector>> residuals;         // [subject][treatment]
};

EffectEstimates estimate_effects(const RMDataset& data);

} // namespace fanova
