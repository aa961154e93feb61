#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fanova/basis.hpp"
#include "fanova/design.hpp"
#include "fanova/manova.hpp"
#include "fanova/rng.hpp"

namespace fanova {

// Mean-effect catalog for the synthetic studies. Ids name a study
// family (M1..M4) and a role: A* = treatment effects alpha_i(t),
// B* = group effects beta_j(t), I* = interaction effects theta_ij(t).
// Families share definitions where no distinct one exists (M2 reuses
// the M1 functions, families differ in the noise model or the chosen
// role catalog), so e.g. "M2.A1" is an alias of "M1.A1". Indices i and
// j are 1-based; t lives in [0, 1]. Unknown ids throw ConfigError
// listing the catalog.
double effect_function(const std::string& id, int i, int j, double t);

// Every canonical id accepted by effect_function.
std::vector<std::string> effect_catalog();

enum class ErrorModel {
    IidGaussian,   // independent N(0, sigma) at every grid point
    ScaledBrownian // (sigma/20) * standard Brownian motion on the grid
};

struct ScenarioSpec {
    std::string treatment_fn = "M1.A1";
    std::string group_fn = "M1.B1";
    std::string interaction_fn = "M1.I1";
    ErrorModel error_model = ErrorModel::IidGaussian;
    double sigma = 0.10;
    int n_per_group = 50;
    int groups = 2;
    int treatments = 3;
    int grid_points = 101; // equidistant on [0, 1]
    int basis_dim = 14;
    int basis_order = 4;
    int replications = 200;
    double alpha = 0.05;
    StatisticKind statistic = StatisticKind::Wilks;
    std::uint64_t seed = 0;
    // Per-subject amplitude gamma_k ~ N(mu_k, subject_sd) with
    // mu_k ~ U(0, subject_mean_max), multiplying sin(pi t).
    double subject_sd = 0.2;
    double subject_mean_max = 0.05;

    void validate() const;
};

// Raw sampled curves of one replication, before any basis fit:
// curves[subject][treatment] over the shared grid. Subjects are
// group-major as in RMDataset.
struct RawCurves {
    Vector grid;
    std::vector<std::vector<Vector>> values;
};

RawCurves generate_curves(const ScenarioSpec& spec, Rng& rng);

// One synthetic dataset: generate_curves followed by the basis fit.
RMDataset generate_dataset(const ScenarioSpec& spec, Rng& rng);

// Acceptance proportions (share of replications with p >= alpha for
// the scenario's statistic) per method and hypothesis.
struct StudyCell {
    std::string method; // "dmm" or "mmm"
    Hypothesis hypothesis;
    double acceptance = 0.0;
    int replications = 0;
};

struct StudyResult {
    ScenarioSpec spec;
    std::vector<StudyCell> cells;
    std::vector<std::string> notes;
    double seconds = 0.0;
};

// Runs the scenario's replications with per-replication substreams of
// spec.seed. `methods` may contain "dmm" and "mmm"; a method whose
// dimension requirement fails for the scenario is skipped with a note
// (the DMM needs n > m*p). Hypotheses run: interaction/treatment/group,
// minus the ones a single-group layout cannot carry.
StudyResult run_study(const ScenarioSpec& spec,
                      const std::vector<std::string>& methods);

} // namespace fanova
