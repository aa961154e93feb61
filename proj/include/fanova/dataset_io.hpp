#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fanova/basis.hpp"
#include "fanova/design.hpp"
#include "fanova/simulation.hpp"

namespace fanova {

// Long-format curve files: one observation per line with the header
//   subject,group,treatment,t,value
// Commas or tabs separate fields (chosen from the header line).

struct IngestOptions {
    int basis_dim = 0;              // used when gcv_candidates is empty
    std::vector<int> gcv_candidates; // when nonempty, dimension chosen by GCV
    int basis_order = 4;
};

struct IngestResult {
    RMDataset dataset;
    std::vector<std::string> group_labels;     // per group
    std::vector<std::string> subject_labels;   // per subject, dataset order
    std::vector<std::string> treatment_labels; // per treatment
    double domain_min = 0.0;
    double domain_max = 1.0;
    int basis_dim = 0;
    int basis_order = 4;
    bool gcv_used = false;
    // Parsed curves, dataset order: curves[subject][treatment].
    std::vector<std::vector<SampledCurve>> curves;
};

// Parses, validates (every subject under every treatment, one group
// per subject, strictly increasing time points per curve) and fits the
// basis. Throws ParseError with a line number on malformed input,
// DatasetError naming the offenders on balance violations.
IngestResult ingest_curves(std::istream& in, const IngestOptions& options);
IngestResult ingest_curves_file(const std::string& path, const IngestOptions& options);

// Writes the parsed curves back out in the same long format (full
// double precision, so re-ingesting reproduces identical reports).
void write_curves_csv(std::ostream& out, const IngestResult& ingest);

// Writes freshly generated curves with synthetic labels, mapping the
// unit grid onto [domain_min, domain_max].
void write_raw_curves_csv(std::ostream& out, const RawCurves& raw,
                          const ScenarioSpec& spec, double domain_min,
                          double domain_max);

// --- simulation study configuration ---------------------------------

// Key = value file, '#' comments; list values comma separated. Keys:
//   treatment, group, interaction  effect ids (lists -> grid)
//   sigma, n                       lists -> grid
//   error                          iid | brownian
//   methods                        dmm, mmm
//   hypotheses                     interaction, treatment, group
//   statistic                      wilks | lawley-hotelling | pillai | roy
//   groups, treatments, grid_points, basis_dim, basis_order,
//   replications, alpha, seed      scalars
struct SimulationConfig {
    std::vector<std::string> treatment_fns{"M1.A1"};
    std::vector<std::string> group_fns{"M1.B1"};
    std::vector<std::string> interaction_fns{"M1.I1"};
    std::vector<double> sigmas{0.10};
    std::vector<int> ns{50};
    ErrorModel error_model = ErrorModel::IidGaussian;
    std::vector<std::string> methods{"dmm", "mmm"};
    std::vector<Hypothesis> hypotheses{Hypothesis::Interaction,
                                       Hypothesis::Treatment, Hypothesis::Group};
    int groups = 2;
    int treatments = 3;
    int grid_points = 101;
    int basis_dim = 14;
    int basis_order = 4;
    int replications = 200;
    double alpha = 0.05;
    StatisticKind statistic = StatisticKind::Wilks;
    std::uint64_t seed = 0;
};

SimulationConfig parse_simulation_config(std::istream& in);
SimulationConfig parse_simulation_config_file(const std::string& path);

// Scenario grid in fixed order (treatment, group, interaction, n,
// sigma innermost last); each cell's seed is derived from the master
// seed and the cell index, so results do not depend on which cells run
// or in what order.
std::vector<ScenarioSpec> expand_grid(const SimulationConfig& config);

// Runs every cell and renders the CSV
//   scenario,n,sigma,method,hypothesis,acceptance,replications,seed
// (one row per cell, method and requested hypothesis). Identical
// configurations produce byte-identical CSV.
std::string study_csv(const SimulationConfig& config);

} // namespace fanova
