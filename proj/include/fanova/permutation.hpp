#pragma once

#include <cstdint>
#include <vector>

#include "fanova/design.hpp"
#include "fanova/manova.hpp"
#include "fanova/report.hpp"
#include "fanova/rng.hpp"

namespace fanova {

enum class Engine { DMM, MMM };

struct PermutationConfig {
    int replicates = 999;       // number of permuted datasets F
    std::uint64_t seed = 0;
    StatisticKind statistic = StatisticKind::Pillai;
    Engine engine = Engine::MMM;
    // When true the p-value is (1 + count) / (1 + F) instead of the
    // plain count / F (noted in the report).
    bool add_one = false;
};

// One random relabeling that preserves the repeated-measures layout:
// first each subject's m treatment vectors are shuffled in place, then
// (when there are several groups) whole subjects are reassigned to
// groups of the original sizes without replacement.
RMDataset permute_dataset(const RMDataset& data, Rng& rng);

// Fraction of permuted statistics at least as extreme as the observed
// one: small Wilks values are extreme, large values of the other three
// are extreme.
double permutation_pvalue(StatisticKind kind, double observed,
                          const std::vector<double>& permuted, bool add_one);

// Permutation test of the hypothesis using the chosen engine's SSCP
// and statistic. The report carries the observed statistic (with its
// asymptotic F as reference) and the permutation p-value.
TestReport permutation_test(const RMDataset& data, Hypothesis hypothesis,
                            const PermutationConfig& config);

} // namespace fanova
