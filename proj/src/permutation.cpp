#include "fanova/permutation.hpp"

#include <string>
#include <utility>

#include "fanova/dmm.hpp"
#include "fanova/errors.hpp"
#include "fanova/mmm.hpp"

namespace fanova {

RMDataset permute_dataset(const RMDataset& data, Rng& rng) {
    data.validate();
    RMDataset out = data;
    for (auto& subject : out.coefficients) rng.shuffle(subject);
    if (out.groups() > 1) {
        const std::vector<std::size_t> order =
            rng.permutation(static_cast<std::size_t>(out.n()));
        std::vector<std::vector<Vector>> reassigned(out.coefficients.size());
        for (std::size_t k = 0; k < order.size(); ++k)
            reassigned[k] = std::move(out.coefficients[order[k]]);
        out.coefficients = std::move(reassigned);
    }
    return out;
}

double permutation_pvalue(StatisticKind kind, double observed,
                          const std::vector<double>& permuted, bool add_one) {
    if (permuted.empty())
        throw ConfigError("permutation: no permuted statistics");
    std::size_t count = 0;
    if (kind == StatisticKind::Wilks) {
        for (double s : permuted)
            if (s <= observed) ++count;
    } else {
        for (double s : permuted)
            if (s >= observed) ++count;
    }
    if (add_one)
        return static_cast<double>(count + 1) /
               static_cast<double>(permuted.size() + 1);
    return static_cast<double>(count) / static_cast<double>(permuted.size());
}

namespace {

SSCPPair engine_sscp(Engine engine, const RMDataset& data,
                     const ContrastPair& contrasts) {
    const Matrix x = build_design_matrix(data);
    const WideResponse wide = assemble_wide(data);
    if (engine == Engine::DMM) return dmm_sscp(wide, x, contrasts);
    return mmm_sscp(rearrange(wide), x, contrasts);
}

} // namespace

TestReport permutation_test(const RMDataset& data, Hypothesis hypothesis,
                            const PermutationConfig& config) {
    if (config.replicates < 1)
        throw ConfigError("permutation: needs at least one replicate");
    data.validate();
    const ContrastPair contrasts =
        contrast_for(hypothesis, data.groups(), data.treatments());

    const SSCPPair observed_sscp = engine_sscp(config.engine, data, contrasts);
    const auto all_stats = manova_statistics(observed_sscp);
    StatisticValue observed{};
    for (const StatisticValue& sv : all_stats)
        if (sv.kind == config.statistic) observed = sv;

    std::vector<double> permuted(static_cast<std::size_t>(config.replicates));
    for (int f = 0; f < config.replicates; ++f) {
        Rng rng = Rng::substream(config.seed, static_cast<std::uint64_t>(f) + 1);
        const RMDataset shuffled = permute_dataset(data, rng);
        const SSCPPair sscp = engine_sscp(config.engine, shuffled, contrasts);
        permuted[static_cast<std::size_t>(f)] = statistic_from_eigenvalues(
            config.statistic, manova_eigenvalues(sscp));
    }

    observed.p_value = permutation_pvalue(config.statistic, observed.value,
                                          permuted, config.add_one);

    TestReport report;
    report.hypothesis = hypothesis;
    report.method = "permutation";
    report.dims = {data.n(), data.groups(), data.treatments(), data.p(),
                   contrasts.s(), contrasts.q()};
    report.statistics.push_back(observed);
    report.notes.push_back(
        std::string("engine ") + (config.engine == Engine::DMM ? "DMM" : "MMM") +
        ", statistic " + statistic_name(config.statistic) + ", " +
        std::to_string(config.replicates) + " permutations, seed " +
        std::to_string(config.seed) +
        (config.add_one ? ", p = (1+count)/(1+F)" : ", p = count/F"));
    return report;
}

} // namespace fanova
