#include "fanova/simulation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "fanova/dmm.hpp"
#include "fanova/errors.hpp"
#include "fanova/mmm.hpp"

namespace fanova {

namespace {

constexpr double pi = std::numbers::pi;

double ipow(double x, int k) {
    double r = 1.0;
    for (; k > 0; --k) r *= x;
    return r;
}

struct EffectEntry {
    const char* id;
    double (*fn)(int i, int j, double t);
};

// Canonical definitions. Indices are 1-based; exponents stay
// nonnegative for the catalog's intended index ranges (i <= 8, j <= 2
// for the subtractive ones).
const EffectEntry canonical[] = {
    {"M1.A1", [](int, int, double t) { return t * (1.0 - t); }},
    {"M1.A2",
     [](int i, int, double t) {
         return std::pow(t, i / 5.0) * std::pow(1.0 - t, 6.0 - i / 5.0);
     }},
    {"M1.A3",
     [](int i, int, double t) { return ipow(t, i) * ipow(1.0 - t, 6 - i); }},
    {"M1.B1",
     [](int, int, double t) { return 0.1 * std::fabs(std::sin(4.0 * pi * t)); }},
    {"M1.B2",
     [](int, int j, double t) {
         return 0.05 * j * std::fabs(std::sin(4.0 * pi * t));
     }},
    {"M1.B3",
     [](int, int j, double t) {
         return 0.025 * j * std::fabs(std::sin(4.0 * pi * t));
     }},
    {"M1.I1",
     [](int, int, double t) { return ipow(std::sin(2.0 * pi * t * t), 5); }},
    {"M1.I2",
     [](int i, int j, double t) {
         return ipow(std::sin(2.0 * pi * t * t), 5 + 2 * i * j);
     }},
    {"M3.I1", [](int, int, double t) { return ipow(std::sin(pi * t), 13); }},
    {"M3.I2",
     [](int i, int j, double t) {
         return ipow(std::sin(pi * t), 21 - 2 * i * j);
     }},
    {"M4.B1",
     [](int, int, double t) { return ipow(std::sin(2.0 * pi * t * t), 5); }},
    {"M4.B2",
     [](int, int j, double t) {
         return ipow(std::sin(2.0 * pi * t * t), 3 + 2 * j);
     }},
    {"M4.B3",
     [](int, int j, double t) {
         return ipow(std::sin(2.0 * pi * t * t), 5 + 2 * j);
     }},
    {"M4.I1",
     [](int, int, double t) { return 0.05 * std::fabs(std::sin(4.0 * pi * t)); }},
    {"M4.I2",
     [](int i, int j, double t) {
         return 0.025 * i * j * std::fabs(std::sin(4.0 * pi * t));
     }},
};

const EffectEntry* find_canonical(const std::string& id) {
    for (const EffectEntry& e : canonical)
        if (id == e.id) return &e;
    return nullptr;
}

// "M2.B1" -> "M1.B1" etc.: a family id without its own definition
// falls back to the M1 definition of the same role.
const EffectEntry* resolve(const std::string& id) {
    if (const EffectEntry* e = find_canonical(id)) return e;
    if (id.size() > 3 && id[0] == 'M' && id[2] == '.' &&
        (id[1] == '1' || id[1] == '2' || id[1] == '3' || id[1] == '4'))
        return find_canonical("M1" + id.substr(2));
    return nullptr;
}

} // namespace

std::vector<std::string> effect_catalog() {
    std::vector<std::string> ids;
    for (const EffectEntry& e : canonical) ids.emplace_back(e.id);
    return ids;
}

double effect_function(const std::string& id, int i, int j, double t) {
    const EffectEntry* e = resolve(id);
    if (e == nullptr) {
        std::string msg = "unknown effect id '" + id + "'; catalog:";
        for (const EffectEntry& c : canonical) msg += std::string(" ") + c.id;
        msg += " (M2/M3/M4 fall back to the M1 definition of the same role)";
        throw ConfigError(msg);
    }
    if (i < 1 || j < 1)
        throw ConfigError("effect_function: indices are 1-based");
    return e->fn(i, j, t);
}

void ScenarioSpec::validate() const {
    if (groups < 1) throw ConfigError("scenario: needs at least one group");
    if (treatments < 2) throw ConfigError("scenario: needs at least two treatments");
    if (n_per_group < 2) throw ConfigError("scenario: needs at least two subjects per group");
    if (grid_points < 2) throw ConfigError("scenario: needs at least two grid points");
    if (basis_order < 1 || basis_dim < basis_order)
        throw ConfigError("scenario: basis dimension must be at least the order");
    if (grid_points <= basis_dim)
        throw ConfigError("scenario: needs more grid points than basis dimension");
    if (!(sigma > 0.0)) throw ConfigError("scenario: sigma must be positive");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ConfigError("scenario: alpha must lie in (0, 1)");
    if (replications < 1) throw ConfigError("scenario: needs at least one replication");
    if (subject_sd < 0.0 || subject_mean_max < 0.0)
        throw ConfigError("scenario: subject effect parameters must be nonnegative");
    // Fail early on unknown catalog ids.
    effect_function(treatment_fn, 1, 1, 0.5);
    effect_function(group_fn, 1, 1, 0.5);
    effect_function(interaction_fn, 1, 1, 0.5);
}

RawCurves generate_curves(const ScenarioSpec& spec, Rng& rng) {
    spec.validate();
    RawCurves raw;
    raw.grid.resize(spec.grid_points);
    for (int r = 0; r < spec.grid_points; ++r)
        raw.grid[r] = static_cast<double>(r) / (spec.grid_points - 1);

    raw.values.resize(static_cast<std::size_t>(spec.groups) * spec.n_per_group);
    std::size_t subject = 0;
    for (int j = 1; j <= spec.groups; ++j) {
        for (int k = 0; k < spec.n_per_group; ++k, ++subject) {
            const double mu = rng.uniform(0.0, spec.subject_mean_max);
            const double gamma = rng.normal(mu, spec.subject_sd);
            auto& per_treatment = raw.values[subject];
            per_treatment.resize(static_cast<std::size_t>(spec.treatments));
            for (int i = 1; i <= spec.treatments; ++i) {
                Vector v(spec.grid_points);
                double bm = 0.0;
                for (int r = 0; r < spec.grid_points; ++r) {
                    const double t = raw.grid[r];
                    double value = effect_function(spec.treatment_fn, i, j, t) +
                                   effect_function(spec.group_fn, i, j, t) +
                                   effect_function(spec.interaction_fn, i, j, t) +
                                   gamma * std::sin(pi * t);
                    if (spec.error_model == ErrorModel::IidGaussian) {
                        value += rng.normal(0.0, spec.sigma);
                    } else {
                        if (r > 0)
                            bm += rng.normal(0.0, std::sqrt(t - raw.grid[r - 1]));
                        value += spec.sigma / 20.0 * bm;
                    }
                    v[r] = value;
                }
                per_treatment[static_cast<std::size_t>(i - 1)] = std::move(v);
            }
        }
    }
    return raw;
}

RMDataset generate_dataset(const ScenarioSpec& spec, Rng& rng) {
    const RawCurves raw = generate_curves(spec, rng);
    const BSplineBasis basis(0.0, 1.0, spec.basis_dim, spec.basis_order);
    const CurveFitter fitter(basis, raw.grid);

    RMDataset data;
    data.group_sizes.assign(static_cast<std::size_t>(spec.groups), spec.n_per_group);
    data.coefficients.resize(raw.values.size());
    for (std::size_t k = 0; k < raw.values.size(); ++k) {
        data.coefficients[k].reserve(raw.values[k].size());
        for (const Vector& curve : raw.values[k])
            data.coefficients[k].push_back(fitter.fit(curve));
    }
    return data;
}

StudyResult run_study(const ScenarioSpec& spec,
                      const std::vector<std::string>& methods) {
    const auto start = std::chrono::steady_clock::now();
    spec.validate();
    if (methods.empty()) throw ConfigError("study: no methods requested");

    std::vector<std::string> run_methods;
    for (const std::string& m : methods) {
        if (m != "dmm" && m != "mmm")
            throw ConfigError("study: unknown method '" + m + "' (want dmm or mmm)");
        if (std::find(run_methods.begin(), run_methods.end(), m) == run_methods.end())
            run_methods.push_back(m);
    }

    StudyResult result;
    result.spec = spec;

    const int n_total = spec.groups * spec.n_per_group;
    const int mp = spec.treatments * spec.basis_dim;
    if (std::find(run_methods.begin(), run_methods.end(), "dmm") != run_methods.end() &&
        n_total <= mp) {
        result.notes.push_back("dmm skipped: needs n > m*p (n = " +
                               std::to_string(n_total) + ", m*p = " +
                               std::to_string(mp) + ")");
        run_methods.erase(std::remove(run_methods.begin(), run_methods.end(), "dmm"),
                          run_methods.end());
    }
    if (run_methods.empty())
        throw ConfigError("study: no feasible method for this scenario");

    std::vector<Hypothesis> hypotheses;
    hypotheses.push_back(Hypothesis::Interaction);
    hypotheses.push_back(Hypothesis::Treatment);
    hypotheses.push_back(Hypothesis::Group);
    if (spec.groups < 2) {
        hypotheses = {Hypothesis::Treatment};
        result.notes.push_back(
            "single group: interaction and group hypotheses skipped");
    }

    std::vector<ContrastPair> contrasts;
    contrasts.reserve(hypotheses.size());
    for (Hypothesis h : hypotheses)
        contrasts.push_back(contrast_for(h, spec.groups, spec.treatments));

    // accept[method][hypothesis]
    std::vector<std::vector<int>> accept(
        run_methods.size(), std::vector<int>(hypotheses.size(), 0));

    for (int rep = 0; rep < spec.replications; ++rep) {
        Rng rng = Rng::substream(spec.seed, static_cast<std::uint64_t>(rep) + 1);
        const RMDataset data = generate_dataset(spec, rng);
        const Matrix x = build_design_matrix(data);
        const WideResponse wide = assemble_wide(data);
        StackedResponse stacked;
        if (std::find(run_methods.begin(), run_methods.end(), "mmm") !=
            run_methods.end())
            stacked = rearrange(wide);

        for (std::size_t mi = 0; mi < run_methods.size(); ++mi) {
            for (std::size_t hi = 0; hi < hypotheses.size(); ++hi) {
                const SSCPPair sscp = run_methods[mi] == "dmm"
                                          ? dmm_sscp(wide, x, contrasts[hi])
                                          : mmm_sscp(stacked, x, contrasts[hi]);
                const auto stats = manova_statistics(sscp);
                double p = 1.0;
                for (const StatisticValue& sv : stats)
                    if (sv.kind == spec.statistic) p = sv.p_value;
                if (p >= spec.alpha) ++accept[mi][hi];
            }
        }
    }

    for (std::size_t mi = 0; mi < run_methods.size(); ++mi)
        for (std::size_t hi = 0; hi < hypotheses.size(); ++hi) {
            StudyCell cell;
            cell.method = run_methods[mi];
            cell.hypothesis = hypotheses[hi];
            cell.replications = spec.replications;
            cell.acceptance =
                static_cast<double>(accept[mi][hi]) / spec.replications;
            result.cells.push_back(cell);
        }

    result.seconds = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
    return result;
}

} // namespace fanova
