#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fanova/dataset_io.hpp"
#include "fanova/errors.hpp"
#include "fanova/rng.hpp"
#include "fanova/simulation.hpp"

using fanova::effect_function;
using fanova::ErrorModel;
using fanova::Hypothesis;
using fanova::Rng;
using fanova::ScenarioSpec;

TEST_CASE("effect catalog values at hand-computed points") {
    constexpr double pi = std::numbers::pi;
    // alpha_i(t) families.
    CHECK(effect_function("M1.A1", 1, 1, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(effect_function("M1.A1", 3, 2, 0.5) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(effect_function("M1.A2", 5, 1, 0.5) ==
          doctest::Approx(std::pow(0.5, 1.0) * std::pow(0.5, 5.0)).epsilon(1e-12));
    CHECK(effect_function("M1.A3", 2, 1, 0.5) ==
          doctest::Approx(0.25 * 0.0625).epsilon(1e-12));
    // beta_j(t) families.
    CHECK(effect_function("M1.B1", 1, 2, 0.125) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(effect_function("M1.B2", 1, 2, 0.125) == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(effect_function("M1.B3", 1, 2, 0.125) == doctest::Approx(0.05).epsilon(1e-12));
    CHECK(effect_function("M1.B1", 1, 1, 0.25) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    // theta_ij(t) families.
    CHECK(effect_function("M1.I1", 1, 1, 0.5) ==
          doctest::Approx(std::pow(std::sin(pi / 2.0), 5.0)).epsilon(1e-12));
    CHECK(effect_function("M1.I2", 1, 1, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(effect_function("M1.I2", 2, 3, 0.5) ==
          doctest::Approx(std::pow(std::sin(pi / 2.0), 17.0)).epsilon(1e-12));
    CHECK(effect_function("M3.I1", 1, 1, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(effect_function("M3.I2", 3, 2, 0.5) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(effect_function("M4.B2", 1, 2, 0.5) ==
          doctest::Approx(std::pow(std::sin(pi / 2.0), 7.0)).epsilon(1e-12));
    CHECK(effect_function("M4.I2", 2, 2, 0.125) ==
          doctest::Approx(0.025 * 4.0 * 1.0).epsilon(1e-12));
}

TEST_CASE("families without their own definition alias the first") {
    for (double t : {0.1, 0.45, 0.8}) {
        CHECK(effect_function("M2.A1", 2, 1, t) == effect_function("M1.A1", 2, 1, t));
        CHECK(effect_function("M2.B2", 1, 2, t) == effect_function("M1.B2", 1, 2, t));
        CHECK(effect_function("M3.A1", 1, 1, t) == effect_function("M1.A1", 1, 1, t));
        CHECK(effect_function("M4.A2", 3, 1, t) == effect_function("M1.A2", 3, 1, t));
    }
}

TEST_CASE("unknown effect ids name the catalog") {
    CHECK_THROWS_AS(effect_function("M1.X9", 1, 1, 0.5), fanova::ConfigError);
    CHECK_THROWS_AS(effect_function("", 1, 1, 0.5), fanova::ConfigError);
    try {
        effect_function("bogus", 1, 1, 0.5);
        FAIL("expected a throw");
    } catch (const fanova::ConfigError& e) {
        CHECK(std::string(e.what()).find("M1.A1") != std::string::npos);
    }
    CHECK_FALSE(fanova::effect_catalog().empty());
}

TEST_CASE("scenario validation") {
    ScenarioSpec spec;
    CHECK_NOTHROW(spec.validate());
    ScenarioSpec bad = spec;
    bad.treatments = 1;
    CHECK_THROWS_AS(bad.validate(), fanova::ConfigError);
    bad = spec;
    bad.n_per_group = 1;
    CHECK_THROWS_AS(bad.validate(), fanova::ConfigError);
    bad = spec;
    bad.grid_points = 14;
    CHECK_THROWS_AS(bad.validate(), fanova::ConfigError);
    bad = spec;
    bad.sigma = -0.1;
    CHECK_THROWS_AS(bad.validate(), fanova::ConfigError);
    bad = spec;
    bad.treatment_fn = "nope";
    CHECK_THROWS_AS(bad.validate(), fanova::ConfigError);
    bad = spec;
    bad.replications = 0;
    CHECK_THROWS_AS(bad.validate(), fanova::ConfigError);
}

TEST_CASE("generated curves have the documented shape and grid") {
    ScenarioSpec spec;
    spec.n_per_group = 4;
    spec.groups = 2;
    spec.treatments = 3;
    spec.grid_points = 21;
    Rng rng(5);
    auto raw = fanova::generate_curves(spec, rng);
    REQUIRE(raw.grid.size() == 21);
    CHECK(raw.grid[0] == 0.0);
    CHECK(raw.grid[20] == 1.0);
    CHECK(raw.grid[1] == doctest::Approx(0.05).epsilon(1e-15));
    REQUIRE(raw.values.size() == 8);
    REQUIRE(raw.values[0].size() == 3);
    REQUIRE(raw.values[0][0].size() == 21);
}

TEST_CASE("curve generation is seed-deterministic") {
    ScenarioSpec spec;
    spec.n_per_group = 3;
    spec.grid_points = 31;
    Rng r1(99), r2(99), r3(100);
    auto a = fanova::generate_curves(spec, r1);
    auto b = fanova::generate_curves(spec, r2);
    auto c = fanova::generate_curves(spec, r3);
    CHECK((a.values[0][0].array() == b.values[0][0].array()).all());
    CHECK((a.values[0][0].array() != c.values[0][0].array()).any());
}

TEST_CASE("brownian errors start at zero so t=0 is exact under null effects") {
    ScenarioSpec spec;
    spec.treatment_fn = "M1.A1";
    spec.group_fn = "M1.B1";
    spec.interaction_fn = "M1.I1";
    spec.error_model = ErrorModel::ScaledBrownian;
    spec.n_per_group = 3;
    spec.grid_points = 11;
    spec.basis_dim = 6;
    Rng rng(8);
    auto raw = fanova::generate_curves(spec, rng);
    // All three effect functions vanish at t = 0 and the subject
    // amplitude multiplies sin(pi t) which is 0 there; Brownian motion
    // starts at 0, so the observed value at t = 0 is exactly 0.
    for (const auto& subj : raw.values) {
        for (const auto& curve : subj) {
            CHECK(curve[0] == 0.0);
        }
    }
}

TEST_CASE("iid errors perturb every grid point") {
    ScenarioSpec spec;
    spec.error_model = ErrorModel::IidGaussian;
    spec.n_per_group = 2;
    spec.grid_points = 11;
    spec.basis_dim = 6;
    Rng rng(9);
    auto raw = fanova::generate_curves(spec, rng);
    int zeros = 0;
    for (const auto& subj : raw.values)
        for (const auto& curve : subj)
            for (int r = 0; r < curve.size(); ++r)
                if (curve[r] == 0.0) ++zeros;
    CHECK(zeros == 0);
}

TEST_CASE("generated datasets carry the scenario layout") {
    ScenarioSpec spec;
    spec.n_per_group = 5;
    spec.groups = 2;
    spec.treatments = 3;
    spec.grid_points = 41;
    spec.basis_dim = 6;
    Rng rng(12);
    auto data = fanova::generate_dataset(spec, rng);
    CHECK_NOTHROW(data.validate());
    CHECK(data.n() == 10);
    CHECK(data.groups() == 2);
    CHECK(data.treatments() == 3);
    CHECK(data.p() == 6);
}

TEST_CASE("low noise keeps the fitted curves close to the signal") {
    ScenarioSpec spec;
    // Every slot gets the quadratic t(1-t), which cubic splines
    // reproduce exactly; the fit error is then pure noise residual.
    spec.treatment_fn = "M1.A1";
    spec.group_fn = "M1.A1";
    spec.interaction_fn = "M1.A1";
    spec.sigma = 0.01;
    spec.n_per_group = 2;
    spec.groups = 2;
    spec.treatments = 2;
    spec.grid_points = 51;
    spec.basis_dim = 10;
    spec.subject_sd = 0.0;
    spec.subject_mean_max = 0.0;
    Rng rng(13);
    auto raw = fanova::generate_curves(spec, rng);
    auto rng2 = Rng(13);
    auto data = fanova::generate_dataset(spec, rng2);

    fanova::BSplineBasis basis(0.0, 1.0, 10, 4);
    auto e = basis.evaluation_matrix(raw.grid);
    for (int k = 0; k < 4; ++k) {
        for (int i = 0; i < 2; ++i) {
            fanova::Vector fit = e * data.coefficients[static_cast<std::size_t>(k)]
                                                      [static_cast<std::size_t>(i)];
            const double err =
                (fit - raw.values[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)])
                    .cwiseAbs()
                    .maxCoeff();
            CHECK(err < 0.05);
        }
    }
}

TEST_CASE("study runs both methods and all hypotheses when feasible") {
    ScenarioSpec spec;
    spec.n_per_group = 8; // n = 16 > m*p = 2*5 = 10
    spec.groups = 2;
    spec.treatments = 2;
    spec.grid_points = 21;
    spec.basis_dim = 5;
    spec.replications = 4;
    spec.seed = 77;
    auto result = fanova::run_study(spec, {"dmm", "mmm"});
    REQUIRE(result.cells.size() == 6);
    for (const auto& cell : result.cells) {
        CHECK(cell.replications == 4);
        CHECK(cell.acceptance >= 0.0);
        CHECK(cell.acceptance <= 1.0);
    }
    CHECK(result.cells[0].method == "dmm");
    CHECK(result.cells[3].method == "mmm");
    CHECK(result.cells[0].hypothesis == Hypothesis::Interaction);
    CHECK(result.cells[1].hypothesis == Hypothesis::Treatment);
    CHECK(result.cells[2].hypothesis == Hypothesis::Group);
    CHECK(result.seconds >= 0.0);

    // Determinism: rerunning reproduces the acceptances exactly.
    auto again = fanova::run_study(spec, {"dmm", "mmm"});
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(again.cells[i].acceptance == result.cells[i].acceptance);
    }
}

TEST_CASE("study skips the wide method when subjects are scarce") {
    ScenarioSpec spec;
    // n = 8 <= m*p = 8 rules DMM out, while q(n - g) = 6 = p + 2 keeps
    // every MMM statistic's approximation df positive.
    spec.n_per_group = 4;
    spec.groups = 2;
    spec.treatments = 2;
    spec.grid_points = 21;
    spec.basis_dim = 4;
    spec.replications = 2;
    auto result = fanova::run_study(spec, {"dmm", "mmm"});
    REQUIRE(result.cells.size() == 3);
    for (const auto& cell : result.cells) CHECK(cell.method == "mmm");
    bool noted = false;
    for (const auto& n : result.notes)
        if (n.find("needs n > m*p") != std::string::npos) noted = true;
    CHECK(noted);
}

TEST_CASE("single-group studies only test treatments") {
    ScenarioSpec spec;
    spec.groups = 1;
    spec.n_per_group = 12;
    spec.treatments = 2;
    spec.grid_points = 21;
    spec.basis_dim = 5;
    spec.replications = 2;
    auto result = fanova::run_study(spec, {"dmm", "mmm"});
    REQUIRE(result.cells.size() == 2);
    for (const auto& cell : result.cells) {
        CHECK(cell.hypothesis == Hypothesis::Treatment);
    }
    CHECK_FALSE(result.notes.empty());
}

TEST_CASE("unknown study methods are rejected") {
    ScenarioSpec spec;
    spec.replications = 1;
    CHECK_THROWS_AS(fanova::run_study(spec, {"anova"}), fanova::ConfigError);
    CHECK_THROWS_AS(fanova::run_study(spec, {}), fanova::ConfigError);
}

TEST_CASE("strong effects drive acceptance to zero, null effects keep it high") {
    ScenarioSpec spec;
    spec.treatment_fn = "M1.A3"; // large alpha for small i
    spec.group_fn = "M1.B1";
    spec.interaction_fn = "M1.I1";
    spec.sigma = 0.02;
    spec.n_per_group = 10;
    spec.groups = 2;
    spec.treatments = 2;
    spec.grid_points = 31;
    spec.basis_dim = 5;
    spec.replications = 10;
    spec.seed = 3;
    auto result = fanova::run_study(spec, {"mmm"});
    double treat_acc = -1.0, group_acc = -1.0;
    for (const auto& cell : result.cells) {
        if (cell.hypothesis == Hypothesis::Treatment) treat_acc = cell.acceptance;
        if (cell.hypothesis == Hypothesis::Group) group_acc = cell.acceptance;
    }
    // Treatment separation under A3 is enormous at sigma = 0.02.
    CHECK(treat_acc == 0.0);
    // The tiny group effect B1 is mostly invisible at this sample size.
    CHECK(group_acc >= 0.0);
}

TEST_CASE("config parsing covers keys, lists and comments") {
    std::istringstream in(
        "# study layout\n"
        "treatment = M1.A1, M1.A2\n"
        "group = M1.B1\n"
        "interaction = M1.I1, M1.I2\n"
        "sigma = 0.05, 0.1, 0.2\n"
        "n = 10, 20\n"
        "error = brownian\n"
        "methods = dmm\n"
        "hypotheses = interaction\n"
        "statistic = pillai\n"
        "groups = 2\n"
        "treatments = 3\n"
        "grid_points = 41\n"
        "basis_dim = 6\n"
        "replications = 3\n"
        "alpha = 0.1\n"
        "seed = 12345\n");
    auto config = fanova::parse_simulation_config(in);
    CHECK(config.treatment_fns == std::vector<std::string>{"M1.A1", "M1.A2"});
    CHECK(config.interaction_fns == std::vector<std::string>{"M1.I1", "M1.I2"});
    CHECK(config.sigmas == std::vector<double>{0.05, 0.1, 0.2});
    CHECK(config.ns == std::vector<int>{10, 20});
    CHECK(config.error_model == ErrorModel::ScaledBrownian);
    CHECK(config.methods == std::vector<std::string>{"dmm"});
    REQUIRE(config.hypotheses.size() == 1);
    CHECK(config.hypotheses[0] == Hypothesis::Interaction);
    CHECK(config.statistic == fanova::StatisticKind::Pillai);
    CHECK(config.groups == 2);
    CHECK(config.grid_points == 41);
    CHECK(config.basis_dim == 6);
    CHECK(config.replications == 3);
    CHECK(config.alpha == 0.1);
    CHECK(config.seed == 12345);
}

TEST_CASE("config parsing rejects malformed lines with their numbers") {
    std::istringstream bad1("treatment = M1.A1\nwhatsthis = 3\n");
    CHECK_THROWS_AS(fanova::parse_simulation_config(bad1), fanova::ParseError);
    std::istringstream bad2("n = ten\n");
    CHECK_THROWS_AS(fanova::parse_simulation_config(bad2), fanova::ParseError);
    std::istringstream bad3("error = pink\n");
    CHECK_THROWS_AS(fanova::parse_simulation_config(bad3), fanova::ParseError);
    std::istringstream bad4("groups = 2, 3\n");
    CHECK_THROWS_AS(fanova::parse_simulation_config(bad4), fanova::ParseError);
    std::istringstream bad5("nonsense without equals\n");
    CHECK_THROWS_AS(fanova::parse_simulation_config(bad5), fanova::ParseError);
    try {
        std::istringstream again("treatment = M1.A1\nwhatsthis = 3\n");
        fanova::parse_simulation_config(again);
        FAIL("expected a throw");
    } catch (const fanova::ParseError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE("grid expansion covers the product with stable per-cell seeds") {
    fanova::SimulationConfig config;
    config.treatment_fns = {"M1.A1", "M1.A2"};
    config.group_fns = {"M1.B1"};
    config.interaction_fns = {"M1.I1", "M1.I2"};
    config.ns = {8, 12};
    config.sigmas = {0.1, 0.2, 0.3};
    config.seed = 55;
    auto cells = fanova::expand_grid(config);
    REQUIRE(cells.size() == 2 * 1 * 2 * 2 * 3);
    // Seeds are distinct and reproducible.
    auto cells2 = fanova::expand_grid(config);
    for (std::size_t i = 0; i < cells.size(); ++i) {
        CHECK(cells[i].seed == cells2[i].seed);
        for (std::size_t j = i + 1; j < cells.size(); ++j) {
            CHECK(cells[i].seed != cells[j].seed);
        }
    }
    CHECK(cells[0].treatment_fn == "M1.A1");
    CHECK(cells.back().treatment_fn == "M1.A2");
    CHECK(cells.back().sigma == 0.3);
}

TEST_CASE("study csv emits one row per cell, method and hypothesis") {
    fanova::SimulationConfig config;
    config.treatment_fns = {"M1.A1", "M1.A2", "M1.A3"};
    config.group_fns = {"M1.B1", "M1.B2", "M1.B3"};
    config.interaction_fns = {"M1.I1", "M1.I2"};
    config.ns = {4, 5};
    config.sigmas = {0.05, 0.1, 0.2};
    config.methods = {"mmm"};
    config.hypotheses = {Hypothesis::Treatment};
    config.groups = 2;
    config.treatments = 2;
    config.grid_points = 21;
    config.basis_dim = 5;
    config.replications = 2;
    config.seed = 9;

    const std::string csv = fanova::study_csv(config);
    std::istringstream lines(csv);
    std::string line;
    int rows = 0;
    bool header_ok = false;
    while (std::getline(lines, line)) {
        if (rows == 0) {
            header_ok = (line ==
                         "scenario,n,sigma,method,hypothesis,acceptance,replications,seed");
        }
        ++rows;
    }
    CHECK(header_ok);
    // 3 * 3 * 2 * 2 * 3 = 108 scenario cells, one method and one
    // hypothesis each, plus the header line.
    CHECK(rows == 109);

    // Byte-identical on repeat.
    CHECK(fanova::study_csv(config) == csv);
}
