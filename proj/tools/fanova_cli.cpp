#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fanova/dataset_io.hpp"
#include "fanova/dmm.hpp"
#include "fanova/errors.hpp"
#include "fanova/mmm.hpp"
#include "fanova/permutation.hpp"
#include "fanova/report.hpp"
#include "fanova/rng.hpp"
#include "fanova/simulation.hpp"

namespace {

using namespace fanova;

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> out;
    std::string token;
    std::istringstream in(text);
    while (std::getline(in, token, ',')) {
        try {
            std::size_t pos = 0;
            const int v = std::stoi(token, &pos);
            if (pos != token.size()) throw std::invalid_argument(token);
            out.push_back(v);
        } catch (const std::exception&) {
            throw CLI::ValidationError(std::string(what) + ": cannot parse '" +
                                       token + "' as an integer");
        }
    }
    if (out.empty())
        throw CLI::ValidationError(std::string(what) + ": empty list");
    return out;
}

StatisticKind statistic_from_token(const std::string& token) {
    if (token == "wilks") return StatisticKind::Wilks;
    if (token == "lh" || token == "lawley-hotelling")
        return StatisticKind::LawleyHotelling;
    if (token == "pillai") return StatisticKind::Pillai;
    if (token == "roy") return StatisticKind::Roy;
    throw CLI::ValidationError("unknown statistic '" + token + "'");
}

struct TestArgs {
    std::string data_file;
    int basis_dim = 0;
    std::string gcv;
    int basis_order = 4;
    std::string method = "auto";
    std::string hypothesis = "all";
    std::string adjust = "auto";
    std::string stat = "pillai";
    std::string perm_engine = "mmm";
    int perm_f = 999;
    bool add_one = false;
    std::uint64_t seed = 0;
    double alpha = 0.05;
    std::string out;
    std::string export_curves;
};

double headline_p(const TestReport& r) {
    for (const StatisticValue& sv : r.statistics)
        if (sv.kind == StatisticKind::Wilks) return sv.p_value;
    return r.statistics.front().p_value;
}

int run_test(const TestArgs& args) {
    IngestOptions options;
    options.basis_dim = args.basis_dim;
    options.basis_order = args.basis_order;
    if (!args.gcv.empty())
        options.gcv_candidates = parse_int_list(args.gcv, "--gcv");
    if (options.basis_dim < 1 && options.gcv_candidates.empty())
        throw CLI::ValidationError("pass --basis-dim or --gcv");

    const IngestResult ingest = ingest_curves_file(args.data_file, options);
    const RMDataset& data = ingest.dataset;
    std::cout << "dataset: n=" << data.n() << " subjects, g=" << data.groups()
              << " group(s), m=" << data.treatments() << " treatments\n"
              << "basis: dimension " << ingest.basis_dim << ", order "
              << ingest.basis_order << ", domain [" << format_number(ingest.domain_min)
              << ", " << format_number(ingest.domain_max) << "]"
              << (ingest.gcv_used ? " (selected by GCV)" : "") << "\n\n";

    if (!args.export_curves.empty()) {
        std::ofstream out(args.export_curves);
        if (!out) throw ParseError("cannot open '" + args.export_curves + "'");
        write_curves_csv(out, ingest);
    }

    std::vector<Hypothesis> hypotheses;
    if (args.hypothesis == "all") {
        if (data.groups() > 1)
            hypotheses = {Hypothesis::Interaction, Hypothesis::Treatment,
                          Hypothesis::Group};
        else {
            hypotheses = {Hypothesis::Treatment};
            std::cout << "note: single group, interaction and group hypotheses"
                         " skipped\n\n";
        }
    } else if (args.hypothesis == "interaction") {
        hypotheses = {Hypothesis::Interaction};
    } else if (args.hypothesis == "treatment") {
        hypotheses = {Hypothesis::Treatment};
    } else if (args.hypothesis == "group") {
        hypotheses = {Hypothesis::Group};
    } else {
        throw CLI::ValidationError("unknown hypothesis '" + args.hypothesis + "'");
    }

    Adjust adjust = Adjust::Auto;
    if (args.adjust == "none") adjust = Adjust::None;
    else if (args.adjust == "always") adjust = Adjust::Always;
    else if (args.adjust != "auto")
        throw CLI::ValidationError("unknown adjust mode '" + args.adjust + "'");

    PermutationConfig perm;
    perm.replicates = args.perm_f;
    perm.seed = args.seed;
    perm.statistic = statistic_from_token(args.stat);
    perm.engine = args.perm_engine == "dmm" ? Engine::DMM : Engine::MMM;
    perm.add_one = args.add_one;

    std::vector<TestReport> reports;
    const int n = data.n();
    const int mp = data.treatments() * data.p();
    for (Hypothesis h : hypotheses) {
        if (args.method == "auto") {
            if (n > mp)
                reports.push_back(dmm_test(data, h));
            else
                std::cout << "note: DMM skipped for "
                          << hypothesis_name(h) << " (needs n > m*p; n = " << n
                          << ", m*p = " << mp << ")\n\n";
            reports.push_back(mmm_test(data, h, adjust));
            reports.push_back(permutation_test(data, h, perm));
        } else if (args.method == "dmm") {
            reports.push_back(dmm_test(data, h));
        } else if (args.method == "mmm") {
            reports.push_back(mmm_test(data, h, adjust));
        } else if (args.method == "perm") {
            reports.push_back(permutation_test(data, h, perm));
        } else {
            throw CLI::ValidationError("unknown method '" + args.method + "'");
        }
    }

    for (const TestReport& r : reports) {
        std::cout << render_report(r);
        const double p = headline_p(r);
        std::cout << "decision at alpha = " << format_number(args.alpha) << ": "
                  << (p < args.alpha ? "reject" : "accept") << " ("
                  << statistic_name(r.statistics.size() == 1
                                        ? r.statistics.front().kind
                                        : StatisticKind::Wilks)
                  << " p = " << format_pvalue(p) << ")\n\n";
    }

    if (!args.out.empty()) {
        std::ofstream out(args.out);
        if (!out) throw ParseError("cannot open '" + args.out + "'");
        out << report_json(reports);
    }
    return 0;
}

struct GenerateArgs {
    std::string out;
    std::string treatment_fn = "M1.A1";
    std::string group_fn = "M1.B1";
    std::string interaction_fn = "M1.I1";
    std::string error = "iid";
    double sigma = 0.10;
    int n = 50;
    int groups = 2;
    int treatments = 3;
    int grid_points = 101;
    std::vector<double> domain{0.0, 1.0};
    std::uint64_t seed = 0;
};

int run_generate(const GenerateArgs& args) {
    ScenarioSpec spec;
    spec.treatment_fn = args.treatment_fn;
    spec.group_fn = args.group_fn;
    spec.interaction_fn = args.interaction_fn;
    if (args.error == "iid" || args.error == "iid_gaussian")
        spec.error_model = ErrorModel::IidGaussian;
    else if (args.error == "brownian" || args.error == "scaled_brownian")
        spec.error_model = ErrorModel::ScaledBrownian;
    else
        throw CLI::ValidationError("unknown error model '" + args.error + "'");
    spec.sigma = args.sigma;
    spec.n_per_group = args.n;
    spec.groups = args.groups;
    spec.treatments = args.treatments;
    spec.grid_points = args.grid_points;
    spec.seed = args.seed;

    Rng rng(args.seed);
    const RawCurves raw = generate_curves(spec, rng);
    std::ofstream out(args.out);
    if (!out) throw ParseError("cannot open '" + args.out + "'");
    write_raw_curves_csv(out, raw, spec, args.domain[0], args.domain[1]);
    std::cout << "wrote " << args.out << ": " << spec.groups * spec.n_per_group
              << " subjects x " << spec.treatments << " treatments x "
              << spec.grid_points << " points\n";
    return 0;
}

int run_simulate(const std::string& config_path, const std::string& out_path) {
    const SimulationConfig config = parse_simulation_config_file(config_path);
    const std::string csv = study_csv(config);
    if (out_path.empty()) {
        std::cout << csv;
    } else {
        std::ofstream out(out_path);
        if (!out) throw ParseError("cannot open '" + out_path + "'");
        out << csv;
        std::cout << "wrote " << out_path << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-way functional ANOVA with repeated measures"};
    app.require_subcommand(1);

    TestArgs test_args;
    CLI::App* test = app.add_subcommand(
        "test", "test functional hypotheses on a curve dataset");
    test->add_option("data", test_args.data_file,
                     "curve file (subject,group,treatment,t,value)")
        ->required();
    test->add_option("--basis-dim", test_args.basis_dim, "basis dimension");
    test->add_option("--gcv", test_args.gcv,
                     "comma-separated candidate dimensions, chosen by GCV");
    test->add_option("--basis-order", test_args.basis_order,
                     "spline order (degree + 1)")->capture_default_str();
    test->add_option("--method", test_args.method, "auto|dmm|mmm|perm")->capture_default_str();
    test->add_option("--hypothesis", test_args.hypothesis,
                     "all|interaction|treatment|group")->capture_default_str();
    test->add_option("--adjust", test_args.adjust,
                     "sphericity adjustment: auto|none|always")->capture_default_str();
    test->add_option("--stat", test_args.stat,
                     "permutation statistic: pillai|wilks|lh|roy")->capture_default_str();
    test->add_option("--perm-engine", test_args.perm_engine,
                     "permutation engine: mmm|dmm")->capture_default_str();
    test->add_option("--perm-f", test_args.perm_f, "permutation count")->capture_default_str();
    test->add_flag("--add-one-correction", test_args.add_one,
                   "use (1+count)/(1+F) for the permutation p-value");
    test->add_option("--seed", test_args.seed, "random seed")->capture_default_str();
    test->add_option("--alpha", test_args.alpha, "decision level")->capture_default_str();
    test->add_option("--out", test_args.out, "write JSON report records here");
    test->add_option("--export-curves", test_args.export_curves,
                     "re-export the parsed curves to this file");

    GenerateArgs gen_args;
    CLI::App* gen = app.add_subcommand(
        "generate", "write a synthetic curve dataset");
    gen->add_option("--out", gen_args.out, "output curve file")->required();
    gen->add_option("--treatment-fn", gen_args.treatment_fn, "effect id")->capture_default_str();
    gen->add_option("--group-fn", gen_args.group_fn, "effect id")->capture_default_str();
    gen->add_option("--interaction-fn", gen_args.interaction_fn, "effect id")->capture_default_str();
    gen->add_option("--error", gen_args.error, "iid|brownian")->capture_default_str();
    gen->add_option("--sigma", gen_args.sigma, "noise level")->capture_default_str();
    gen->add_option("--n", gen_args.n, "subjects per group")->capture_default_str();
    gen->add_option("--groups", gen_args.groups, "group count")->capture_default_str();
    gen->add_option("--treatments", gen_args.treatments, "treatment count")->capture_default_str();
    gen->add_option("--grid-points", gen_args.grid_points, "points per curve")->capture_default_str();
    gen->add_option("--domain", gen_args.domain, "time domain: min max")->capture_default_str()
        ->expected(2);
    gen->add_option("--seed", gen_args.seed, "random seed")->capture_default_str();

    std::string sim_config, sim_out;
    CLI::App* sim = app.add_subcommand(
        "simulate", "run a simulation study from a config file");
    sim->add_option("config", sim_config, "study configuration file")->required();
    sim->add_option("--out", sim_out, "write the result CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e); // --help
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (test->parsed()) return run_test(test_args);
        if (gen->parsed()) return run_generate(gen_args);
        if (sim->parsed()) return run_simulate(sim_config, sim_out);
        std::cerr << "error: no subcommand\n";
        return 1;
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DatasetError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const HypothesisError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DimensionError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const SingularFitError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const SingularMatrixError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NotEstimableError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
