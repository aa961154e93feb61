#include "fanova/dataset_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "fanova/errors.hpp"
#include "fanova/report.hpp"
#include "fanova/rng.hpp"

namespace fanova {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

std::vector<std::string> split(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::string current;
    for (char c : line) {
        if (c == delim) {
            fields.push_back(current);
            current.clear();
        } else {
            current.push_back(c);
        }
    }
    fields.push_back(current);
    return fields;
}

bool parse_double_strict(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    char* end = nullptr;
    out = std::strtod(t.c_str(), &end);
    return end == t.c_str() + t.size();
}

double require_double(const std::string& s, int line_no, const char* what) {
    double v;
    if (!parse_double_strict(s, v))
        throw ParseError("line " + std::to_string(line_no) + ": cannot parse " +
                         what + " '" + trim(s) + "'");
    return v;
}

// Labels sort numerically when every one parses as a number, else
// lexicographically. Either way the order is deterministic.
void sort_labels(std::vector<std::string>& labels) {
    std::vector<double> numeric(labels.size());
    bool all_numeric = true;
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (!parse_double_strict(labels[i], numeric[i])) {
            all_numeric = false;
            break;
        }
    if (all_numeric) {
        std::vector<std::size_t> idx(labels.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return numeric[a] != numeric[b] ? numeric[a] < numeric[b]
                                            : labels[a] < labels[b];
        });
        std::vector<std::string> sorted;
        sorted.reserve(labels.size());
        for (std::size_t i : idx) sorted.push_back(labels[i]);
        labels = std::move(sorted);
    } else {
        std::sort(labels.begin(), labels.end());
    }
}

std::string g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct Observation {
    double t;
    double value;
    int line;
};

} // namespace

IngestResult ingest_curves(std::istream& in, const IngestOptions& options) {
    std::string line;
    if (!std::getline(in, line))
        throw ParseError("line 1: empty input, expected header "
                         "subject,group,treatment,t,value");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const char delim = line.find('\t') != std::string::npos ? '\t' : ',';
    {
        const auto header = split(line, delim);
        const char* expected[] = {"subject", "group", "treatment", "t", "value"};
        bool ok = header.size() == 5;
        for (std::size_t i = 0; ok && i < 5; ++i)
            ok = lower(trim(header[i])) == expected[i];
        if (!ok)
            throw ParseError("line 1: header must be subject,group,treatment,t,value"
                             " (comma or tab separated), got '" + line + "'");
    }

    std::map<std::string, std::string> subject_group;
    std::map<std::string, int> subject_first_line;
    std::vector<std::string> treatment_labels;
    std::map<std::pair<std::string, std::string>, std::vector<Observation>> rows;

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split(line, delim);
        if (fields.size() != 5)
            throw ParseError("line " + std::to_string(line_no) + ": expected 5 fields, got " +
                             std::to_string(fields.size()));
        const std::string subject = trim(fields[0]);
        const std::string group = trim(fields[1]);
        const std::string treatment = trim(fields[2]);
        if (subject.empty() || group.empty() || treatment.empty())
            throw ParseError("line " + std::to_string(line_no) +
                             ": empty subject, group or treatment label");
        const double t = require_double(fields[3], line_no, "time point");
        const double value = require_double(fields[4], line_no, "value");

        const auto [it, inserted] = subject_group.emplace(subject, group);
        if (inserted) {
            subject_first_line[subject] = line_no;
        } else if (it->second != group) {
            throw DatasetError("subject '" + subject + "' appears under group '" +
                               it->second + "' (line " +
                               std::to_string(subject_first_line[subject]) +
                               ") and group '" + group + "' (line " +
                               std::to_string(line_no) + ")");
        }
        if (std::find(treatment_labels.begin(), treatment_labels.end(), treatment) ==
            treatment_labels.end())
            treatment_labels.push_back(treatment);
        rows[{subject, treatment}].push_back({t, value, line_no});
    }
    if (subject_group.empty()) throw ParseError("no data rows");

    sort_labels(treatment_labels);

    std::vector<std::string> group_labels;
    for (const auto& [subject, group] : subject_group)
        if (std::find(group_labels.begin(), group_labels.end(), group) ==
            group_labels.end())
            group_labels.push_back(group);
    sort_labels(group_labels);

    // Subjects ordered group-major, deterministic within group.
    std::vector<std::string> subject_labels;
    std::vector<int> group_sizes;
    for (const std::string& g : group_labels) {
        std::vector<std::string> members;
        for (const auto& [subject, group] : subject_group)
            if (group == g) members.push_back(subject);
        sort_labels(members);
        group_sizes.push_back(static_cast<int>(members.size()));
        subject_labels.insert(subject_labels.end(), members.begin(), members.end());
    }

    // Balance: every subject under every treatment.
    {
        std::string offenders;
        for (const std::string& s : subject_labels)
            for (const std::string& tr : treatment_labels)
                if (rows.find({s, tr}) == rows.end())
                    offenders += (offenders.empty() ? "" : "; ") + std::string("subject '") +
                                 s + "' has no observations under treatment '" + tr + "'";
        if (!offenders.empty())
            throw DatasetError("unbalanced dataset: " + offenders);
    }

    IngestResult result;
    result.group_labels = group_labels;
    result.subject_labels = subject_labels;
    result.treatment_labels = treatment_labels;
    result.basis_order = options.basis_order;

    double t_min = 0.0, t_max = 0.0;
    bool first = true;
    result.curves.resize(subject_labels.size());
    for (std::size_t k = 0; k < subject_labels.size(); ++k) {
        result.curves[k].resize(treatment_labels.size());
        for (std::size_t i = 0; i < treatment_labels.size(); ++i) {
            auto& obs = rows[{subject_labels[k], treatment_labels[i]}];
            std::sort(obs.begin(), obs.end(),
                      [](const Observation& a, const Observation& b) { return a.t < b.t; });
            for (std::size_t r = 1; r < obs.size(); ++r)
                if (!(obs[r - 1].t < obs[r].t))
                    throw DatasetError("subject '" + subject_labels[k] + "', treatment '" +
                                       treatment_labels[i] + "': duplicate time point " +
                                       g17(obs[r].t) + " (lines " +
                                       std::to_string(obs[r - 1].line) + ", " +
                                       std::to_string(obs[r].line) + ")");
            SampledCurve curve;
            curve.grid.resize(static_cast<Eigen::Index>(obs.size()));
            curve.values.resize(static_cast<Eigen::Index>(obs.size()));
            for (std::size_t r = 0; r < obs.size(); ++r) {
                curve.grid[static_cast<Eigen::Index>(r)] = obs[r].t;
                curve.values[static_cast<Eigen::Index>(r)] = obs[r].value;
                if (first || obs[r].t < t_min) t_min = obs[r].t;
                if (first || obs[r].t > t_max) t_max = obs[r].t;
                first = false;
            }
            result.curves[k][i] = std::move(curve);
        }
    }
    if (!(t_min < t_max))
        throw DatasetError("degenerate time domain: all observations at t = " + g17(t_min));
    result.domain_min = t_min;
    result.domain_max = t_max;

    if (!options.gcv_candidates.empty()) {
        std::vector<SampledCurve> all;
        for (const auto& per_subject : result.curves)
            for (const auto& c : per_subject) all.push_back(c);
        result.basis_dim = gcv_select(t_min, t_max, options.gcv_candidates, all,
                                      options.basis_order);
        result.gcv_used = true;
    } else {
        if (options.basis_dim < 1)
            throw ConfigError("ingest: pass a basis dimension or GCV candidates");
        result.basis_dim = options.basis_dim;
    }

    const BSplineBasis basis(t_min, t_max, result.basis_dim, result.basis_order);
    result.dataset.group_sizes = group_sizes;
    result.dataset.coefficients.resize(subject_labels.size());
    for (std::size_t k = 0; k < subject_labels.size(); ++k) {
        result.dataset.coefficients[k].reserve(treatment_labels.size());
        for (std::size_t i = 0; i < treatment_labels.size(); ++i) {
            try {
                result.dataset.coefficients[k].push_back(
                    fit_curve(basis, result.curves[k][i]));
            } catch (const SingularFitError& e) {
                throw SingularFitError("subject '" + subject_labels[k] +
                                       "', treatment '" + treatment_labels[i] +
                                       "': " + e.what());
            }
        }
    }
    result.dataset.validate();
    return result;
}

IngestResult ingest_curves_file(const std::string& path, const IngestOptions& options) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return ingest_curves(in, options);
}

void write_curves_csv(std::ostream& out, const IngestResult& ingest) {
    out << "subject,group,treatment,t,value\n";
    int row = 0;
    for (std::size_t j = 0; j < ingest.group_labels.size(); ++j) {
        const int nj = ingest.dataset.group_sizes[j];
        for (int k = 0; k < nj; ++k, ++row) {
            for (std::size_t i = 0; i < ingest.treatment_labels.size(); ++i) {
                const SampledCurve& c = ingest.curves[static_cast<std::size_t>(row)][i];
                for (Eigen::Index r = 0; r < c.grid.size(); ++r)
                    out << ingest.subject_labels[static_cast<std::size_t>(row)] << ','
                        << ingest.group_labels[j] << ',' << ingest.treatment_labels[i]
                        << ',' << g17(c.grid[r]) << ',' << g17(c.values[r]) << '\n';
            }
        }
    }
}

void write_raw_curves_csv(std::ostream& out, const RawCurves& raw,
                          const ScenarioSpec& spec, double domain_min,
                          double domain_max) {
    if (!(domain_min < domain_max))
        throw ConfigError("generate: domain must satisfy min < max");
    out << "subject,group,treatment,t,value\n";
    char subject[16], group[16], treatment[16];
    std::size_t k = 0;
    for (int j = 1; j <= spec.groups; ++j) {
        std::snprintf(group, sizeof(group), "g%02d", j);
        for (int s = 0; s < spec.n_per_group; ++s, ++k) {
            std::snprintf(subject, sizeof(subject), "s%04d", static_cast<int>(k) + 1);
            for (int i = 1; i <= spec.treatments; ++i) {
                std::snprintf(treatment, sizeof(treatment), "t%02d", i);
                const Vector& v = raw.values[k][static_cast<std::size_t>(i - 1)];
                for (Eigen::Index r = 0; r < raw.grid.size(); ++r) {
                    const double t =
                        domain_min + (domain_max - domain_min) * raw.grid[r];
                    out << subject << ',' << group << ',' << treatment << ','
                        << g17(t) << ',' << g17(v[r]) << '\n';
                }
            }
        }
    }
}

// --- simulation study configuration ---------------------------------

namespace {

int require_int(const std::string& s, int line_no, const char* what) {
    const double v = require_double(s, line_no, what);
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v)
        throw ParseError("line " + std::to_string(line_no) + ": " + what +
                         " must be an integer, got '" + trim(s) + "'");
    return i;
}

StatisticKind parse_statistic(const std::string& token, int line_no) {
    const std::string t = lower(trim(token));
    if (t == "wilks") return StatisticKind::Wilks;
    if (t == "lawley-hotelling" || t == "lh") return StatisticKind::LawleyHotelling;
    if (t == "pillai") return StatisticKind::Pillai;
    if (t == "roy") return StatisticKind::Roy;
    throw ParseError("line " + std::to_string(line_no) + ": unknown statistic '" +
                     trim(token) + "' (wilks, lawley-hotelling, pillai, roy)");
}

Hypothesis parse_hypothesis(const std::string& token, int line_no) {
    const std::string t = lower(trim(token));
    if (t == "interaction") return Hypothesis::Interaction;
    if (t == "treatment") return Hypothesis::Treatment;
    if (t == "group") return Hypothesis::Group;
    throw ParseError("line " + std::to_string(line_no) + ": unknown hypothesis '" +
                     trim(token) + "' (interaction, treatment, group)");
}

} // namespace

SimulationConfig parse_simulation_config(std::istream& in) {
    SimulationConfig config;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ParseError("line " + std::to_string(line_no) +
                             ": expected key = value");
        const std::string key = lower(trim(line.substr(0, eq)));
        std::vector<std::string> values;
        for (const std::string& v : split(line.substr(eq + 1), ',')) {
            const std::string t = trim(v);
            if (t.empty())
                throw ParseError("line " + std::to_string(line_no) +
                                 ": empty value in list for '" + key + "'");
            values.push_back(t);
        }
        if (values.empty())
            throw ParseError("line " + std::to_string(line_no) + ": no value for '" +
                             key + "'");

        auto scalar = [&]() -> const std::string& {
            if (values.size() != 1)
                throw ParseError("line " + std::to_string(line_no) + ": '" + key +
                                 "' takes a single value");
            return values[0];
        };

        if (key == "treatment") {
            config.treatment_fns = values;
        } else if (key == "group") {
            config.group_fns = values;
        } else if (key == "interaction") {
            config.interaction_fns = values;
        } else if (key == "sigma") {
            config.sigmas.clear();
            for (const auto& v : values)
                config.sigmas.push_back(require_double(v, line_no, "sigma"));
        } else if (key == "n") {
            config.ns.clear();
            for (const auto& v : values)
                config.ns.push_back(require_int(v, line_no, "n"));
        } else if (key == "error") {
            const std::string t = lower(scalar());
            if (t == "iid" || t == "iid_gaussian")
                config.error_model = ErrorModel::IidGaussian;
            else if (t == "brownian" || t == "scaled_brownian")
                config.error_model = ErrorModel::ScaledBrownian;
            else
                throw ParseError("line " + std::to_string(line_no) +
                                 ": unknown error model '" + t + "' (iid, brownian)");
        } else if (key == "methods") {
            config.methods.clear();
            for (const auto& v : values) {
                const std::string t = lower(trim(v));
                if (t != "dmm" && t != "mmm")
                    throw ParseError("line " + std::to_string(line_no) +
                                     ": unknown method '" + t + "' (dmm, mmm)");
                config.methods.push_back(t);
            }
        } else if (key == "hypotheses") {
            config.hypotheses.clear();
            for (const auto& v : values)
                config.hypotheses.push_back(parse_hypothesis(v, line_no));
        } else if (key == "statistic") {
            config.statistic = parse_statistic(scalar(), line_no);
        } else if (key == "groups") {
            config.groups = require_int(scalar(), line_no, "groups");
        } else if (key == "treatments") {
            config.treatments = require_int(scalar(), line_no, "treatments");
        } else if (key == "grid_points") {
            config.grid_points = require_int(scalar(), line_no, "grid_points");
        } else if (key == "basis_dim") {
            config.basis_dim = require_int(scalar(), line_no, "basis_dim");
        } else if (key == "basis_order") {
            config.basis_order = require_int(scalar(), line_no, "basis_order");
        } else if (key == "replications") {
            config.replications = require_int(scalar(), line_no, "replications");
        } else if (key == "alpha") {
            config.alpha = require_double(scalar(), line_no, "alpha");
        } else if (key == "seed") {
            const std::string t = trim(scalar());
            char* end = nullptr;
            config.seed = std::strtoull(t.c_str(), &end, 10);
            if (end != t.c_str() + t.size())
                throw ParseError("line " + std::to_string(line_no) +
                                 ": cannot parse seed '" + t + "'");
        } else {
            throw ParseError("line " + std::to_string(line_no) + ": unknown key '" +
                             key + "'");
        }
    }
    return config;
}

SimulationConfig parse_simulation_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    return parse_simulation_config(in);
}

std::vector<ScenarioSpec> expand_grid(const SimulationConfig& config) {
    std::vector<ScenarioSpec> cells;
    std::uint64_t index = 0;
    for (const std::string& tf : config.treatment_fns)
        for (const std::string& gf : config.group_fns)
            for (const std::string& itf : config.interaction_fns)
                for (int n : config.ns)
                    for (double sigma : config.sigmas) {
                        ScenarioSpec spec;
                        spec.treatment_fn = tf;
                        spec.group_fn = gf;
                        spec.interaction_fn = itf;
                        spec.error_model = config.error_model;
                        spec.sigma = sigma;
                        spec.n_per_group = n;
                        spec.groups = config.groups;
                        spec.treatments = config.treatments;
                        spec.grid_points = config.grid_points;
                        spec.basis_dim = config.basis_dim;
                        spec.basis_order = config.basis_order;
                        spec.replications = config.replications;
                        spec.alpha = config.alpha;
                        spec.statistic = config.statistic;
                        spec.seed = derive_seed(config.seed, index++);
                        cells.push_back(spec);
                    }
    return cells;
}

std::string study_csv(const SimulationConfig& config) {
    const std::vector<ScenarioSpec> cells = expand_grid(config);
    std::ostringstream out;
    out << "scenario,n,sigma,method,hypothesis,acceptance,replications,seed\n";
    for (const ScenarioSpec& cell : cells) {
        const StudyResult result = run_study(cell, config.methods);
        const std::string scenario =
            cell.treatment_fn + "/" + cell.group_fn + "/" + cell.interaction_fn +
            (cell.error_model == ErrorModel::IidGaussian ? "/iid" : "/brownian");
        for (const StudyCell& c : result.cells) {
            if (std::find(config.hypotheses.begin(), config.hypotheses.end(),
                          c.hypothesis) == config.hypotheses.end())
                continue;
            char acc[16];
            std::snprintf(acc, sizeof(acc), "%.4f", c.acceptance);
            out << scenario << ',' << cell.n_per_group << ','
                << format_number(cell.sigma) << ',' << c.method << ','
                << hypothesis_name(c.hypothesis) << ',' << acc << ','
                << c.replications << ',' << cell.seed << '\n';
        }
    }
    return out.str();
}

} // namespace fanova
