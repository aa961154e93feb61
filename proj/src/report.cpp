#include "fanova/report.hpp"

#include <cstdio>
#include <sstream>

#include <json.hpp>

namespace fanova {

std::string format_number(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

std::string format_pvalue(double p) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.4f", p);
    return buf;
}

std::string render_report(const TestReport& report) {
    std::ostringstream out;
    out << "hypothesis: " << hypothesis_name(report.hypothesis)
        << "   method: " << report.method << '\n';
    const Dims& d = report.dims;
    out << "n=" << d.n << " g=" << d.g << " m=" << d.m << " p=" << d.p
        << " (s=" << d.s << ", q=" << d.q << ")\n";

    char line[160];
    std::snprintf(line, sizeof(line), "%-18s %12s %12s %10s %10s %9s\n",
                  "statistic", "value", "F", "df1", "df2", "p-value");
    out << line;
    bool any_lower_bound = false;
    for (const StatisticValue& sv : report.statistics) {
        std::snprintf(line, sizeof(line), "%-18s %12s %12s %10s %10s %8s%s\n",
                      statistic_name(sv.kind), format_number(sv.value).c_str(),
                      format_number(sv.f).c_str(), format_number(sv.df1).c_str(),
                      format_number(sv.df2).c_str(),
                      format_pvalue(sv.p_value).c_str(),
                      sv.p_is_lower_bound ? "*" : "");
        out << line;
        if (sv.p_is_lower_bound) any_lower_bound = true;
    }
    if (any_lower_bound) out << "  * p-value is a lower bound\n";
    if (report.sphericity) {
        const SphericityResult& sph = *report.sphericity;
        out << "sphericity: LR = " << format_number(sph.lr)
            << ", df = " << format_number(sph.df)
            << ", p = " << format_pvalue(sph.p_value)
            << ", epsilon = " << format_number(sph.epsilon) << '\n';
    }
    for (const std::string& note : report.notes) out << "note: " << note << '\n';
    return out.str();
}

std::string report_json(const std::vector<TestReport>& reports) {
    nlohmann::json all = nlohmann::json::array();
    for (const TestReport& report : reports) {
        nlohmann::json j;
        j["hypothesis"] = hypothesis_name(report.hypothesis);
        j["method"] = report.method;
        j["dims"] = {{"n", report.dims.n}, {"g", report.dims.g},
                     {"m", report.dims.m}, {"p", report.dims.p},
                     {"s", report.dims.s}, {"q", report.dims.q}};
        nlohmann::json stats = nlohmann::json::array();
        for (const StatisticValue& sv : report.statistics) {
            nlohmann::json js;
            js["name"] = statistic_name(sv.kind);
            js["value"] = sv.value;
            js["f"] = sv.f;
            js["df1"] = sv.df1;
            js["df2"] = sv.df2;
            js["p_value"] = sv.p_value;
            if (sv.p_is_lower_bound) js["p_is_lower_bound"] = true;
            stats.push_back(js);
        }
        j["statistics"] = stats;
        if (report.sphericity) {
            const SphericityResult& sph = *report.sphericity;
            j["sphericity"] = {{"lr", sph.lr},
                               {"df", sph.df},
                               {"p_value", sph.p_value},
                               {"epsilon", sph.epsilon}};
        }
        if (!report.notes.empty()) j["notes"] = report.notes;
        all.push_back(j);
    }
    return all.dump(2) + "\n";
}

} // namespace fanova
