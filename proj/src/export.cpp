#include "eivsparse/export.hpp"

#include "eivsparse/format.hpp"

#include <json.hpp>

#include <ostream>

namespace eivsparse {

using nlohmann::ordered_json;

namespace {

ordered_json number(double v)
{
    if (std::isfinite(v)) return v;
    return format_double(v);
}

ordered_json one_based(const IndexSet& s)
{
    ordered_json a = ordered_json::array();
    for (Index j : s) a.push_back(j + 1);
    return a;
}

ordered_json names_of(const IndexSet& s, const std::vector<std::string>& names)
{
    ordered_json a = ordered_json::array();
    for (Index j : s)
        a.push_back(static_cast<std::size_t>(j) < names.size() ? names[static_cast<std::size_t>(j)]
                                                               : "x" + std::to_string(j + 1));
    return a;
}

ordered_json curve(const Vector& v)
{
    ordered_json a = ordered_json::array();
    for (Index i = 0; i < v.size(); ++i) a.push_back(number(v[i]));
    return a;
}

ordered_json sparse(const Vector& beta)
{
    ordered_json o = ordered_json::object();
    for (Index j = 0; j < beta.size(); ++j)
        if (beta[j] != 0.0) o[std::to_string(j + 1)] = number(beta[j]);
    return o;
}

} // namespace

void write_path_csv(std::ostream& out, const SolutionPath& path)
{
    out << "step,lambda,l1_norm,rss,uncertainty,nonzeros,coefficients\n";
    for (std::size_t s = 0; s < path.steps.size(); ++s) {
        const PathStep& st = path.steps[s];
        out << s << ',' << format_double(st.lambda) << ',' << format_double(st.l1_norm) << ','
            << format_double(st.rss) << ',' << format_double(st.uncertainty) << ',' << st.active_set.size() << ',';
        bool first = true;
        for (Index j : st.active_set) {
            if (!first) out << ' ';
            out << (j + 1) << ':' << format_double(st.beta[j]);
            first = false;
        }
        out << '\n';
    }
}

std::string path_to_json(const SolutionPath& path, const std::vector<std::string>& names)
{
    ordered_json j;
    j["solver"] = path.solver;
    ordered_json settings = ordered_json::object();
    for (const auto& [k, v] : path.settings) settings[k] = number(v);
    j["settings"] = settings;
    j["scaled"] = path.scaled;
    j["truncated"] = path.truncated;
    j["ignored"] = one_based(path.ignored);
    j["warnings"] = path.warnings;
    ordered_json steps = ordered_json::array();
    for (std::size_t s = 0; s < path.steps.size(); ++s) {
        const PathStep& st = path.steps[s];
        ordered_json o;
        o["step"] = s;
        o["lambda"] = number(st.lambda);
        o["l1_norm"] = number(st.l1_norm);
        o["rss"] = number(st.rss);
        o["uncertainty"] = number(st.uncertainty);
        o["active_set"] = one_based(st.active_set);
        o["active_names"] = names_of(st.active_set, names);
        o["coefficients"] = sparse(st.beta);
        steps.push_back(std::move(o));
    }
    j["steps"] = std::move(steps);
    return j.dump(2) + "\n";
}

void write_cv_curves_csv(std::ostream& out, const CvResult& res)
{
    out << "step,msep,se,uncertainty,nonzeros\n";
    for (Index s = 0; s < res.msep.size(); ++s)
        out << s << ',' << format_double(res.msep[s]) << ',' << format_double(res.se[s]) << ','
            << format_double(res.uncertainty[s]) << ',' << format_double(res.nonzeros[s]) << '\n';
}

std::string cv_result_to_json(const CvResult& res, const std::vector<std::string>& names)
{
    ordered_json j;
    j["method"] = to_string(res.method);
    j["scaled"] = res.scaled;
    j["refit_ridge"] = res.refit_ridge;
    j["k"] = res.k;
    j["outer_loops"] = res.outer_loops;
    j["seed"] = res.seed;
    j["models"] = res.models;
    j["failures"] = res.failures;
    j["unreliable"] = res.unreliable;
    j["optimal_index"] = res.optimal_index;
    j["optimal_msep"] = number(res.msep[res.optimal_index]);
    j["optimal_se"] = number(res.se[res.optimal_index]);
    j["selected_support"] = one_based(res.selected_support);
    j["selected_names"] = names_of(res.selected_support, names);
    j["nonzero_count"] = res.nonzero_count;
    j["selected_coefficients"] = sparse(res.selected_beta);
    if (res.refit_ridge) {
        j["refit_msep"] = number(res.refit_msep);
        j["refit_se"] = number(res.refit_se);
    }
    j["msep"] = curve(res.msep);
    j["se"] = curve(res.se);
    j["uncertainty"] = curve(res.uncertainty);
    j["nonzeros"] = curve(res.nonzeros);
    j["warnings"] = res.warnings;
    return j.dump(2) + "\n";
}

void write_anova_csv(std::ostream& out, const std::vector<std::string>& names,
                     const std::vector<AnovaEstimate>& estimates,
                     const std::optional<std::pair<std::string, AnovaEstimate>>& response)
{
    out << "variable,s_delta_sq,s_nu_sq,signal_to_noise\n";
    const auto row = [&](const std::string& name, const AnovaEstimate& e) {
        out << name << ',' << format_double(e.s_delta_sq) << ',' << format_double(e.s_nu_sq) << ','
            << format_double(e.signal_to_noise()) << '\n';
    };
    for (std::size_t j = 0; j < estimates.size(); ++j)
        row(j < names.size() ? names[j] : "x" + std::to_string(j + 1), estimates[j]);
    if (response) row(response->first, response->second);
}

} // namespace eivsparse
