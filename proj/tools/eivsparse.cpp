#include "manifest.hpp"

#include <eivsparse/eivsparse.hpp>
#include <eivsparse/format.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace eivsparse::cli {
namespace {

struct SchemaFlags
{
    std::string sample = "sample";
    std::string replicate = "replicate";
    std::string response = "y";
    std::vector<std::string> predictors;

    CsvSchema schema() const { return {sample, replicate, response, predictors}; }
};

void add_schema(CLI::App* sub, SchemaFlags& s)
{
    sub->add_option("--sample-col", s.sample, "Sample id column");
    sub->add_option("--replicate-col", s.replicate, "Replicate column");
    sub->add_option("--response-col", s.response, "Response column");
    sub->add_option("--predictors", s.predictors, "Predictor columns (default: all other columns)")
        ->delimiter(',');
}

/// Files written by one command, relative to `dir`.
struct Outcome
{
    fs::path dir;
    std::vector<std::string> files;
    fs::path manifest;
    std::vector<fs::path> inputs;
    std::uint64_t seed = 0;
    int code = 0;
};

std::ofstream open_out(const fs::path& path)
{
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

void write_text(const fs::path& path, const std::string& text) { open_out(path) << text; }

fs::path sibling(const fs::path& file, const std::string& suffix)
{
    return file.parent_path() / (file.stem().string() + suffix);
}

// ---------------------------------------------------------------- anova

struct AnovaFlags
{
    fs::path input;
    fs::path output;
    SchemaFlags schema;
};

Outcome run_anova(const AnovaFlags& f)
{
    const ReplicatedDataset ds = load_replicated_csv(f.input, f.schema.schema());
    const auto est = anova_per_variable(ds);
    std::optional<std::pair<std::string, AnovaEstimate>> resp;
    if (ds.response_replicates() >= 2) resp.emplace(ds.response_name(), anova_response(ds));
    std::ostringstream text;
    write_anova_csv(text, ds.predictor_names(), est, resp);
    write_text(f.output, text.str());
    std::cout << text.str();
    return {f.output.parent_path(), {f.output.filename().string()}, sibling(f.output, ".manifest.json"),
            {f.input}, 0, 0};
}

// ------------------------------------------------------------------- cv

struct CvFlags
{
    fs::path input;
    fs::path out_dir;
    SchemaFlags schema;
    std::string method = "lars";
    bool scaled = false;
    bool refit_ridge = false;
    Index k = 10;
    Index outer_loops = 0;
    std::uint64_t seed = 1;
    Index threads = 1;
    double floor_rel = 1e-6;
    double sigma_eps = 0.0;
    Index dantzig_grid = 50;
};

CvConfig make_config(const std::string& method, bool scaled, double floor_rel, double sigma_eps)
{
    CvConfig c;
    c.method = parse_cv_method(method);
    c.scaled = scaled;
    c.floor_rel = floor_rel;
    if (sigma_eps > 0.0) c.sigma_eps = sigma_eps;
    return c;
}

Outcome run_cv(const CvFlags& f)
{
    const ReplicatedDataset ds = load_replicated_csv(f.input, f.schema.schema());
    CvConfig config = make_config(f.method, f.scaled, f.floor_rel, f.sigma_eps);
    config.refit_ridge = f.refit_ridge;
    config.threads = f.threads;
    config.dantzig_grid_size = f.dantzig_grid;
    const CvPlan plan = make_folds(ds, f.k, f.outer_loops, f.seed);
    const CvResult res = nested_kfold_cv(ds, plan, config);

    std::ostringstream curves;
    write_cv_curves_csv(curves, res);
    write_text(f.out_dir / "curves.csv", curves.str());
    write_text(f.out_dir / "cv.json", cv_result_to_json(res, ds.predictor_names()));

    ordered_json support;
    support["method"] = to_string(res.method);
    support["scaled"] = res.scaled;
    support["optimal_index"] = res.optimal_index;
    ordered_json idx = ordered_json::array(), names = ordered_json::array(), coef = ordered_json::object();
    for (Index j : res.selected_support) {
        const std::string& name = ds.predictor_names()[static_cast<std::size_t>(j)];
        idx.push_back(j + 1);
        names.push_back(name);
        coef[name] = res.selected_beta[j];
    }
    support["selected_support"] = idx;
    support["selected_names"] = names;
    support["coefficients"] = coef;
    write_text(f.out_dir / "support.json", support.dump(2) + "\n");

    std::cout << "method " << to_string(res.method) << (res.scaled ? " (scaled)" : "") << ", "
              << res.models - res.failures << "/" << res.models << " models\n"
              << "optimal step " << res.optimal_index << ": msep " << format_double(res.msep[res.optimal_index])
              << " se " << format_double(res.se[res.optimal_index]) << "\nselected:";
    for (const auto& n : names) std::cout << ' ' << n.get<std::string>();
    std::cout << '\n';
    if (res.refit_ridge) std::cout << "ridge refit msep " << format_double(res.refit_msep) << '\n';
    for (const auto& w : res.warnings) std::cerr << "warning: " << w << '\n';

    Outcome out{f.out_dir, {"curves.csv", "cv.json", "support.json"}, f.out_dir / "manifest.json", {f.input},
                f.seed, 0};
    if (res.unreliable) {
        std::cerr << "eivsparse: error: " << res.failures << " of " << res.models
                  << " models failed (more than 10%); results are unreliable\n";
        out.code = 3;
    }
    return out;
}

// ----------------------------------------------------------------- path

struct PathFlags
{
    fs::path input;
    fs::path out_dir;
    SchemaFlags schema;
    std::string method = "lars";
    bool scaled = false;
    bool plain = false;
    double floor_rel = 1e-6;
    double sigma_eps = 0.0;
};

Outcome run_path(const PathFlags& f)
{
    const ReplicatedDataset ds = load_replicated_csv(f.input, f.schema.schema());
    CvConfig config = make_config(f.method, f.scaled, f.floor_rel, f.sigma_eps);
    if (f.plain) config.lars.mode = LarsMode::plain;
    config.stagewise.record_every = 1;
    const PreparedDesign prep = prepare_design(ds, config.scaled, config.floor_rel, config.sigma_eps);
    SolutionPath path = fit_path(prep, config);
    for (PathStep& st : path.steps) {
        const Vector orig = prep.original_coefficients(st.beta);
        st.uncertainty = prep.uncertainty_sd.cwiseProduct(orig).norm();
        st.l1_norm = orig.lpNorm<1>();
        st.beta = orig;
    }
    std::ostringstream csv;
    write_path_csv(csv, path);
    write_text(f.out_dir / "path.csv", csv.str());
    write_text(f.out_dir / "path.json", path_to_json(path, ds.predictor_names()));
    std::cout << path.solver << ": " << path.size() << " steps\n";
    for (const auto& w : path.warnings) std::cerr << "warning: " << w << '\n';
    return {f.out_dir, {"path.csv", "path.json"}, f.out_dir / "manifest.json", {f.input}, 0, 0};
}

// ---------------------------------------------------------------- synth

struct SynthFlags
{
    fs::path output;
    fs::path spec_file;
    bool toy = false;
    bool ensemble = false;
    std::uint64_t seed = 1;
    Index n = 100;
    Index p = 0;
    Index r = 2;
    Index sparsity = 8;
    std::vector<double> beta;
    std::vector<double> sigma_delta;
    std::vector<double> sigma_v;
    double sigma_eps = -1.0;
    double rho = 0.0;
    double sigma_delta_lo = 0.1;
    double sigma_delta_hi = 0.9;
};

Vector broadcast(const std::vector<double>& v, Index p, const std::string& what)
{
    if (v.size() == 1) return Vector::Constant(p, v.front());
    if (static_cast<Index>(v.size()) != p)
        throw InputError(what + ": expected 1 or " + std::to_string(p) + " values, got " + std::to_string(v.size()));
    return Eigen::Map<const Vector>(v.data(), p);
}

ModelSpec spec_from_json(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open spec file " + path.string());
    try {
        const auto j = nlohmann::json::parse(in);
        const auto vec = [](const nlohmann::json& a) {
            const auto v = a.get<std::vector<double>>();
            return Vector(Eigen::Map<const Vector>(v.data(), static_cast<Index>(v.size())));
        };
        ModelSpec s;
        s.n = j.at("n").get<Index>();
        s.beta = vec(j.at("beta"));
        s.p = s.beta.size();
        s.r = j.value("r", Index{2});
        s.r_y = j.value("r_y", Index{0});
        s.sigma_eps = j.at("sigma_eps").get<double>();
        s.sigma_delta = vec(j.at("sigma_delta"));
        const auto& rows = j.at("v_covariance");
        s.v_covariance.resize(static_cast<Index>(rows.size()), rows.empty() ? 0 : static_cast<Index>(rows[0].size()));
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows[0].size()) throw InputError("spec: v_covariance rows differ in length");
            for (std::size_t k = 0; k < rows[i].size(); ++k)
                s.v_covariance(static_cast<Index>(i), static_cast<Index>(k)) = rows[i][k].get<double>();
        }
        s.enforce_response_unit_variance = j.value("enforce_response_unit_variance", true);
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("malformed spec file " + path.string() + ": " + e.what());
    }
}

ModelSpec spec_from_flags(const SynthFlags& f)
{
    if (f.toy) return toy_spec(f.n, f.seed);
    if (f.ensemble) {
        EnsembleOptions o;
        o.n = f.n;
        o.p = f.p > 0 ? f.p : o.p;
        o.r = f.r;
        o.sparsity = f.sparsity;
        o.rho = f.rho;
        o.sigma_delta_lo = f.sigma_delta_lo;
        o.sigma_delta_hi = f.sigma_delta_hi;
        if (f.sigma_eps >= 0.0) o.sigma_eps_sq = f.sigma_eps * f.sigma_eps;
        ModelSpec s = heteroscedastic_spec(o, f.seed);
        return s;
    }
    if (!f.spec_file.empty()) return spec_from_json(f.spec_file);

    if (f.beta.empty()) throw InputError("synth: give --toy, --ensemble, --spec or --beta");
    const Index p = f.p > 0 ? f.p : static_cast<Index>(f.beta.size());
    if (f.sigma_delta.empty()) throw InputError("synth: --sigma-delta is required with --beta");
    ModelSpec s;
    s.n = f.n;
    s.p = p;
    s.r = f.r;
    s.beta = broadcast(f.beta, p, "--beta");
    s.sigma_delta = broadcast(f.sigma_delta, p, "--sigma-delta");
    const Vector sv = f.sigma_v.empty() ? Vector((1.0 - s.sigma_delta.array().square()).max(0.0).sqrt())
                                        : broadcast(f.sigma_v, p, "--sigma-v");
    if (std::abs(f.rho) >= 1.0) throw InputError("synth: |rho| must be < 1");
    s.v_covariance.resize(p, p);
    for (Index j = 0; j < p; ++j)
        for (Index k = 0; k < p; ++k)
            s.v_covariance(j, k) = sv[j] * sv[k] * (j == k ? 1.0 : std::pow(f.rho, static_cast<double>(std::abs(j - k))));
    if (f.sigma_eps >= 0.0) {
        s.sigma_eps = f.sigma_eps;
    } else {
        const double sw = s.beta.dot(s.v_covariance * s.beta);
        if (sw > 1.0 + 1e-12)
            throw InputError("constraint violated: σ_w² + σ_ε² = 1 (σ_w² = " + format_double(sw) + " > 1)");
        s.sigma_eps = std::sqrt(std::max(0.0, 1.0 - sw));
    }
    return s;
}

ordered_json truth_json(const ModelSpec& s)
{
    const auto arr = [](const Vector& v) {
        ordered_json a = ordered_json::array();
        for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
        return a;
    };
    ordered_json j;
    j["n"] = s.n;
    j["p"] = s.p;
    j["r"] = s.r;
    j["r_y"] = s.response_replicates();
    j["seed"] = s.seed;
    j["beta"] = arr(s.beta);
    j["sigma_eps"] = s.sigma_eps;
    j["sigma_delta"] = arr(s.sigma_delta);
    j["sigma_v"] = arr(s.v_covariance.diagonal().cwiseMax(0.0).cwiseSqrt());
    ordered_json cov = ordered_json::array();
    for (Index i = 0; i < s.p; ++i) cov.push_back(arr(s.v_covariance.row(i).transpose()));
    j["v_covariance"] = cov;
    j["sigma_w_sq"] = s.beta.dot(s.v_covariance * s.beta);
    j["enforce_response_unit_variance"] = s.enforce_response_unit_variance;
    return j;
}

Outcome run_synth(const SynthFlags& f)
{
    ModelSpec spec = spec_from_flags(f);
    spec.seed = f.seed;
    const SyntheticData d = generate_dataset(spec);
    std::ostringstream csv;
    write_replicated_csv(csv, d.ds);
    write_text(f.output, csv.str());
    const fs::path truth = sibling(f.output, ".truth.json");
    write_text(truth, truth_json(spec).dump(2) + "\n");
    std::cout << "wrote " << spec.n << " samples x " << spec.r << " replicates, " << spec.p << " predictors\n";
    Outcome out{f.output.parent_path(), {f.output.filename().string(), truth.filename().string()},
                sibling(f.output, ".manifest.json"), {}, f.seed, 0};
    if (!f.spec_file.empty()) out.inputs.push_back(f.spec_file);
    return out;
}

// --------------------------------------------------------------- driver

std::string join(const std::vector<std::string>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
    return s;
}

std::vector<std::pair<std::string, std::string>> record_flags(const CLI::App* sub)
{
    std::vector<std::pair<std::string, std::string>> flags;
    for (const CLI::Option* opt : sub->get_options()) {
        if (opt == sub->get_help_ptr() || opt->get_lnames().empty()) continue;
        const std::string name = "--" + opt->get_lnames().front();
        if (opt->get_expected_min() == 0) {
            flags.emplace_back(name, opt->count() > 0 ? "true" : "false");
        } else if (opt->count() > 0) {
            flags.emplace_back(name, join(opt->results()));
        } else if (!opt->get_default_str().empty() && opt->get_default_str() != "[]" &&
                   opt->get_default_str() != "{}") {
            flags.emplace_back(name, opt->get_default_str());
        }
    }
    return flags;
}

void finish(const Outcome& out, const CLI::App* sub, const std::string& output_flag)
{
    RunManifest m;
    m.subcommand = sub->get_name();
    m.version = version;
    m.seed = out.seed;
    m.flags = record_flags(sub);
    m.output_flag = output_flag;
    for (auto& [k, v] : m.flags)
        if ((k == "--input" || k == "--spec") && !v.empty()) v = fs::absolute(v).lexically_normal().string();
    for (const auto& in : out.inputs) m.inputs.push_back({fs::absolute(in).lexically_normal().string(), sha256_file(in)});
    for (const auto& file : out.files) m.outputs.push_back({file, sha256_file(out.dir / file)});
    write_manifest(out.manifest, m);
}

int run(const std::vector<std::string>& args);

struct ReplayFlags
{
    fs::path manifest;
    fs::path into;
};

int run_replay(const ReplayFlags& f)
{
    const RunManifest m = read_manifest(f.manifest);
    if (m.version != version)
        std::cerr << "warning: manifest written by version " << m.version << ", running " << version << '\n';
    for (const auto& in : m.inputs)
        if (sha256_file(in.path) != in.sha256) throw InputError("input digest mismatch: " + in.path);
    std::vector<std::string> argv = manifest_argv(m);
    bool redirected = false;
    for (std::size_t i = 1; i + 1 < argv.size(); ++i) {
        if (argv[i] != m.output_flag) continue;
        argv[i + 1] = m.output_flag == "--out-dir" ? f.into.string()
                                                   : (f.into / fs::path(argv[i + 1]).filename()).string();
        redirected = true;
    }
    if (!redirected) throw InputError("manifest does not record its output flag " + m.output_flag);
    fs::create_directories(f.into);
    const int code = run(argv);
    if (code != 0) return code;
    bool same = true;
    for (const auto& out : m.outputs) {
        const fs::path p = f.into / out.path;
        const bool ok = fs::exists(p) && sha256_file(p) == out.sha256;
        std::cout << (ok ? "match    " : "MISMATCH ") << out.path << '\n';
        same = same && ok;
    }
    return same ? 0 : 3;
}

int run(const std::vector<std::string>& args)
{
    CLI::App app{"Sparse regression under design uncertainty", "eivsparse"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version));

    AnovaFlags anova;
    auto* a = app.add_subcommand("anova", "Per-variable uncertainty and signal variances by one-way ANOVA");
    a->add_option("-i,--input", anova.input, "Long-form replicated CSV")->required()->check(CLI::ExistingFile);
    a->add_option("-o,--output", anova.output, "Output CSV")->required();
    add_schema(a, anova.schema);

    CvFlags cv;
    auto* c = app.add_subcommand("cv", "Nested repeated k-fold cross-validation of a solver path");
    c->add_option("-i,--input", cv.input, "Long-form replicated CSV")->required()->check(CLI::ExistingFile);
    c->add_option("-o,--out-dir", cv.out_dir, "Output directory")->required();
    add_schema(c, cv.schema);
    c->add_option("--method", cv.method, "fs, lars, dantzig or ridge-all")
        ->check(CLI::IsMember({"fs", "lars", "dantzig", "ridge-all"}));
    c->add_flag("--scaled", cv.scaled, "Scale the design by the estimated uncertainties");
    c->add_flag("--refit-ridge", cv.refit_ridge, "Evaluate a ridge refit on the selected support");
    c->add_option("--k", cv.k, "Folds")->check(CLI::Range(Index{2}, Index{1000000}));
    c->add_option("--outer-loops", cv.outer_loops, "Repetitions (0: round(100 / k))")->check(CLI::NonNegativeNumber);
    c->add_option("--seed", cv.seed, "Random seed");
    c->add_option("--threads", cv.threads, "Worker threads (results do not depend on it)")
        ->check(CLI::PositiveNumber);
    c->add_option("--floor-rel", cv.floor_rel, "Relative floor of the scaling diagonal")->check(CLI::PositiveNumber);
    c->add_option("--sigma-eps", cv.sigma_eps, "Dantzig noise level (0: estimate)")->check(CLI::NonNegativeNumber);
    c->add_option("--dantzig-grid", cv.dantzig_grid, "Dantzig grid points")->check(CLI::PositiveNumber);

    PathFlags path;
    auto* pth = app.add_subcommand("path", "Fit one solution path on the full data");
    pth->add_option("-i,--input", path.input, "Long-form replicated CSV")->required()->check(CLI::ExistingFile);
    pth->add_option("-o,--out-dir", path.out_dir, "Output directory")->required();
    add_schema(pth, path.schema);
    pth->add_option("--method", path.method, "fs, lars, dantzig or ridge-all")
        ->check(CLI::IsMember({"fs", "lars", "dantzig", "ridge-all"}));
    pth->add_flag("--scaled", path.scaled, "Scale the design by the estimated uncertainties");
    pth->add_flag("--plain", path.plain, "LARS without the lasso modification");
    pth->add_option("--floor-rel", path.floor_rel, "Relative floor of the scaling diagonal")
        ->check(CLI::PositiveNumber);
    pth->add_option("--sigma-eps", path.sigma_eps, "Dantzig noise level (0: estimate)")
        ->check(CLI::NonNegativeNumber);

    SynthFlags synth;
    auto* s = app.add_subcommand("synth", "Generate a replicated data set from the measurement-error model");
    s->add_option("-o,--output", synth.output, "Output CSV")->required();
    s->add_option("--seed", synth.seed, "Random seed");
    auto* toy = s->add_flag("--toy", synth.toy, "Three-variable example with v1 = (v2 + v3) / sqrt(2)");
    auto* ens = s->add_flag("--ensemble", synth.ensemble, "Random sparse heteroscedastic model");
    auto* spec = s->add_option("--spec", synth.spec_file, "JSON model spec")->check(CLI::ExistingFile);
    toy->excludes(ens)->excludes(spec);
    ens->excludes(spec);
    s->add_option("--n", synth.n, "Samples")->check(CLI::PositiveNumber);
    s->add_option("--p", synth.p, "Predictors (0: from --beta)")->check(CLI::NonNegativeNumber);
    s->add_option("--r", synth.r, "Replicates")->check(CLI::PositiveNumber);
    s->add_option("--sparsity", synth.sparsity, "Nonzero coefficients (--ensemble)")->check(CLI::PositiveNumber);
    s->add_option("--beta", synth.beta, "Coefficients (one value or p values)")->delimiter(',');
    s->add_option("--sigma-delta", synth.sigma_delta, "Uncertainty sds (one or p values)")->delimiter(',');
    s->add_option("--sigma-v", synth.sigma_v, "Latent sds (default sqrt(1 - sigma_delta^2))")->delimiter(',');
    s->add_option("--sigma-eps", synth.sigma_eps, "Response noise sd (negative: fill to unit variance)");
    s->add_option("--rho", synth.rho, "AR(1) latent correlation");
    s->add_option("--sigma-delta-lo", synth.sigma_delta_lo, "Lower uncertainty sd (--ensemble)");
    s->add_option("--sigma-delta-hi", synth.sigma_delta_hi, "Upper uncertainty sd (--ensemble)");

    ReplayFlags replay;
    auto* rp = app.add_subcommand("replay", "Rerun a manifest and compare output digests");
    rp->add_option("-m,--manifest", replay.manifest, "Manifest JSON")->required()->check(CLI::ExistingFile);
    rp->add_option("--into", replay.into, "Directory for the rerun outputs")->required();

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    if (a->parsed()) {
        const Outcome out = run_anova(anova);
        finish(out, a, "--output");
        return out.code;
    }
    if (c->parsed()) {
        const Outcome out = run_cv(cv);
        finish(out, c, "--out-dir");
        return out.code;
    }
    if (pth->parsed()) {
        const Outcome out = run_path(path);
        finish(out, pth, "--out-dir");
        return out.code;
    }
    if (s->parsed()) {
        const Outcome out = run_synth(synth);
        finish(out, s, "--output");
        return out.code;
    }
    return run_replay(replay);
}

} // namespace
} // namespace eivsparse::cli

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return eivsparse::cli::run(args);
    } catch (const eivsparse::InputError& e) {
        std::cerr << "eivsparse: error: " << e.what() << '\n';
        return 2;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "eivsparse: error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "eivsparse: numerical failure: " << e.what() << '\n';
        return 3;
    }
}
