////////////////////////////////////////////////////////////////////////////////
// polyext_cli.cpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Command-line front end: evaluate energies, emit figure data, run the
//  convexity-lab scans, run discrete minimizations, and run the full
//  verification suite. Exit codes: 0 clean, 1 violations found, 2 usage or
//  domain error.
*///////////////////////////////////////////////////////////////////////////////
#include <polyext/energy.hpp>
#include <polyext/figures.hpp>
#include <polyext/minimize.hpp>
#include <polyext/scan.hpp>
#include <polyext/verify.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace polyext;

// JSON-backed CLI11 config reader/writer: config files are flat JSON
// documents, optionally nested per subcommand; command-line flags override.
class ConfigJson : public CLI::Config {
public:
    std::string to_config(const CLI::App *app, bool default_also, bool, std::string) const override {
        nlohmann::json j;
        for (const CLI::Option *opt : app->get_options()) {
            if (!opt->get_lnames().empty() && opt->get_configurable()) {
                const std::string name = opt->get_lnames()[0];
                if (opt->count() == 1)
                    j[name] = opt->results().at(0);
                else if (opt->count() > 1)
                    j[name] = opt->results();
                else if (default_also && !opt->get_default_str().empty())
                    j[name] = opt->get_default_str();
            }
        }
        return j.dump(2);
    }

    std::vector<CLI::ConfigItem> from_config(std::istream &input) const override {
        nlohmann::json j;
        input >> j;
        return collect(j, "", {});
    }

private:
    static std::string scalar_to_string(const nlohmann::json &v) {
        if (v.is_string())
            return v.get<std::string>();
        return v.dump();
    }

    std::vector<CLI::ConfigItem> collect(const nlohmann::json &j, const std::string &name,
                                         std::vector<std::string> prefix) const {
        std::vector<CLI::ConfigItem> results;
        if (j.is_object()) {
            if (!name.empty())
                prefix.push_back(name);
            for (auto it = j.begin(); it != j.end(); ++it) {
                auto sub = collect(it.value(), it.key(), prefix);
                results.insert(results.end(), sub.begin(), sub.end());
            }
            return results;
        }
        CLI::ConfigItem item;
        item.name = name;
        item.parents = std::move(prefix);
        if (j.is_array())
            for (const auto &v : j)
                item.inputs.push_back(scalar_to_string(v));
        else
            item.inputs.push_back(scalar_to_string(j));
        results.push_back(std::move(item));
        return results;
    }
};

struct ModelFlags {
    std::string name;
    double mu = 1.0;
    double lambda = 0.0;
    bool kappa_given = false;
    double kappa = 0.0;
    double alpha = 1.0;
    double gamma = 0.5;
    double k = 1.0;
    double k_hat = 1.0;
    std::optional<double> epsilon;
    std::string w = "log-squared";
};

void add_model_flags(CLI::App *cmd, ModelFlags &flags, bool positional_name = true) {
    if (positional_name)
        cmd->add_option("model", flags.name, "energy model name")->required();
    else
        cmd->add_option("--model", flags.name, "energy model name")->required();
    cmd->add_option("--mu", flags.mu, "shear modulus");
    cmd->add_option("--lambda", flags.lambda, "first Lame parameter");
    auto *kappa = cmd->add_option("--kappa", flags.kappa, "bulk modulus (alternative to --lambda)");
    kappa->each([&flags](const std::string &) { flags.kappa_given = true; });
    cmd->add_option("--alpha", flags.alpha, "extension parameter of the Euclidean profile");
    cmd->add_option("--gamma", flags.gamma, "extension parameter of the logarithmic profile");
    cmd->add_option("--k", flags.k, "exponentiated-Hencky exponent");
    cmd->add_option("--k-hat", flags.k_hat, "exponentiated-Hencky volumetric exponent");
    auto *eps = cmd->add_option_function<double>(
        "--epsilon", [&flags](double v) { flags.epsilon = v; },
        "Valanis-Landel neighborhood half-width (found automatically when omitted)");
    eps->type_name("FLOAT");
    cmd->add_option("--w", flags.w, "Valanis-Landel base profile: log-squared | squared-distance");
}

EnergyModel build_model(const ModelFlags &flags, int n) {
    nlohmann::json params;
    params["mu"] = flags.mu;
    if (flags.kappa_given)
        params["kappa"] = flags.kappa;
    else
        params["lambda"] = flags.lambda;
    if (flags.name == "euclid-ext")
        params["alpha"] = flags.alpha;
    if (flags.name == "log-strain-ext")
        params["gamma"] = flags.gamma;
    if (flags.name == "exp-hencky") {
        params["k"] = flags.k;
        params["k_hat"] = flags.k_hat;
    }
    if (flags.name == "vl-ext") {
        params["w"] = flags.w;
        if (flags.epsilon)
            params["epsilon"] = *flags.epsilon;
    }
    return make_model(flags.name, params, n);
}

Matrix matrix_from_entries(const std::vector<double> &entries) {
    int n = 0;
    if (entries.size() == 4)
        n = 2;
    else if (entries.size() == 9)
        n = 3;
    else
        throw std::invalid_argument("expected 4 or 9 matrix entries (row-major), got " +
                                    std::to_string(entries.size()));
    Matrix F(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            F(i, j) = entries[static_cast<std::size_t>(i * n + j)];
    return F;
}

void write_file(const std::string &path, const std::string &content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot open output file " + path);
    out << content;
}

int run_eval(const ModelFlags &flags, const std::vector<double> &entries) {
    const Matrix F = matrix_from_entries(entries);
    const EnergyModel model = build_model(flags, static_cast<int>(F.rows()));
    const DeformationGradient dg(F);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.15g", model.value(dg));
    std::cout << "value = " << buf << "\n";
    if (model.has_gradient()) {
        const auto grad = model.gradient(dg);
        std::cout << "gradient =";
        if (grad.at_kink)
            std::cout << " (one-sided: singular value at a profile kink)";
        std::cout << "\n";
        for (Eigen::Index i = 0; i < F.rows(); ++i) {
            std::cout << " ";
            for (Eigen::Index j = 0; j < F.cols(); ++j) {
                std::snprintf(buf, sizeof(buf), " %.15g", grad.gradient(i, j));
                std::cout << buf;
            }
            std::cout << "\n";
        }
    }
    return 0;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"polyconvex extensions of logarithmic strain energies: "
                 "evaluation, convexity lab, figure data, discrete minimization"};
    app.require_subcommand(1);
    app.config_formatter(std::make_shared<ConfigJson>());
    app.set_config("--config", "", "JSON config file; command-line flags override");

    // ---- eval ----
    auto *eval = app.add_subcommand("eval", "evaluate an energy and its gradient at F");
    ModelFlags eval_flags;
    std::vector<double> eval_entries;
    add_model_flags(eval, eval_flags);
    eval->add_option("F", eval_entries, "deformation gradient, 4 or 9 reals row-major")
        ->required()
        ->expected(-1);

    // ---- plot-data ----
    auto *plot = app.add_subcommand("plot-data", "emit figure data as CSV");
    std::string figure, plot_out;
    plot->add_option("--figure", figure, "phi | radial | psi | hull")->required();
    plot->add_option("--out", plot_out, "output CSV path (stdout when omitted)");

    // ---- scan ----
    auto *scan = app.add_subcommand("scan", "run a convexity-lab scan");
    std::string scan_kind;
    scan->add_option("kind", scan_kind, "rank-one | segment | ellipticity | coercivity | agreement")
        ->required();
    ModelFlags scan_flags;
    add_model_flags(scan, scan_flags, false);
    ScanConfig cfg;
    cfg.lo = 0.05;
    cfg.hi = 20.0;
    bool range_given = false;
    scan->add_option("--samples", cfg.samples, "sample count");
    scan->add_option("--seed", cfg.seed, "RNG seed");
    auto *lo_opt = scan->add_option("--lo", cfg.lo, "singular-value range, lower end");
    auto *hi_opt = scan->add_option("--hi", cfg.hi, "singular-value range, upper end");
    lo_opt->each([&range_given](const std::string &) { range_given = true; });
    hi_opt->each([&range_given](const std::string &) { range_given = true; });
    scan->add_option("--step", cfg.step, "finite-difference step scale");
    bool threshold_given = false;
    scan->add_option("--threshold", cfg.threshold, "violation threshold (relative)")
        ->each([&threshold_given](const std::string &) { threshold_given = true; });
    scan->add_option("--n", cfg.n, "dimension");
    bool serial = false;
    scan->add_flag("--serial", serial, "run the serial reference kernels");
    bool directed = false;
    scan->add_flag("--directed", directed, "directed search (rank-one and segment kinds)");
    std::string vs_model;
    scan->add_option("--vs", vs_model, "extension model for agreement scans");
    int grid_cells = 20, grid_dirs = 64;
    scan->add_option("--cells", grid_cells, "ellipticity grid cells per axis");
    scan->add_option("--dirs", grid_dirs, "ellipticity directions per cell");
    std::string scan_out, witness_csv;
    scan->add_option("--out", scan_out, "report JSON path");
    scan->add_option("--witness-csv", witness_csv, "violation witnesses CSV path");

    // ---- minimize ----
    auto *mini = app.add_subcommand("minimize", "minimize the discrete energy over a mesh");
    ModelFlags mini_flags;
    add_model_flags(mini, mini_flags, false);
    int mini_n = 2, mini_k = 4;
    std::vector<double> f0_entries;
    mini->add_option("--n", mini_n, "dimension (2 or 3)");
    mini->add_option("--resolution", mini_k, "mesh resolution (cells per axis)");
    mini->add_option("--F0", f0_entries, "affine boundary matrix, row-major")->required()->expected(-1);
    MinimizeOptions mopt;
    std::string method = "lbfgs";
    mini->add_option("--seed", mopt.seed, "perturbation seed");
    mini->add_option("--perturb", mopt.perturbation, "interior jitter relative to cell size");
    mini->add_option("--optimizer", method, "lbfgs | gd");
    mini->add_option("--gtol", mopt.grad_tol, "gradient norm tolerance");
    mini->add_option("--max-iters", mopt.max_iterations, "iteration cap");
    std::string faces = "all";
    mini->add_option("--faces", faces, "Dirichlet faces: 'all' or subset of x-,x+,y-,y+,z-,z+");
    bool mini_serial = false;
    mini->add_flag("--serial", mini_serial, "serial assembly");
    std::string mini_out, field_out;
    mini->add_option("--out", mini_out, "result JSON path");
    mini->add_option("--field-csv", field_out, "final field CSV path");

    // ---- verify ----
    auto *verify = app.add_subcommand("verify", "run the full acceptance suite");
    bool verify_serial = false;
    verify->add_flag("--serial", verify_serial, "serial kernels");
    std::string verify_out;
    verify->add_option("--out", verify_out, "summary JSON path");

    try {
        app.parse(argc, argv);

        if (eval->parsed())
            return run_eval(eval_flags, eval_entries);

        if (plot->parsed()) {
            const std::string csv = make_figure_csv(figure);
            if (plot_out.empty())
                std::cout << csv;
            else
                write_file(plot_out, csv);
            return 0;
        }

        if (scan->parsed()) {
            cfg.mode = serial ? Parallelism::Serial : Parallelism::OpenMP;
            const EnergyModel model = build_model(scan_flags, cfg.n);
            ScanReport report;
            if (scan_kind == "rank-one") {
                if (directed) {
                    const DirectedResult r = directed_rank_one_search(model, cfg);
                    report.kind = "rank-one-directed";
                    report.config = cfg;
                    report.tested = 1;
                    if (r.found) {
                        report.violations.push_back(r.witness);
                        report.worst_margin = r.witness.margin;
                    }
                }
                else {
                    report = rank_one_convexity_scan(model, cfg);
                }
            }
            else if (scan_kind == "segment") {
                if (directed) {
                    const DirectedResult r = directed_segment_search(model, cfg);
                    report.kind = "segment-directed";
                    report.config = cfg;
                    report.tested = 1;
                    if (r.found) {
                        report.violations.push_back(r.witness);
                        report.worst_margin = r.witness.margin;
                    }
                }
                else {
                    report = segment_convexity_scan(model, cfg);
                }
            }
            else if (scan_kind == "ellipticity") {
                EllipticityGrid grid;
                grid.lo = cfg.lo;
                grid.hi = cfg.hi;
                grid.cells_per_axis = grid_cells;
                grid.directions = grid_dirs;
                const EllipticityMap map = ellipticity_probe(model, grid, cfg);
                if (!scan_out.empty())
                    write_file(scan_out, map.to_json().dump(2) + "\n");
                std::cout << "ellipticity: " << map.cells() << " cells, "
                          << map.violating_cells() << " with violations\n";
                return map.violating_cells() == 0 ? 0 : 1;
            }
            else if (scan_kind == "coercivity") {
                if (!range_given) {
                    cfg.lo = 0.05;
                    cfg.hi = 700.0;
                }
                report = coercivity_check(model, cfg);
            }
            else if (scan_kind == "agreement") {
                if (vs_model.empty())
                    throw CLI::ValidationError("scan agreement requires --vs <extension-model>");
                ModelFlags ext_flags = scan_flags;
                ext_flags.name = vs_model;
                const EnergyModel extension = build_model(ext_flags, cfg.n);
                double lo = cfg.lo, hi = cfg.hi;
                if (!range_given && extension.agreement_region) {
                    lo = extension.agreement_region->first;
                    hi = std::isfinite(extension.agreement_region->second)
                             ? extension.agreement_region->second
                             : 10.0;
                }
                if (!threshold_given)
                    cfg.threshold = 1e-10; // agreement default
                report = extension_agreement_check(model, extension, lo, hi, cfg);
            }
            else {
                throw CLI::ValidationError("unknown scan kind '" + scan_kind + "'");
            }

            if (!scan_out.empty())
                write_file(scan_out, report.to_json().dump(2) + "\n");
            if (!witness_csv.empty())
                write_file(witness_csv, report.violations_csv());
            std::cout << report.kind << ": tested " << report.tested << ", skipped "
                      << report.skipped << ", violations " << report.violations.size()
                      << ", worst margin " << report.worst_margin << "\n";
            if (!report.violations.empty()) {
                const Witness &w = report.violations.front();
                std::cout << "first witness: second difference " << w.second_difference;
                if (w.F.size() > 0) {
                    std::cout << " at F =";
                    for (Eigen::Index i = 0; i < w.F.rows(); ++i)
                        for (Eigen::Index j = 0; j < w.F.cols(); ++j)
                            std::cout << " " << w.F(i, j);
                }
                if (w.a.size() > 0) {
                    std::cout << ", a =";
                    for (Eigen::Index i = 0; i < w.a.size(); ++i)
                        std::cout << " " << w.a[i];
                    std::cout << ", b =";
                    for (Eigen::Index i = 0; i < w.b.size(); ++i)
                        std::cout << " " << w.b[i];
                }
                std::cout << "\n";
            }
            return report.clean() ? 0 : 1;
        }

        if (mini->parsed()) {
            const Matrix F0 = matrix_from_entries(f0_entries);
            if (static_cast<int>(F0.rows()) != mini_n)
                throw std::invalid_argument("--F0 size does not match --n");
            mopt.mode = mini_serial ? Parallelism::Serial : Parallelism::OpenMP;
            mopt.method = method == "gd" ? MinimizeOptions::Method::GradientDescent
                                         : MinimizeOptions::Method::Lbfgs;
            const EnergyModel model = build_model(mini_flags, mini_n);
            const Mesh mesh = build_mesh(mini_n, mini_k, faces);
            const MinimizeResult result = minimize(mesh, model, F0, mopt);
            nlohmann::json j = result.to_json();
            j["model"] = model.params();
            j["n"] = mini_n;
            j["k"] = mini_k;
            j["seed"] = mopt.seed;
            if (!mini_out.empty())
                write_file(mini_out, j.dump(2) + "\n");
            if (!field_out.empty())
                write_file(field_out, field_csv(mesh, result.field));
            std::cout << "energy = " << j["energy"].dump() << ", iterations = " << result.iterations
                      << ", grad norm = " << result.grad_norm
                      << ", converged = " << (result.converged ? "yes" : "no") << "\n";
            return result.converged ? 0 : 1;
        }

        if (verify->parsed()) {
            const auto results = run_acceptance(
                std::cout, verify_serial ? Parallelism::Serial : Parallelism::OpenMP);
            if (!verify_out.empty()) {
                nlohmann::json j = nlohmann::json::array();
                for (const auto &r : results)
                    j.push_back({{"index", r.index},
                                 {"name", r.name},
                                 {"passed", r.passed},
                                 {"detail", r.detail},
                                 {"seconds", r.seconds}});
                write_file(verify_out, j.dump(2) + "\n");
            }
            return all_passed(results) ? 0 : 1;
        }
    }
    catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
