#include <polyext/verify.hpp>

#include <polyext/energy.hpp>
#include <polyext/figures.hpp>
#include <polyext/minimize.hpp>
#include <polyext/profiles.hpp>
#include <polyext/scan.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>

namespace polyext {

namespace {

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool condition, const std::string &what) {
        if (!condition) {
            ok = false;
            if (!detail.str().empty())
                detail << "; ";
            detail << what;
        }
    }
    void note(const std::string &what) {
        if (detail.str().empty())
            detail << what;
    }
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

// ---------- C1: profile continuity ----------

Check c1_profile_continuity() {
    Check c;
    double worst = 0.0;
    for (double gamma : {0.0, 0.25, 0.5, 1.0})
        worst = std::max(worst, max_breakpoint_mismatch(phi_gamma_profile(gamma)));
    for (double alpha : {0.55, 0.75, 1.0})
        worst = std::max(worst, max_breakpoint_mismatch(phi_alpha_profile(alpha)));
    double worst_d1 = 0.0;
    for (double Lambda : {0.0, 1.0, 2.0}) {
        const ScalarProfile psi = psi_vol_profile(Lambda);
        worst = std::max(worst, max_breakpoint_mismatch(psi));
        worst_d1 = std::max(worst_d1, max_breakpoint_d1_mismatch(psi));
    }
    c.require(worst <= 1e-12, "breakpoint value mismatch " + fmt(worst));
    c.require(worst_d1 <= 1e-12, "psi derivative mismatch at e: " + fmt(worst_d1));
    c.note("max value mismatch " + fmt(worst) + ", max psi d1 mismatch " + fmt(worst_d1));
    return c;
}

// ---------- C2: extension agreement ----------

Check c2_extension_agreement(Parallelism mode) {
    Check c;
    ScanConfig cfg;
    cfg.samples = 10000;
    cfg.n = 3;
    cfg.threshold = 1e-10;
    cfg.mode = mode;
    double worst = 0.0;
    auto run = [&](const EnergyModel &orig, const EnergyModel &ext, double lo, double hi,
                   std::uint64_t seed, const std::string &label) {
        cfg.seed = seed;
        const ScanReport r = extension_agreement_check(orig, ext, lo, hi, cfg);
        worst = std::max(worst, r.max_discrepancy);
        c.require(r.clean(), label + " discrepancy " + fmt(r.max_discrepancy));
    };

    const EnergyModel log_strain = make_log_strain_model();
    for (double gamma : {1.0 / 3.0, 0.5})
        run(log_strain, make_log_strain_extension_model(gamma), std::exp(gamma - 1.0),
            std::exp(gamma), 21 + static_cast<std::uint64_t>(gamma * 100), "log-strain ext");

    const std::pair<double, double> lame[] = {{1.0, 0.0}, {1.0, 2.0}, {2.0, 1.0}};
    for (const auto &[mu, L] : lame) {
        const LameParameters p = LameParameters::from_lambda(mu, L);
        run(make_hencky_model(p, 3), make_hencky_extension_model(p, 3), std::exp(-2.0 / 3.0),
            std::exp(1.0 / 3.0), 31, "hencky ext");
    }

    run(make_euclid_model(), make_euclid_extension_model(1.0), 0.5, 10.0, 41, "euclid ext");
    c.note("max discrepancy " + fmt(worst));
    return c;
}

// ---------- C3: polyconvexity evidence ----------

Check c3_polyconvexity(Parallelism mode) {
    Check c;
    ScanConfig cfg;
    cfg.samples = 100000;
    cfg.lo = 0.05;
    cfg.hi = 20.0;
    cfg.threshold = 1e-8;
    cfg.n = 3;
    cfg.mode = mode;
    double worst = std::numeric_limits<double>::infinity();
    auto run = [&](const EnergyModel &m, std::uint64_t seed) {
        cfg.seed = seed;
        const ScanReport r = rank_one_convexity_scan(m, cfg);
        worst = std::min(worst, r.worst_margin);
        c.require(r.clean(), m.name() + ": " + std::to_string(r.violations.size()) + " violations");
    };
    run(make_hencky_extension_model(LameParameters::from_lambda(1.0, 0.0), 3), 101);
    run(make_hencky_extension_model(LameParameters::from_lambda(1.0, 2.0), 3), 102);
    run(make_euclid_extension_model(1.0), 103);
    run(make_log_strain_extension_model(0.5), 104);
    run(valanis_landel_extension(log_squared_profile()), 105);
    c.note("worst margin " + fmt(worst));
    return c;
}

// ---------- C4: negative controls ----------

Check c4_negative_controls() {
    Check c;
    ScanConfig cfg;
    cfg.n = 3;
    cfg.lo = 1.5;
    cfg.hi = 200.0;
    cfg.threshold = 1e-8;
    cfg.seed = 7;

    const EnergyModel hencky = make_hencky_model(LameParameters::from_lambda(1.0, 0.0), 3);
    const DirectedResult lh = directed_rank_one_search(hencky, cfg);
    c.require(lh.found, "no LH violation found for classical Hencky");
    if (lh.found) {
        const Vector sigma = singular_values(lh.witness.F);
        c.require(sigma.maxCoeff() > std::exp(1.0 / 3.0), "witness inside Bruhns region");
        const double h = cfg.step * (1.0 + lh.witness.F.norm());
        const double recomputed = recompute_rank_one_witness(hencky, lh.witness, h);
        c.require(recomputed < 0.0, "LH witness failed recomputation");
        c.note("LH margin " + fmt(lh.witness.margin) + ", recomputed d2 " + fmt(recomputed));
    }

    const EnergyModel raw = make_log_strain_model();
    const DirectedResult seg = directed_segment_search(raw, cfg);
    c.require(seg.found, "no segment violation found for raw log-strain sum");
    if (seg.found) {
        const double recomputed = recompute_segment_witness(raw, seg.witness, 0.5 / 32.0);
        c.require(recomputed < 0.0, "segment witness failed recomputation");
    }
    return c;
}

// ---------- C5: Bruhns domain ----------

Check c5_bruhns_domain(Parallelism mode) {
    Check c;
    ScanConfig cfg;
    cfg.n = 3;
    cfg.threshold = 1e-8;
    cfg.seed = 11;
    cfg.mode = mode;
    EllipticityGrid grid;
    grid.lo = 0.21;
    grid.hi = std::exp(1.0 / 3.0);
    grid.cells_per_axis = 20;
    grid.directions = 64;
    const EnergyModel hencky = make_hencky_model(LameParameters::from_lambda(1.0, 0.0), 3);
    const EllipticityMap map = ellipticity_probe(hencky, grid, cfg);
    c.require(map.violating_cells() == 0,
              std::to_string(map.violating_cells()) + " violating cells in the Bruhns box");
    c.note(std::to_string(map.cells()) + " cells, 64 directions each, no violation");
    return c;
}

// ---------- C6: coercivity ----------

Check c6_coercivity(Parallelism mode) {
    Check c;
    ScanConfig cfg;
    cfg.samples = 1000;
    cfg.n = 3;
    cfg.lo = 0.05;
    cfg.hi = 700.0;
    cfg.threshold = 1e-9;
    cfg.seed = 13;
    cfg.mode = mode;
    const EnergyModel ext = make_hencky_extension_model(LameParameters::from_lambda(1.0, 0.0), 3);
    const ScanReport r = coercivity_check(ext, cfg);
    c.require(r.clean(), std::to_string(r.violations.size()) + " coercivity violations");
    c.note("tested " + std::to_string(r.tested) + ", worst margin " + fmt(r.worst_margin));
    return c;
}

// ---------- C7: gradient correctness ----------

bool sample_clear_of_kinks(const EnergyModel &m, const Matrix &F) {
    const Vector sigma = singular_values(F);
    double det = 1.0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        det *= sigma[i];
        if (m.profile().near_breakpoint(sigma[i], 1e-3))
            return false;
    }
    if (m.volumetric() && m.volumetric()->near_breakpoint(det, 1e-3))
        return false;
    return true;
}

Check c7_gradients() {
    Check c;
    std::vector<EnergyModel> models;
    models.push_back(make_hencky_model(LameParameters::from_lambda(1.0, 0.5), 3));
    models.push_back(make_hencky_extension_model(LameParameters::from_lambda(1.0, 0.5), 3));
    models.push_back(make_euclid_model());
    models.push_back(make_euclid_extension_model(0.75));
    models.push_back(make_euclid_extension_model(1.0));
    models.push_back(make_log_strain_model());
    models.push_back(make_dev_log_strain_model(3));
    models.push_back(make_log_strain_extension_model(1.0 / 3.0));
    models.push_back(make_log_strain_extension_model(0.5));
    models.push_back(make_frobenius_squared_model());
    models.push_back(valanis_landel_extension(log_squared_profile()));
    models.push_back(valanis_landel_extension(squared_distance_profile()));

    double worst = 0.0;
    for (std::size_t mi = 0; mi < models.size(); ++mi) {
        const EnergyModel &m = models[mi];
        int tested = 0;
        for (std::int64_t i = 0; tested < 1000 && i < 4000; ++i) {
            auto rng = sample_stream(1000 + mi, i);
            const Matrix F = random_deformation(3, 0.2, 5.0, rng);
            if (!sample_clear_of_kinks(m, F))
                continue;
            ++tested;
            const DeformationGradient dg(F);
            const Matrix analytic = m.gradient(dg).gradient;
            const double delta = 1e-6 * std::max(1.0, F.norm());
            Matrix fd(3, 3);
            for (int r = 0; r < 3; ++r)
                for (int s = 0; s < 3; ++s) {
                    Matrix Fp = F, Fm = F;
                    Fp(r, s) += delta;
                    Fm(r, s) -= delta;
                    fd(r, s) = (m.value(DeformationGradient(Fp)) - m.value(DeformationGradient(Fm)))
                             / (2.0 * delta);
                }
            const double err = (analytic - fd).norm() / std::max(1.0, fd.norm());
            worst = std::max(worst, err);
            if (err > 1e-5) {
                c.require(false, m.name() + " gradient error " + fmt(err));
                break;
            }
        }
        c.require(tested == 1000, m.name() + ": only " + std::to_string(tested) + " kink-free samples");
    }
    c.note("worst relative FD error " + fmt(worst));
    return c;
}

// ---------- C8: minimizer demo ----------

Check c8_minimizer(Parallelism mode) {
    Check c;
    const LameParameters p = LameParameters::from_lambda(1.0, 0.0);
    auto run_case = [&](int n, int k, const Matrix &F0) {
        const EnergyModel model = make_hencky_extension_model(p, n);
        const double expected = model.value(DeformationGradient(F0));
        const Mesh mesh = build_mesh(n, k);
        for (int seed : {1, 2, 3}) {
            MinimizeOptions opt;
            opt.seed = seed;
            opt.mode = mode;
            const MinimizeResult r = minimize(mesh, model, F0, opt);
            const double rel = std::abs(r.energy - expected) / std::abs(expected);
            c.require(r.converged, "n=" + std::to_string(n) + " k=" + std::to_string(k) +
                                       " seed=" + std::to_string(seed) + " did not converge");
            c.require(rel <= 1e-6, "n=" + std::to_string(n) + " k=" + std::to_string(k) + " seed=" +
                                       std::to_string(seed) + " relative error " + fmt(rel));
        }
    };

    Matrix F2(2, 2);
    F2 << 1.2, 0.0, 0.0, 0.9;
    for (int k : {2, 4, 8})
        run_case(2, k, F2);

    Matrix F3 = Matrix::Identity(3, 3);
    F3(0, 0) = 1.1;
    F3(2, 2) = 0.9;
    run_case(3, 2, F3);
    c.note("all runs converged to the homogeneous-state energy");
    return c;
}

// ---------- C9: appendix fidelity ----------

Check c9_appendix(Parallelism mode) {
    Check c;
    const std::int64_t samples = 100000;
    std::vector<double> margins(static_cast<std::size_t>(samples));
    std::vector<std::uint8_t> region_ok(static_cast<std::size_t>(samples));
    for_each_index(samples, mode, [&](std::int64_t i) {
        auto rng = sample_stream(17, i);
        const Matrix F = random_deformation(2, 0.05, 3.0, rng);
        const double d2 = dist2_SO2(F);
        const double hull = rank_one_hull_dist2_SO2(F);
        margins[static_cast<std::size_t>(i)] = d2 - hull;
        const bool predicate = conformal_part(F).norm() >= std::sqrt(2.0) / 2.0;
        const double expected = predicate ? d2 : 1.0 - 2.0 * determinant(F);
        region_ok[static_cast<std::size_t>(i)] = hull == expected;
    });
    double worst = std::numeric_limits<double>::infinity();
    bool regions = true;
    for (std::int64_t i = 0; i < samples; ++i) {
        worst = std::min(worst, margins[static_cast<std::size_t>(i)]);
        regions &= region_ok[static_cast<std::size_t>(i)] != 0;
    }
    c.require(worst >= -1e-12, "hull exceeds dist^2, margin " + fmt(worst));
    c.require(regions, "hull did not match the ||F+|| predicate branch");

    ScanConfig cfg;
    cfg.samples = 20000;
    cfg.threshold = 1e-10;
    cfg.seed = 19;
    cfg.mode = mode;
    const ScanReport hull_scan = scalar_convexity_check(double_well_hull_profile(), -2.0, 2.0, cfg);
    c.require(hull_scan.clean(), "double-well hull shows convexity violations");
    const ScalarProfile well = double_well_profile();
    const ScalarProfile hull = double_well_hull_profile();
    for (double x = 1.0; x <= 2.5; x += 0.01) {
        c.require(std::abs(well.value(x) - hull.value(x)) <= 1e-15 * std::max(1.0, well.value(x)),
                  "hull != well outside (-1,1)");
        c.require(std::abs(well.value(-x) - hull.value(-x)) <= 1e-15 * std::max(1.0, well.value(-x)),
                  "hull != well outside (-1,1)");
    }
    c.note("hull-dist margin " + fmt(worst) + ", hull scan clean");
    return c;
}

// ---------- C10: figure data landmarks ----------

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};

Table parse_csv(const std::string &text) {
    Table t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::istringstream ls(line);
        std::string cell;
        std::size_t col = 0;
        while (std::getline(ls, cell, ',')) {
            if (first)
                t.header.push_back(cell);
            else {
                if (col >= t.columns.size())
                    t.columns.resize(col + 1);
                t.columns[col].push_back(std::strtod(cell.c_str(), nullptr));
            }
            ++col;
        }
        if (first) {
            t.columns.resize(t.header.size());
            first = false;
        }
    }
    return t;
}

std::size_t nearest_index(const std::vector<double> &xs, double target) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (std::abs(xs[i] - target) < std::abs(xs[best] - target))
            best = i;
    return best;
}

// Spike detector: a second difference an order of magnitude above both of its
// second neighbors marks a kink. Documented breakpoints are exempt within two
// grid cells.
bool smooth_away_from(const std::vector<double> &xs, const std::vector<double> &ys,
                      const std::vector<double> &breakpoints, std::string *where) {
    const double floor = 1e-9;
    for (std::size_t i = 3; i + 3 < xs.size(); ++i) {
        const auto d2 = [&](std::size_t j) { return std::abs(ys[j + 1] - 2.0 * ys[j] + ys[j - 1]); };
        if (d2(i) <= 10.0 * std::max(d2(i - 2), d2(i + 2)) + floor)
            continue;
        const double cell = xs[1] - xs[0];
        bool excused = false;
        for (double b : breakpoints)
            excused |= std::abs(xs[i] - b) <= 2.0 * cell;
        if (!excused) {
            if (where)
                *where = "x = " + fmt(xs[i]);
            return false;
        }
    }
    return true;
}

Check c10_figures() {
    Check c;

    { // phi: constant left tails at -(gamma-1)^2
        const Table t = parse_csv(make_figure_csv("phi"));
        const double gammas[] = {0.0, 0.25, 0.5, 1.0};
        for (std::size_t cu = 0; cu < 4; ++cu) {
            const double gamma = gammas[cu];
            const double tail = -(gamma - 1.0) * (gamma - 1.0);
            const double lo_break = std::exp(gamma - 1.0);
            bool has_tail = false;
            for (std::size_t i = 0; i < t.columns[0].size(); ++i) {
                if (t.columns[0][i] >= lo_break)
                    continue;
                has_tail = true;
                c.require(std::abs(t.columns[cu + 1][i] - tail) <= 1e-12,
                          "phi tail value off at gamma " + fmt(gamma));
            }
            c.require(has_tail, "phi grid misses the constant tail for gamma " + fmt(gamma));
            std::string where;
            c.require(smooth_away_from(t.columns[0], t.columns[cu + 1],
                                       {lo_break, std::exp(gamma)}, &where),
                      "phi spike at " + where);
        }
    }
    { // radial: f_gamma(1) = 0
        const Table t = parse_csv(make_figure_csv("radial"));
        const std::size_t at1 = nearest_index(t.columns[0], 1.0);
        for (std::size_t cu = 1; cu < t.columns.size(); ++cu) {
            c.require(std::abs(t.columns[cu][at1]) <= 1e-3, "radial curve not ~0 at lambda = 1");
            std::string where;
            c.require(smooth_away_from(t.columns[0], t.columns[cu],
                                       {std::exp(-0.75), std::exp(0.25), std::exp(-0.5),
                                        std::exp(0.5)},
                                       &where),
                      "radial spike at " + where);
        }
    }
    { // psi: psi(1) = 0 and no kink at t = e
        const Table t = parse_csv(make_figure_csv("psi"));
        const std::size_t at1 = nearest_index(t.columns[0], 1.0);
        c.require(std::abs(t.columns[1][at1]) <= 1e-3, "psi not ~0 at t = 1");
        const double e = std::exp(1.0);
        const std::size_t ate = nearest_index(t.columns[0], e);
        for (std::size_t j = ate - 1; j <= ate + 1; ++j) {
            const double d2 = t.columns[1][j + 1] - 2.0 * t.columns[1][j] + t.columns[1][j - 1];
            c.require(std::abs(d2) <= 1e-3, "psi slope jump at t = e, d2 " + fmt(d2));
        }
        std::string where;
        c.require(smooth_away_from(t.columns[0], t.columns[1], {e}, &where), "psi spike at " + where);
    }
    { // hull: zero inside (-1, 1), equal to the well outside, dominated everywhere
        const Table t = parse_csv(make_figure_csv("hull"));
        const double cell = t.columns[0][1] - t.columns[0][0];
        for (std::size_t i = 0; i < t.columns[0].size(); ++i) {
            const double x = t.columns[0][i];
            const double well = t.columns[1][i];
            const double hull = t.columns[2][i];
            c.require(hull <= well + 1e-15, "hull exceeds well at x " + fmt(x));
            if (std::abs(x) < 1.0 - cell)
                c.require(hull == 0.0, "hull nonzero inside (-1,1) at x " + fmt(x));
            if (std::abs(x) >= 1.0)
                c.require(std::abs(hull - well) <= 1e-15 * std::max(1.0, well),
                          "hull != well at x " + fmt(x));
        }
        std::string where;
        c.require(smooth_away_from(t.columns[0], t.columns[2], {-1.0, 1.0}, &where),
                  "hull spike at " + where);
    }
    c.note("all landmarks present");
    return c;
}

} // namespace

std::vector<CriterionResult> run_acceptance(std::ostream &out, Parallelism mode) {
    struct Entry {
        const char *name;
        std::function<Check()> run;
    };
    const Entry entries[] = {
        {"profile-continuity", [&] { return c1_profile_continuity(); }},
        {"extension-agreement", [&] { return c2_extension_agreement(mode); }},
        {"polyconvexity-evidence", [&] { return c3_polyconvexity(mode); }},
        {"negative-controls", [&] { return c4_negative_controls(); }},
        {"bruhns-domain", [&] { return c5_bruhns_domain(mode); }},
        {"coercivity", [&] { return c6_coercivity(mode); }},
        {"gradient-correctness", [&] { return c7_gradients(); }},
        {"minimizer-demo", [&] { return c8_minimizer(mode); }},
        {"appendix-fidelity", [&] { return c9_appendix(mode); }},
        {"figure-data", [&] { return c10_figures(); }},
    };

    std::vector<CriterionResult> results;
    int index = 1;
    for (const auto &entry : entries) {
        const auto start = std::chrono::steady_clock::now();
        Check check;
        try {
            check = entry.run();
        }
        catch (const std::exception &e) {
            check.ok = false;
            check.detail << "exception: " << e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

        CriterionResult r;
        r.index = index;
        r.name = entry.name;
        r.passed = check.ok;
        r.detail = check.detail.str();
        r.seconds = seconds;
        results.push_back(r);

        out << "C" << index << " " << r.name << ": " << (r.passed ? "PASS" : "FAIL");
        if (!r.detail.empty())
            out << " (" << r.detail << ")";
        char buf[32];
        std::snprintf(buf, sizeof(buf), " [%.2f s]", seconds);
        out << buf << std::endl;
        ++index;
    }
    return results;
}

bool all_passed(const std::vector<CriterionResult> &results) {
    for (const auto &r : results)
        if (!r.passed)
            return false;
    return true;
}

} // namespace polyext
