#include <polyext/scan.hpp>

#include <polyext/csv.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

namespace polyext {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> flatten(const Matrix &m) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(m.size()));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            out.push_back(m(i, j));
    return out;
}

std::vector<double> flatten(const Vector &v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

nlohmann::json witness_to_json(const Witness &w) {
    nlohmann::json j{{"sample", w.sample},
                     {"margin", w.margin},
                     {"second_difference", w.second_difference}};
    if (w.F.size() > 0)
        j["F"] = flatten(w.F);
    if (w.a.size() > 0)
        j["a"] = flatten(w.a);
    if (w.b.size() > 0)
        j["b"] = flatten(w.b);
    if (w.F1.size() > 0)
        j["F1"] = flatten(w.F1);
    j["t"] = w.t;
    return j;
}

// One probe of the second difference of t -> W(F + t a b^T) at t = 0.
struct LhProbe {
    double margin = kInf;            // normalized second difference
    double second_difference = 0.0;  // (W+ + W- - 2 W0) / h^2
    bool valid = false;
    bool overflow = false;
};

LhProbe lh_probe(const EnergyModel &model, const Matrix &F, const Vector &a, const Vector &b,
                 double h) {
    LhProbe p;
    const Matrix dir = a * b.transpose();
    const Matrix Fp = F + h * dir;
    const Matrix Fm = F - h * dir;
    // det(F + t a b^T) is affine in t, so positivity at both endpoints covers
    // the whole step interval.
    if (!(determinant(Fp) > 0.0) || !(determinant(Fm) > 0.0))
        return p;
    try {
        const double w0 = model.value(DeformationGradient(F));
        const double wp = model.value(DeformationGradient(Fp));
        const double wm = model.value(DeformationGradient(Fm));
        if (is_saturated(w0) || is_saturated(wp) || is_saturated(wm)) {
            p.overflow = true;
            return p;
        }
        p.second_difference = (wp + wm - 2.0 * w0) / (h * h);
        p.margin = p.second_difference / std::max(1.0, std::abs(w0));
        p.valid = true;
    }
    catch (const std::domain_error &) {
        // outside the model's domain; caller records a skip
    }
    return p;
}

// Violation acceptance: both the h and h/2 second differences negative, and
// the h-step margin below -threshold.
bool lh_violation(const EnergyModel &model, const Matrix &F, const Vector &a, const Vector &b,
                  double h, double threshold, const LhProbe &coarse) {
    if (!coarse.valid || !(coarse.margin < -threshold))
        return false;
    const LhProbe fine = lh_probe(model, F, a, b, 0.5 * h);
    return fine.valid && fine.second_difference < 0.0;
}

struct SampleOutcome {
    bool tested = false;
    bool overflow = false;
    double margin = kInf;
    bool violated = false;
    Witness witness;
};

ScanReport reduce_outcomes(std::string kind, const std::vector<SampleOutcome> &outcomes,
                           const ScanConfig &config) {
    ScanReport report;
    report.kind = std::move(kind);
    report.config = config;
    for (const auto &o : outcomes) {
        if (!o.tested) {
            ++report.skipped;
            report.overflow_flagged |= o.overflow;
            continue;
        }
        ++report.tested;
        report.overflow_flagged |= o.overflow;
        report.worst_margin = std::min(report.worst_margin, o.margin);
        if (o.violated)
            report.violations.push_back(o.witness);
    }
    return report;
}

} // namespace

void to_json(nlohmann::json &j, const ScanConfig &c) {
    j = nlohmann::json{{"seed", c.seed},       {"samples", c.samples}, {"lo", c.lo},
                       {"hi", c.hi},           {"step", c.step},       {"threshold", c.threshold},
                       {"n", c.n},             {"mode", c.mode == Parallelism::OpenMP ? "openmp" : "serial"}};
}

nlohmann::json ScanReport::to_json() const {
    nlohmann::json j{{"kind", kind},
                     {"tested", tested},
                     {"skipped", skipped},
                     {"worst_margin", worst_margin},
                     {"overflow_flagged", overflow_flagged},
                     {"config", config}};
    if (std::isfinite(min_first_difference))
        j["min_first_difference"] = min_first_difference;
    if (max_discrepancy > 0.0)
        j["max_discrepancy"] = max_discrepancy;
    j["violations"] = nlohmann::json::array();
    for (const auto &w : violations)
        j["violations"].push_back(witness_to_json(w));
    return j;
}

std::string ScanReport::violations_csv() const {
    std::ostringstream out;
    const int n = config.n;
    out << "sample,margin,second_difference,t";
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out << ",F" << i + 1 << j + 1;
    for (int i = 0; i < n; ++i)
        out << ",a" << i + 1;
    for (int i = 0; i < n; ++i)
        out << ",b" << i + 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out << ",F1_" << i + 1 << j + 1;
    out << "\n";
    auto emit_block = [&](const std::vector<double> &vals, std::size_t expected) {
        for (std::size_t i = 0; i < expected; ++i)
            out << "," << (i < vals.size() ? csv_double(vals[i]) : "");
    };
    for (const auto &w : violations) {
        out << w.sample << "," << csv_double(w.margin) << "," << csv_double(w.second_difference)
            << "," << csv_double(w.t);
        emit_block(w.F.size() ? flatten(w.F) : std::vector<double>{}, static_cast<std::size_t>(n) * n);
        emit_block(w.a.size() ? flatten(w.a) : std::vector<double>{}, static_cast<std::size_t>(n));
        emit_block(w.b.size() ? flatten(w.b) : std::vector<double>{}, static_cast<std::size_t>(n));
        emit_block(w.F1.size() ? flatten(w.F1) : std::vector<double>{}, static_cast<std::size_t>(n) * n);
        out << "\n";
    }
    return out.str();
}

ScanReport scalar_convexity_check(const ScalarProfile &profile, double lo, double hi,
                                  const ScanConfig &config) {
    if (!(lo < hi) || !profile.in_domain(lo) || !profile.in_domain(hi))
        throw std::invalid_argument("scalar_convexity_check: interval outside profile domain");

    const double h = config.step * (hi - lo);
    std::vector<SampleOutcome> outcomes(static_cast<std::size_t>(config.samples));
    std::vector<double> first_diffs(static_cast<std::size_t>(config.samples), kInf);

    for_each_index(config.samples, config.mode, [&](std::int64_t i) {
        auto rng = sample_stream(config.seed, i);
        std::uniform_real_distribution<double> unif(lo, hi);
        SampleOutcome &o = outcomes[static_cast<std::size_t>(i)];
        try {
            // midpoint convexity on a random pair
            const double x = unif(rng), y = unif(rng);
            const double mid = 0.5 * (x + y);
            const double gap = 0.5 * (profile.value(x) + profile.value(y)) - profile.value(mid);
            const double margin_mid = gap / std::max(1.0, std::abs(profile.value(mid)));

            // local second and first differences at a random interior point
            std::uniform_real_distribution<double> interior(lo + h, hi - h);
            const double z = interior(rng);
            const double vm = profile.value(z - h), v0 = profile.value(z), vp = profile.value(z + h);
            const double d2 = (vp + vm - 2.0 * v0) / (h * h);
            const double margin_d2 = d2 / std::max(1.0, std::abs(v0));
            first_diffs[static_cast<std::size_t>(i)] = (vp - v0) / h;

            o.tested = true;
            o.margin = std::min(margin_mid, margin_d2);
            if (o.margin < -config.threshold) {
                o.violated = true;
                o.witness.sample = i;
                o.witness.t = margin_d2 < margin_mid ? z : mid;
                o.witness.second_difference = d2;
                o.witness.margin = o.margin;
            }
        }
        catch (const std::domain_error &) {
            o.tested = false;
        }
    });

    ScanReport report = reduce_outcomes("scalar-convexity", outcomes, config);
    for (double fd : first_diffs)
        report.min_first_difference = std::min(report.min_first_difference, fd);
    return report;
}

ScanReport rank_one_convexity_scan(const EnergyModel &model, const ScanConfig &config) {
    std::vector<SampleOutcome> outcomes(static_cast<std::size_t>(config.samples));

    for_each_index(config.samples, config.mode, [&](std::int64_t i) {
        auto rng = sample_stream(config.seed, i);
        SampleOutcome &o = outcomes[static_cast<std::size_t>(i)];
        const Matrix F = random_deformation(config.n, config.lo, config.hi, rng);
        const Vector a = random_unit_vector(config.n, rng);
        const Vector b = random_unit_vector(config.n, rng);
        const double h = config.step * (1.0 + F.norm());

        const LhProbe probe = lh_probe(model, F, a, b, h);
        o.overflow = probe.overflow;
        if (!probe.valid)
            return;
        o.tested = true;
        o.margin = probe.margin;
        if (lh_violation(model, F, a, b, h, config.threshold, probe)) {
            o.violated = true;
            o.witness = Witness{i, F, a, b, Matrix(), 0.0, probe.second_difference, probe.margin};
        }
    });

    return reduce_outcomes("rank-one", outcomes, config);
}

namespace {

// Second differences of the spectral part along F0 + t (F1 - F0), over a
// fixed t grid. Points where a singular value leaves the profile domain are
// masked out.
constexpr int kSegmentPoints = 33;

struct SegmentProbe {
    double margin = kInf;
    double second_difference = 0.0;
    double t = 0.0;
    int valid_points = 0;
};

SegmentProbe segment_probe(const EnergyModel &model, const Matrix &F0, const Matrix &F1) {
    SegmentProbe probe;
    const double dt = 1.0 / (kSegmentPoints - 1);
    double values[kSegmentPoints];
    bool valid[kSegmentPoints];
    for (int j = 0; j < kSegmentPoints; ++j) {
        const double t = j * dt;
        const Matrix Ft = F0 + t * (F1 - F0);
        const Vector sigma = singular_values(Ft);
        valid[j] = sigma.minCoeff() > 1e-9 || model.profile().in_domain(0.0);
        if (valid[j]) {
            values[j] = model.spectral_part(Ft);
            ++probe.valid_points;
        }
    }
    for (int j = 1; j + 1 < kSegmentPoints; ++j) {
        if (!valid[j - 1] || !valid[j] || !valid[j + 1])
            continue;
        const double scale = std::max({1.0, std::abs(values[j - 1]), std::abs(values[j]),
                                       std::abs(values[j + 1])});
        const double d2 = (values[j + 1] + values[j - 1] - 2.0 * values[j]) / (dt * dt);
        const double margin = d2 / scale;
        if (margin < probe.margin) {
            probe.margin = margin;
            probe.second_difference = d2;
            probe.t = j * dt;
        }
    }
    return probe;
}

// Confirmation at half spacing around the worst t.
bool segment_violation(const EnergyModel &model, const Matrix &F0, const Matrix &F1,
                       const SegmentProbe &probe, double threshold) {
    if (!(probe.margin < -threshold))
        return false;
    const double dt = 0.5 / (kSegmentPoints - 1);
    const Matrix d = F1 - F0;
    auto at = [&](double t) { return model.spectral_part(F0 + t * d); };
    try {
        const double d2 = at(probe.t + dt) + at(probe.t - dt) - 2.0 * at(probe.t);
        return d2 < 0.0;
    }
    catch (const std::domain_error &) {
        return false;
    }
}

} // namespace

ScanReport segment_convexity_scan(const EnergyModel &model, const ScanConfig &config) {
    if (model.kind() != EnergyModel::Kind::SpectralSum)
        throw std::invalid_argument("segment_convexity_scan: requires a spectral-sum model");

    std::vector<SampleOutcome> outcomes(static_cast<std::size_t>(config.samples));

    for_each_index(config.samples, config.mode, [&](std::int64_t i) {
        auto rng = sample_stream(config.seed, i);
        SampleOutcome &o = outcomes[static_cast<std::size_t>(i)];
        const Matrix F0 = random_deformation(config.n, config.lo, config.hi, rng);
        const Matrix F1 = random_deformation(config.n, config.lo, config.hi, rng);
        const SegmentProbe probe = segment_probe(model, F0, F1);
        if (probe.valid_points < 5 || !std::isfinite(probe.margin))
            return;
        o.tested = true;
        o.margin = probe.margin;
        if (segment_violation(model, F0, F1, probe, config.threshold)) {
            o.violated = true;
            o.witness = Witness{i, F0, Vector(), Vector(), F1, probe.t, probe.second_difference,
                                probe.margin};
        }
    });

    return reduce_outcomes("segment", outcomes, config);
}

std::int64_t EllipticityMap::violating_cells() const {
    std::int64_t count = 0;
    for (auto v : violation)
        count += v;
    return count;
}

nlohmann::json EllipticityMap::to_json() const {
    nlohmann::json j{{"lo", grid.lo},
                     {"hi", grid.hi},
                     {"cells_per_axis", grid.cells_per_axis},
                     {"directions", grid.directions},
                     {"config", config},
                     {"axis", axis},
                     {"violating_cells", violating_cells()}};
    j["verdicts"] = nlohmann::json::array();
    for (auto v : violation)
        j["verdicts"].push_back(static_cast<int>(v));
    j["witnesses"] = nlohmann::json::array();
    for (const auto &w : witnesses)
        j["witnesses"].push_back(witness_to_json(w));
    return j;
}

EllipticityMap ellipticity_probe(const EnergyModel &model, const EllipticityGrid &grid,
                                 const ScanConfig &config) {
    if (grid.cells_per_axis < 1 || grid.directions < 1)
        throw std::invalid_argument("ellipticity_probe: invalid grid");

    EllipticityMap map;
    map.grid = grid;
    map.config = config;
    const int m = grid.cells_per_axis;
    map.axis.resize(static_cast<std::size_t>(m));
    // cell centers, so a marginally elliptic boundary never sits exactly on a probe
    for (int j = 0; j < m; ++j)
        map.axis[static_cast<std::size_t>(j)] = grid.lo + (j + 0.5) * (grid.hi - grid.lo) / m;

    std::int64_t cells = 1;
    for (int d = 0; d < config.n; ++d)
        cells *= m;
    map.violation.assign(static_cast<std::size_t>(cells), 0);
    std::vector<Witness> cell_witness(static_cast<std::size_t>(cells));

    for_each_index(cells, config.mode, [&](std::int64_t cell) {
        auto rng = sample_stream(config.seed, cell);
        Vector diag(config.n);
        std::int64_t rest = cell;
        for (int d = 0; d < config.n; ++d) {
            diag[d] = map.axis[static_cast<std::size_t>(rest % m)];
            rest /= m;
        }
        const Matrix F = diag.asDiagonal();
        const double h = config.step * (1.0 + F.norm());
        for (int dir = 0; dir < grid.directions; ++dir) {
            const Vector a = random_unit_vector(config.n, rng);
            const Vector b = random_unit_vector(config.n, rng);
            const LhProbe probe = lh_probe(model, F, a, b, h);
            if (!probe.valid)
                continue;
            if (lh_violation(model, F, a, b, h, config.threshold, probe)) {
                map.violation[static_cast<std::size_t>(cell)] = 1;
                cell_witness[static_cast<std::size_t>(cell)] =
                    Witness{cell, F, a, b, Matrix(), 0.0, probe.second_difference, probe.margin};
                break;
            }
        }
    });

    for (std::int64_t cell = 0; cell < cells; ++cell)
        if (map.violation[static_cast<std::size_t>(cell)])
            map.witnesses.push_back(cell_witness[static_cast<std::size_t>(cell)]);
    return map;
}

ScanReport extension_agreement_check(const EnergyModel &original, const EnergyModel &extension,
                                     double lo, double hi, const ScanConfig &config) {
    std::vector<SampleOutcome> outcomes(static_cast<std::size_t>(config.samples));

    for_each_index(config.samples, config.mode, [&](std::int64_t i) {
        auto rng = sample_stream(config.seed, i);
        SampleOutcome &o = outcomes[static_cast<std::size_t>(i)];
        const Matrix F = random_deformation(config.n, lo, hi, rng);
        try {
            const DeformationGradient dg(F);
            const double v0 = original.value(dg);
            const double v1 = extension.value(dg);
            const double discrepancy = std::abs(v1 - v0) / std::max(1.0, std::abs(v0));
            o.tested = true;
            o.margin = -discrepancy;
            if (discrepancy > config.threshold) {
                o.violated = true;
                o.witness = Witness{i, F, Vector(), Vector(), Matrix(), 0.0, discrepancy,
                                    -discrepancy};
            }
        }
        catch (const std::domain_error &) {
            o.tested = false;
        }
    });

    ScanReport report = reduce_outcomes("agreement", outcomes, config);
    report.max_discrepancy = std::isfinite(report.worst_margin) ? -report.worst_margin : 0.0;
    return report;
}

ScanReport coercivity_check(const EnergyModel &model, const ScanConfig &config) {
    if (model.name() != "hencky-ext")
        throw std::invalid_argument("coercivity_check: model must be the Hencky extension");
    const double mu = model.params().at("mu").get<double>();
    const double e13 = std::exp(1.0 / 3.0);

    auto lower_bound = [&](double lmax) {
        return mu * (-1.0 / 3.0 + 2.0 / e13 * (guarded_exp(lmax - e13) - 1.0) - 4.0 * std::log(lmax));
    };

    std::vector<SampleOutcome> outcomes(static_cast<std::size_t>(config.samples));

    for_each_index(config.samples, config.mode, [&](std::int64_t i) {
        auto rng = sample_stream(config.seed, i);
        SampleOutcome &o = outcomes[static_cast<std::size_t>(i)];
        const Matrix F = random_deformation(config.n, config.lo, config.hi, rng);
        const Vector sigma = singular_values(F);
        const double lmax = sigma.maxCoeff();
        if (!(lmax > e13))
            return; // agreement-region sample; the bound only covers lmax > e^{1/3}
        const double W = model.value(DeformationGradient(F));
        const double bound = lower_bound(lmax);
        if (is_saturated(W) || is_saturated(bound)) {
            o.overflow = true;
            return;
        }
        o.tested = true;
        o.margin = (W - bound) / std::max(1.0, std::abs(bound));
        double margin_growth = kInf;
        const double normF = F.norm();
        if (normF >= 50.0)
            margin_growth = (W - std::pow(normF, 4)) / std::max(1.0, std::pow(normF, 4));
        o.margin = std::min(o.margin, margin_growth);
        if (o.margin < -config.threshold) {
            o.violated = true;
            o.witness = Witness{i, F, Vector(), Vector(), Matrix(), 0.0, o.margin, o.margin};
        }
    });

    ScanReport report = reduce_outcomes("coercivity", outcomes, config);

    // Deterministic ray probes t * I: the explicit bound, then growth of
    // W / ||F||^p along the ray for p in {1, 2, 4}.
    auto ray_value = [&](double t) {
        return model.value(DeformationGradient(t * Matrix::Identity(config.n, config.n)));
    };
    for (double t : {2.0, 5.0, 10.0}) {
        const double W = ray_value(t);
        const double bound = lower_bound(t);
        if (is_saturated(W) || is_saturated(bound)) {
            report.overflow_flagged = true;
            continue;
        }
        ++report.tested;
        const double margin = (W - bound) / std::max(1.0, std::abs(bound));
        report.worst_margin = std::min(report.worst_margin, margin);
        if (margin < -config.threshold) {
            Witness w;
            w.sample = -1;
            w.F = t * Matrix::Identity(config.n, config.n);
            w.margin = margin;
            w.second_difference = margin;
            report.violations.push_back(w);
        }
    }
    const double ray_ts[] = {5.0, 10.0, 20.0, 30.0};
    for (double p : {1.0, 2.0, 4.0}) {
        double previous = -kInf;
        for (double t : ray_ts) {
            const double W = ray_value(t);
            if (is_saturated(W)) {
                report.overflow_flagged = true;
                continue;
            }
            const double ratio = W / std::pow(t * std::sqrt(double(config.n)), p);
            if (!(ratio > previous)) {
                Witness w;
                w.sample = -2;
                w.t = t;
                w.margin = ratio - previous;
                report.violations.push_back(w);
            }
            previous = ratio;
        }
    }
    return report;
}

namespace {

// Most negative rank-one margin over canonical and a few random directions.
struct DirectionSet {
    std::vector<std::pair<Vector, Vector>> dirs;
};

DirectionSet probe_directions(int n, std::mt19937_64 &rng, int extra) {
    DirectionSet set;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            Vector a = Vector::Zero(n), b = Vector::Zero(n);
            a[i] = 1.0;
            b[j] = 1.0;
            set.dirs.emplace_back(a, b);
        }
    for (int k = 0; k < extra; ++k)
        set.dirs.emplace_back(random_unit_vector(n, rng), random_unit_vector(n, rng));
    return set;
}

} // namespace

DirectedResult directed_rank_one_search(const EnergyModel &model, const ScanConfig &config) {
    DirectedResult result;
    auto rng = sample_stream(config.seed, 0);
    const DirectionSet set = probe_directions(config.n, rng, 8);

    auto margin_at = [&](double s, const Vector &a, const Vector &b, LhProbe *out) {
        Vector diag = Vector::Ones(config.n);
        diag[0] = s;
        const Matrix F = diag.asDiagonal();
        const double h = config.step * (1.0 + F.norm());
        const LhProbe p = lh_probe(model, F, a, b, h);
        if (out)
            *out = p;
        return p.valid ? p.margin : kInf;
    };

    // coarse grid
    const int grid_points = 48;
    double best_margin = kInf, best_s = 0.0;
    Vector best_a, best_b;
    for (int g = 0; g < grid_points; ++g) {
        const double s = config.lo * std::pow(config.hi / config.lo, double(g) / (grid_points - 1));
        for (const auto &[a, b] : set.dirs) {
            const double m = margin_at(s, a, b, nullptr);
            if (m < best_margin) {
                best_margin = m;
                best_s = s;
                best_a = a;
                best_b = b;
            }
        }
    }
    if (!std::isfinite(best_margin))
        return result;

    // coordinate refinement of the stretch
    double delta = 0.25;
    for (int iter = 0; iter < 80 && delta > 1e-6; ++iter) {
        bool improved = false;
        for (double factor : {1.0 + delta, 1.0 / (1.0 + delta)}) {
            const double s = best_s * factor;
            if (s < config.lo || s > config.hi)
                continue;
            const double m = margin_at(s, best_a, best_b, nullptr);
            if (m < best_margin) {
                best_margin = m;
                best_s = s;
                improved = true;
            }
        }
        if (!improved)
            delta *= 0.6;
    }

    LhProbe probe;
    margin_at(best_s, best_a, best_b, &probe);
    Vector diag = Vector::Ones(config.n);
    diag[0] = best_s;
    const Matrix F = diag.asDiagonal();
    const double h = config.step * (1.0 + F.norm());
    if (lh_violation(model, F, best_a, best_b, h, config.threshold, probe)) {
        result.found = true;
        result.witness = Witness{0, F, best_a, best_b, Matrix(), 0.0, probe.second_difference,
                                 probe.margin};
    }
    return result;
}

DirectedResult directed_segment_search(const EnergyModel &model, const ScanConfig &config) {
    DirectedResult result;

    auto diag_matrix = [&](double s) {
        Vector diag = Vector::Ones(config.n);
        diag[0] = s;
        return Matrix(diag.asDiagonal());
    };
    auto probe_pair = [&](double s0, double s1) {
        return segment_probe(model, diag_matrix(s0), diag_matrix(s1));
    };

    const int grid_points = 24;
    double best_margin = kInf, best_s0 = 0.0, best_s1 = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double s0 = config.lo * std::pow(config.hi / config.lo, double(i) / (grid_points - 1));
        for (int j = i + 1; j < grid_points; ++j) {
            const double s1 = config.lo * std::pow(config.hi / config.lo, double(j) / (grid_points - 1));
            const SegmentProbe p = probe_pair(s0, s1);
            if (p.valid_points >= 5 && p.margin < best_margin) {
                best_margin = p.margin;
                best_s0 = s0;
                best_s1 = s1;
            }
        }
    }
    if (!std::isfinite(best_margin))
        return result;

    double delta = 0.25;
    for (int iter = 0; iter < 60 && delta > 1e-6; ++iter) {
        bool improved = false;
        const double c0 = best_s0, c1 = best_s1;
        for (double f0 : {1.0 + delta, 1.0, 1.0 / (1.0 + delta)})
            for (double f1 : {1.0 + delta, 1.0, 1.0 / (1.0 + delta)}) {
                const double s0 = c0 * f0, s1 = c1 * f1;
                if (s0 < config.lo || s1 > config.hi || s0 >= s1)
                    continue;
                const SegmentProbe p = probe_pair(s0, s1);
                if (p.valid_points >= 5 && p.margin < best_margin) {
                    best_margin = p.margin;
                    best_s0 = s0;
                    best_s1 = s1;
                    improved = true;
                }
            }
        if (!improved)
            delta *= 0.6;
    }

    const Matrix F0 = diag_matrix(best_s0), F1 = diag_matrix(best_s1);
    const SegmentProbe probe = probe_pair(best_s0, best_s1);
    if (segment_violation(model, F0, F1, probe, config.threshold)) {
        result.found = true;
        result.witness = Witness{0, F0, Vector(), Vector(), F1, probe.t, probe.second_difference,
                                 probe.margin};
    }
    return result;
}

double recompute_rank_one_witness(const EnergyModel &model, const Witness &w, double h) {
    const Matrix dir = w.a * w.b.transpose();
    const long double w0 = model.value(DeformationGradient(w.F));
    const long double wp = model.value(DeformationGradient(Matrix(w.F + h * dir)));
    const long double wm = model.value(DeformationGradient(Matrix(w.F - h * dir)));
    return static_cast<double>((wp + wm - 2.0L * w0) / (static_cast<long double>(h) * h));
}

double recompute_segment_witness(const EnergyModel &model, const Witness &w, double dt) {
    const Matrix d = w.F1 - w.F;
    const long double v0 = model.spectral_part(w.F + w.t * d);
    const long double vp = model.spectral_part(w.F + (w.t + dt) * d);
    const long double vm = model.spectral_part(w.F + (w.t - dt) * d);
    return static_cast<double>((vp + vm - 2.0L * v0) / (static_cast<long double>(dt) * dt));
}

} // namespace polyext
