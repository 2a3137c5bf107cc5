#include <polyext/profiles.hpp>

#include <algorithm>
#include <stdexcept>

namespace polyext {

ScalarProfile::ScalarProfile(std::string name, double domain_lo, bool domain_lo_inclusive,
                             std::vector<double> breakpoints, std::vector<ProfileBranch> branches)
    : m_name(std::move(name)),
      m_domain_lo(domain_lo),
      m_domain_lo_inclusive(domain_lo_inclusive),
      m_breakpoints(std::move(breakpoints)),
      m_branches(std::move(branches)) {
    if (m_branches.size() != m_breakpoints.size() + 1)
        throw std::invalid_argument("ScalarProfile: need exactly one branch per interval");
    if (!std::is_sorted(m_breakpoints.begin(), m_breakpoints.end()))
        throw std::invalid_argument("ScalarProfile: breakpoints must be ascending");
}

bool ScalarProfile::in_domain(double x) const {
    if (std::isnan(x))
        return false;
    return m_domain_lo_inclusive ? x >= m_domain_lo : x > m_domain_lo;
}

std::size_t ScalarProfile::branch_index(double x) const {
    const auto it = std::upper_bound(m_breakpoints.begin(), m_breakpoints.end(), x);
    return static_cast<std::size_t>(it - m_breakpoints.begin());
}

double ScalarProfile::value(double x) const {
    if (!in_domain(x))
        throw std::domain_error(m_name + ": argument " + std::to_string(x) + " outside domain");
    return m_branches[branch_index(x)].value(x);
}

double ScalarProfile::d1(double x) const {
    if (!in_domain(x))
        throw std::domain_error(m_name + ": argument outside domain");
    return m_branches[branch_index(x)].d1(x);
}

double ScalarProfile::d2(double x) const {
    if (!in_domain(x))
        throw std::domain_error(m_name + ": argument outside domain");
    return m_branches[branch_index(x)].d2(x);
}

double ScalarProfile::branch_value(std::size_t i, double x) const { return m_branches.at(i).value(x); }

double ScalarProfile::branch_d1(std::size_t i, double x) const { return m_branches.at(i).d1(x); }

double ScalarProfile::branch_d2(std::size_t i, double x) const { return m_branches.at(i).d2(x); }

bool ScalarProfile::near_breakpoint(double x, double rel_tol) const {
    for (double b : m_breakpoints)
        if (std::abs(x - b) <= rel_tol * std::max(1.0, std::abs(b)))
            return true;
    return false;
}

ScalarProfile phi_alpha_profile(double alpha) {
    if (!(alpha > 0.5 && alpha <= 1.0))
        throw std::invalid_argument("phi_alpha: alpha must lie in (1/2, 1]");
    const double bp = 1.0 / (2.0 * alpha);
    auto quad = [alpha](double l) { return alpha * l * l - 2.0 * l + 1.0 + std::log(l) / (2.0 * alpha); };
    const double plateau = quad(bp);
    return ScalarProfile(
        "phi_alpha", 0.0, false, {bp},
        {ProfileBranch{[plateau](double) { return plateau; },
                       [](double) { return 0.0; },
                       [](double) { return 0.0; }},
         ProfileBranch{quad,
                       [alpha](double l) { return 2.0 * alpha * l - 2.0 + 1.0 / (2.0 * alpha * l); },
                       [alpha](double l) { return 2.0 * alpha - 1.0 / (2.0 * alpha * l * l); }}});
}

ScalarProfile phi_gamma_profile(double gamma) {
    if (!(gamma <= 1.0))
        throw std::invalid_argument("phi_gamma: gamma must be <= 1");
    const double lo = std::exp(gamma - 1.0);
    const double hi = std::exp(gamma);
    const double plateau = -(gamma - 1.0) * (gamma - 1.0);
    const double tail_base = -gamma * gamma + 2.0 * gamma;
    const double tail_scale = 2.0 / hi;
    return ScalarProfile(
        "phi_gamma", 0.0, false, {lo, hi},
        {ProfileBranch{[plateau](double) { return plateau; },
                       [](double) { return 0.0; },
                       [](double) { return 0.0; }},
         ProfileBranch{[gamma](double l) {
                           const double ll = std::log(l);
                           return ll * ll + (2.0 - 2.0 * gamma) * ll;
                       },
                       [gamma](double l) { return (2.0 * std::log(l) + 2.0 - 2.0 * gamma) / l; },
                       [gamma](double l) { return (2.0 * gamma - 2.0 * std::log(l)) / (l * l); }},
         ProfileBranch{[tail_base, tail_scale, hi](double l) {
                           return tail_base + tail_scale * (guarded_exp(l - hi) - 1.0);
                       },
                       [tail_scale, hi](double l) { return tail_scale * guarded_exp(l - hi); },
                       [tail_scale, hi](double l) { return tail_scale * guarded_exp(l - hi); }}});
}

ScalarProfile psi_vol_profile(double Lambda) {
    if (!(Lambda >= 0.0))
        throw std::invalid_argument("psi_vol: Lambda must be >= 0");
    const double e = std::exp(1.0);
    return ScalarProfile(
        "psi_vol", 0.0, false, {e},
        {ProfileBranch{[Lambda](double t) {
                           const double lt = std::log(t);
                           return 0.5 * Lambda * lt * lt;
                       },
                       [Lambda](double t) { return Lambda * std::log(t) / t; },
                       [Lambda](double t) { return Lambda * (1.0 - std::log(t)) / (t * t); }},
         ProfileBranch{[Lambda, e](double t) { return 0.5 * Lambda + Lambda / e * (guarded_exp(t - e) - 1.0); },
                       [Lambda, e](double t) { return Lambda / e * guarded_exp(t - e); },
                       [Lambda, e](double t) { return Lambda / e * guarded_exp(t - e); }}});
}

ScalarProfile log_squared_profile() {
    return ScalarProfile(
        "log_squared", 0.0, false, {},
        {ProfileBranch{[](double l) {
                           const double ll = std::log(l);
                           return ll * ll;
                       },
                       [](double l) { return 2.0 * std::log(l) / l; },
                       [](double l) { return (2.0 - 2.0 * std::log(l)) / (l * l); }}});
}

ScalarProfile squared_distance_profile() {
    return ScalarProfile(
        "squared_distance", -std::numeric_limits<double>::infinity(), false, {},
        {ProfileBranch{[](double l) { return (l - 1.0) * (l - 1.0); },
                       [](double l) { return 2.0 * (l - 1.0); },
                       [](double) { return 2.0; }}});
}

ScalarProfile square_profile() {
    return ScalarProfile(
        "square", -std::numeric_limits<double>::infinity(), false, {},
        {ProfileBranch{[](double l) { return l * l; },
                       [](double l) { return 2.0 * l; },
                       [](double) { return 2.0; }}});
}

ScalarProfile double_well_profile() {
    auto well = [](double x) {
        const double u = x * x - 1.0;
        return u * u;
    };
    return ScalarProfile(
        "double_well", -std::numeric_limits<double>::infinity(), false, {},
        {ProfileBranch{well,
                       [](double x) { return 4.0 * x * (x * x - 1.0); },
                       [](double x) { return 12.0 * x * x - 4.0; }}});
}

ScalarProfile double_well_hull_profile() {
    auto well = [](double x) {
        const double u = x * x - 1.0;
        return u * u;
    };
    auto well_d1 = [](double x) { return 4.0 * x * (x * x - 1.0); };
    auto well_d2 = [](double x) { return 12.0 * x * x - 4.0; };
    auto zero = [](double) { return 0.0; };
    return ScalarProfile(
        "double_well_hull", -std::numeric_limits<double>::infinity(), false, {-1.0, 1.0},
        {ProfileBranch{well, well_d1, well_d2},
         ProfileBranch{zero, zero, zero},
         ProfileBranch{well, well_d1, well_d2}});
}

ScalarProfile valanis_landel_profile(const ScalarProfile &w, double eps, double q) {
    if (!(eps > 0.0 && eps < 0.5))
        throw std::invalid_argument("valanis_landel_profile: eps must lie in (0, 1/2)");
    const double lo = 1.0 - eps;
    const double hi = 1.0 + eps;
    const double plateau = w.value(lo) + q * std::log(lo);
    const double hi_value = w.value(hi) + q * std::log(hi);
    const double hi_slope = w.d1(hi) + q / hi;
    return ScalarProfile(
        "valanis_landel", 0.0, false, {lo, hi},
        {ProfileBranch{[plateau](double) { return plateau; },
                       [](double) { return 0.0; },
                       [](double) { return 0.0; }},
         ProfileBranch{[w, q](double l) { return w.value(l) + q * std::log(l); },
                       [w, q](double l) { return w.d1(l) + q / l; },
                       [w, q](double l) { return w.d2(l) - q / (l * l); }},
         ProfileBranch{[hi_value, hi_slope, hi](double l) { return hi_value + hi_slope * (l - hi); },
                       [hi_slope](double) { return hi_slope; },
                       [](double) { return 0.0; }}});
}

ScalarProfile scale_profile(const ScalarProfile &p, double factor) {
    std::vector<ProfileBranch> branches;
    for (std::size_t i = 0; i < p.branch_count(); ++i) {
        branches.push_back(ProfileBranch{
            [p, i, factor](double x) { return factor * p.branch_value(i, x); },
            [p, i, factor](double x) { return factor * p.branch_d1(i, x); },
            [p, i, factor](double x) { return factor * p.branch_d2(i, x); }});
    }
    return ScalarProfile(p.name() + "_scaled", p.domain_lo(), p.in_domain(p.domain_lo()),
                         p.breakpoints(), std::move(branches));
}

ScalarProfile convex_extend_scalar(const ScalarProfile &g, double a, double b) {
    if (!(a < b) || !g.in_domain(a) || !g.in_domain(b))
        throw std::invalid_argument("convex_extend_scalar: invalid interval");

    // Second-difference convexity scan of g on [a, b].
    const int samples = 2000;
    const double h = (b - a) / (samples + 1);
    for (int i = 1; i <= samples; ++i) {
        const double x = a + i * h;
        const double d2 = g.value(x + h) - 2.0 * g.value(x) + g.value(x - h);
        if (d2 < -1e-10 * std::max(1.0, std::abs(g.value(x))))
            throw std::invalid_argument("convex_extend_scalar: sampled non-convexity inside [a, b]");
    }

    const double va = g.value(a), sa = g.d1(a);
    const double vb = g.value(b), sb = g.d1(b);

    std::vector<double> breaks{a};
    for (double bp : g.breakpoints())
        if (bp > a && bp < b)
            breaks.push_back(bp);
    breaks.push_back(b);

    std::vector<ProfileBranch> branches;
    branches.push_back(ProfileBranch{[va, sa, a](double x) { return va + sa * (x - a); },
                                     [sa](double) { return sa; },
                                     [](double) { return 0.0; }});
    const std::size_t middle_branches = breaks.size() - 1;
    for (std::size_t i = 0; i < middle_branches; ++i) {
        branches.push_back(ProfileBranch{[g](double x) { return g.value(x); },
                                         [g](double x) { return g.d1(x); },
                                         [g](double x) { return g.d2(x); }});
    }
    branches.push_back(ProfileBranch{[vb, sb, b](double x) { return vb + sb * (x - b); },
                                     [sb](double) { return sb; },
                                     [](double) { return 0.0; }});

    return ScalarProfile(g.name() + "_convex_ext",
                         -std::numeric_limits<double>::infinity(), false,
                         std::move(breaks), std::move(branches));
}

double max_breakpoint_mismatch(const ScalarProfile &p) {
    double worst = 0.0;
    const auto &bps = p.breakpoints();
    for (std::size_t i = 0; i < bps.size(); ++i) {
        const double left = p.branch_value(i, bps[i]);
        const double right = p.branch_value(i + 1, bps[i]);
        worst = std::max(worst, std::abs(left - right) / std::max(1.0, std::abs(right)));
    }
    return worst;
}

double max_breakpoint_d1_mismatch(const ScalarProfile &p) {
    double worst = 0.0;
    const auto &bps = p.breakpoints();
    for (std::size_t i = 0; i < bps.size(); ++i) {
        const double left = p.branch_d1(i, bps[i]);
        const double right = p.branch_d1(i + 1, bps[i]);
        worst = std::max(worst, std::abs(left - right) / std::max(1.0, std::abs(right)));
    }
    return worst;
}

} // namespace polyext
