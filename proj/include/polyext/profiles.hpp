////////////////////////////////////////////////////////////////////////////////
// profiles.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Piecewise scalar profiles lambda -> phi(lambda) with value / first / second
//  derivative evaluators per branch. These carry the singular-value profiles
//  of all the energies in the library as well as the volumetric terms.
//
//  Branch convention: with breakpoints b_0 < ... < b_{m-1}, branch i covers
//  [b_{i-1}, b_i); a breakpoint itself evaluates through the branch on its
//  right. Values agree across breakpoints by construction, so the choice only
//  shows in the derivative evaluators, which report right-hand derivatives at
//  kinks.
*///////////////////////////////////////////////////////////////////////////////
#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace polyext {

// Exponentials saturate at exp(700) to keep large-strain probes finite.
inline double guarded_exp(double x) { return std::exp(x < 700.0 ? x : 700.0); }

// True when a value has hit the saturation range of guarded_exp.
inline bool is_saturated(double v) { return std::abs(v) >= 1e300; }

struct ProfileBranch {
    std::function<double(double)> value;
    std::function<double(double)> d1;
    std::function<double(double)> d2;
};

class ScalarProfile {
public:
    ScalarProfile() = default;
    ScalarProfile(std::string name, double domain_lo, bool domain_lo_inclusive,
                  std::vector<double> breakpoints, std::vector<ProfileBranch> branches);

    double value(double x) const;
    double d1(double x) const;
    double d2(double x) const;

    // Evaluate a specific branch's formulas, regardless of where x lies.
    // Used by the breakpoint-continuity checks.
    double branch_value(std::size_t i, double x) const;
    double branch_d1(std::size_t i, double x) const;
    double branch_d2(std::size_t i, double x) const;

    const std::vector<double> &breakpoints() const { return m_breakpoints; }
    std::size_t branch_count() const { return m_branches.size(); }
    const std::string &name() const { return m_name; }

    bool in_domain(double x) const;
    double domain_lo() const { return m_domain_lo; }

    // x within rel_tol (relative to max(1, |breakpoint|)) of some breakpoint.
    bool near_breakpoint(double x, double rel_tol = 1e-9) const;

private:
    std::size_t branch_index(double x) const;

    std::string m_name;
    double m_domain_lo = -std::numeric_limits<double>::infinity();
    bool m_domain_lo_inclusive = true;
    std::vector<double> m_breakpoints;
    std::vector<ProfileBranch> m_branches;
};

// phi_alpha, alpha in (1/2, 1]: constant below 1/(2 alpha), then
// alpha l^2 - 2 l + 1 + ln(l)/(2 alpha). The constant equals the right
// branch's value at the breakpoint.
ScalarProfile phi_alpha_profile(double alpha);

// phi_gamma, gamma <= 1: constant -(gamma-1)^2 below e^{gamma-1},
// ln^2 + (2-2 gamma) ln in the middle, exponential continuation above e^gamma.
ScalarProfile phi_gamma_profile(double gamma);

// Volumetric part psi_Lambda: (Lambda/2) ln^2(t) up to t = e, exponential
// continuation beyond; C^1 at the breakpoint with psi'(e) = Lambda/e.
ScalarProfile psi_vol_profile(double Lambda);

// ln^2(lambda) on (0, inf).
ScalarProfile log_squared_profile();

// (lambda - 1)^2.
ScalarProfile squared_distance_profile();

// lambda^2.
ScalarProfile square_profile();

// The double well (x^2 - 1)^2 and its convex hull (0 inside (-1, 1)).
ScalarProfile double_well_profile();
ScalarProfile double_well_hull_profile();

// Middle profile of the Valanis-Landel extension: constant below 1 - eps,
// w(l) + q ln(l) with q = w''(1)/8 in the middle, tangent-line continuation
// above 1 + eps.
ScalarProfile valanis_landel_profile(const ScalarProfile &w, double eps, double q);

// factor * profile, breakpoints preserved.
ScalarProfile scale_profile(const ScalarProfile &p, double factor);

// Tangent-line continuation of g beyond [a, b]. Convexity of g on [a, b] is
// verified by second-difference sampling; throws std::invalid_argument when a
// sampled non-convexity is found.
ScalarProfile convex_extend_scalar(const ScalarProfile &g, double a, double b);

// Largest relative value mismatch across all breakpoints (adjacent branches
// evaluated at the same point). Zero for an exactly continuous profile.
double max_breakpoint_mismatch(const ScalarProfile &p);

// Largest derivative mismatch across breakpoints; nonzero at genuine kinks.
double max_breakpoint_d1_mismatch(const ScalarProfile &p);

} // namespace polyext
