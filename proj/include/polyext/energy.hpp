////////////////////////////////////////////////////////////////////////////////
// energy.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Isotropic energy functions on GL+(n). Most models are of spectral-sum form
//
//      W(F) = sum_i phi(lambda_i) + h(det F) - c * ln(det F)
//
//  with a scalar profile phi, an optional volumetric term h and a logarithmic
//  volumetric coefficient c; the exponentiated Hencky energy is kept in
//  closed form. Every spectral-sum model has an analytic gradient
//
//      dW/dF = sum_i phi'(lambda_i) u_i v_i^T + (h'(d) - c/d) * d * F^{-T}
//
//  with u_i, v_i the left/right singular vectors and d = det F.
*///////////////////////////////////////////////////////////////////////////////
#pragma once

#include <polyext/profiles.hpp>
#include <polyext/tensor.hpp>

#include <json.hpp>

#include <array>
#include <functional>
#include <optional>
#include <string>

namespace polyext {

// Shear modulus mu plus either the first Lame parameter Lambda or the bulk
// modulus kappa as the primary volumetric parameter; the other one follows
// from kappa = Lambda + 2 mu / n once the dimension is known.
struct LameParameters {
    double mu = 1.0;
    double primary = 0.0;
    bool kappa_primary = false;

    static LameParameters from_lambda(double mu, double lambda);
    static LameParameters from_kappa(double mu, double kappa);

    double lambda(int n) const { return kappa_primary ? primary - 2.0 * mu / n : primary; }
    double kappa(int n) const { return kappa_primary ? primary : primary + 2.0 * mu / n; }
};

struct ExpHenckyParameters {
    LameParameters lame;
    double k = 1.0;
    double k_hat = 1.0;
};

class EnergyModel {
public:
    enum class Kind { SpectralSum, ClosedForm };

    static EnergyModel spectral_sum(std::string name, ScalarProfile phi,
                                    std::optional<ScalarProfile> volumetric,
                                    double vol_log_coeff, nlohmann::json params);
    static EnergyModel closed_form(std::string name,
                                   std::function<double(const Matrix &)> value,
                                   std::function<Matrix(const Matrix &)> gradient,
                                   nlohmann::json params);

    Kind kind() const { return m_kind; }
    const std::string &name() const { return m_name; }

    double value(const DeformationGradient &F) const;
    double value(const Matrix &F) const { return value(DeformationGradient(F)); }

    // Spectral part only (volumetric term and log coefficient dropped),
    // evaluated on the singular values of an arbitrary square matrix.
    // This is what segment-convexity scans probe.
    double spectral_part(const Matrix &F) const;

    struct GradientResult {
        Matrix gradient;
        // Some singular value (or det F) sits within 1e-9 of a profile
        // breakpoint: the reported derivative is one-sided there.
        bool at_kink = false;
    };
    GradientResult gradient(const DeformationGradient &F) const;
    bool has_gradient() const;

    const ScalarProfile &profile() const;
    const std::optional<ScalarProfile> &volumetric() const { return m_volumetric; }
    double vol_log_coeff() const { return m_vol_log_coeff; }

    // Returns a copy with the volumetric term replaced (generalized
    // Valanis-Landel form).
    EnergyModel with_volumetric(ScalarProfile h) const;

    // Flat JSON parameter record: {model, mu, lambda, alpha, gamma, k, k_hat, epsilon}.
    const nlohmann::json &params() const { return m_params; }

    // Singular-value box on which an extension provably matches the model it
    // extends (set by the extension builders).
    std::optional<std::pair<double, double>> agreement_region;
    std::string extends;

private:
    EnergyModel() = default;

    Kind m_kind = Kind::SpectralSum;
    std::string m_name;
    std::optional<ScalarProfile> m_phi;
    std::optional<ScalarProfile> m_volumetric;
    double m_vol_log_coeff = 0.0;
    std::function<double(const Matrix &)> m_cf_value;
    std::function<Matrix(const Matrix &)> m_cf_gradient;
    nlohmann::json m_params;
};

// ---------- scalar profile evaluators (thin wrappers) ----------

double phi_alpha(double lambda, double alpha);
double phi_gamma(double lambda, double gamma);
double psi_vol(double t, double Lambda);
double double_well(double x);
double double_well_hull(double x);

// ---------- energies ----------

// Quadratic Hencky energy, mu ||dev_n log U||^2 + kappa/2 [tr log U]^2.
double hencky_energy(const DeformationGradient &F, const LameParameters &p);

// (||dev_n log U||^2, ||log U||^2, [tr log U]^2).
std::array<double, 3> log_strain_measures(const DeformationGradient &F);

double exp_hencky_energy(const DeformationGradient &F, const ExpHenckyParameters &p);

// Extension of sum (alpha l_i^2 - 2 l_i + 1) from {l >= 1/(2 alpha)} to GL+(n).
double euclid_extension_energy(const DeformationGradient &F, double alpha);

// Extension of ||log U||^2 from {e^{gamma-1} < l < e^gamma} to GL+(n).
double geodesic_extension_energy(const DeformationGradient &F, double gamma);

// Extension of the Hencky energy: mu * extension of ||log U||^2 at gamma = 1/3
// plus psi_Lambda(det F). Requires Lambda >= 0.
double hencky_extension_energy(const DeformationGradient &F, const LameParameters &p);

EnergyModel::GradientResult isotropic_gradient(const EnergyModel &model, const DeformationGradient &F);

// ---------- model builders ----------

// n resolves the kappa <-> Lambda conversion when the bulk modulus is primary.
EnergyModel make_hencky_model(const LameParameters &p, int n);
EnergyModel make_hencky_extension_model(const LameParameters &p, int n);
EnergyModel make_exp_hencky_model(const ExpHenckyParameters &p, int n);
EnergyModel make_euclid_model();
EnergyModel make_euclid_extension_model(double alpha);
EnergyModel make_log_strain_model();
EnergyModel make_dev_log_strain_model(int n);
EnergyModel make_log_strain_extension_model(double gamma);
EnergyModel make_frobenius_squared_model();

// Polyconvex extension of sum w(lambda_i) per the two-sided tangent
// construction. When epsilon is absent, the largest epsilon in (0, 1/2)
// satisfying  w''(l) > w''(1)/2  and  w'(l) > -w''(1)/12  on [1-eps, 1+eps]
// is located on a descending geometric grid. Requires w'(1) = 0 (to 1e-10)
// and w''(1) > 0.
EnergyModel valanis_landel_extension(const ScalarProfile &w,
                                     std::optional<double> epsilon = std::nullopt);

// Registry used by the CLI: builds a model from its name and a flat JSON
// parameter record. Unknown names or parameters throw std::invalid_argument.
EnergyModel make_model(const std::string &name, const nlohmann::json &params, int n);

// Names accepted by make_model.
std::vector<std::string> model_names();

// ---------- planar appendix functions ----------

// (F11+F22)/2 * I + (F12-F21)/2 * J, the conformal part of a 2x2 matrix.
Matrix conformal_part(const Matrix &F);

// Squared Euclidean distance to SO(2), sum (lambda_i - 1)^2.
double dist2_SO2(const Matrix &F);

// Rank-one convex hull of dist^2(., SO(2)): the distance itself where
// ||F+|| >= sqrt(2)/2, and 1 - 2 det F elsewhere.
double rank_one_hull_dist2_SO2(const Matrix &F);

} // namespace polyext
