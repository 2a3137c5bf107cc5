#include <polyext/energy.hpp>

#include <cmath>
#include <stdexcept>

namespace polyext {

LameParameters LameParameters::from_lambda(double mu, double lambda) {
    if (!(mu > 0.0))
        throw std::invalid_argument("LameParameters: mu must be > 0");
    return LameParameters{mu, lambda, false};
}

LameParameters LameParameters::from_kappa(double mu, double kappa) {
    if (!(mu > 0.0))
        throw std::invalid_argument("LameParameters: mu must be > 0");
    return LameParameters{mu, kappa, true};
}

EnergyModel EnergyModel::spectral_sum(std::string name, ScalarProfile phi,
                                      std::optional<ScalarProfile> volumetric,
                                      double vol_log_coeff, nlohmann::json params) {
    EnergyModel m;
    m.m_kind = Kind::SpectralSum;
    m.m_name = std::move(name);
    m.m_phi = std::move(phi);
    m.m_volumetric = std::move(volumetric);
    m.m_vol_log_coeff = vol_log_coeff;
    m.m_params = std::move(params);
    m.m_params["model"] = m.m_name;
    return m;
}

EnergyModel EnergyModel::closed_form(std::string name,
                                     std::function<double(const Matrix &)> value,
                                     std::function<Matrix(const Matrix &)> gradient,
                                     nlohmann::json params) {
    EnergyModel m;
    m.m_kind = Kind::ClosedForm;
    m.m_name = std::move(name);
    m.m_cf_value = std::move(value);
    m.m_cf_gradient = std::move(gradient);
    m.m_params = std::move(params);
    m.m_params["model"] = m.m_name;
    return m;
}

const ScalarProfile &EnergyModel::profile() const {
    if (!m_phi)
        throw std::logic_error("EnergyModel: " + m_name + " has no spectral profile");
    return *m_phi;
}

double EnergyModel::value(const DeformationGradient &F) const {
    if (m_kind == Kind::ClosedForm)
        return m_cf_value(F.matrix());

    const Vector sigma = singular_values(F.matrix());
    double acc = 0.0, logdet = 0.0, det = 1.0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        acc += m_phi->value(sigma[i]);
        logdet += std::log(sigma[i]);
        det *= sigma[i];
    }
    if (m_volumetric)
        acc += m_volumetric->value(det);
    acc -= m_vol_log_coeff * logdet;
    return acc;
}

double EnergyModel::spectral_part(const Matrix &F) const {
    if (m_kind != Kind::SpectralSum)
        throw std::logic_error("EnergyModel: spectral_part requires a spectral-sum model");
    const Vector sigma = singular_values(F);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        acc += m_phi->value(sigma[i]);
    return acc;
}

bool EnergyModel::has_gradient() const {
    return m_kind == Kind::SpectralSum || static_cast<bool>(m_cf_gradient);
}

EnergyModel::GradientResult EnergyModel::gradient(const DeformationGradient &F) const {
    if (m_kind == Kind::ClosedForm) {
        if (!m_cf_gradient)
            throw std::logic_error("EnergyModel: " + m_name + " has no gradient");
        return GradientResult{m_cf_gradient(F.matrix()), false};
    }

    const SingularSpectrum s = svd(F);
    const int n = F.dim();

    bool kink = false;
    Vector dphi(n);
    double det = 1.0;
    for (int i = 0; i < n; ++i) {
        dphi[i] = m_phi->d1(s.sigma[i]);
        det *= s.sigma[i];
        if (m_phi->near_breakpoint(s.sigma[i]))
            kink = true;
    }
    // Repeated singular values need no special casing: the sum over a smooth
    // profile stays differentiable at coincidences and the formula below is
    // continuous there.
    Matrix g = s.left * dphi.asDiagonal() * s.right.transpose();

    double vol_d1 = -m_vol_log_coeff / det;
    if (m_volumetric) {
        vol_d1 += m_volumetric->d1(det);
        if (m_volumetric->near_breakpoint(det))
            kink = true;
    }
    if (vol_d1 != 0.0) {
        // d(det F)/dF = det F * F^{-T} = left * diag(det / sigma_i) * right^T.
        Vector cof(n);
        for (int i = 0; i < n; ++i)
            cof[i] = det / s.sigma[i];
        g += vol_d1 * (s.left * cof.asDiagonal() * s.right.transpose());
    }
    return GradientResult{std::move(g), kink};
}

EnergyModel EnergyModel::with_volumetric(ScalarProfile h) const {
    if (m_kind != Kind::SpectralSum)
        throw std::logic_error("EnergyModel: with_volumetric requires a spectral-sum model");
    EnergyModel m = *this;
    m.m_volumetric = std::move(h);
    return m;
}

// ---------- scalar wrappers ----------

double phi_alpha(double lambda, double alpha) { return phi_alpha_profile(alpha).value(lambda); }

double phi_gamma(double lambda, double gamma) { return phi_gamma_profile(gamma).value(lambda); }

double psi_vol(double t, double Lambda) { return psi_vol_profile(Lambda).value(t); }

double double_well(double x) { return double_well_profile().value(x); }

double double_well_hull(double x) { return double_well_hull_profile().value(x); }

// ---------- energies ----------

namespace {

// (||dev log U||^2, ||log U||^2, [tr log U]^2) from the singular values.
std::array<double, 3> measures_from_sigma(const Vector &sigma) {
    const int n = static_cast<int>(sigma.size());
    double tr = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double l = std::log(sigma[i]);
        tr += l;
        sq += l * l;
    }
    const double mean = tr / n;
    double dev = 0.0;
    for (int i = 0; i < n; ++i) {
        const double d = std::log(sigma[i]) - mean;
        dev += d * d;
    }
    return {dev, sq, tr * tr};
}

} // namespace

std::array<double, 3> log_strain_measures(const DeformationGradient &F) {
    return measures_from_sigma(singular_values(F.matrix()));
}

double hencky_energy(const DeformationGradient &F, const LameParameters &p) {
    const auto m = log_strain_measures(F);
    return p.mu * m[0] + 0.5 * p.kappa(F.dim()) * m[2];
}

double exp_hencky_energy(const DeformationGradient &F, const ExpHenckyParameters &p) {
    if (!(p.k > 0.0 && p.k_hat > 0.0))
        throw std::invalid_argument("exp_hencky_energy: k and k_hat must be > 0");
    const auto m = log_strain_measures(F);
    const double kappa = p.lame.kappa(F.dim());
    return p.lame.mu / p.k * guarded_exp(p.k * m[0])
         + kappa / (2.0 * p.k_hat) * guarded_exp(p.k_hat * m[2]);
}

namespace {

double spectral_sum_value(const ScalarProfile &phi, double c, const Vector &sigma) {
    double acc = 0.0, logdet = 0.0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i) {
        acc += phi.value(sigma[i]);
        logdet += std::log(sigma[i]);
    }
    return acc - c * logdet;
}

} // namespace

double euclid_extension_energy(const DeformationGradient &F, double alpha) {
    return spectral_sum_value(phi_alpha_profile(alpha), 1.0 / (2.0 * alpha),
                              singular_values(F.matrix()));
}

double geodesic_extension_energy(const DeformationGradient &F, double gamma) {
    return spectral_sum_value(phi_gamma_profile(gamma), 2.0 - 2.0 * gamma,
                              singular_values(F.matrix()));
}

double hencky_extension_energy(const DeformationGradient &F, const LameParameters &p) {
    const double Lambda = p.lambda(F.dim());
    if (!(Lambda >= 0.0))
        throw std::invalid_argument("hencky_extension_energy: requires Lambda >= 0");
    const Vector sigma = singular_values(F.matrix());
    double det = 1.0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
        det *= sigma[i];
    return p.mu * spectral_sum_value(phi_gamma_profile(1.0 / 3.0), 2.0 - 2.0 / 3.0, sigma)
         + psi_vol_profile(Lambda).value(det);
}

EnergyModel::GradientResult isotropic_gradient(const EnergyModel &model, const DeformationGradient &F) {
    return model.gradient(F);
}

// ---------- model builders ----------

EnergyModel make_hencky_model(const LameParameters &p, int n) {
    const double Lambda = p.lambda(n);
    nlohmann::json params{{"mu", p.mu}, {"lambda", Lambda}};
    return EnergyModel::spectral_sum("hencky", scale_profile(log_squared_profile(), p.mu),
                                     scale_profile(log_squared_profile(), 0.5 * Lambda),
                                     0.0, std::move(params));
}

EnergyModel make_hencky_extension_model(const LameParameters &p, int n) {
    const double Lambda = p.lambda(n);
    if (!(Lambda >= 0.0))
        throw std::invalid_argument("hencky-ext: requires Lambda >= 0");
    nlohmann::json params{{"mu", p.mu}, {"lambda", Lambda}};
    EnergyModel m = EnergyModel::spectral_sum(
        "hencky-ext", scale_profile(phi_gamma_profile(1.0 / 3.0), p.mu),
        psi_vol_profile(Lambda), p.mu * (2.0 - 2.0 / 3.0), std::move(params));
    m.agreement_region = {std::exp(-2.0 / 3.0), std::exp(1.0 / 3.0)};
    m.extends = "hencky";
    return m;
}

EnergyModel make_exp_hencky_model(const ExpHenckyParameters &p, int n) {
    if (!(p.k > 0.0 && p.k_hat > 0.0))
        throw std::invalid_argument("exp-hencky: k and k_hat must be > 0");
    const double mu = p.lame.mu, kappa = p.lame.kappa(n);
    const double k = p.k, k_hat = p.k_hat;
    nlohmann::json params{{"mu", mu}, {"lambda", p.lame.lambda(n)}, {"k", k}, {"k_hat", k_hat}};

    auto measures = [](const Matrix &F) { return measures_from_sigma(singular_values(F)); };
    auto value = [=](const Matrix &F) {
        const auto m = measures(F);
        return mu / k * guarded_exp(k * m[0]) + kappa / (2.0 * k_hat) * guarded_exp(k_hat * m[2]);
    };
    auto gradient = [=](const Matrix &F) {
        const SingularSpectrum s = svd(DeformationGradient(F));
        const int dim = static_cast<int>(F.rows());
        double tr = 0.0;
        for (int i = 0; i < dim; ++i)
            tr += std::log(s.sigma[i]);
        const double mean = tr / dim;
        double dev = 0.0;
        for (int i = 0; i < dim; ++i) {
            const double d = std::log(s.sigma[i]) - mean;
            dev += d * d;
        }
        // d/dF of the isochoric part: mu e^{k dev} * sum 2 (ln s_i - mean)/s_i u_i v_i^T;
        // volumetric part: kappa tr e^{k_hat tr^2} * F^{-T}.
        Vector diag(dim);
        for (int i = 0; i < dim; ++i)
            diag[i] = mu * guarded_exp(k * dev) * 2.0 * (std::log(s.sigma[i]) - mean) / s.sigma[i]
                    + kappa * tr * guarded_exp(k_hat * tr * tr) / s.sigma[i];
        return Matrix(s.left * diag.asDiagonal() * s.right.transpose());
    };
    return EnergyModel::closed_form("exp-hencky", value, gradient, std::move(params));
}

EnergyModel make_euclid_model() {
    return EnergyModel::spectral_sum("euclid", squared_distance_profile(), std::nullopt, 0.0, {});
}

EnergyModel make_euclid_extension_model(double alpha) {
    EnergyModel m = EnergyModel::spectral_sum("euclid-ext", phi_alpha_profile(alpha), std::nullopt,
                                              1.0 / (2.0 * alpha), nlohmann::json{{"alpha", alpha}});
    m.agreement_region = {1.0 / (2.0 * alpha), std::numeric_limits<double>::infinity()};
    m.extends = "euclid";
    return m;
}

EnergyModel make_log_strain_model() {
    return EnergyModel::spectral_sum("log-strain", log_squared_profile(), std::nullopt, 0.0, {});
}

EnergyModel make_dev_log_strain_model(int n) {
    return EnergyModel::spectral_sum("dev-log-strain", log_squared_profile(),
                                     scale_profile(log_squared_profile(), -1.0 / n), 0.0, {});
}

EnergyModel make_log_strain_extension_model(double gamma) {
    EnergyModel m = EnergyModel::spectral_sum("log-strain-ext", phi_gamma_profile(gamma), std::nullopt,
                                              2.0 - 2.0 * gamma, nlohmann::json{{"gamma", gamma}});
    m.agreement_region = {std::exp(gamma - 1.0), std::exp(gamma)};
    m.extends = "log-strain";
    return m;
}

EnergyModel make_frobenius_squared_model() {
    return EnergyModel::spectral_sum("frob-squared", square_profile(), std::nullopt, 0.0, {});
}

EnergyModel valanis_landel_extension(const ScalarProfile &w, std::optional<double> epsilon) {
    const double w1_at_1 = w.d1(1.0);
    const double w2_at_1 = w.d2(1.0);
    if (std::abs(w1_at_1) > 1e-10)
        throw std::invalid_argument("valanis_landel_extension: w'(1) must vanish");
    if (!(w2_at_1 > 0.0))
        throw std::invalid_argument("valanis_landel_extension: w''(1) must be > 0");

    auto certified = [&](double eps) {
        const int points = 1000;
        for (int i = 0; i <= points; ++i) {
            const double l = (1.0 - eps) + 2.0 * eps * i / points;
            if (!(w.d2(l) > 0.5 * w2_at_1 + 1e-12))
                return false;
            if (!(w.d1(l) > -w2_at_1 / 12.0 + 1e-12))
                return false;
        }
        return true;
    };

    double eps = 0.0;
    if (epsilon) {
        eps = *epsilon;
        if (!(eps > 0.0 && eps < 0.5) || !certified(eps))
            throw std::invalid_argument("valanis_landel_extension: provided epsilon fails the certificate");
    }
    else {
        for (double cand = 0.499; cand > 1e-6; cand *= 0.97) {
            if (certified(cand)) {
                eps = cand;
                break;
            }
        }
        if (eps == 0.0)
            throw std::invalid_argument(
                "valanis_landel_extension: no epsilon in (0, 1/2) passed the certificate for w = " + w.name());
    }

    const double q = w2_at_1 / 8.0;
    EnergyModel m = EnergyModel::spectral_sum("vl-ext", valanis_landel_profile(w, eps, q),
                                              std::nullopt, q,
                                              nlohmann::json{{"epsilon", eps}, {"w", w.name()}});
    m.agreement_region = {1.0 - eps, 1.0 + eps};
    m.extends = "vl:" + w.name();
    return m;
}

std::vector<std::string> model_names() {
    return {"hencky", "hencky-ext", "exp-hencky", "euclid", "euclid-ext",
            "log-strain", "dev-log-strain", "log-strain-ext", "frob-squared", "vl-ext"};
}

EnergyModel make_model(const std::string &name, const nlohmann::json &params, int n) {
    for (auto it = params.begin(); it != params.end(); ++it) {
        static const std::vector<std::string> known{"model", "mu", "lambda", "kappa", "alpha",
                                                    "gamma", "k", "k_hat", "epsilon", "w"};
        if (std::find(known.begin(), known.end(), it.key()) == known.end())
            throw std::invalid_argument("make_model: unknown parameter '" + it.key() + "'");
    }

    auto get = [&](const char *key, double fallback) {
        return params.contains(key) ? params.at(key).get<double>() : fallback;
    };
    auto lame = [&]() {
        if (params.contains("kappa") && !params.contains("lambda"))
            return LameParameters::from_kappa(get("mu", 1.0), get("kappa", 0.0));
        return LameParameters::from_lambda(get("mu", 1.0), get("lambda", 0.0));
    };

    if (name == "hencky")
        return make_hencky_model(lame(), n);
    if (name == "hencky-ext")
        return make_hencky_extension_model(lame(), n);
    if (name == "exp-hencky")
        return make_exp_hencky_model(ExpHenckyParameters{lame(), get("k", 1.0), get("k_hat", 1.0)}, n);
    if (name == "euclid")
        return make_euclid_model();
    if (name == "euclid-ext")
        return make_euclid_extension_model(get("alpha", 1.0));
    if (name == "log-strain")
        return make_log_strain_model();
    if (name == "dev-log-strain")
        return make_dev_log_strain_model(n);
    if (name == "log-strain-ext")
        return make_log_strain_extension_model(get("gamma", 0.5));
    if (name == "frob-squared")
        return make_frobenius_squared_model();
    if (name == "vl-ext") {
        const std::string w_name = params.contains("w") ? params.at("w").get<std::string>() : "log-squared";
        ScalarProfile w;
        if (w_name == "log-squared")
            w = log_squared_profile();
        else if (w_name == "squared-distance")
            w = squared_distance_profile();
        else
            throw std::invalid_argument("make_model: unknown vl-ext base profile '" + w_name + "'");
        std::optional<double> eps;
        if (params.contains("epsilon"))
            eps = params.at("epsilon").get<double>();
        return valanis_landel_extension(w, eps);
    }
    std::string known;
    for (const auto &n : model_names())
        known += (known.empty() ? "" : ", ") + n;
    throw std::invalid_argument("make_model: unknown model '" + name + "' (known: " + known + ")");
}

// ---------- planar appendix functions ----------

Matrix conformal_part(const Matrix &F) {
    if (F.rows() != 2 || F.cols() != 2)
        throw std::invalid_argument("conformal_part: requires a 2x2 matrix");
    Matrix c(2, 2);
    const double d = 0.5 * (F(0, 0) + F(1, 1));
    const double o = 0.5 * (F(0, 1) - F(1, 0));
    c << d, o, -o, d;
    return c;
}

double dist2_SO2(const Matrix &F) {
    if (F.rows() != 2 || F.cols() != 2)
        throw std::invalid_argument("dist2_SO2: requires a 2x2 matrix");
    const Vector sigma = singular_values(F);
    return (sigma[0] - 1.0) * (sigma[0] - 1.0) + (sigma[1] - 1.0) * (sigma[1] - 1.0);
}

double rank_one_hull_dist2_SO2(const Matrix &F) {
    if (F.rows() != 2 || F.cols() != 2)
        throw std::invalid_argument("rank_one_hull_dist2_SO2: requires a 2x2 matrix");
    if (conformal_part(F).norm() >= std::sqrt(2.0) / 2.0)
        return dist2_SO2(F);
    return 1.0 - 2.0 * determinant(F);
}

} // namespace polyext
