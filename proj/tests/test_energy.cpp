#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <polyext/energy.hpp>
#include <polyext/rng.hpp>

#include <cmath>

using namespace polyext;

namespace {

const double kE = std::exp(1.0);

Matrix diag(std::initializer_list<double> values) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(values.size()),
                            static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) {
        m(i, i) = v;
        ++i;
    }
    return m;
}

} // namespace

TEST_CASE("lame parameter conversions") {
    const LameParameters from_l = LameParameters::from_lambda(2.0, 1.0);
    CHECK(from_l.kappa(3) == doctest::Approx(1.0 + 4.0 / 3.0));
    const LameParameters from_k = LameParameters::from_kappa(2.0, 1.0 + 4.0 / 3.0);
    CHECK(from_k.lambda(3) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(LameParameters::from_lambda(-1.0, 0.0), std::invalid_argument);
}

TEST_CASE("hencky energy: reference values and the dev/trace identity") {
    const LameParameters p = LameParameters::from_lambda(1.0, 0.0);
    CHECK(hencky_energy(DeformationGradient(Matrix::Identity(3, 3)), p) == doctest::Approx(0.0));
    CHECK(hencky_energy(DeformationGradient(diag({kE, kE, kE})), p) ==
          doctest::Approx(3.0).epsilon(1e-13));

    // isotropy: same value at Q diag(2, 0.5, 1) R^T
    auto rng = sample_stream(3, 0);
    const Matrix q = random_rotation(3, rng), r = random_rotation(3, rng);
    const Matrix D = diag({2.0, 0.5, 1.0});
    CHECK(hencky_energy(DeformationGradient(q * D * r.transpose()), p) ==
          doctest::Approx(hencky_energy(DeformationGradient(D), p)).epsilon(1e-12));

    // identity mu ||dev||^2 + kappa/2 tr^2 = mu ||log U||^2 + Lambda/2 tr^2
    for (std::int64_t i = 0; i < 10000; ++i) {
        auto stream = sample_stream(5, i);
        const Matrix F = random_deformation(3, 0.1, 10.0, stream);
        const DeformationGradient dg(F);
        const auto m = log_strain_measures(dg);
        const LameParameters lp = LameParameters::from_lambda(1.3, 0.7);
        const double dev_form = lp.mu * m[0] + 0.5 * lp.kappa(3) * m[2];
        const double log_form = lp.mu * m[1] + 0.5 * lp.lambda(3) * m[2];
        CHECK(std::abs(dev_form - log_form) <= 1e-11 * (1.0 + std::abs(log_form)));
        CHECK(hencky_energy(dg, lp) == doctest::Approx(dev_form).epsilon(1e-12));
    }
}

TEST_CASE("log strain measures") {
    const auto at_identity = log_strain_measures(DeformationGradient(Matrix::Identity(2, 2)));
    CHECK(at_identity[0] == doctest::Approx(0.0));
    CHECK(at_identity[1] == doctest::Approx(0.0));
    CHECK(at_identity[2] == doctest::Approx(0.0));

    const auto dilated = log_strain_measures(DeformationGradient(diag({kE, kE})));
    CHECK(dilated[0] == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(dilated[1] == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(dilated[2] == doctest::Approx(4.0).epsilon(1e-13));

    const auto isochoric = log_strain_measures(DeformationGradient(diag({kE, 1.0 / kE})));
    CHECK(isochoric[0] == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(isochoric[1] == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(isochoric[2] == doctest::Approx(0.0).epsilon(1e-13));

    // third measure equals ln^2 det F
    for (std::int64_t i = 0; i < 1000; ++i) {
        auto rng = sample_stream(6, i);
        const Matrix F = random_deformation(3, 0.1, 10.0, rng);
        const DeformationGradient dg(F);
        const double lnd = std::log(dg.det());
        CHECK(std::abs(log_strain_measures(dg)[2] - lnd * lnd) <= 1e-12 * (1.0 + lnd * lnd));
    }
}

TEST_CASE("exponentiated hencky energy") {
    ExpHenckyParameters p;
    p.lame = LameParameters::from_kappa(1.0, 1.0);
    p.k = 1.0;
    p.k_hat = 1.0;
    CHECK(exp_hencky_energy(DeformationGradient(Matrix::Identity(3, 3)), p) ==
          doctest::Approx(1.0 + 0.5).epsilon(1e-14));
    CHECK(exp_hencky_energy(DeformationGradient(diag({kE, kE, kE})), p) ==
          doctest::Approx(4052.541963787692).epsilon(1e-12));

    auto rng = sample_stream(8, 0);
    const Matrix q = random_rotation(3, rng), r = random_rotation(3, rng);
    const Matrix D = diag({1.7, 0.6, 1.1});
    CHECK(exp_hencky_energy(DeformationGradient(q * D * r.transpose()), p) ==
          doctest::Approx(exp_hencky_energy(DeformationGradient(D), p)).epsilon(1e-12));
}

TEST_CASE("euclidean extension: frozen value and agreement with the squared distance") {
    CHECK(euclid_extension_energy(DeformationGradient(Matrix::Identity(3, 3)), 1.0) ==
          doctest::Approx(0.0).epsilon(1e-14));
    // n = 2, singular values (2, 0.3): high-precision oracle value
    CHECK(euclid_extension_energy(DeformationGradient(diag({2.0, 0.3})), 1.0) ==
          doctest::Approx(1.5054128118829953).epsilon(1e-13));

    for (std::int64_t i = 0; i < 1000; ++i) {
        auto rng = sample_stream(9, i);
        const Matrix F = random_deformation(3, 0.55, 3.0, rng);
        const Vector sigma = singular_values(F);
        double dist2 = 0.0;
        for (int j = 0; j < 3; ++j)
            dist2 += (sigma[j] - 1.0) * (sigma[j] - 1.0);
        CHECK(std::abs(euclid_extension_energy(DeformationGradient(F), 1.0) - dist2) < 1e-10);
    }
}

TEST_CASE("geodesic extension: agreement with ||log U||^2 and parameter plumbing") {
    CHECK(geodesic_extension_energy(DeformationGradient(Matrix::Identity(3, 3)), 0.7) ==
          doctest::Approx(0.0).epsilon(1e-14));
    // frozen value: 3 ln^2(1.2) inside the gamma = 1/2 agreement region
    CHECK(geodesic_extension_energy(DeformationGradient(diag({1.2, 1.2, 1.2})), 0.5) ==
          doctest::Approx(0.09972345021531367).epsilon(1e-13));

    // gamma = 1/3 profile is what the Hencky extension uses
    const LameParameters p = LameParameters::from_lambda(1.0, 0.0);
    for (std::int64_t i = 0; i < 200; ++i) {
        auto rng = sample_stream(10, i);
        const Matrix F = random_deformation(3, 0.1, 10.0, rng);
        const DeformationGradient dg(F);
        CHECK(hencky_extension_energy(dg, p) ==
              doctest::Approx(geodesic_extension_energy(dg, 1.0 / 3.0)).epsilon(1e-12));
    }
}

TEST_CASE("hencky extension: frozen value, parameter validation, singular behavior") {
    const LameParameters p = LameParameters::from_lambda(1.0, 0.0);
    CHECK(hencky_extension_energy(DeformationGradient(Matrix::Identity(3, 3)), p) ==
          doctest::Approx(0.0).epsilon(1e-14));
    // agreement region sample, oracle = ln^2(1.1) + ln^2(0.9)
    CHECK(hencky_extension_energy(DeformationGradient(diag({1.1, 1.0, 0.9})), p) ==
          doctest::Approx(0.020184868634015796).epsilon(1e-13));

    CHECK_THROWS_AS(hencky_extension_energy(DeformationGradient(Matrix::Identity(3, 3)),
                                            LameParameters::from_lambda(1.0, -0.5)),
                    std::invalid_argument);

    // det F -> 0 blows up (Remark on singular behavior)
    double previous = hencky_extension_energy(DeformationGradient(diag({1.0, 1.0, 1.0})), p);
    for (double t : {1e-1, 1e-2, 1e-3}) {
        const double value = hencky_extension_energy(DeformationGradient(diag({t, t, t})), p);
        CHECK(value > previous);
        previous = value;
    }

    // large stretch: exponential branch dominates
    const double big = hencky_extension_energy(DeformationGradient(diag({30.0, 1.0, 1.0})), p);
    CHECK(big > std::pow(30.0, 4));
}

TEST_CASE("model registry matches the free evaluators") {
    auto rng = sample_stream(12, 0);
    const Matrix F = random_deformation(3, 0.3, 3.0, rng);
    const DeformationGradient dg(F);
    const LameParameters p = LameParameters::from_lambda(1.4, 0.6);

    CHECK(make_hencky_model(p, 3).value(dg) == doctest::Approx(hencky_energy(dg, p)).epsilon(1e-12));
    CHECK(make_hencky_extension_model(p, 3).value(dg) ==
          doctest::Approx(hencky_extension_energy(dg, p)).epsilon(1e-12));
    CHECK(make_euclid_extension_model(0.8).value(dg) ==
          doctest::Approx(euclid_extension_energy(dg, 0.8)).epsilon(1e-12));
    CHECK(make_log_strain_extension_model(0.25).value(dg) ==
          doctest::Approx(geodesic_extension_energy(dg, 0.25)).epsilon(1e-12));
    const auto measures = log_strain_measures(dg);
    CHECK(make_log_strain_model().value(dg) == doctest::Approx(measures[1]).epsilon(1e-12));
    CHECK(make_dev_log_strain_model(3).value(dg) == doctest::Approx(measures[0]).epsilon(1e-11));
    CHECK(make_frobenius_squared_model().value(dg) ==
          doctest::Approx(F.squaredNorm()).epsilon(1e-12));

    ExpHenckyParameters ep{p, 0.8, 1.1};
    CHECK(make_exp_hencky_model(ep, 3).value(dg) ==
          doctest::Approx(exp_hencky_energy(dg, ep)).epsilon(1e-12));
}

TEST_CASE("make_model: JSON round trip and rejection of unknown names") {
    const EnergyModel m = make_model("hencky-ext", {{"mu", 2.0}, {"lambda", 1.0}}, 3);
    CHECK(m.params().at("model") == "hencky-ext");
    CHECK(m.params().at("mu") == 2.0);
    CHECK_THROWS_AS(make_model("unknown", {}, 3), std::invalid_argument);
    CHECK_THROWS_AS(make_model("hencky", {{"bogus", 1.0}}, 3), std::invalid_argument);
    // kappa-primary record resolves through the conversion
    const EnergyModel mk = make_model("hencky", {{"mu", 1.0}, {"kappa", 2.0 / 3.0}}, 3);
    CHECK(mk.params().at("lambda").get<double>() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("frame indifference and isotropy of every model") {
    std::vector<EnergyModel> models;
    const LameParameters p = LameParameters::from_lambda(1.0, 0.5);
    models.push_back(make_hencky_model(p, 3));
    models.push_back(make_hencky_extension_model(p, 3));
    models.push_back(make_exp_hencky_model(ExpHenckyParameters{p, 1.0, 1.0}, 3));
    models.push_back(make_euclid_extension_model(1.0));
    models.push_back(make_log_strain_extension_model(0.5));
    models.push_back(valanis_landel_extension(log_squared_profile()));
    for (const auto &model : models) {
        for (std::int64_t i = 0; i < 300; ++i) {
            auto rng = sample_stream(14, i);
            const Matrix F = random_deformation(3, 0.2, 5.0, rng);
            const Matrix q = random_rotation(3, rng), r = random_rotation(3, rng);
            const double w = model.value(DeformationGradient(F));
            const double wqr = model.value(DeformationGradient(q * F * r));
            CHECK(std::abs(wqr - w) <= 1e-11 * (1.0 + std::abs(w)));
        }
    }
}

TEST_CASE("isotropic gradient: stress-free reference and diagonal structure") {
    const EnergyModel ext = make_hencky_extension_model(LameParameters::from_lambda(1.3, 0.8), 3);
    const auto at_identity = ext.gradient(DeformationGradient(Matrix::Identity(3, 3)));
    CHECK(at_identity.gradient.norm() <= 1e-10);

    const EnergyModel vl = valanis_landel_extension(log_squared_profile());
    CHECK(vl.gradient(DeformationGradient(Matrix::Identity(3, 3))).gradient.norm() <= 1e-10);

    // diagonal F with distinct singular values has a diagonal gradient
    const Matrix D = diag({1.8, 1.1, 0.6});
    const Matrix g = ext.gradient(DeformationGradient(D)).gradient;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            if (i != j)
                CHECK(std::abs(g(i, j)) <= 1e-12);
}

TEST_CASE("isotropic gradient: finite-difference agreement") {
    std::vector<EnergyModel> models;
    models.push_back(make_hencky_model(LameParameters::from_lambda(1.0, 0.5), 3));
    models.push_back(make_hencky_extension_model(LameParameters::from_lambda(1.0, 0.5), 3));
    models.push_back(make_euclid_extension_model(0.9));
    models.push_back(make_log_strain_extension_model(0.5));
    models.push_back(valanis_landel_extension(log_squared_profile()));
    models.push_back(make_exp_hencky_model(ExpHenckyParameters{LameParameters::from_lambda(1.0, 0.5), 1.0, 1.0}, 3));
    for (const auto &model : models) {
        int tested = 0;
        for (std::int64_t i = 0; tested < 100 && i < 500; ++i) {
            auto rng = sample_stream(15, i);
            const Matrix F = random_deformation(3, 0.3, 4.0, rng);
            const auto grad = model.gradient(DeformationGradient(F));
            if (grad.at_kink)
                continue;
            bool near = false;
            if (model.kind() == EnergyModel::Kind::SpectralSum) {
                const Vector sigma = singular_values(F);
                for (int j = 0; j < 3; ++j)
                    near |= model.profile().near_breakpoint(sigma[j], 1e-3);
            }
            if (near)
                continue;
            ++tested;
            const double delta = 1e-6 * std::max(1.0, F.norm());
            Matrix fd(3, 3);
            for (int r = 0; r < 3; ++r)
                for (int s = 0; s < 3; ++s) {
                    Matrix Fp = F, Fm = F;
                    Fp(r, s) += delta;
                    Fm(r, s) -= delta;
                    fd(r, s) = (model.value(DeformationGradient(Fp)) -
                                model.value(DeformationGradient(Fm))) /
                               (2.0 * delta);
                }
            CHECK((grad.gradient - fd).norm() <= 1e-5 * std::max(1.0, fd.norm()));
        }
        CHECK(tested == 100);
    }
}

TEST_CASE("isotropic gradient at degenerate spectra") {
    // repeated singular values: the spectral formula stays valid because the
    // profile derivative takes equal values on a cluster
    const EnergyModel ext = make_hencky_extension_model(LameParameters::from_lambda(1.0, 0.5), 3);
    for (const Matrix &F : {Matrix(diag({1.2, 1.2, 0.8})), Matrix(diag({1.2, 1.2, 1.2})),
                            Matrix(0.7 * Matrix::Identity(3, 3))}) {
        const Matrix analytic = ext.gradient(DeformationGradient(F)).gradient;
        const double delta = 1e-6;
        Matrix fd(3, 3);
        for (int r = 0; r < 3; ++r)
            for (int s = 0; s < 3; ++s) {
                Matrix Fp = F, Fm = F;
                Fp(r, s) += delta;
                Fm(r, s) -= delta;
                fd(r, s) = (ext.value(DeformationGradient(Fp)) - ext.value(DeformationGradient(Fm))) /
                           (2.0 * delta);
            }
        CHECK((analytic - fd).norm() <= 1e-5 * std::max(1.0, fd.norm()));
    }
}

TEST_CASE("gradient flags kinks") {
    const EnergyModel vl = valanis_landel_extension(log_squared_profile());
    const double eps = vl.params().at("epsilon").get<double>();
    const Matrix D = diag({1.0 - eps, 1.0, 1.0});
    CHECK(vl.gradient(DeformationGradient(D)).at_kink);
    const Matrix away = diag({1.0, 1.0, 1.0});
    CHECK(!vl.gradient(DeformationGradient(away)).at_kink);
}

TEST_CASE("valanis-landel extension: certificate and agreement") {
    const EnergyModel vl = valanis_landel_extension(log_squared_profile());
    const double eps = vl.params().at("epsilon").get<double>();
    CHECK(eps > 0.0);
    CHECK(eps < 0.5);
    // the found epsilon should be close to the analytic largest admissible one
    CHECK(eps == doctest::Approx(0.0742).epsilon(0.05));

    // agreement with sum w(lambda_i) on the certified box
    for (std::int64_t i = 0; i < 2000; ++i) {
        auto rng = sample_stream(16, i);
        const Matrix F = random_deformation(3, 1.0 - eps, 1.0 + eps, rng);
        const Vector sigma = singular_values(F);
        double direct = 0.0;
        for (int j = 0; j < 3; ++j) {
            const double l = std::log(sigma[j]);
            direct += l * l;
        }
        const double value = vl.value(DeformationGradient(F));
        CHECK(std::abs(value - direct) <= 1e-10 * (1.0 + std::abs(direct)));
    }

    // squared distance base: construction succeeds, zero at identity
    const EnergyModel vl2 = valanis_landel_extension(squared_distance_profile());
    CHECK(vl2.value(DeformationGradient(Matrix::Identity(3, 3))) == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("valanis-landel extension rejects bad hypotheses") {
    // w''(1) < 0
    ScalarProfile bad("neg_well", -std::numeric_limits<double>::infinity(), false, {},
                      {ProfileBranch{[](double l) { return -(l - 1.0) * (l - 1.0); },
                                     [](double l) { return -2.0 * (l - 1.0); },
                                     [](double) { return -2.0; }}});
    CHECK_THROWS_AS(valanis_landel_extension(bad), std::invalid_argument);
    // w'(1) != 0
    ScalarProfile tilted("tilted", -std::numeric_limits<double>::infinity(), false, {},
                         {ProfileBranch{[](double l) { return l * l; },
                                        [](double l) { return 2.0 * l; },
                                        [](double) { return 2.0; }}});
    CHECK_THROWS_AS(valanis_landel_extension(tilted), std::invalid_argument);
    // an epsilon that fails the certificate
    CHECK_THROWS_AS(valanis_landel_extension(log_squared_profile(), 0.45), std::invalid_argument);
}

TEST_CASE("generalized valanis-landel form accepts a convex volumetric term") {
    const EnergyModel vl = valanis_landel_extension(log_squared_profile());
    const ScalarProfile wvol = convex_extend_scalar(log_squared_profile(), 0.5, std::exp(1.0));
    const EnergyModel compressible = vl.with_volumetric(wvol);
    const DeformationGradient dg(diag({1.02, 1.0, 0.98}));
    const double det = dg.det();
    CHECK(compressible.value(dg) ==
          doctest::Approx(vl.value(dg) + std::log(det) * std::log(det)).epsilon(1e-12));
}

TEST_CASE("conformal part") {
    CHECK((conformal_part(Matrix::Identity(2, 2)) - Matrix::Identity(2, 2)).norm() < 1e-15);
    Matrix rot(2, 2);
    const double theta = 1.1;
    rot << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
    CHECK((conformal_part(rot) - rot).norm() < 1e-15);
    CHECK((conformal_part(diag({3.0, 1.0})) - 2.0 * Matrix::Identity(2, 2)).norm() < 1e-15);
    CHECK_THROWS_AS(conformal_part(Matrix::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("planar distance and its rank-one hull") {
    CHECK(dist2_SO2(Matrix::Identity(2, 2)) == doctest::Approx(0.0));
    CHECK(rank_one_hull_dist2_SO2(Matrix::Identity(2, 2)) == doctest::Approx(0.0));

    const Matrix small = diag({0.2, 0.2});
    CHECK(conformal_part(small).norm() < std::sqrt(2.0) / 2.0);
    CHECK(rank_one_hull_dist2_SO2(small) == doctest::Approx(0.92).epsilon(1e-14));
    CHECK(dist2_SO2(small) == doctest::Approx(1.28).epsilon(1e-13));

    // near the GL+ boundary the hull tends to 1 and the distance to 2
    const Matrix tiny = diag({1e-8, 1e-8});
    CHECK(rank_one_hull_dist2_SO2(tiny) == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(dist2_SO2(tiny) == doctest::Approx(2.0).epsilon(1e-7));

    // hull never exceeds the distance
    for (std::int64_t i = 0; i < 20000; ++i) {
        auto rng = sample_stream(18, i);
        const Matrix F = random_deformation(2, 0.05, 3.0, rng);
        CHECK(rank_one_hull_dist2_SO2(F) <= dist2_SO2(F) + 1e-12);
    }
    CHECK_THROWS_AS(dist2_SO2(Matrix::Identity(3, 3)), std::invalid_argument);
}

TEST_CASE("scalar wrappers") {
    CHECK(phi_alpha(1.0, 1.0) == doctest::Approx(0.0));
    CHECK(phi_gamma(1.0, 0.5) == doctest::Approx(0.0));
    CHECK(psi_vol(1.0, 2.0) == doctest::Approx(0.0));
    CHECK(double_well(0.0) == doctest::Approx(1.0));
    CHECK(double_well_hull(0.0) == doctest::Approx(0.0));
}
