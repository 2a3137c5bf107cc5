#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <polyext/minimize.hpp>
#include <polyext/rng.hpp>

#include <algorithm>

using namespace polyext;

namespace {

Matrix stretch2(double a, double b) {
    Matrix m(2, 2);
    m << a, 0, 0, b;
    return m;
}

EnergyModel hencky_ext(int n) {
    return make_hencky_extension_model(LameParameters::from_lambda(1.0, 0.0), n);
}

} // namespace

TEST_CASE("mesh construction: counts and volumes") {
    const Mesh m1 = build_mesh(2, 1);
    CHECK(m1.element_count() == 2);
    CHECK(m1.node_count() == 4);

    const Mesh m4 = build_mesh(2, 4);
    CHECK(m4.element_count() == 32);
    CHECK(m4.node_count() == 25);

    const Mesh m3 = build_mesh(3, 2);
    CHECK(m3.element_count() == 48);
    CHECK(m3.node_count() == 27);

    for (const Mesh *m : {&m1, &m4, &m3}) {
        double volume = 0.0;
        for (double v : m->ref_volume) {
            CHECK(v > 0.0);
            volume += v;
        }
        CHECK(volume == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(build_mesh(4, 1), std::invalid_argument);
    CHECK_THROWS_AS(build_mesh(2, 0), std::invalid_argument);
}

TEST_CASE("boundary flags: full boundary and face subsets") {
    const Mesh full = build_mesh(2, 2);
    std::int64_t count = 0;
    for (auto f : full.dirichlet)
        count += f;
    CHECK(count == 8); // 3x3 grid, all but the center

    const Mesh partial = build_mesh(2, 2, "x-");
    std::int64_t left = 0;
    for (std::int64_t v = 0; v < partial.node_count(); ++v) {
        if (partial.dirichlet[static_cast<std::size_t>(v)]) {
            ++left;
            CHECK(partial.nodes(v, 0) == 0.0);
        }
    }
    CHECK(left == 3);
}

TEST_CASE("affine fields reproduce the boundary map exactly") {
    const Mesh mesh = build_mesh(2, 3);
    const Matrix F0 = stretch2(1.2, 0.9);
    const Field x = affine_field(mesh, F0);
    for (std::int64_t e = 0; e < mesh.element_count(); ++e)
        CHECK((element_gradient(mesh, x, e) - F0).norm() <= 1e-13);
}

TEST_CASE("total energy: affine field gives vol * W(F0)") {
    const EnergyModel model = hencky_ext(2);
    const Matrix F0 = stretch2(1.2, 0.9);
    const double w = model.value(DeformationGradient(F0));
    for (int k : {1, 3, 5}) {
        const Mesh mesh = build_mesh(2, k);
        const double total = total_energy(mesh, affine_field(mesh, F0), model);
        CHECK(total == doctest::Approx(w).epsilon(1e-12));
    }
    // identity field of the extension has zero energy
    const Mesh mesh = build_mesh(2, 3);
    CHECK(total_energy(mesh, affine_field(mesh, Matrix::Identity(2, 2)), model) ==
          doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("inverted elements yield the infeasible sentinel") {
    const Mesh mesh = build_mesh(2, 2);
    Field x = affine_field(mesh, Matrix::Identity(2, 2));
    // drag the center node far across the domain
    for (std::int64_t v = 0; v < mesh.node_count(); ++v)
        if (!mesh.dirichlet[static_cast<std::size_t>(v)]) {
            x(v, 0) += 2.0;
            break;
        }
    CHECK(std::isinf(total_energy(mesh, x, hencky_ext(2))));
    CHECK(min_element_det(mesh, x) <= 0.0);
}

TEST_CASE("total gradient: zero at the stress-free reference, zero rows on the boundary") {
    const Mesh mesh = build_mesh(2, 3);
    const EnergyModel model = hencky_ext(2);
    const Field x = affine_field(mesh, Matrix::Identity(2, 2));
    const Field g = total_gradient(mesh, x, model);
    CHECK(g.norm() <= 1e-10);

    const Field y = affine_field(mesh, stretch2(1.15, 0.95));
    const Field gy = total_gradient(mesh, y, model);
    for (std::int64_t v = 0; v < mesh.node_count(); ++v)
        if (mesh.dirichlet[static_cast<std::size_t>(v)])
            CHECK(gy.row(v).norm() == 0.0);
}

TEST_CASE("total gradient matches finite differences of the total energy") {
    for (int n : {2, 3}) {
        const Mesh mesh = build_mesh(n, 2);
        const EnergyModel model = hencky_ext(n);
        Matrix F0 = Matrix::Identity(n, n);
        F0(0, 0) = 1.15;
        F0(n - 1, n - 1) = 0.92;
        const Field x = perturbed_field(mesh, F0, 0.08, 7);
        const Field g = total_gradient(mesh, x, model);

        auto rng = sample_stream(31, n);
        std::uniform_int_distribution<std::int64_t> pick_node(0, mesh.node_count() - 1);
        std::uniform_int_distribution<int> pick_axis(0, n - 1);
        int checked = 0;
        while (checked < 25) {
            const std::int64_t v = pick_node(rng);
            if (mesh.dirichlet[static_cast<std::size_t>(v)])
                continue;
            const int d = pick_axis(rng);
            const double h = 1e-6;
            Field xp = x, xm = x;
            xp(v, d) += h;
            xm(v, d) -= h;
            const double fd =
                (total_energy(mesh, xp, model) - total_energy(mesh, xm, model)) / (2.0 * h);
            CHECK(g(v, d) == doctest::Approx(fd).epsilon(1e-4));
            ++checked;
        }
    }
}

TEST_CASE("element assembly is mode independent") {
    const Mesh mesh = build_mesh(3, 3);
    Matrix F0 = Matrix::Identity(3, 3);
    F0(0, 0) = 1.2;
    const EnergyModel model = hencky_ext(3);
    const Field x = perturbed_field(mesh, F0, 0.05, 3);
    const double e_serial = total_energy(mesh, x, model, Parallelism::Serial);
    const double e_parallel = total_energy(mesh, x, model, Parallelism::OpenMP);
    CHECK(e_serial == e_parallel);
    const Field g_serial = total_gradient(mesh, x, model, Parallelism::Serial);
    const Field g_parallel = total_gradient(mesh, x, model, Parallelism::OpenMP);
    CHECK((g_serial - g_parallel).norm() == 0.0);
}

TEST_CASE("total gradient propagates the kink flag") {
    const Mesh mesh = build_mesh(2, 2);
    const EnergyModel vl = valanis_landel_extension(log_squared_profile());
    const double eps = vl.params().at("epsilon").get<double>();

    Matrix at_kink(2, 2);
    at_kink << 1.0 - eps, 0.0, 0.0, 1.0;
    bool kink = false;
    total_gradient(mesh, affine_field(mesh, at_kink), vl, Parallelism::Serial, &kink);
    CHECK(kink);

    bool smooth = true;
    total_gradient(mesh, affine_field(mesh, Matrix::Identity(2, 2)), vl, Parallelism::Serial,
                   &smooth);
    CHECK(!smooth);
}

TEST_CASE("minimize: identity data stays at zero energy") {
    const Mesh mesh = build_mesh(2, 3);
    MinimizeOptions opt;
    opt.seed = 2;
    const MinimizeResult r = minimize(mesh, hencky_ext(2), Matrix::Identity(2, 2), opt);
    CHECK(r.converged);
    CHECK(r.energy == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(r.min_det > 0.0);
}

TEST_CASE("minimize: affine data recovers the homogeneous state") {
    const Matrix F0 = stretch2(1.2, 0.9);
    const EnergyModel model = hencky_ext(2);
    const double expected = model.value(DeformationGradient(F0));
    const Mesh mesh = build_mesh(2, 4);

    MinimizeOptions opt;
    opt.seed = 11;
    const MinimizeResult r = minimize(mesh, model, F0, opt);
    CHECK(r.converged);
    CHECK(r.energy == doctest::Approx(expected).epsilon(1e-7));

    // energy history is nonincreasing along accepted iterates
    for (std::size_t i = 1; i < r.energy_history.size(); ++i)
        CHECK(r.energy_history[i] <= r.energy_history[i - 1] + 1e-14);
}

TEST_CASE("minimize: optimizer independence and mesh independence") {
    const Matrix F0 = stretch2(1.2, 0.9);
    const EnergyModel model = hencky_ext(2);

    MinimizeOptions lbfgs;
    lbfgs.seed = 4;
    MinimizeOptions gd;
    gd.seed = 4;
    gd.method = MinimizeOptions::Method::GradientDescent;
    gd.max_iterations = 200000;

    const Mesh mesh = build_mesh(2, 2);
    const MinimizeResult a = minimize(mesh, model, F0, lbfgs);
    const MinimizeResult b = minimize(mesh, model, F0, gd);
    CHECK(a.converged);
    CHECK(b.converged);
    CHECK(a.energy == doctest::Approx(b.energy).epsilon(1e-8));

    // the affine optimum is mesh-resolution independent
    double previous = a.energy;
    for (int k : {4, 8}) {
        const MinimizeResult r = minimize(build_mesh(2, k), model, F0, lbfgs);
        CHECK(r.converged);
        CHECK(r.energy == doctest::Approx(previous).epsilon(1e-8));
        previous = r.energy;
    }
}

TEST_CASE("minimize rejects infeasible boundary data") {
    const Mesh mesh = build_mesh(2, 2);
    Matrix bad(2, 2);
    bad << 1.0, 0.0, 0.0, -1.0;
    CHECK_THROWS_AS(minimize(mesh, hencky_ext(2), bad, MinimizeOptions{}), std::exception);
}

TEST_CASE("csv exports") {
    const Mesh mesh = build_mesh(2, 1);
    const Field x = affine_field(mesh, stretch2(1.1, 1.0));
    const std::string fields = field_csv(mesh, x);
    CHECK(fields.rfind("node,Xx,Xy,x,y", 0) == 0);
    CHECK(std::count(fields.begin(), fields.end(), '\n') == 5); // header + 4 nodes
    const std::string elements = mesh_elements_csv(mesh);
    CHECK(elements.rfind("element,v0,v1,v2", 0) == 0);
    CHECK(std::count(elements.begin(), elements.end(), '\n') == 3);
}

TEST_CASE("minimize result serializes") {
    const Mesh mesh = build_mesh(2, 2);
    const MinimizeResult r = minimize(mesh, hencky_ext(2), stretch2(1.1, 0.95), MinimizeOptions{});
    const nlohmann::json j = r.to_json();
    CHECK(j.contains("energy"));
    CHECK(j.at("converged").get<bool>());
    CHECK(j.at("min_det").get<double>() > 0.0);
}
