#include <polyext/minimize.hpp>

#include <polyext/csv.hpp>
#include <polyext/rng.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace polyext {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool face_selected(const std::string &spec, const std::string &face) {
    if (spec == "all")
        return true;
    std::size_t pos = 0;
    while (pos != std::string::npos) {
        const std::size_t next = spec.find(',', pos);
        const std::string token = spec.substr(pos, next == std::string::npos ? next : next - pos);
        if (token == face)
            return true;
        pos = next == std::string::npos ? next : next + 1;
    }
    return false;
}

} // namespace

Mesh build_mesh(int n, int k, const std::string &dirichlet_faces) {
    if (n != 2 && n != 3)
        throw std::invalid_argument("build_mesh: n must be 2 or 3");
    if (k < 1)
        throw std::invalid_argument("build_mesh: resolution must be >= 1");

    Mesh mesh;
    mesh.n = n;
    mesh.resolution = k;
    const int m = k + 1;

    if (n == 2) {
        mesh.nodes.resize(static_cast<Eigen::Index>(m) * m, 2);
        auto id = [m](int i, int j) { return j * m + i; };
        for (int j = 0; j < m; ++j)
            for (int i = 0; i < m; ++i) {
                mesh.nodes(id(i, j), 0) = double(i) / k;
                mesh.nodes(id(i, j), 1) = double(j) / k;
            }
        for (int j = 0; j < k; ++j)
            for (int i = 0; i < k; ++i) {
                const int v00 = id(i, j), v10 = id(i + 1, j);
                const int v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
                mesh.elements.insert(mesh.elements.end(), {v00, v10, v11});
                mesh.elements.insert(mesh.elements.end(), {v00, v11, v01});
            }
    }
    else {
        mesh.nodes.resize(static_cast<Eigen::Index>(m) * m * m, 3);
        auto id = [m](int i, int j, int l) { return (l * m + j) * m + i; };
        for (int l = 0; l < m; ++l)
            for (int j = 0; j < m; ++j)
                for (int i = 0; i < m; ++i) {
                    const int node = id(i, j, l);
                    mesh.nodes(node, 0) = double(i) / k;
                    mesh.nodes(node, 1) = double(j) / k;
                    mesh.nodes(node, 2) = double(l) / k;
                }
        // Kuhn split: one tetrahedron per axis permutation, walking from the
        // low corner to the high corner of each cell.
        const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
        auto parity = [](const int *p) {
            int inv = 0;
            for (int i = 0; i < 3; ++i)
                for (int j = i + 1; j < 3; ++j)
                    inv += p[i] > p[j];
            return inv % 2;
        };
        for (int l = 0; l < k; ++l)
            for (int j = 0; j < k; ++j)
                for (int i = 0; i < k; ++i)
                    for (const auto &p : perms) {
                        int c[3] = {i, j, l};
                        int verts[4];
                        verts[0] = id(c[0], c[1], c[2]);
                        for (int step = 0; step < 3; ++step) {
                            ++c[p[step]];
                            verts[step + 1] = id(c[0], c[1], c[2]);
                        }
                        if (parity(p))
                            std::swap(verts[1], verts[2]);
                        mesh.elements.insert(mesh.elements.end(), verts, verts + 4);
                    }
    }

    // boundary flags
    const std::int64_t nodes = mesh.node_count();
    mesh.dirichlet.assign(static_cast<std::size_t>(nodes), 0);
    const char axes[3] = {'x', 'y', 'z'};
    for (std::int64_t v = 0; v < nodes; ++v)
        for (int d = 0; d < n; ++d) {
            const double c = mesh.nodes(v, d);
            if (c == 0.0 && face_selected(dirichlet_faces, std::string(1, axes[d]) + "-"))
                mesh.dirichlet[static_cast<std::size_t>(v)] = 1;
            if (c == 1.0 && face_selected(dirichlet_faces, std::string(1, axes[d]) + "+"))
                mesh.dirichlet[static_cast<std::size_t>(v)] = 1;
        }

    // reference edge matrices
    const std::int64_t elements = static_cast<std::int64_t>(mesh.elements.size()) / (n + 1);
    mesh.dm_inv.reserve(static_cast<std::size_t>(elements));
    mesh.ref_volume.reserve(static_cast<std::size_t>(elements));
    double factorial = n == 2 ? 2.0 : 6.0;
    for (std::int64_t e = 0; e < elements; ++e) {
        const int *v = mesh.element(e);
        Matrix dm(n, n);
        for (int c = 0; c < n; ++c)
            dm.col(c) = (mesh.nodes.row(v[c + 1]) - mesh.nodes.row(v[0])).transpose();
        const double det = determinant(dm);
        if (!(det > 0.0))
            throw std::logic_error("build_mesh: non-positive element volume");
        mesh.dm_inv.push_back(dm.inverse());
        mesh.ref_volume.push_back(det / factorial);
    }
    return mesh;
}

Field affine_field(const Mesh &mesh, const Matrix &F0) {
    if (F0.rows() != mesh.n || F0.cols() != mesh.n)
        throw std::invalid_argument("affine_field: boundary matrix has wrong dimension");
    return mesh.nodes * F0.transpose();
}

Field perturbed_field(const Mesh &mesh, const Matrix &F0, double amplitude, std::uint64_t seed) {
    Field x = affine_field(mesh, F0);
    if (amplitude <= 0.0)
        return x;
    double amp = amplitude / mesh.resolution;
    for (int attempt = 0; attempt < 60; ++attempt) {
        Field candidate = x;
        auto rng = sample_stream(seed, attempt);
        std::uniform_real_distribution<double> unif(-amp, amp);
        for (std::int64_t v = 0; v < mesh.node_count(); ++v) {
            if (mesh.dirichlet[static_cast<std::size_t>(v)])
                continue;
            for (int d = 0; d < mesh.n; ++d)
                candidate(v, d) += unif(rng);
        }
        if (min_element_det(mesh, candidate) > 0.0)
            return candidate;
        amp *= 0.5;
    }
    return x;
}

Matrix element_gradient(const Mesh &mesh, const Field &x, std::int64_t e) {
    const int n = mesh.n;
    const int *v = mesh.element(e);
    Matrix ds(n, n);
    for (int c = 0; c < n; ++c)
        ds.col(c) = (x.row(v[c + 1]) - x.row(v[0])).transpose();
    return ds * mesh.dm_inv[static_cast<std::size_t>(e)];
}

double min_element_det(const Mesh &mesh, const Field &x) {
    double worst = kInf;
    for (std::int64_t e = 0; e < mesh.element_count(); ++e)
        worst = std::min(worst, determinant(element_gradient(mesh, x, e)));
    return worst;
}

double total_energy(const Mesh &mesh, const Field &x, const EnergyModel &model, Parallelism mode) {
    const std::int64_t elements = mesh.element_count();
    std::vector<double> energy(static_cast<std::size_t>(elements), 0.0);
    std::vector<std::uint8_t> infeasible(static_cast<std::size_t>(elements), 0);

    for_each_index(elements, mode, [&](std::int64_t e) {
        const Matrix F = element_gradient(mesh, x, e);
        if (!(determinant(F) > 0.0)) {
            infeasible[static_cast<std::size_t>(e)] = 1;
            return;
        }
        energy[static_cast<std::size_t>(e)] =
            mesh.ref_volume[static_cast<std::size_t>(e)] * model.value(DeformationGradient(F));
    });

    for (auto flag : infeasible)
        if (flag)
            return kInf;
    double total = 0.0;
    for (double w : energy)
        total += w;
    return total;
}

Field total_gradient(const Mesh &mesh, const Field &x, const EnergyModel &model, Parallelism mode,
                     bool *at_kink) {
    const int n = mesh.n;
    const std::int64_t elements = mesh.element_count();
    std::vector<Matrix> force(static_cast<std::size_t>(elements));
    std::vector<std::uint8_t> kink(static_cast<std::size_t>(elements), 0);

    for_each_index(elements, mode, [&](std::int64_t e) {
        const Matrix F = element_gradient(mesh, x, e);
        const auto grad = model.gradient(DeformationGradient(F));
        kink[static_cast<std::size_t>(e)] = grad.at_kink;
        // dE_e/d(node positions): columns of vol * P * Dm^{-T} act on nodes
        // 1..n, node 0 collects the negative sum.
        force[static_cast<std::size_t>(e)] = mesh.ref_volume[static_cast<std::size_t>(e)] *
                                             grad.gradient *
                                             mesh.dm_inv[static_cast<std::size_t>(e)].transpose();
    });

    Field g = Field::Zero(mesh.node_count(), n);
    for (std::int64_t e = 0; e < elements; ++e) {
        const int *v = mesh.element(e);
        const Matrix &h = force[static_cast<std::size_t>(e)];
        for (int c = 0; c < n; ++c) {
            g.row(v[c + 1]) += h.col(c).transpose();
            g.row(v[0]) -= h.col(c).transpose();
        }
    }
    for (std::int64_t v = 0; v < mesh.node_count(); ++v)
        if (mesh.dirichlet[static_cast<std::size_t>(v)])
            g.row(v).setZero();

    if (at_kink) {
        *at_kink = false;
        for (auto flag : kink)
            *at_kink |= (flag != 0);
    }
    return g;
}

nlohmann::json MinimizeResult::to_json() const {
    return nlohmann::json{{"energy", energy},       {"iterations", iterations},
                          {"grad_norm", grad_norm}, {"min_det", min_det},
                          {"converged", converged}};
}

MinimizeResult minimize(const Mesh &mesh, const EnergyModel &model, const Matrix &F0,
                        const MinimizeOptions &options) {
    Field x = perturbed_field(mesh, F0, options.perturbation, options.seed);
    double energy = total_energy(mesh, x, model, options.mode);
    if (!std::isfinite(energy))
        throw std::invalid_argument("minimize: initial field is infeasible");

    MinimizeResult result;
    result.energy_history.push_back(energy);

    const auto flat = [](const Field &f) {
        return Eigen::Map<const Eigen::VectorXd>(f.data(), f.size());
    };

    Field g = total_gradient(mesh, x, model, options.mode);
    double gnorm = flat(g).norm();

    std::deque<Eigen::VectorXd> mem_s, mem_y;
    double step_guess = 1.0;

    int iter = 0;
    for (; iter < options.max_iterations && gnorm > options.grad_tol; ++iter) {
        Eigen::VectorXd direction = -flat(g);

        if (options.method == MinimizeOptions::Method::Lbfgs && !mem_s.empty()) {
            // two-loop recursion
            const std::size_t m = mem_s.size();
            std::vector<double> alpha(m), rho(m);
            Eigen::VectorXd q = -direction; // = gradient
            for (std::size_t idx = m; idx-- > 0;) {
                rho[idx] = 1.0 / mem_y[idx].dot(mem_s[idx]);
                alpha[idx] = rho[idx] * mem_s[idx].dot(q);
                q -= alpha[idx] * mem_y[idx];
            }
            const double scaling = mem_s.back().dot(mem_y.back()) / mem_y.back().squaredNorm();
            q *= scaling;
            for (std::size_t idx = 0; idx < m; ++idx) {
                const double beta = rho[idx] * mem_y[idx].dot(q);
                q += (alpha[idx] - beta) * mem_s[idx];
            }
            direction = -q;
            if (direction.dot(flat(g)) >= 0.0)
                direction = -flat(g); // fall back to steepest descent
        }

        const double slope = direction.dot(flat(g));
        double step = options.method == MinimizeOptions::Method::Lbfgs ? 1.0 : step_guess;
        bool accepted = false;
        Field x_new;
        double energy_new = 0.0;
        for (int ls = 0; ls < 60; ++ls) {
            x_new = x + step * Eigen::Map<const Field>(direction.data(), x.rows(), x.cols());
            energy_new = total_energy(mesh, x_new, model, options.mode);
            // infeasible (inverted element) evaluates to +inf and is rejected
            if (energy_new <= energy + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) {
            // restart from steepest descent once before giving up
            if (!mem_s.empty()) {
                mem_s.clear();
                mem_y.clear();
                continue;
            }
            break;
        }

        Field g_new = total_gradient(mesh, x_new, model, options.mode);
        if (options.method == MinimizeOptions::Method::Lbfgs) {
            Eigen::VectorXd s = step * direction;
            Eigen::VectorXd y = flat(g_new) - flat(g);
            if (s.dot(y) > 1e-14 * s.norm() * y.norm()) {
                mem_s.push_back(std::move(s));
                mem_y.push_back(std::move(y));
                if (static_cast<int>(mem_s.size()) > options.lbfgs_memory) {
                    mem_s.pop_front();
                    mem_y.pop_front();
                }
            }
        }
        else {
            step_guess = std::min(step * 2.0, 1e6);
        }

        x = std::move(x_new);
        g = std::move(g_new);
        energy = energy_new;
        gnorm = flat(g).norm();
        result.energy_history.push_back(energy);
    }

    result.energy = energy;
    result.iterations = iter;
    result.grad_norm = gnorm;
    result.min_det = min_element_det(mesh, x);
    result.converged = gnorm <= options.grad_tol;
    result.field = std::move(x);
    return result;
}

std::string field_csv(const Mesh &mesh, const Field &x) {
    std::ostringstream out;
    out << "node";
    const char axes[3] = {'x', 'y', 'z'};
    for (int d = 0; d < mesh.n; ++d)
        out << ",X" << axes[d];
    for (int d = 0; d < mesh.n; ++d)
        out << "," << axes[d];
    out << "\n";
    for (std::int64_t v = 0; v < mesh.node_count(); ++v) {
        out << v;
        for (int d = 0; d < mesh.n; ++d)
            out << "," << csv_double(mesh.nodes(v, d));
        for (int d = 0; d < mesh.n; ++d)
            out << "," << csv_double(x(v, d));
        out << "\n";
    }
    return out.str();
}

std::string mesh_elements_csv(const Mesh &mesh) {
    std::ostringstream out;
    out << "element";
    for (int c = 0; c <= mesh.n; ++c)
        out << ",v" << c;
    out << "\n";
    for (std::int64_t e = 0; e < mesh.element_count(); ++e) {
        out << e;
        for (int c = 0; c <= mesh.n; ++c)
            out << "," << mesh.element(e)[c];
        out << "\n";
    }
    return out.str();
}

} // namespace polyext
