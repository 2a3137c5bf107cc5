////////////////////////////////////////////////////////////////////////////////
// minimize.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Desk-scale P1 finite-element minimization of an isotropic energy over
//  piecewise-affine deformations of the unit square (n = 2, triangles) or the
//  unit cube (n = 3, tetrahedra) with Dirichlet boundary data. The deformation
//  gradient is constant per element, so the energy integral is exact.
//
//  Element energies and forces are evaluated in parallel; assembly reduces
//  them in fixed element order so results do not depend on the worker count.
*///////////////////////////////////////////////////////////////////////////////
#pragma once

#include <polyext/energy.hpp>
#include <polyext/parallel.hpp>

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace polyext {

struct Mesh {
    int n = 2;
    int resolution = 1;
    Matrix nodes;                        // node count x n reference coordinates
    std::vector<int> elements;           // (n+1) indices per element, concatenated
    std::vector<std::uint8_t> dirichlet; // per-node boundary flag
    std::vector<Matrix> dm_inv;          // per-element inverse edge matrix
    std::vector<double> ref_volume;      // per-element reference volume

    std::int64_t node_count() const { return nodes.rows(); }
    std::int64_t element_count() const { return static_cast<std::int64_t>(ref_volume.size()); }
    int nodes_per_element() const { return n + 1; }
    const int *element(std::int64_t e) const { return elements.data() + e * (n + 1); }
};

// Uniform simplicial mesh of the unit square / cube at resolution k:
// 2 k^2 triangles or 6 k^3 tetrahedra. `dirichlet_faces` selects the
// constrained part of the boundary: "all" (default) or a comma-separated
// subset of {x-, x+, y-, y+, z-, z+}.
Mesh build_mesh(int n, int k, const std::string &dirichlet_faces = "all");

// Nodal positions, node count x n.
using Field = Matrix;

Field affine_field(const Mesh &mesh, const Matrix &F0);

// Affine field with seeded uniform jitter on the non-Dirichlet nodes. The
// amplitude is halved until every element keeps det F > 0.
Field perturbed_field(const Mesh &mesh, const Matrix &F0, double amplitude, std::uint64_t seed);

// Deformation gradient of one element.
Matrix element_gradient(const Mesh &mesh, const Field &x, std::int64_t e);

// Smallest element determinant; feasibility means > 0.
double min_element_det(const Mesh &mesh, const Field &x);

// Sum of ref_volume(e) * W(F_e); +infinity when some element is inverted.
double total_energy(const Mesh &mesh, const Field &x, const EnergyModel &model,
                    Parallelism mode = Parallelism::OpenMP);

// Nodal gradient of total_energy, zeroed at Dirichlet nodes. `at_kink`
// reports whether any element evaluated a one-sided profile derivative.
Field total_gradient(const Mesh &mesh, const Field &x, const EnergyModel &model,
                     Parallelism mode = Parallelism::OpenMP, bool *at_kink = nullptr);

struct MinimizeOptions {
    int max_iterations = 20000;
    double grad_tol = 1e-7;
    std::uint64_t seed = 1;
    double perturbation = 0.05;  // initial interior jitter, relative to 1/k
    enum class Method { GradientDescent, Lbfgs } method = Method::Lbfgs;
    int lbfgs_memory = 10;
    Parallelism mode = Parallelism::OpenMP;
};

struct MinimizeResult {
    double energy = 0.0;
    int iterations = 0;
    double grad_norm = 0.0;
    double min_det = 0.0;
    bool converged = false;
    std::vector<double> energy_history; // accepted iterates, nonincreasing
    Field field;

    nlohmann::json to_json() const;
};

// Descent with Armijo backtracking; steps that invert an element are
// rejected. Dirichlet nodes are pinned to F0 * X.
MinimizeResult minimize(const Mesh &mesh, const EnergyModel &model, const Matrix &F0,
                        const MinimizeOptions &options = {});

// CSV exports: node id, reference coordinates, current coordinates; and the
// element list.
std::string field_csv(const Mesh &mesh, const Field &x);
std::string mesh_elements_csv(const Mesh &mesh);

} // namespace polyext
