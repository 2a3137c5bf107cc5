////////////////////////////////////////////////////////////////////////////////
// rng.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Seeded random sampling used by the scans and tests: per-sample RNG streams
//  (stream i of a scan depends only on (seed, i), never on worker count or
//  iteration order), Haar-distributed rotations, and random deformation
//  gradients with prescribed singular-value ranges.
*///////////////////////////////////////////////////////////////////////////////
#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace polyext {

// splitmix64; used to decorrelate (seed, index) pairs before seeding the engine.
std::uint64_t splitmix64(std::uint64_t x);

// Independent RNG stream for one sample of a scan.
std::mt19937_64 sample_stream(std::uint64_t seed, std::int64_t index);

// Haar-distributed rotation from SO(n). Exact constructions for n = 2 (angle)
// and n = 3 (unit quaternion); QR of a Gaussian matrix with sign fixes otherwise.
Eigen::MatrixXd random_rotation(int n, std::mt19937_64 &rng);

// Unit vector uniform on the sphere S^{n-1}.
Eigen::VectorXd random_unit_vector(int n, std::mt19937_64 &rng);

// Q * diag(sigma) * R^T with Haar rotations Q, R and singular values sampled
// log-uniformly in [lo, hi]. Always lies in GL+(n).
Eigen::MatrixXd random_deformation(int n, double lo, double hi, std::mt19937_64 &rng);

// Same but with singular values sampled uniformly (used for agreement boxes).
Eigen::MatrixXd random_deformation_uniform(int n, double lo, double hi, std::mt19937_64 &rng);

} // namespace polyext
