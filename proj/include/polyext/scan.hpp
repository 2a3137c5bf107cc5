////////////////////////////////////////////////////////////////////////////////
// scan.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Empirical convexity laboratory: scalar convexity/monotonicity checks,
//  Legendre-Hadamard (rank-one) sampling, segment convexity of spectral sums,
//  ellipticity-domain probing on singular-value grids, extension-agreement
//  and coercivity checks, plus directed searches for known-negative controls.
//
//  Every scan draws its per-sample randomness from a stream seeded by
//  (config.seed, sample index) and writes per-sample outcomes into an
//  index-addressed buffer, so reports are byte-identical for a fixed config
//  regardless of Parallelism mode or worker count.
*///////////////////////////////////////////////////////////////////////////////
#pragma once

#include <polyext/energy.hpp>
#include <polyext/parallel.hpp>
#include <polyext/rng.hpp>

#include <json.hpp>

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace polyext {

struct ScanConfig {
    std::uint64_t seed = 1;
    std::int64_t samples = 10000;
    double lo = 0.1;            // singular-value sampling range
    double hi = 10.0;
    double step = 1e-3;         // finite-difference step scale; the actual
                                // rank-one step is step * (1 + ||F||)
    double threshold = 1e-8;    // violation threshold, relative to max(1, |W|)
    int n = 3;
    Parallelism mode = Parallelism::OpenMP;
};

void to_json(nlohmann::json &j, const ScanConfig &c);

struct Witness {
    std::int64_t sample = -1;
    Matrix F;                       // probe point (or segment start)
    Vector a, b;                    // rank-one direction, when applicable
    Matrix F1;                      // segment end, when applicable
    double t = 0.0;                 // segment parameter of the probe
    double second_difference = 0.0; // h^2-normalized
    double margin = 0.0;            // second_difference / max(1, |W|)
};

struct ScanReport {
    std::string kind;
    std::int64_t tested = 0;
    std::int64_t skipped = 0;
    std::vector<Witness> violations;
    double worst_margin = std::numeric_limits<double>::infinity();
    double min_first_difference = std::numeric_limits<double>::infinity(); // scalar checks only
    double max_discrepancy = 0.0;   // agreement checks only
    bool overflow_flagged = false;
    ScanConfig config;

    bool clean() const { return violations.empty(); }
    nlohmann::json to_json() const;
    std::string violations_csv() const; // one row per witness
};

// Midpoint convexity, second differences and (informational) first
// differences of a scalar profile on [lo, hi]. Monotonicity findings go to
// min_first_difference; violations carry convexity failures only.
ScanReport scalar_convexity_check(const ScalarProfile &profile, double lo, double hi,
                                  const ScanConfig &config);

// Second difference of t -> W(F + t a b^T) at t = 0 for random F, a, b.
// Steps leaving GL+(n) are skipped. A sample becomes a violation only when
// the h and h/2 second differences are both negative (Richardson guard).
ScanReport rank_one_convexity_scan(const EnergyModel &model, const ScanConfig &config);

// Convexity of t -> sum phi(sigma_i(F0 + t (F1 - F0))) on [0, 1] along random
// segments. Probes the spectral part only.
ScanReport segment_convexity_scan(const EnergyModel &model, const ScanConfig &config);

struct EllipticityGrid {
    double lo = 0.21;
    double hi = 1.3956124250860895; // e^{1/3}
    int cells_per_axis = 20;
    int directions = 64;
};

struct EllipticityMap {
    EllipticityGrid grid;
    ScanConfig config;
    std::vector<double> axis;            // grid values, shared by all axes
    std::vector<std::uint8_t> violation; // flattened n-dim verdict grid
    std::vector<Witness> witnesses;      // one per violating cell
    std::int64_t cells() const { return static_cast<std::int64_t>(violation.size()); }
    std::int64_t violating_cells() const;
    nlohmann::json to_json() const;
};

// Legendre-Hadamard test at F = diag(l1, ..., ln) for every grid tuple, over
// `directions` random rank-one directions per cell.
EllipticityMap ellipticity_probe(const EnergyModel &model, const EllipticityGrid &grid,
                                 const ScanConfig &config);

// Max relative discrepancy |ext - orig| / max(1, |orig|) over samples with
// singular values in [lo, hi]. Samples beyond config.threshold are violations.
ScanReport extension_agreement_check(const EnergyModel &original, const EnergyModel &extension,
                                     double lo, double hi, const ScanConfig &config);

// Verifies the explicit exponential lower bound of the Hencky extension at
// samples whose largest singular value exceeds e^{1/3} (others are skipped),
// checks W > ||F||^4 on samples with ||F|| >= 50, and probes growth of
// W / ||F||^p for p in {1, 2, 4} along the ray t * I. Saturated evaluations
// are flagged, not failed.
ScanReport coercivity_check(const EnergyModel &model, const ScanConfig &config);

struct DirectedResult {
    bool found = false;
    Witness witness;
};

// Coordinate-refined search for a Legendre-Hadamard violation, starting from
// a coarse grid of diagonal matrices. Used for the known-negative controls.
DirectedResult directed_rank_one_search(const EnergyModel &model, const ScanConfig &config);

// Same idea along diagonal segments for the spectral part.
DirectedResult directed_segment_search(const EnergyModel &model, const ScanConfig &config);

// Independent recomputation of a witness's second difference (fresh
// evaluations, long double combination). Negative value confirms it.
double recompute_rank_one_witness(const EnergyModel &model, const Witness &w, double h);
double recompute_segment_witness(const EnergyModel &model, const Witness &w, double dt);

} // namespace polyext
