#include <polyext/rng.hpp>

#include <cmath>

namespace polyext {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::mt19937_64 sample_stream(std::uint64_t seed, std::int64_t index) {
    const std::uint64_t s = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(index)));
    return std::mt19937_64(s);
}

Eigen::MatrixXd random_rotation(int n, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    if (n == 2) {
        const double theta = 2.0 * M_PI * unif(rng);
        Eigen::MatrixXd q(2, 2);
        q << std::cos(theta), -std::sin(theta),
             std::sin(theta),  std::cos(theta);
        return q;
    }
    if (n == 3) {
        // Unit quaternion -> rotation matrix.
        double w = gauss(rng), x = gauss(rng), y = gauss(rng), z = gauss(rng);
        const double s = std::sqrt(w * w + x * x + y * y + z * z);
        w /= s; x /= s; y /= s; z /= s;
        Eigen::MatrixXd q(3, 3);
        q << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w),     2 * (x * z + y * w),
             2 * (x * y + z * w),     1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
             2 * (x * z - y * w),     2 * (y * z + x * w),     1 - 2 * (x * x + y * y);
        return q;
    }

    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < n; ++i)
        if (r(i, i) < 0)
            q.col(i) = -q.col(i);
    if (q.determinant() < 0)
        q.col(0) = -q.col(0);
    return q;
}

Eigen::VectorXd random_unit_vector(int n, std::mt19937_64 &rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Eigen::VectorXd v(n);
    double norm2 = 0.0;
    do {
        for (int i = 0; i < n; ++i)
            v[i] = gauss(rng);
        norm2 = v.squaredNorm();
    } while (norm2 < 1e-12);
    return v / std::sqrt(norm2);
}

Eigen::MatrixXd random_deformation(int n, double lo, double hi, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    Eigen::VectorXd sigma(n);
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int i = 0; i < n; ++i)
        sigma[i] = std::exp(llo + (lhi - llo) * unif(rng));
    const Eigen::MatrixXd q = random_rotation(n, rng);
    const Eigen::MatrixXd r = random_rotation(n, rng);
    return q * sigma.asDiagonal() * r.transpose();
}

Eigen::MatrixXd random_deformation_uniform(int n, double lo, double hi, std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> unif(lo, hi);
    Eigen::VectorXd sigma(n);
    for (int i = 0; i < n; ++i)
        sigma[i] = unif(rng);
    const Eigen::MatrixXd q = random_rotation(n, rng);
    const Eigen::MatrixXd r = random_rotation(n, rng);
    return q * sigma.asDiagonal() * r.transpose();
}

} // namespace polyext
