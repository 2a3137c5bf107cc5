////////////////////////////////////////////////////////////////////////////////
// bench.cpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Timing comparison of the serial reference kernels against the OpenMP
//  kernels: rank-one scans, ellipticity probes, and finite-element assembly.
*///////////////////////////////////////////////////////////////////////////////
#include <polyext/energy.hpp>
#include <polyext/minimize.hpp>
#include <polyext/scan.hpp>

#include <chrono>
#include <cstdio>
#include <omp.h>

using namespace polyext;

namespace {

template <typename Fn>
double time_seconds(Fn &&fn) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void report(const char *label, double serial, double parallel) {
    std::printf("%-28s serial %8.3f s   openmp %8.3f s   speedup %5.2fx\n", label, serial,
                parallel, serial / parallel);
}

} // namespace

int main(int argc, char **argv) {
    std::int64_t samples = 200000;
    if (argc > 1)
        samples = std::atoll(argv[1]);
    std::printf("threads: %d, samples: %lld\n", omp_get_max_threads(),
                static_cast<long long>(samples));

    const EnergyModel ext = make_hencky_extension_model(LameParameters::from_lambda(1.0, 0.0), 3);

    {
        ScanConfig cfg;
        cfg.samples = samples;
        cfg.lo = 0.05;
        cfg.hi = 20.0;
        cfg.n = 3;
        cfg.mode = Parallelism::Serial;
        double w_serial = 0, w_parallel = 0;
        const double ts = time_seconds([&] { w_serial = rank_one_convexity_scan(ext, cfg).worst_margin; });
        cfg.mode = Parallelism::OpenMP;
        const double tp = time_seconds([&] { w_parallel = rank_one_convexity_scan(ext, cfg).worst_margin; });
        report("rank-one scan", ts, tp);
        if (w_serial != w_parallel)
            std::printf("  MISMATCH: serial and openmp reports differ!\n");
    }
    {
        ScanConfig cfg;
        cfg.n = 3;
        EllipticityGrid grid;
        grid.cells_per_axis = 16;
        grid.directions = 32;
        grid.lo = 0.21;
        grid.hi = 1.39;
        const EnergyModel hencky = make_hencky_model(LameParameters::from_lambda(1.0, 0.0), 3);
        cfg.mode = Parallelism::Serial;
        const double ts = time_seconds([&] { ellipticity_probe(hencky, grid, cfg); });
        cfg.mode = Parallelism::OpenMP;
        const double tp = time_seconds([&] { ellipticity_probe(hencky, grid, cfg); });
        report("ellipticity probe", ts, tp);
    }
    {
        const Mesh mesh = build_mesh(3, 8);
        Matrix F0 = Matrix::Identity(3, 3);
        F0(0, 0) = 1.15;
        const Field x = perturbed_field(mesh, F0, 0.05, 1);
        const int repeats = 50;
        const double ts = time_seconds([&] {
            for (int r = 0; r < repeats; ++r)
                total_gradient(mesh, x, ext, Parallelism::Serial);
        });
        const double tp = time_seconds([&] {
            for (int r = 0; r < repeats; ++r)
                total_gradient(mesh, x, ext, Parallelism::OpenMP);
        });
        report("fem gradient assembly", ts, tp);
    }
    return 0;
}
