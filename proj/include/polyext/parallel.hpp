////////////////////////////////////////////////////////////////////////////////
// parallel.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Index-space loop execution. Every data-parallel kernel in the library runs
//  through for_each_index, which has an OpenMP path and a plain serial path.
//  The serial path is the reference implementation: kernels must produce
//  byte-identical results under either mode (per-index work is pure, outputs
//  are index-addressed, reductions happen afterwards in a fixed order).
*///////////////////////////////////////////////////////////////////////////////
#pragma once

#include <cstdint>

namespace polyext {

enum class Parallelism { Serial, OpenMP };

template <typename Fn>
void for_each_index(std::int64_t count, Parallelism mode, Fn &&fn) {
    if (mode == Parallelism::OpenMP) {
#pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < count; ++i)
            fn(i);
    }
    else {
        for (std::int64_t i = 0; i < count; ++i)
            fn(i);
    }
}

} // namespace polyext
