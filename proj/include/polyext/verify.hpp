////////////////////////////////////////////////////////////////////////////////
// verify.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  The acceptance suite: ten fixed criteria covering profile continuity,
//  extension agreement, polyconvexity evidence, negative controls, the
//  Bruhns ellipticity domain, coercivity, gradient correctness, the discrete
//  minimization demo, the planar appendix functions and the figure data.
//  Sample counts, seeds and tolerances are pinned here.
*///////////////////////////////////////////////////////////////////////////////
#pragma once

#include <polyext/parallel.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace polyext {

struct CriterionResult {
    int index = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

// Runs all criteria, streaming one pass/fail line per criterion to `out`.
std::vector<CriterionResult> run_acceptance(std::ostream &out,
                                            Parallelism mode = Parallelism::OpenMP);

bool all_passed(const std::vector<CriterionResult> &results);

} // namespace polyext
