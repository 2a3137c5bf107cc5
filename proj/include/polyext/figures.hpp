////////////////////////////////////////////////////////////////////////////////
// figures.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  Plot-data emission: CSV tables (589-point grids) for the profile family
//  phi_gamma, the radial energy sections f_gamma(l) = W~_gamma(l * I) at n = 3,
//  the volumetric part psi against ln^2, and the double well with its convex
//  hull.
*///////////////////////////////////////////////////////////////////////////////
#pragma once

#include <string>
#include <vector>

namespace polyext {

inline constexpr int kFigurePoints = 589;

// "phi": lambda in [0.35, 4.2], curves gamma in {0, 1/4, 1/2, 1}.
// "radial": lambda in [0.07, 2.73], curves 3 ln^2 and f_gamma for gamma in {1/4, 1/2}.
// "psi": t in [0.014, 7], curves psi (Lambda = 2) and ln^2(t).
// "hull": x in [-1.47, 1.47], curves (x^2-1)^2 and its convex hull.
std::string make_figure_csv(const std::string &figure);

std::vector<std::string> figure_names();

} // namespace polyext
