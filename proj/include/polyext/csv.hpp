////////////////////////////////////////////////////////////////////////////////
// csv.hpp
////////////////////////////////////////////////////////////////////////////////
/*! @file
//  CSV formatting helpers: '.' decimal separator, 17 significant digits so
//  doubles round-trip losslessly.
*///////////////////////////////////////////////////////////////////////////////
#pragma once

#include <cstdio>
#include <string>

namespace polyext {

inline std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace polyext
