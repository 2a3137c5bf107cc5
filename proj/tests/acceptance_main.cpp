// Acceptance suite driver: runs every criterion, prints one line each,
// exits nonzero if any fails.
#include <polyext/verify.hpp>

#include <iostream>

int main() {
    const auto results = polyext::run_acceptance(std::cout);
    return polyext::all_passed(results) ? 0 : 1;
}
