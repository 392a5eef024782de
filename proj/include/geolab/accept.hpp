#ifndef GEOLAB_ACCEPT_HPP
#define GEOLAB_ACCEPT_HPP

#include <iosfwd>
#include <string>
#include <vector>

// The acceptance suite: one entry per quantitative claim the library is
// required to reproduce, each with its tolerance pinned in code.

namespace geolab::accept {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

std::vector<CriterionResult> run_all();

/// Print one pass/fail line per criterion; returns 0 when all pass, 1
/// otherwise.
int report(const std::vector<CriterionResult>& results, std::ostream& os);

} // namespace geolab::accept

#endif
