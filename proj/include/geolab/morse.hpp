#ifndef GEOLAB_MORSE_HPP
#define GEOLAB_MORSE_HPP

#include <vector>

#include "geolab/geodesics.hpp"

// Morse index of geodesics via conjugate-point counting. On a surface the
// normal component of a Jacobi field vanishing at the start satisfies the
// scalar equation J'' + K(t) J = 0 with J(0) = 0, J'(0) = 1, and every zero
// in (0, t_end) is a conjugate point of multiplicity one, so the index is
// the zero count.

namespace geolab::morse {

using geodesics::Trajectory;

struct ConjugateReport {
    const Trajectory* geodesic = nullptr; // non-owning
    std::vector<double> jacobi_zeros;     // strictly increasing, in (0, t_end)
    int index = 0;                        // = jacobi_zeros.size()
    int equator_crossings = 0;            // transversal only
    bool nullity_flag = false;            // a zero within 1e-9 of t_end
    double t_end = 0.0;
};

/// Integrate J'' + K(t) J = 0 along the trajectory (curvature from the
/// metrics module at dense-interpolated states) and locate the zeros by sign
/// change plus bisection. Steps are forced to land on the trajectory's event
/// times, where the curvature has its sharpest features.
ConjugateReport jacobi_zeros(const Trajectory& traj, double tol = 1e-10);

struct IndexVsCrossings {
    int index = 0;
    int crossings = 0;
    bool half_bound_ok = false; // 2 * index >= crossings; must hold
    bool full_bound_ok = false; // index >= crossings; reported, not asserted
};

/// Morse index against the transversal equator-crossing count of a
/// product-profile geodesic.
IndexVsCrossings index_vs_crossings(const Trajectory& traj, double tol = 1e-10);

struct GapCheck {
    double max_gap = 0.0;   // widest conjugate gap, including 0 -> first zero
    bool rauch_ok = false;  // max_gap <= pi + tol
    // Full-period ds-lengths measured between consecutive lower turning
    // points; each must exceed 4.
    double min_full_period_length = 0.0;
    bool period_length_ok = true;
    int full_periods_seen = 0;
};

GapCheck conjugate_gap_check(const ConjugateReport& report, double tol = 1e-9);

/// Values of the scalar Jacobi solution J (J(0)=0, J'(0)=1) at the given
/// sorted times; used by the two-geodesic finite-difference oracle.
std::vector<double> jacobi_values(const Trajectory& traj, const std::vector<double>& times,
                                  double tol = 1e-10);

struct IndexGrowthRow {
    double c = 0.0;
    double period_r = 0.0;
    int crossings = 0;
    int index = 0;
};

/// For each c, run the product geodesic from its lower turning point at
/// r = -r_window until it reaches r = 0 and tabulate period, crossings and
/// index. Smaller c gives a smaller period and a larger index.
std::vector<IndexGrowthRow> index_growth_table(const std::vector<double>& c_list, double r_window,
                                               double tol = 1e-10);

} // namespace geolab::morse

#endif
