#ifndef GEOLAB_OUTPUT_HPP
#define GEOLAB_OUTPUT_HPP

#include <string>
#include <vector>

#include "geolab/geodesics.hpp"
#include "geolab/morse.hpp"

// Deterministic CSV and SVG emission. Floating-point values are printed with
// 17 significant digits so identical configurations produce byte-identical
// files that round-trip exactly.

namespace geolab::output {

std::string format_double(double v);

/// Columns t,r,phi,rdot,phidot,clairaut_c (instantaneous rdot sin^2 phi).
void write_trajectory_csv(const std::string& path, const geodesics::Trajectory& traj);

/// Columns kind,t,r,phi.
void write_events_csv(const std::string& path, const geodesics::Trajectory& traj);

/// Columns c,period_r_measured,period_r_quadrature,period_t,bound.
struct PeriodRow {
    double c, period_r_measured, period_r_quadrature, period_t, bound;
};
void write_period_csv(const std::string& path, const std::vector<PeriodRow>& rows);

/// Columns c,period_r,crossings,index.
void write_index_csv(const std::string& path, const std::vector<morse::IndexGrowthRow>& rows);

/// Columns r,ricci_rr,ricci_t1,ricci_t2.
struct RicciRow {
    double r, rr, t1, t2;
};
void write_ricci_csv(const std::string& path, const std::vector<RicciRow>& rows);

/// Columns r0,phi0,alpha.
struct AngleRow {
    double r0, phi0, alpha;
};
void write_angle_csv(const std::string& path, const std::vector<AngleRow>& rows);

/// Minimal polyline plot of the (r, phi) strip with the fixed viewBox
/// mapping r in [-2, 2], phi in [0, pi].
class StripSvg {
public:
    StripSvg();
    void add_polyline(const std::vector<std::pair<double, double>>& r_phi_points,
                      const std::string& color, double width = 1.0);
    void add_trajectory(const geodesics::Trajectory& traj, const std::string& color,
                        int n_points = 400);
    void add_marker(double r, double phi, const std::string& color, double radius = 3.0);
    /// Foliation leaves cos(phi) = tan(r)/tan(kappa) for a kappa grid.
    void add_leaves(const std::vector<double>& kappas, const std::string& color);
    void write(const std::string& path) const;

private:
    std::pair<double, double> map(double r, double phi) const;
    std::vector<std::string> elements_;
};

} // namespace geolab::output

#endif
