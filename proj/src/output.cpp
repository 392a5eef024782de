#include "geolab/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace geolab::output {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kWidth = 800.0;
constexpr double kHeight = 628.318530717958648; // 200 * pi

std::ofstream open_or_throw(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open output file: " + path);
    return f;
}

} // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_trajectory_csv(const std::string& path, const geodesics::Trajectory& traj) {
    auto f = open_or_throw(path);
    f << "t,r,phi,rdot,phidot,clairaut_c\n";
    for (const auto& s : traj.samples) {
        f << format_double(s.t) << ',' << format_double(s.r) << ',' << format_double(s.phi) << ','
          << format_double(s.rdot) << ',' << format_double(s.phidot) << ','
          << format_double(s.clairaut()) << '\n';
    }
}

void write_events_csv(const std::string& path, const geodesics::Trajectory& traj) {
    auto f = open_or_throw(path);
    f << "kind,t,r,phi\n";
    for (const auto& ev : traj.events) {
        f << geodesics::event_kind_name(ev.kind) << ',' << format_double(ev.t) << ','
          << format_double(ev.state.r) << ',' << format_double(ev.state.phi) << '\n';
    }
}

void write_period_csv(const std::string& path, const std::vector<PeriodRow>& rows) {
    auto f = open_or_throw(path);
    f << "c,period_r_measured,period_r_quadrature,period_t,bound\n";
    for (const auto& r : rows) {
        f << format_double(r.c) << ',' << format_double(r.period_r_measured) << ','
          << format_double(r.period_r_quadrature) << ',' << format_double(r.period_t) << ','
          << format_double(r.bound) << '\n';
    }
}

void write_index_csv(const std::string& path, const std::vector<morse::IndexGrowthRow>& rows) {
    auto f = open_or_throw(path);
    f << "c,period_r,crossings,index\n";
    for (const auto& r : rows) {
        f << format_double(r.c) << ',' << format_double(r.period_r) << ',' << r.crossings << ','
          << r.index << '\n';
    }
}

void write_ricci_csv(const std::string& path, const std::vector<RicciRow>& rows) {
    auto f = open_or_throw(path);
    f << "r,ricci_rr,ricci_t1,ricci_t2\n";
    for (const auto& r : rows) {
        f << format_double(r.r) << ',' << format_double(r.rr) << ',' << format_double(r.t1) << ','
          << format_double(r.t2) << '\n';
    }
}

void write_angle_csv(const std::string& path, const std::vector<AngleRow>& rows) {
    auto f = open_or_throw(path);
    f << "r0,phi0,alpha\n";
    for (const auto& r : rows) {
        f << format_double(r.r0) << ',' << format_double(r.phi0) << ',' << format_double(r.alpha)
          << '\n';
    }
}

StripSvg::StripSvg() {
    // Strip outline and the midlines r = 0, phi = pi/2.
    std::ostringstream os;
    os << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" fill=\"white\" stroke=\"black\"/>\n";
    const auto mid = map(0.0, 0.0);
    os << "<line x1=\"" << mid.first << "\" y1=\"0\" x2=\"" << mid.first << "\" y2=\"" << kHeight
       << "\" stroke=\"#cccccc\"/>\n";
    const auto eq = map(-2.0, kPi / 2.0);
    os << "<line x1=\"0\" y1=\"" << eq.second << "\" x2=\"" << kWidth << "\" y2=\"" << eq.second
       << "\" stroke=\"#cccccc\"/>\n";
    elements_.push_back(os.str());
}

std::pair<double, double> StripSvg::map(double r, double phi) const {
    return {(r + 2.0) / 4.0 * kWidth, (1.0 - phi / kPi) * kHeight};
}

void StripSvg::add_polyline(const std::vector<std::pair<double, double>>& pts,
                            const std::string& color, double width) {
    if (pts.empty()) return;
    std::ostringstream os;
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
       << "\" points=\"";
    for (const auto& [r, phi] : pts) {
        const auto [x, y] = map(r, phi);
        os << format_double(x) << ',' << format_double(y) << ' ';
    }
    os << "\"/>\n";
    elements_.push_back(os.str());
}

void StripSvg::add_trajectory(const geodesics::Trajectory& traj, const std::string& color,
                              int n_points) {
    std::vector<std::pair<double, double>> pts;
    pts.reserve(n_points + 1);
    const double t0 = traj.t_begin(), t1 = traj.t_end();
    for (int i = 0; i <= n_points; ++i) {
        const auto s = traj.state_at(t0 + (t1 - t0) * i / n_points);
        pts.emplace_back(s.r, s.phi);
    }
    add_polyline(pts, color);
}

void StripSvg::add_marker(double r, double phi, const std::string& color, double radius) {
    const auto [x, y] = map(r, phi);
    std::ostringstream os;
    os << "<circle cx=\"" << format_double(x) << "\" cy=\"" << format_double(y) << "\" r=\""
       << radius << "\" fill=\"" << color << "\"/>\n";
    elements_.push_back(os.str());
}

void StripSvg::add_leaves(const std::vector<double>& kappas, const std::string& color) {
    for (double kappa : kappas) {
        std::vector<std::pair<double, double>> pts;
        const int n = 200;
        for (int i = 0; i <= n; ++i) {
            const double phi = kPi * i / n;
            pts.emplace_back(geodesics::leaf_r_of_phi(kappa, phi), phi);
        }
        add_polyline(pts, color, 0.5);
    }
}

void StripSvg::write(const std::string& path) const {
    auto f = open_or_throw(path);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kWidth << ' ' << kHeight
      << "\">\n";
    f << "<!-- geolab svg v1 -->\n";
    for (const auto& e : elements_) f << e;
    f << "</svg>\n";
}

} // namespace geolab::output
