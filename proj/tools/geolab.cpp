// geolab: geodesics, Morse indices and boundary shooting on degenerate
// rotationally symmetric quotient metrics over the strip R x [0, pi].

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "geolab/accept.hpp"
#include "geolab/geodesics.hpp"
#include "geolab/metrics.hpp"
#include "geolab/morse.hpp"
#include "geolab/output.hpp"
#include "geolab/shooting.hpp"

namespace {

using nlohmann::json;
using namespace geolab;
using geodesics::LambdaProfile;

constexpr double kPi = 3.14159265358979323846;

struct RunConfig {
    json raw = json::object();
    std::optional<std::string> profile_override; // inline json string from --profile

    double ode_tol = 1e-10;
    double event_tol = 1e-12;
    double root_tol = 1e-6;

    std::string csv_path, svg_path, json_path;

    // Per-command scalar overrides (NaN = unset).
    double c = NAN, kappa = NAN, r0 = NAN, epsilon = NAN, tol = NAN;

    void load(const std::string& path) {
        std::ifstream f(path);
        if (!f) throw Error("cannot open config file: " + path);
        f >> raw;
        if (raw.contains("tolerances")) {
            const auto& t = raw["tolerances"];
            ode_tol = t.value("ode_tol", ode_tol);
            event_tol = t.value("event_tol", event_tol);
            root_tol = t.value("root_tol", root_tol);
        }
        if (raw.contains("outputs")) {
            const auto& o = raw["outputs"];
            csv_path = o.value("csv_path", csv_path);
            svg_path = o.value("svg_path", svg_path);
            json_path = o.value("json_path", json_path);
        }
        if (!(ode_tol > 0.0 && event_tol > 0.0 && root_tol > 0.0)) {
            throw DomainError("config: tolerances must be positive");
        }
    }

    LambdaProfile profile(const char* fallback_kind) const {
        if (profile_override) return LambdaProfile::from_json(json::parse(*profile_override));
        if (raw.contains("profile")) return LambdaProfile::from_json(raw.at("profile"));
        return LambdaProfile::from_json(json{{"kind", fallback_kind}});
    }

    double num(const char* key, double cli_value, double fallback) const {
        if (!std::isnan(cli_value)) return cli_value;
        if (raw.contains(key)) return raw.at(key).get<double>();
        return fallback;
    }

    std::vector<double> list(const char* key, std::vector<double> fallback) const {
        if (raw.contains(key)) return raw.at(key).get<std::vector<double>>();
        return fallback;
    }

    void write_json(const json& j) const {
        if (json_path.empty()) {
            std::cout << j.dump(2) << "\n";
            return;
        }
        std::ofstream f(json_path, std::ios::binary);
        if (!f) throw Error("cannot open output file: " + json_path);
        f << j.dump(2) << "\n";
    }
};

std::string events_path_for(const std::string& csv_path) {
    const auto dot = csv_path.rfind('.');
    if (dot == std::string::npos) return csv_path + ".events.csv";
    return csv_path.substr(0, dot) + ".events" + csv_path.substr(dot);
}

int cmd_trace(const RunConfig& cfg) {
    const auto profile = cfg.profile("product");
    const double c = cfg.num("c", cfg.c, 0.5);
    const double l = geodesics::half_period_length(c);
    const double t_end = cfg.num("t_end", NAN, 3.0 * 2.0 * l);

    geodesics::IntegrateOptions opt;
    opt.rtol = opt.atol = cfg.ode_tol;
    opt.event_tol = cfg.event_tol;
    const auto traj = geodesics::integrate_t(profile, geodesics::turning_point_state(c, 0.0),
                                             t_end, opt);

    if (!cfg.csv_path.empty()) {
        output::write_trajectory_csv(cfg.csv_path, traj);
        output::write_events_csv(events_path_for(cfg.csv_path), traj);
    }
    if (!cfg.svg_path.empty()) {
        output::StripSvg svg;
        svg.add_trajectory(traj, "steelblue", 800);
        svg.write(cfg.svg_path);
    }

    double speed_drift = 0.0, clairaut_drift = 0.0, confine = 1.0;
    for (const auto& s : traj.samples) {
        speed_drift = std::max(speed_drift, std::abs(s.speed_sq(profile) - 1.0));
        if (profile.is_product()) clairaut_drift = std::max(clairaut_drift, std::abs(s.clairaut() - c));
        confine = std::min(confine, std::sin(s.phi) - std::abs(c));
    }
    cfg.write_json(json{{"c", c},
                        {"t_end", t_end},
                        {"samples", traj.samples.size()},
                        {"events", traj.events.size()},
                        {"speed_drift", speed_drift},
                        {"clairaut_drift", clairaut_drift},
                        {"min_confinement", confine}});
    const bool ok = speed_drift <= 10.0 * cfg.ode_tol + 1e-12 &&
                    clairaut_drift <= 10.0 * cfg.ode_tol + 1e-12 &&
                    confine >= -10.0 * cfg.ode_tol;
    return ok ? 0 : 2;
}

int cmd_period_table(const RunConfig& cfg) {
    std::vector<double> c_list = cfg.list("c_list", {0.5, 0.2, 0.1, 0.05, 0.01});
    if (!std::isnan(cfg.c)) c_list = {cfg.c};

    const auto product = LambdaProfile::product();
    std::vector<output::PeriodRow> rows;
    bool ok = true;
    for (double c : c_list) {
        const double l = geodesics::half_period_length(c);
        geodesics::IntegrateOptions opt;
        opt.rtol = opt.atol = cfg.ode_tol;
        const auto s0 = geodesics::turning_point_state(c, 0.0);
        const auto traj = geodesics::integrate_t(product, s0, 2.2 * l, opt);
        double in_r = NAN, in_t = NAN;
        for (const auto& ev : traj.events) {
            if (ev.kind == geodesics::EventKind::TurningPoint && ev.direction == 1) {
                in_r = ev.state.r - s0.r;
                in_t = ev.t;
                break;
            }
        }
        const double quad = 4.0 * geodesics::quarter_period(c);
        const double bound = geodesics::period_upper_bound(c);
        rows.push_back({c, in_r, quad, in_t, bound});
        if (!(in_r < bound) || !(quad < bound) || !(std::abs(in_r - quad) <= 1e-6)) ok = false;
    }
    if (!cfg.csv_path.empty()) output::write_period_csv(cfg.csv_path, rows);

    json jrows = json::array();
    for (const auto& r : rows) {
        jrows.push_back(json{{"c", r.c},
                             {"period_r_measured", r.period_r_measured},
                             {"period_r_quadrature", r.period_r_quadrature},
                             {"period_t", r.period_t},
                             {"bound", r.bound}});
    }
    cfg.write_json(json{{"rows", jrows}, {"all_below_bound", ok}});
    return ok ? 0 : 2;
}

int cmd_index_table(const RunConfig& cfg) {
    std::vector<double> c_list = cfg.list("c_list", {0.5, 0.1, 0.02, 0.005});
    if (!std::isnan(cfg.c)) c_list = {cfg.c};
    const double r_window = cfg.num("r_window", NAN, 5.0);

    const auto rows = morse::index_growth_table(c_list, r_window, cfg.ode_tol);
    if (!cfg.csv_path.empty()) output::write_index_csv(cfg.csv_path, rows);

    if (!cfg.svg_path.empty()) {
        // Overlay the trajectory of the last (smallest-c) row with its
        // conjugate points marked.
        output::StripSvg svg;
        const double c = c_list.back();
        geodesics::IntegrateOptions opt;
        opt.rtol = opt.atol = cfg.ode_tol;
        opt.stop_at_r = 0.0;
        const auto traj = geodesics::integrate_t(
            LambdaProfile::product(), geodesics::turning_point_state(c, -r_window),
            (r_window / (4.0 * geodesics::quarter_period(c)) + 2.0) * 2.0 * kPi, opt);
        svg.add_trajectory(traj, "steelblue", 1200);
        const auto rep = morse::jacobi_zeros(traj, cfg.ode_tol);
        for (double z : rep.jacobi_zeros) {
            const auto s = traj.state_at(z);
            svg.add_marker(s.r, s.phi, "crimson");
        }
        svg.write(cfg.svg_path);
    }

    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (!(rows[i].index >= rows[i - 1].index && rows[i].period_r <= rows[i - 1].period_r)) {
            monotone = false;
        }
    }
    json jrows = json::array();
    for (const auto& r : rows) {
        jrows.push_back(json{
            {"c", r.c}, {"period_r", r.period_r}, {"crossings", r.crossings}, {"index", r.index}});
    }
    cfg.write_json(json{{"rows", jrows}, {"monotone", monotone}});
    return monotone ? 0 : 2;
}

int cmd_shoot(const RunConfig& cfg) {
    const auto profile = cfg.profile("smooth");
    const double r0 = cfg.num("r0", cfg.r0, NAN);
    if (std::isnan(r0)) throw DomainError("shoot: r0 is required");

    shooting::ShootOptions opt;
    opt.tol = cfg.ode_tol;
    opt.phi_start = cfg.num("phi_start", NAN, opt.phi_start);
    const auto res = shooting::shoot_from_boundary(profile, r0, opt);

    if (!cfg.csv_path.empty()) {
        output::write_trajectory_csv(cfg.csv_path, res.trajectory);
        output::write_events_csv(events_path_for(cfg.csv_path), res.trajectory);
    }
    if (!cfg.svg_path.empty()) {
        output::StripSvg svg;
        svg.add_leaves({0.1, 0.2, 0.3, 0.45, 0.6, 0.8, 1.0, 1.2}, "#bbbbbb");
        svg.add_trajectory(res.trajectory, "steelblue");
        svg.add_marker(r0, 0.0, "black");
        svg.add_marker(0.0, res.crossing.phi0, "crimson");
        svg.write(cfg.svg_path);
    }
    cfg.write_json(res.to_json());
    return 0;
}

int cmd_find_double(const RunConfig& cfg) {
    const double eps = cfg.num("epsilon", cfg.epsilon, 0.3);
    LambdaProfile profile = LambdaProfile::reflected(eps, LambdaProfile::smooth_compliant());
    if (cfg.profile_override || cfg.raw.contains("profile")) profile = cfg.profile("reflected");

    const int n_targets = static_cast<int>(cfg.num("n_targets", NAN, 3));
    std::pair<double, double> bracket{0.0015, 0.09};
    if (cfg.raw.contains("r0_bracket")) {
        const auto b = cfg.raw.at("r0_bracket").get<std::vector<double>>();
        if (b.size() != 2) throw DomainError("r0_bracket must have two entries");
        bracket = {b[0], b[1]};
    }

    shooting::DoubleContactOptions opt;
    opt.shoot.tol = cfg.ode_tol;
    opt.residual_tol = cfg.root_tol;

    std::vector<shooting::DoubleContact> roots;
    bool exhausted = false;
    std::string note;
    try {
        roots = shooting::find_double_contacts(profile, eps, bracket, n_targets, opt);
    } catch (const shooting::BracketExhaustedError& e) {
        roots = e.roots;
        exhausted = true;
        note = e.what();
    }

    if (!cfg.svg_path.empty()) {
        output::StripSvg svg;
        svg.add_leaves({0.1, 0.2, 0.3, 0.45, 0.6}, "#bbbbbb");
        for (const auto& dc : roots) {
            const auto cont = shooting::continue_to_far_boundary(profile, dc, opt.shoot);
            svg.add_trajectory(cont.strip, "steelblue");
            svg.add_trajectory(cont.tail, "steelblue");
            svg.add_marker(dc.r0, 0.0, "black");
            svg.add_marker(-eps - dc.r0, 0.0, "black");
        }
        svg.write(cfg.svg_path);
    }

    json jroots = json::array();
    for (const auto& dc : roots) jroots.push_back(dc.to_json());
    cfg.write_json(json{{"roots", jroots}, {"exhausted", exhausted}, {"note", note}});
    if (exhausted) return 1;

    bool ok = true;
    for (std::size_t i = 0; i < roots.size(); ++i) {
        if (roots[i].residual > cfg.root_tol) ok = false;
        if (i > 0 && !(roots[i].r0 < roots[i - 1].r0 &&
                       roots[i].index_estimate > roots[i - 1].index_estimate)) {
            ok = false;
        }
    }
    return ok ? 0 : 2;
}

int cmd_ricci_check(const RunConfig& cfg) {
    const auto profile = cfg.profile("product");
    const int n = static_cast<int>(cfg.num("grid_n", NAN, 1000));

    // Default range: the working interval of the profile kind.
    double r_lo = -1.0, r_hi = 1.0;
    switch (profile.kind()) {
        case metrics::ProfileKind::Product: break;
        case metrics::ProfileKind::C1Cosine: r_lo = 1e-3; r_hi = 1.5; break;
        case metrics::ProfileKind::SmoothCompliant:
            r_lo = 1e-3;
            r_hi = profile.smooth_params().r_flat;
            break;
        case metrics::ProfileKind::Reflected:
            r_lo = -profile.epsilon() + 1e-3;
            r_hi = std::min(1.0, profile.inner().r_domain_max() - 1e-2);
            break;
    }
    r_lo = cfg.num("r_lo", NAN, r_lo);
    r_hi = cfg.num("r_hi", NAN, r_hi);

    std::vector<output::RicciRow> rows;
    double min_entry = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double r = r_lo + (r_hi - r_lo) * i / (n - 1.0);
        const auto d = metrics::ricci_diagonal(profile, r);
        rows.push_back({r, d[0], d[1], d[2]});
        min_entry = std::min({min_entry, d[0], d[1], d[2]});
    }
    if (!cfg.csv_path.empty()) output::write_ricci_csv(cfg.csv_path, rows);
    cfg.write_json(json{{"r_lo", r_lo}, {"r_hi", r_hi}, {"grid_n", n}, {"min_entry", min_entry}});
    return min_entry >= 0.0 ? 0 : 2;
}

int cmd_validate_profile(const RunConfig& cfg) {
    const auto profile = cfg.profile("smooth");
    const double r_max = cfg.num("r_max", NAN, 1.0);
    const int n = static_cast<int>(cfg.num("grid_n", NAN, 1000));
    const auto rep = metrics::validate_profile(profile, r_max, n);
    json j = rep.to_json();
    j["profile"] = profile.to_json();
    j["r_max"] = r_max;
    j["grid_n"] = n;
    cfg.write_json(j);
    return 0;
}

int cmd_oracle_c1(const RunConfig& cfg) {
    const double kappa = cfg.num("kappa", cfg.kappa, kPi / 4.0);
    shooting::ShootOptions opt;
    opt.tol = cfg.ode_tol;
    const auto shot = shooting::shoot_from_boundary(LambdaProfile::c1_cosine(), kappa, opt);
    const double phi_hi = std::min(kPi / 2.0, shot.crossing.phi0);
    double sup = 0.0;
    const int n = 500;
    for (int i = 0; i <= n; ++i) {
        const double phi = 0.2 + (phi_hi - 0.2) * i / n;
        sup = std::max(sup, std::abs(shot.trajectory.r_at_phi(phi) -
                                     geodesics::leaf_r_of_phi(kappa, phi)));
    }
    cfg.write_json(json{{"kappa", kappa},
                        {"sup_deviation", sup},
                        {"crossing", {{"phi0", shot.crossing.phi0}, {"alpha", shot.crossing.alpha}}}});
    return sup <= 1e-5 ? 0 : 2;
}

int cmd_accept(const RunConfig& cfg) {
    const auto results = accept::run_all();
    const int status = accept::report(results, std::cout);
    if (!cfg.json_path.empty()) {
        // Timing stays on stdout; the file output is byte-deterministic.
        json jrows = json::array();
        for (const auto& r : results) {
            jrows.push_back(
                json{{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        }
        std::ofstream f(cfg.json_path, std::ios::binary);
        f << jrows.dump(2) << "\n";
    }
    return status == 0 ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"geodesic laboratory for degenerate rotationally symmetric quotient metrics"};
    app.require_subcommand(1);

    RunConfig cfg;
    std::string config_path;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--profile", cfg.profile_override, "inline profile JSON");
        sub->add_option("--c", cfg.c, "Clairaut constant");
        sub->add_option("--kappa", cfg.kappa, "leaf parameter");
        sub->add_option("--r0", cfg.r0, "boundary contact point");
        sub->add_option("--epsilon", cfg.epsilon, "middle strip width");
        sub->add_option("--tol", cfg.tol, "ODE tolerance override");
        sub->add_option("--out-csv", cfg.csv_path, "CSV output path");
        sub->add_option("--out-svg", cfg.svg_path, "SVG output path");
        sub->add_option("--out-json", cfg.json_path, "JSON output path");
    };

    struct Cmd {
        const char* name;
        const char* help;
        int (*fn)(const RunConfig&);
    };
    const Cmd cmds[] = {
        {"trace", "integrate one product-profile geodesic and export it", cmd_trace},
        {"period-table", "measured vs quadrature periods against the closed-form bound",
         cmd_period_table},
        {"index-table", "Morse index growth as the Clairaut constant shrinks", cmd_index_table},
        {"shoot", "boundary geodesic with barrier/monotonicity/convexity certificates", cmd_shoot},
        {"find-double", "double-boundary-contact geodesics of a reflected profile",
         cmd_find_double},
        {"ricci-check", "diagonal Ricci curvature over an r grid", cmd_ricci_check},
        {"validate-profile", "profile inequality report on a grid", cmd_validate_profile},
        {"oracle-c1", "closed-form leaf reproduction error of the C1 profile", cmd_oracle_c1},
        {"accept", "run the acceptance suite", cmd_accept},
    };
    for (const auto& c : cmds) {
        add_common(app.add_subcommand(c.name, c.help));
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) cfg.load(config_path);
        if (!std::isnan(cfg.tol)) cfg.ode_tol = cfg.tol;
        for (const auto& c : cmds) {
            if (app.got_subcommand(c.name)) return c.fn(cfg);
        }
        std::cerr << "no command selected\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
