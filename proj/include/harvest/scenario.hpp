#pragma once

#include <algorithm>
#include <cmath>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace harvest {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kEulerE = std::numbers::e;
/// Conventional RF engineering value; keeps lambda = c/f_c exact for the
/// usual carrier frequencies (2.4 GHz -> 0.125 m).
inline constexpr double kSpeedOfLight = 3.0e8;

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct ValidationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Physical and system constants of the reference indoor setup (defaults below).
struct SystemParams {
    double i_min = 0.1;             // minimum DC bias [A]
    double i_max = 1.0;             // maximum DC bias [A]
    double p_led = 1.5;             // LED conversion factor [W/A]
    double eta = 0.4;               // photodetector responsivity [A/W]
    double v_t = 0.025;             // thermal voltage [V]
    double i_dark = 1e-10;          // dark saturation current [A]
    double q_e = 1.6e-19;           // electron charge [C]
    double i_ambient = 5.84e-3;     // ambient-light induced current [A]
    double b_vlc = 1e7;             // VLC double-sided bandwidth [Hz]
    double b_rf = 1e7;              // RF bandwidth [Hz]
    double p0_dbm_per_hz = -174.0;  // thermal noise density [dBm/Hz]
    double nf_db = 9.0;             // noise figure [dB]
    double r_th = 1e6;              // rate threshold [bit/s]
    double t_tot = 1.0;             // block duration [s]
    double f_c = 2.4e9;             // RF carrier frequency [Hz]
    double beta_pl = 1.8;           // RF path-loss exponent
    double d_ref = 1.0;             // path-loss reference distance [m]
};

struct Geometry {
    double h_delta = 2.0;          // AP-to-relay vertical distance [m]
    double d_r = 0.0;              // relay horizontal distance [m]
    double d_u = 4.0;              // user horizontal distance [m]
    double theta_hpbw = kPi / 3;   // LED half-power beamwidth [rad]
    double phi_fov = kPi / 3;      // PD half field-of-view [rad]
    double a_pd = 1e-4;            // PD detection area [m^2]
    std::optional<std::pair<double, double>> relay_dist{{0.0, 2.0}};
    std::optional<std::pair<double, double>> user_dist{{4.0, 8.0}};
};

struct OrientationModel {
    double theta1 = 0.0;             // [rad]
    double theta2 = kPi / 18;        // [rad], default U[0 deg, 10 deg]
    double c_theta = 1.0;            // normalization constant, computed at load
};

enum class PolicyCase { jo_with_e2, jo_no_e2, fta_with_e2, fta_no_e2 };

inline bool uses_carryover(PolicyCase c) {
    return c == PolicyCase::jo_with_e2 || c == PolicyCase::fta_with_e2;
}
inline bool fixed_time(PolicyCase c) {
    return c == PolicyCase::fta_with_e2 || c == PolicyCase::fta_no_e2;
}

inline std::string to_string(PolicyCase c) {
    switch (c) {
        case PolicyCase::jo_with_e2: return "JO_withE2";
        case PolicyCase::jo_no_e2: return "JO_noE2";
        case PolicyCase::fta_with_e2: return "FTA_withE2";
        case PolicyCase::fta_no_e2: return "FTA_noE2";
    }
    return "?";
}

inline PolicyCase parse_policy_case(std::string_view s) {
    if (s == "JO_withE2") return PolicyCase::jo_with_e2;
    if (s == "JO_noE2") return PolicyCase::jo_no_e2;
    if (s == "FTA_withE2") return PolicyCase::fta_with_e2;
    if (s == "FTA_noE2") return PolicyCase::fta_no_e2;
    throw ValidationError("unknown case_id '" + std::string(s) +
                          "' (expected JO_withE2|JO_noE2|FTA_withE2|FTA_noE2)");
}

struct PolicySpec {
    PolicyCase case_id = PolicyCase::jo_with_e2;
    double fixed_t_vlc = 0.5;  // used by FTA cases
};

enum class SweptVariable { d_u, d_r, f_c, theta2, phi_fov };

inline std::string to_string(SweptVariable v) {
    switch (v) {
        case SweptVariable::d_u: return "d_u";
        case SweptVariable::d_r: return "d_r";
        case SweptVariable::f_c: return "f_c";
        case SweptVariable::theta2: return "theta2";
        case SweptVariable::phi_fov: return "phi_fov";
    }
    return "?";
}

inline SweptVariable parse_swept_variable(std::string_view s) {
    if (s == "d_u") return SweptVariable::d_u;
    if (s == "d_r") return SweptVariable::d_r;
    if (s == "f_c") return SweptVariable::f_c;
    if (s == "theta2") return SweptVariable::theta2;
    if (s == "phi_fov") return SweptVariable::phi_fov;
    throw ValidationError("unknown swept_variable '" + std::string(s) + "'");
}

struct SweepSpec {
    SweptVariable swept_variable = SweptVariable::d_u;
    std::vector<double> values{4.0, 5.0, 6.0, 7.0, 8.0};
    std::uint64_t seed = 1;
    std::size_t mc_samples = 1000000;
    double grid_step_ib = 5e-3;  // [A]
    double grid_step_t = 5e-3;
};

struct Scenario {
    SystemParams params;
    Geometry geom;
    OrientationModel orientation;
    PolicySpec policy;
    SweepSpec sweep;
};

// ---------------------------------------------------------------------------
// Derived constants

/// Lambertian order m = -1/log2(cos(theta_hpbw)). The theta -> pi/2 limit is
/// m -> 0; pinned exactly to avoid propagating cos(pi/2) rounding noise.
inline double lambertian_order(double theta_hpbw) {
    if (std::abs(theta_hpbw - kPi / 2) < 1e-12) return 0.0;
    const double c = std::cos(theta_hpbw);
    if (c <= 0.0) throw ValidationError("lambertian_order: cos(theta_hpbw) <= 0");
    if (theta_hpbw <= 0.0) throw ValidationError("lambertian_order: theta_hpbw <= 0");
    return -1.0 / std::log2(c);
}

/// Linear-scale RF noise power N0 [W]. The only dB -> linear conversion in the
/// codebase; everything downstream is linear.
inline double rf_noise_power(const SystemParams& p) {
    if (p.b_rf <= 0.0) throw ValidationError("rf_noise_power: b_rf <= 0");
    const double n0_dbm = p.p0_dbm_per_hz + 10.0 * std::log10(p.b_rf) + p.nf_db;
    return std::pow(10.0, (n0_dbm - 30.0) / 10.0);
}

/// Shot-noise power at the PD [A^2].
inline double shot_noise_power(const SystemParams& p) {
    return p.q_e * p.i_ambient * p.b_vlc;
}

// ---------------------------------------------------------------------------
// Validation

inline void validate(const SystemParams& p, std::vector<std::string>* warnings = nullptr) {
    for (double v : {p.i_min, p.i_max, p.p_led, p.eta, p.v_t, p.i_dark, p.q_e,
                     p.i_ambient, p.b_vlc, p.b_rf, p.p0_dbm_per_hz, p.nf_db, p.r_th,
                     p.t_tot, p.f_c, p.beta_pl, p.d_ref}) {
        if (!std::isfinite(v)) throw ValidationError("finite parameter values violated");
    }
    if (!(p.i_min > 0.0)) throw ValidationError("i_min > 0 violated");
    if (!(p.i_min < p.i_max)) throw ValidationError("i_min < i_max violated");
    for (auto [v, name] : {std::pair{p.p_led, "p_led"}, {p.eta, "eta"}, {p.v_t, "v_t"},
                           {p.i_dark, "i_dark"}, {p.q_e, "q_e"}, {p.b_vlc, "b_vlc"},
                           {p.b_rf, "b_rf"}, {p.f_c, "f_c"}, {p.d_ref, "d_ref"}}) {
        if (!(v > 0.0)) throw ValidationError(std::string(name) + " > 0 violated");
    }
    if (p.i_ambient < 0.0) throw ValidationError("i_ambient >= 0 violated");
    if (!(p.t_tot > 0.0)) throw ValidationError("t_tot > 0 violated");
    if (p.r_th < 0.0) throw ValidationError("r_th >= 0 violated");
    if ((p.beta_pl < 1.6 || p.beta_pl > 1.8) && warnings) {
        warnings->push_back("beta_pl = " + std::to_string(p.beta_pl) +
                            " outside the usual [1.6, 1.8] range");
    }
}

inline void validate(const Geometry& g) {
    for (double v : {g.h_delta, g.d_r, g.d_u, g.theta_hpbw, g.phi_fov, g.a_pd}) {
        if (!std::isfinite(v)) throw ValidationError("finite geometry values violated");
    }
    if (!(g.h_delta > 0.0)) throw ValidationError("h_delta > 0 violated");
    if (!(g.d_r >= 0.0)) throw ValidationError("d_r >= 0 violated");
    if (!(g.d_u > 0.0)) throw ValidationError("d_u > 0 violated");
    // theta_hpbw = pi/2 is admitted as the m -> 0 limiting pattern (the 90 deg
    // half-power-beamwidth configurations of the reported experiments).
    if (!(g.theta_hpbw > 0.0 && g.theta_hpbw <= kPi / 2)) {
        throw ValidationError("0 < theta_hpbw <= pi/2 violated");
    }
    if (!(g.phi_fov > 0.0 && g.phi_fov <= kPi / 2)) {
        throw ValidationError("0 < phi_fov <= pi/2 violated");
    }
    if (!(g.a_pd > 0.0)) throw ValidationError("a_pd > 0 violated");
    for (const auto& [range, name] :
         {std::pair{g.relay_dist, "relay_dist"}, {g.user_dist, "user_dist"}}) {
        if (range && !(range->first <= range->second)) {
            throw ValidationError(std::string(name) + " min <= max violated");
        }
    }
}

inline void validate(const OrientationModel& m) {
    if (!(m.theta1 >= 0.0)) throw ValidationError("theta1 >= 0 violated");
    if (!(m.theta1 < m.theta2)) throw ValidationError("theta1 < theta2 violated");
    if (!(m.theta2 <= kPi / 2)) throw ValidationError("theta2 <= pi/2 violated");
}

inline void validate(const PolicySpec& p) {
    if (!(p.fixed_t_vlc > 0.0 && p.fixed_t_vlc < 1.0)) {
        throw ValidationError("0 < fixed_t_vlc < 1 violated");
    }
}

inline void validate(const SweepSpec& s) {
    if (s.values.empty()) throw ValidationError("sweep values nonempty violated");
    const bool inc = std::is_sorted(s.values.begin(), s.values.end(),
                                    [](double a, double b) { return a <= b; });
    const bool dec = std::is_sorted(s.values.begin(), s.values.end(),
                                    [](double a, double b) { return a >= b; });
    if (!inc && !dec) throw ValidationError("sweep values strictly monotone violated");
    if (!(s.grid_step_ib > 0.0)) throw ValidationError("grid_step_ib > 0 violated");
    if (!(s.grid_step_t > 0.0)) throw ValidationError("grid_step_t > 0 violated");
    if (s.mc_samples == 0) throw ValidationError("mc_samples > 0 violated");
}

inline void validate(const Scenario& s, std::vector<std::string>* warnings = nullptr) {
    validate(s.params, warnings);
    validate(s.geom);
    validate(s.orientation);
    validate(s.policy);
    validate(s.sweep);
    // sweep values live in the swept variable's units
    const bool angle_sweep = s.sweep.swept_variable == SweptVariable::theta2 ||
                             s.sweep.swept_variable == SweptVariable::phi_fov;
    for (const double v : s.sweep.values) {
        if (angle_sweep && !(v > 0.0 && v <= kPi / 2)) {
            throw ValidationError("sweep values in (0, pi/2] for angle sweeps violated");
        }
        if (!angle_sweep && !(v > 0.0)) {
            throw ValidationError("sweep values > 0 violated");
        }
    }
}

// ---------------------------------------------------------------------------
// Scenario file format: UTF-8 lines "key = value", '#' comments, unknown keys
// are hard errors. Angles take radians; *_deg alternates are accepted.

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view v, const std::string& where) {
    const std::string tmp(v);
    char* end = nullptr;
    const double x = std::strtod(tmp.c_str(), &end);
    if (end != tmp.c_str() + tmp.size() || tmp.empty()) {
        throw ParseError(where + ": malformed number '" + tmp + "'");
    }
    return x;
}

inline std::vector<double> parse_list(std::string_view v, const std::string& where) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss{std::string(v)};
    while (std::getline(ss, item, ',')) {
        out.push_back(parse_double(trim(item), where));
    }
    if (out.empty()) throw ParseError(where + ": empty list");
    return out;
}

inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline Scenario parse_scenario(std::string_view text, const std::string& name = "<string>",
                               std::vector<std::string>* warnings = nullptr) {
    Scenario sc;
    bool saw_d_r_min = false, saw_d_r_max = false, saw_d_u_min = false, saw_d_u_max = false;
    std::map<std::string, int> seen;

    const double deg = kPi / 180.0;
    int lineno = 0;
    std::string line;
    std::stringstream stream{std::string(text)};
    while (std::getline(stream, line)) {
        ++lineno;
        std::string_view sv = line;
        if (const auto hash = sv.find('#'); hash != std::string_view::npos) {
            sv = sv.substr(0, hash);
        }
        sv = detail::trim(sv);
        if (sv.empty()) continue;
        const auto eq = sv.find('=');
        const std::string where = name + ":" + std::to_string(lineno);
        if (eq == std::string_view::npos) {
            throw ParseError(where + ": expected 'key = value'");
        }
        const std::string key{detail::trim(sv.substr(0, eq))};
        const std::string_view val = detail::trim(sv.substr(eq + 1));
        if (key.empty()) throw ParseError(where + ": empty key");
        if (val.empty()) throw ParseError(where + ": empty value for '" + key + "'");

        // Angle keys share one canonical field; duplicate means either form twice.
        std::string canon = key;
        if (canon.size() > 4 && canon.ends_with("_deg")) canon.resize(canon.size() - 4);
        if (++seen[canon] > 1) {
            throw ParseError(where + ": duplicate key '" + key + "'");
        }

        auto num = [&] { return detail::parse_double(val, where); };
        auto angle = [&] { return key.ends_with("_deg") ? num() * deg : num(); };

        auto& p = sc.params;
        auto& g = sc.geom;
        if (key == "i_min") p.i_min = num();
        else if (key == "i_max") p.i_max = num();
        else if (key == "p_led") p.p_led = num();
        else if (key == "eta") p.eta = num();
        else if (key == "v_t") p.v_t = num();
        else if (key == "i_dark") p.i_dark = num();
        else if (key == "q_e") p.q_e = num();
        else if (key == "i_ambient") p.i_ambient = num();
        else if (key == "b_vlc") p.b_vlc = num();
        else if (key == "b_rf") p.b_rf = num();
        else if (key == "p0_dbm_per_hz") p.p0_dbm_per_hz = num();
        else if (key == "nf_db") p.nf_db = num();
        else if (key == "r_th") p.r_th = num();
        else if (key == "t_tot") p.t_tot = num();
        else if (key == "f_c") p.f_c = num();
        else if (key == "beta_pl") p.beta_pl = num();
        else if (key == "d_ref") p.d_ref = num();
        else if (key == "h_delta") g.h_delta = num();
        else if (key == "d_r") g.d_r = num();
        else if (key == "d_u") g.d_u = num();
        else if (key == "theta_hpbw" || key == "theta_hpbw_deg") g.theta_hpbw = angle();
        else if (key == "phi_fov" || key == "phi_fov_deg") g.phi_fov = angle();
        else if (key == "a_pd") g.a_pd = num();
        else if (key == "d_r_min") { saw_d_r_min = true; sc.geom.relay_dist->first = num(); }
        else if (key == "d_r_max") { saw_d_r_max = true; sc.geom.relay_dist->second = num(); }
        else if (key == "d_u_min") { saw_d_u_min = true; sc.geom.user_dist->first = num(); }
        else if (key == "d_u_max") { saw_d_u_max = true; sc.geom.user_dist->second = num(); }
        else if (key == "theta1" || key == "theta1_deg") sc.orientation.theta1 = angle();
        else if (key == "theta2" || key == "theta2_deg") sc.orientation.theta2 = angle();
        else if (key == "case_id") sc.policy.case_id = parse_policy_case(val);
        else if (key == "fixed_t_vlc") sc.policy.fixed_t_vlc = num();
        else if (key == "swept_variable") sc.sweep.swept_variable = parse_swept_variable(val);
        else if (key == "sweep_values") sc.sweep.values = detail::parse_list(val, where);
        else if (key == "seed") sc.sweep.seed = static_cast<std::uint64_t>(num());
        else if (key == "mc_samples") sc.sweep.mc_samples = static_cast<std::size_t>(num());
        else if (key == "grid_step_ib") sc.sweep.grid_step_ib = num();
        else if (key == "grid_step_t") sc.sweep.grid_step_t = num();
        else throw ParseError(where + ": unknown key '" + key + "'");
    }
    if (saw_d_r_min != saw_d_r_max) {
        throw ParseError(name + ": d_r_min and d_r_max must be given together");
    }
    if (saw_d_u_min != saw_d_u_max) {
        throw ParseError(name + ": d_u_min and d_u_max must be given together");
    }

    validate(sc, warnings);
    // Uniform orientation with the exact Jacobian is already normalized; the
    // numerical computation lives in vlc_channel and is wired in at load by
    // load_scenario's callers needing it. Analytic value recorded here.
    sc.orientation.c_theta = 1.0;
    return sc;
}

inline Scenario load_scenario(const std::string& path,
                              std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open scenario file");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path, warnings);
}

/// Serializes with full precision; parse_scenario(serialize(s)) is
/// field-identical to s.
inline std::string serialize(const Scenario& sc) {
    using detail::format_full;
    std::string out;
    auto kv = [&out](const char* k, double v) {
        out += k;
        out += " = ";
        out += format_full(v);
        out += '\n';
    };
    const auto& p = sc.params;
    kv("i_min", p.i_min); kv("i_max", p.i_max); kv("p_led", p.p_led);
    kv("eta", p.eta); kv("v_t", p.v_t); kv("i_dark", p.i_dark);
    kv("q_e", p.q_e); kv("i_ambient", p.i_ambient); kv("b_vlc", p.b_vlc);
    kv("b_rf", p.b_rf); kv("p0_dbm_per_hz", p.p0_dbm_per_hz); kv("nf_db", p.nf_db);
    kv("r_th", p.r_th); kv("t_tot", p.t_tot); kv("f_c", p.f_c);
    kv("beta_pl", p.beta_pl); kv("d_ref", p.d_ref);
    const auto& g = sc.geom;
    kv("h_delta", g.h_delta); kv("d_r", g.d_r); kv("d_u", g.d_u);
    kv("theta_hpbw", g.theta_hpbw); kv("phi_fov", g.phi_fov); kv("a_pd", g.a_pd);
    if (g.relay_dist) { kv("d_r_min", g.relay_dist->first); kv("d_r_max", g.relay_dist->second); }
    if (g.user_dist) { kv("d_u_min", g.user_dist->first); kv("d_u_max", g.user_dist->second); }
    kv("theta1", sc.orientation.theta1); kv("theta2", sc.orientation.theta2);
    out += "case_id = " + to_string(sc.policy.case_id) + '\n';
    kv("fixed_t_vlc", sc.policy.fixed_t_vlc);
    out += "swept_variable = " + to_string(sc.sweep.swept_variable) + '\n';
    out += "sweep_values = ";
    for (std::size_t i = 0; i < sc.sweep.values.size(); ++i) {
        if (i) out += ',';
        out += format_full(sc.sweep.values[i]);
    }
    out += '\n';
    kv("seed", static_cast<double>(sc.sweep.seed));
    kv("mc_samples", static_cast<double>(sc.sweep.mc_samples));
    kv("grid_step_ib", sc.sweep.grid_step_ib);
    kv("grid_step_t", sc.sweep.grid_step_t);
    return out;
}

}  // namespace harvest
