#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "harvest/rng.hpp"
#include "harvest/scenario.hpp"
#include "harvest/vlc_channel.hpp"

namespace harvest {

/// Per-block decision variables. t_vlc + t_rf = 1 (fractions of the block).
struct BlockAllocation {
    double i_b = 0.0;     // DC bias [A]
    double a_peak = 0.0;  // peak amplitude of the information signal [A]
    double t_vlc = 0.5;
    double t_rf = 0.5;
};

/// Peak-intensity clipping constraint: A <= min(i_b - i_min, i_max - i_b).
inline double max_peak_amplitude(double i_b, const SystemParams& p) {
    if (i_b < p.i_min || i_b > p.i_max) {
        throw ValidationError("max_peak_amplitude: i_b outside [i_min, i_max]");
    }
    return std::min(i_b - p.i_min, p.i_max - i_b);
}

inline void validate_allocation(const BlockAllocation& a, const SystemParams& p) {
    if (std::abs(a.t_vlc + a.t_rf - 1.0) > 1e-12) {
        throw ValidationError("t_vlc + t_rf = 1 violated");
    }
    if (!(a.t_vlc > 0.0) || !(a.t_rf > 0.0)) {
        throw ValidationError("t_vlc > 0, t_rf > 0 violated");
    }
    if (a.i_b < p.i_min || a.i_b > p.i_max) {
        throw ValidationError("i_min <= i_b <= i_max violated");
    }
    if (a.a_peak < 0.0 || a.a_peak > max_peak_amplitude(a.i_b, p) + 1e-12) {
        throw ValidationError("0 <= a_peak <= min(i_b - i_min, i_max - i_b) violated");
    }
}

inline BlockAllocation make_allocation(double i_b, double a_peak, double t_vlc,
                                       const SystemParams& p) {
    BlockAllocation a{i_b, a_peak, t_vlc, 1.0 - t_vlc};
    validate_allocation(a, p);
    return a;
}

/// RF small-scale fading state. fixed_unit pins |h_RF|^2 = 1 (the setting used
/// for optimization and figure reproduction); rayleigh draws are unit-mean
/// exponential in |h_RF|^2.
struct RfFading {
    enum class Mode { fixed_unit, rayleigh_sample };
    Mode mode = Mode::fixed_unit;
    double h_rf_sq = 1.0;
};

inline RfFading rayleigh_sample(Rng& rng) {
    return {RfFading::Mode::rayleigh_sample, rng.exponential()};
}

// ---------------------------------------------------------------------------
// Rates and harvested energies (all linear scale)

/// VLC information rate: t_vlc * B * log2(1 + (e/2pi)(eta P A h)^2 / sigma^2).
inline double vlc_rate(const BlockAllocation& a, double h_vlc, const SystemParams& p) {
    if (h_vlc < 0.0) throw ValidationError("vlc_rate: h_vlc >= 0 violated");
    if (a.a_peak == 0.0 || h_vlc == 0.0) return 0.0;
    const double sig = p.eta * p.p_led * a.a_peak * h_vlc;
    const double snr = kEulerE / (2.0 * kPi) * sig * sig / shot_noise_power(p);
    return a.t_vlc * p.b_vlc * std::log2(1.0 + snr);
}

/// Energy harvested during the VLC phase; I_DC = eta h P_led i_b.
inline double harvest_phase1(const BlockAllocation& a, double h_vlc,
                             const SystemParams& p) {
    const double i_dc = p.eta * h_vlc * p.p_led * a.i_b;
    if (i_dc <= 0.0) return 0.0;
    return 0.75 * a.t_vlc * i_dc * p.v_t * std::log1p(i_dc / p.i_dark);
}

/// Energy harvested during the RF phase: the LED drops the AC part and drives
/// i_max flat-out, so the harvest runs at I_DC,max for the whole t_rf.
inline double harvest_phase2(double t_rf, double h_vlc, const SystemParams& p) {
    if (!(t_rf >= 0.0 && t_rf < 1.0 + 1e-12)) {
        throw ValidationError("harvest_phase2: t_rf in [0, 1) violated");
    }
    const double i_dc = p.eta * h_vlc * p.p_led * p.i_max;
    if (i_dc <= 0.0) return 0.0;
    return 0.75 * t_rf * i_dc * p.v_t * std::log1p(i_dc / p.i_dark);
}

/// Total energy available in block i: this block's phase-1 harvest plus the
/// previous block's phase-2 harvest (0 for the first block or *_noE2 policies).
inline double total_harvest(const BlockAllocation& a, double e2_prev, double h_vlc,
                            const SystemParams& p) {
    if (e2_prev < 0.0) throw ValidationError("total_harvest: e2_prev >= 0 violated");
    return harvest_phase1(a, h_vlc, p) + e2_prev;
}

/// RF path gain G = (4 pi d_ref / lambda)^2 (d_u / d_ref)^beta, lambda = c / f_c.
inline double rf_path_gain(double d_u, const SystemParams& p) {
    if (d_u < p.d_ref) throw ValidationError("rf_path_gain: d_u >= d_ref violated");
    const double lambda = kSpeedOfLight / p.f_c;
    const double ref = 4.0 * kPi * p.d_ref / lambda;
    return ref * ref * std::pow(d_u / p.d_ref, p.beta_pl);
}

/// RF rate with transmit power P_h = e_h / t_rf:
/// t_rf * B_RF * log2(1 + P_h |h_RF|^2 / (G N0)).
inline double rf_rate(double t_rf, double e_h, const RfFading& fading, double d_u,
                      const SystemParams& p) {
    if (!(t_rf > 0.0)) throw ValidationError("rf_rate: t_rf > 0 violated");
    if (e_h < 0.0) throw ValidationError("rf_rate: e_h >= 0 violated");
    if (e_h == 0.0) return 0.0;
    const double p_h = e_h / t_rf;
    const double snr = p_h * fading.h_rf_sq / (rf_path_gain(d_u, p) * rf_noise_power(p));
    return t_rf * p.b_rf * std::log2(1.0 + snr);
}

/// Decode-and-forward end-to-end rate: the weaker hop limits the block.
inline double end_to_end_rate(double r_vlc, double r_rf) {
    return std::min(r_vlc, r_rf);
}

struct LinkReport {
    double r_vlc = 0.0;
    double r_rf = 0.0;
    double r_end2end = 0.0;
    double e1 = 0.0;
    double e2 = 0.0;   // harvested during this block's RF phase (usable next block)
    double e_h = 0.0;  // e1 + previous block's e2
    double p_h = 0.0;
    double snr_vlc = 0.0;
    double snr_rf = 0.0;
};

inline LinkReport link_report(const BlockAllocation& a, double e2_prev, double h_vlc,
                              double d_u, const RfFading& fading, const SystemParams& p) {
    LinkReport r;
    r.e1 = harvest_phase1(a, h_vlc, p);
    r.e2 = harvest_phase2(a.t_rf, h_vlc, p);
    r.e_h = r.e1 + e2_prev;
    r.p_h = r.e_h / a.t_rf;
    const double sig = p.eta * p.p_led * a.a_peak * h_vlc;
    r.snr_vlc = kEulerE / (2.0 * kPi) * sig * sig / shot_noise_power(p);
    r.snr_rf = r.p_h * fading.h_rf_sq / (rf_path_gain(d_u, p) * rf_noise_power(p));
    r.r_vlc = vlc_rate(a, h_vlc, p);
    r.r_rf = rf_rate(a.t_rf, r.e_h, fading, d_u, p);
    r.r_end2end = end_to_end_rate(r.r_vlc, r.r_rf);
    return r;
}

/// Iterates the E2 carryover across n blocks under a constant allocation.
/// Block 1 starts with no stored energy; with a constant allocation the chain
/// reaches steady state at block 2. The PD is upward-facing, so theta_r
/// follows from the geometry.
inline std::vector<LinkReport> simulate_blocks(std::size_t n, const BlockAllocation& a,
                                               const Geometry& g, const SystemParams& p,
                                               PolicyCase policy = PolicyCase::jo_with_e2,
                                               RfFading fading = {}) {
    if (n < 1) throw ValidationError("simulate_blocks: n >= 1 violated");
    validate_allocation(a, p);
    const double m = lambertian_order(g.theta_hpbw);
    const double h = vlc_gain(g, m, upward_incidence_angle(g)).h_vlc;
    std::vector<LinkReport> out;
    out.reserve(n);
    double e2_prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        LinkReport r = link_report(a, e2_prev, h, g.d_u, fading, p);
        e2_prev = uses_carryover(policy) ? r.e2 : 0.0;
        out.push_back(r);
    }
    return out;
}

}  // namespace harvest
