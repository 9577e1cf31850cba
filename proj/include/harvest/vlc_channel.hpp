#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "harvest/quadrature.hpp"
#include "harvest/rng.hpp"
#include "harvest/scenario.hpp"

namespace harvest {

/// Lambertian LoS gain split into its deterministic and orientation parts:
/// h_vlc = h_c * cos(theta_r) inside the field of view, 0 outside.
struct ChannelGain {
    double h_vlc = 0.0;
    double h_c = 0.0;
    double h_theta = 0.0;  // cos(theta_r) in [0, 1]
    bool in_fov = false;
};

/// Deterministic factor h_c = ((m+1) A_p h^m / 2pi) (h^2 + d_r^2)^(-(m+2)/2);
/// absorbs the irradiance cosine via cos(phi_r) = h / sqrt(h^2 + d_r^2).
inline double deterministic_gain(const Geometry& g, double m) {
    const double r2 = g.h_delta * g.h_delta + g.d_r * g.d_r;
    return (m + 1.0) * g.a_pd * std::pow(g.h_delta, m) / (2.0 * kPi) *
           std::pow(r2, -(m + 2.0) / 2.0);
}

inline ChannelGain vlc_gain(const Geometry& g, double m, double theta_r) {
    ChannelGain cg;
    cg.h_c = deterministic_gain(g, m);
    cg.h_theta = std::max(std::cos(theta_r), 0.0);
    cg.in_fov = std::abs(theta_r) <= g.phi_fov;
    cg.h_vlc = cg.in_fov ? cg.h_c * cg.h_theta : 0.0;
    return cg;
}

/// Incidence angle at an upward-facing PD: cos(theta_r) = h / sqrt(h^2 + d_r^2).
inline double upward_incidence_angle(const Geometry& g) {
    return std::acos(g.h_delta / std::sqrt(g.h_delta * g.h_delta + g.d_r * g.d_r));
}

// ---------------------------------------------------------------------------
// Orientation-induced densities, theta ~ U[theta1, theta2]

enum class DensityKind { cos_squared_channel, cos_channel };

/// Probability density of the squared channel h^2 = (h_c cos(theta))^2:
/// f(x) = (1/h_c^2) c_theta / ((theta2-theta1) sqrt(4 t (1-t))), t = x / h_c^2,
/// supported on t in (cos^2 theta2, cos^2 theta1).
inline double cos2_density(const OrientationModel& m, double h_c, double x) {
    if (h_c <= 0.0) throw ValidationError("cos2_density: h_c > 0 violated");
    const double hc2 = h_c * h_c;
    const double t = x / hc2;
    const double c2hi = std::cos(m.theta1) * std::cos(m.theta1);
    const double c2lo = std::cos(m.theta2) * std::cos(m.theta2);
    if (t <= c2lo || t >= c2hi) return 0.0;
    return m.c_theta / (hc2 * (m.theta2 - m.theta1) * std::sqrt(4.0 * t * (1.0 - t)));
}

/// Probability density of the channel h = h_c cos(theta):
/// f(x) = 1 / ((theta2-theta1) h_c sqrt(1 - (x/h_c)^2)) on (h_c cos theta2, h_c cos theta1).
inline double cos_density(const OrientationModel& m, double h_c, double x) {
    if (h_c <= 0.0) throw ValidationError("cos_density: h_c > 0 violated");
    const double u = x / h_c;
    const double lo = std::cos(m.theta2);
    const double hi = std::cos(m.theta1);
    if (u <= lo || u >= hi) return 0.0;
    return m.c_theta / ((m.theta2 - m.theta1) * h_c * std::sqrt(1.0 - u * u));
}

struct OrientationDensity {
    DensityKind kind;
    OrientationModel model;
    double h_c;
    double support_lo;
    double support_hi;

    double operator()(double x) const {
        return kind == DensityKind::cos_squared_channel ? cos2_density(model, h_c, x)
                                                        : cos_density(model, h_c, x);
    }
};

inline OrientationDensity make_density(const OrientationModel& m, double h_c,
                                       DensityKind kind) {
    validate(m);
    const double clo = std::cos(m.theta2);
    const double chi = std::cos(m.theta1);
    if (kind == DensityKind::cos_squared_channel) {
        return {kind, m, h_c, h_c * h_c * clo * clo, h_c * h_c * chi * chi};
    }
    return {kind, m, h_c, h_c * clo, h_c * chi};
}

/// Normalization constant c_theta of the squared-channel density, computed by
/// integrating the density numerically. The inverse-square-root endpoint
/// singularities are removed by the substitution t = sin^2(u) before
/// quadrature; the density itself is still evaluated through cos2_density.
inline double normalization_constant(const OrientationModel& m) {
    if (!(m.theta1 < m.theta2)) {
        throw ValidationError("normalization_constant: zero-length interval");
    }
    OrientationModel unit = m;
    unit.c_theta = 1.0;
    const double u1 = kPi / 2 - m.theta2;
    const double u2 = kPi / 2 - m.theta1;
    // Unit-interval parameterization keeps the integrand O(1) for arbitrarily
    // narrow angle intervals.
    const double width = u2 - u1;
    const double integral = quad::integrate_or_throw(
        [&](double v) {
            const double u = u1 + width * v;
            const double t = std::sin(u) * std::sin(u);
            return cos2_density(unit, 1.0, t) * std::sin(2.0 * u) * width;  // dt = sin(2u) du
        },
        0.0, 1.0);
    return 1.0 / integral;
}

inline double sample_orientation(const OrientationModel& m, Rng& rng) {
    return m.theta1 + (m.theta2 - m.theta1) * rng.uniform();
}

}  // namespace harvest
