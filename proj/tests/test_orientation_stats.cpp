#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "harvest/orientation_stats.hpp"
#include "harvest/rng.hpp"

using namespace harvest;
using Catch::Approx;

namespace {

const SystemParams kP;
const Geometry kG;
const double kHc = 7.957747154594767e-6;

double fd(double (*f)(double, double), double x, double p, double h) {
    return (f(x + h, p) - f(x - h, p)) / (2 * h);
}

}  // namespace

TEST_CASE("f1 differentiates back to its integrand") {
    const double l2 = 50.0;
    for (const double x : {0.3, 0.6, 0.9}) {
        const double want = std::log1p(l2 * x) / (2 * std::sqrt(1 - x));
        CHECK(fd(&f1, x, l2, 1e-6) == Approx(want).epsilon(1e-6));
    }
}

TEST_CASE("f2 differentiates back to its integrand") {
    const double l2 = 50.0;
    for (const double x : {0.2, 0.5, 0.8}) {
        const double want = std::sqrt(1 - x) * std::log1p(l2 * x) / 4.0;
        CHECK(fd(&f2, x, l2, 1e-6) == Approx(want).epsilon(1e-6));
    }
}

TEST_CASE("f1/f2 definite differences equal adaptive quadrature") {
    const double l2 = 42.2;
    const double a = 0.35, b = 0.97;
    const double q1 = quad::integrate_or_throw(
        [&](double t) { return std::log1p(l2 * t) / (2 * std::sqrt(1 - t)); }, a, b);
    CHECK(f1(b, l2) - f1(a, l2) == Approx(q1).epsilon(1e-8));
    const double q2 = quad::integrate_or_throw(
        [&](double t) { return std::sqrt(1 - t) * std::log1p(l2 * t) / 4.0; }, a, b);
    CHECK(f2(b, l2) - f2(a, l2) == Approx(q2).epsilon(1e-8));
}

TEST_CASE("vanishing SNR coefficient kills the definite differences") {
    // True differences are O(l2) ~ 1e-9 here; the evaluation cancels terms of
    // magnitude ~1/l2, so allow rounding noise of that scale.
    const double l2 = 1e-9;
    CHECK(std::abs(f1(0.9, l2) - f1(0.3, l2)) < 1e-7);
    CHECK(std::abs(f2(0.9, l2) - f2(0.3, l2)) < 1e-7);
    CHECK_THROWS_AS(f1(-0.1, 50.0), ValidationError);
    CHECK_THROWS_AS(f2(0.0, 50.0), ValidationError);
}

TEST_CASE("f3/f4 differentiate back to their integrands") {
    Rng rng(17);
    for (int k = 0; k < 20; ++k) {
        const double x = kHc * rng.uniform(0.1, 0.95);
        const double h = kHc * 1e-7;
        const double want3 = x / std::sqrt(1 - (x / kHc) * (x / kHc));
        const double got3 = (f3(x + h, kHc) - f3(x - h, kHc)) / (2 * h);
        CHECK(got3 == Approx(want3).epsilon(1e-5));
        const double want4 = x * std::log(x) / std::sqrt(1 - (x / kHc) * (x / kHc));
        const double got4 = (f4(x + h, kHc) - f4(x - h, kHc)) / (2 * h);
        CHECK(got4 == Approx(want4).epsilon(1e-5));
    }
}

TEST_CASE("averaged VLC rate: degenerate spread recovers the pointwise rate") {
    BlockAllocation a{0.8, 0.2, 0.8, 0.2};
    const double theta = 12 * kPi / 180;
    OrientationModel m{theta, theta + 1e-9, 1.0};
    const double avg = avg_vlc_rate_quadrature(a, m, kHc, kP);
    const double point = vlc_rate(a, kHc * std::cos(theta), kP);
    CHECK(avg == Approx(point).epsilon(1e-6));
}

TEST_CASE("averaged VLC rate: quadrature vs Monte Carlo, and zero at A = 0") {
    BlockAllocation a{0.8, 0.2, 0.8, 0.2};
    OrientationModel m{0.0, kPi / 18, 1.0};
    const auto rep = monte_carlo_report(a, m, kG, kP, 1000000, 3);
    CHECK(std::abs(rep.mc_r_vlc - rep.avg_r_vlc_exact) < 3 * rep.mc_r_vlc_stderr);
    CHECK(std::abs(rep.mc_eh - rep.avg_eh_exact) < 3 * rep.mc_eh_stderr);

    BlockAllocation quiet = a;
    quiet.a_peak = 0.0;
    CHECK(avg_vlc_rate_quadrature(quiet, m, kHc, kP) == 0.0);
    CHECK(avg_vlc_rate_closed_form(quiet, m, kHc, kP) == 0.0);
}

TEST_CASE("closed form is a tight lower bound in the narrow-spread setup") {
    BlockAllocation a{0.8, 0.2, 0.8, 0.2};
    OrientationModel m{0.0, kPi / 18, 1.0};
    const double q = avg_vlc_rate_quadrature(a, m, kHc, kP);
    const double c = avg_vlc_rate_closed_form(a, m, kHc, kP);
    CHECK(c <= q + 1e-9);
    CHECK((q - c) / q < 0.02);
}

TEST_CASE("closed form stays below quadrature for the wide-spread setup") {
    Geometry g = kG;
    g.d_r = 2.0;
    g.theta_hpbw = kPi / 2;
    const double hc = deterministic_gain(g, lambertian_order(g.theta_hpbw));
    BlockAllocation a{0.8, 0.2, 0.8, 0.2};
    OrientationModel m{10 * kPi / 180, 40 * kPi / 180, 1.0};
    const double q = avg_vlc_rate_quadrature(a, m, hc, kP);
    const double c = avg_vlc_rate_closed_form(a, m, hc, kP);
    CHECK(c <= q + 1e-9);
    INFO("series-truncation gap: " << 100 * (q - c) / q << "%");
    CHECK((q - c) / q < 0.025);
}

TEST_CASE("lower-bound property over randomized orientation intervals") {
    Rng rng(2025);
    const double l2_per_a2 =
        kEulerE / (2 * kPi) * std::pow(kP.eta * kP.p_led * kHc, 2) / shot_noise_power(kP);
    for (int k = 0; k < 200; ++k) {
        const double t1 = rng.uniform(0.0, 80.0 * kPi / 180);
        const double t2 = t1 + rng.uniform(kPi / 180, kPi / 2 - t1);
        const double l2 = std::pow(10.0, rng.uniform(-2.0, 4.0));
        OrientationModel m{t1, std::min(t2, kPi / 2), 1.0};
        BlockAllocation a{0.8, std::sqrt(l2 / l2_per_a2), 0.8, 0.2};
        const double q = avg_vlc_rate_quadrature(a, m, kHc, kP);
        const double c = avg_vlc_rate_closed_form(a, m, kHc, kP);
        REQUIRE(c <= q + 1e-9);
    }
}

TEST_CASE("averaged harvest: degenerate spread matches the log-approximated point value") {
    BlockAllocation a{0.8, 0.2, 0.8, 0.2};
    const double theta = 20 * kPi / 180;
    OrientationModel m{theta, theta + 1e-9, 1.0};
    const auto t = make_closed_form_terms(a, m, kHc, kP);
    const double h = kHc * std::cos(theta);
    const double point = t.m1 * h * std::log(t.m2 * h) + t.m3 * h * std::log(t.m4 * h);
    CHECK(avg_harvest_closed_form(a, m, kHc, kP) == Approx(point).epsilon(1e-6));
}

TEST_CASE("averaged harvest: closed form vs integrand quadrature and Monte Carlo") {
    BlockAllocation a{0.8, 0.2, 0.8, 0.2};
    OrientationModel m{0.0, kPi / 18, 1.0};
    m.c_theta = normalization_constant(m);
    const auto t = make_closed_form_terms(a, m, kHc, kP);
    // quadrature of the log-approximated integrand through the channel density,
    // unit-domain parameterization (the integral is then the mean directly)
    const double integrand_quad = quad::integrate_or_throw(
        [&](double v) {
            const double x = kHc * std::cos(m.theta1 + (m.theta2 - m.theta1) * v);
            return t.m1 * x * std::log(t.m2 * x) + t.m3 * x * std::log(t.m4 * x);
        },
        0.0, 1.0);
    const double closed = avg_harvest_closed_form(a, m, kHc, kP);
    CHECK(closed == Approx(integrand_quad).epsilon(1e-6));

    const auto rep = monte_carlo_report(a, m, kG, kP, 1000000, 9);
    CHECK(std::abs(closed - rep.mc_eh) / rep.mc_eh < 0.03);

    // *_noE2 drops the M3 term
    const double no_carry = avg_harvest_closed_form(a, m, kHc, kP, E2Mode::no_carryover);
    CHECK(no_carry < closed);
    CHECK(no_carry == Approx(t.m1 / (t.m1 + t.m3) * closed).epsilon(0.05));

    CHECK_THROWS_AS(avg_harvest_closed_form(a, {0.0, kPi / 2, 1.0}, kHc, kP),
                    ValidationError);
}

TEST_CASE("averaged RF bound: zero energy, sweep monotonicity, MC proximity") {
    CHECK(avg_rf_rate_bound(0.2, 0.0, 4.0, {}, kP) == 0.0);

    BlockAllocation a{0.8, 0.2, 0.8, 0.2};
    OrientationModel m{0.0, kPi / 18, 1.0};
    const double eh = avg_harvest_closed_form(a, m, kHc, kP);
    double prev = std::numeric_limits<double>::infinity();
    for (double du = 4.0; du <= 8.0; du += 0.5) {
        const double r = avg_rf_rate_bound(a.t_rf, eh, du, {}, kP);
        CHECK(r < prev);
        prev = r;
    }

    Geometry g = kG;
    g.d_u = 6.0;
    const auto rep = monte_carlo_report(a, m, g, kP, 500000, 21);
    CHECK(std::abs(rep.avg_r_rf_bound - rep.mc_r_rf) / rep.mc_r_rf < 0.05);
}

TEST_CASE("Monte Carlo report is deterministic and CLT-scaled") {
    BlockAllocation a{0.8, 0.2, 0.8, 0.2};
    OrientationModel m{10 * kPi / 180, 40 * kPi / 180, 1.0};
    const auto r1 = monte_carlo_report(a, m, kG, kP, 50000, 77);
    const auto r2 = monte_carlo_report(a, m, kG, kP, 50000, 77);
    CHECK(r1.mc_r_vlc == r2.mc_r_vlc);
    CHECK(r1.mc_eh == r2.mc_eh);
    CHECK(r1.mc_r_rf == r2.mc_r_rf);
    CHECK(r1.mc_r_vlc_stderr == r2.mc_r_vlc_stderr);

    const auto small = monte_carlo_report(a, m, kG, kP, 10000, 5);
    const auto large = monte_carlo_report(a, m, kG, kP, 1000000, 5);
    const double ratio = small.mc_r_vlc_stderr / large.mc_r_vlc_stderr;
    CHECK(ratio == Approx(10.0).epsilon(0.2));

    CHECK_THROWS_AS(monte_carlo_report(a, m, kG, kP, 100, 5), ValidationError);
}

TEST_CASE("sampling with theta2 beyond the FoV is rejected") {
    BlockAllocation a{0.8, 0.2, 0.8, 0.2};
    OrientationModel wide{0.0, 80 * kPi / 180, 1.0};
    CHECK_THROWS_WITH(monte_carlo_report(a, wide, kG, kP, 10000, 5),
                      Catch::Matchers::ContainsSubstring("phi_fov"));
}

TEST_CASE("shrinking spread converges to the deterministic values") {
    BlockAllocation a{0.8, 0.2, 0.8, 0.2};
    const double theta = 15 * kPi / 180;
    OrientationModel m{theta, theta + 0.1 * kPi / 180, 1.0};
    const double h = kHc * std::cos(theta);

    const double rate_avg = avg_vlc_rate_quadrature(a, m, kHc, kP);
    CHECK(std::abs(rate_avg - vlc_rate(a, h, kP)) / vlc_rate(a, h, kP) < 1e-3);

    const double eh_avg = avg_harvest_exact_quadrature(a, m, kHc, kP);
    const double eh_det = harvest_phase1(a, h, kP) + harvest_phase2(a.t_rf, h, kP);
    CHECK(std::abs(eh_avg - eh_det) / eh_det < 1e-3);

    const double closed = avg_harvest_closed_form(a, m, kHc, kP);
    CHECK(std::abs(closed - eh_det) / eh_det < 1e-3);
}

TEST_CASE("averaged rate is nonincreasing in the orientation spread") {
    BlockAllocation a{0.8, 0.2, 0.8, 0.2};
    double prev = std::numeric_limits<double>::infinity();
    for (int deg = 10; deg <= 50; deg += 10) {
        OrientationModel m{0.0, deg * kPi / 180, 1.0};
        const double r = avg_vlc_rate_quadrature(a, m, kHc, kP);
        CHECK(r <= prev);
        prev = r;
    }
}
