#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "harvest/link_budget.hpp"
#include "harvest/rng.hpp"

using namespace harvest;
using Catch::Approx;

namespace {
const SystemParams kP;
const Geometry kG;
const double kH0 = 7.957747154594767e-6;  // nadir gain of the default geometry
}  // namespace

TEST_CASE("peak amplitude constraint") {
    CHECK(max_peak_amplitude(0.55, kP) == Approx(0.45).epsilon(1e-12));
    CHECK(max_peak_amplitude(1.0, kP) == 0.0);
    CHECK(max_peak_amplitude(0.8, kP) == Approx(0.2).epsilon(1e-12));
    CHECK_THROWS_AS(max_peak_amplitude(1.2, kP), ValidationError);
}

TEST_CASE("allocation invariants") {
    CHECK_NOTHROW(make_allocation(0.8, 0.2, 0.8, kP));
    CHECK_THROWS_WITH(make_allocation(0.8, 0.3, 0.8, kP),
                      Catch::Matchers::ContainsSubstring("a_peak"));
    CHECK_THROWS_AS(make_allocation(0.05, 0.0, 0.5, kP), ValidationError);
    BlockAllocation bad{0.8, 0.1, 0.6, 0.5};
    CHECK_THROWS_WITH(validate_allocation(bad, kP),
                      Catch::Matchers::ContainsSubstring("t_vlc + t_rf"));
}

TEST_CASE("VLC rate reference value and identities") {
    BlockAllocation a{0.8, 0.2, 0.8, 0.2};
    const double r = vlc_rate(a, kH0, kP);
    CHECK(r == Approx(4.3469e7).epsilon(1e-4));

    BlockAllocation quiet = a;
    quiet.a_peak = 0.0;
    CHECK(vlc_rate(quiet, kH0, kP) == 0.0);
    CHECK(vlc_rate(a, 0.0, kP) == 0.0);

    // doubling A adds exactly t B log2((1+4s)/(1+s))
    const double sig = kP.eta * kP.p_led * a.a_peak * kH0;
    const double s = kEulerE / (2 * kPi) * sig * sig / shot_noise_power(kP);
    BlockAllocation twice{0.8, 0.4, 0.8, 0.2};  // i_b adjusted below to stay legal
    twice.i_b = 0.6;
    const double delta = vlc_rate(twice, kH0, kP) - vlc_rate(a, kH0, kP);
    CHECK(delta ==
          Approx(a.t_vlc * kP.b_vlc * std::log2((1 + 4 * s) / (1 + s))).epsilon(1e-12));
}

TEST_CASE("phase-1 harvest reference value and monotonicity") {
    BlockAllocation a{0.8, 0.2, 0.8, 0.2};
    CHECK(harvest_phase1(a, kH0, kP) == Approx(6.0450e-7).epsilon(1e-4));

    BlockAllocation off = a;
    off.i_b = 0.0;  // bypasses allocation validation on purpose
    CHECK(harvest_phase1(off, kH0, kP) == 0.0);

    double prev = 0.0;
    for (double i_b = 0.1; i_b <= 1.0; i_b += 0.05) {
        BlockAllocation x{i_b, 0.0, 0.8, 0.2};
        const double e = harvest_phase1(x, kH0, kP);
        CHECK(e > prev);
        prev = e;
    }
}

TEST_CASE("phase-2 harvest reference value and linearity") {
    CHECK(harvest_phase2(0.2, kH0, kP) == Approx(1.9290e-7).epsilon(1e-4));
    CHECK(harvest_phase2(0.0, kH0, kP) == 0.0);
    CHECK(harvest_phase2(0.4, kH0, kP) == Approx(2 * harvest_phase2(0.2, kH0, kP)).epsilon(1e-12));

    // phase 2 is phase 1 run at i_max for the same duration
    BlockAllocation max_bias{kP.i_max, 0.0, 0.2, 0.8};
    CHECK(harvest_phase2(0.2, kH0, kP) == Approx(harvest_phase1(max_bias, kH0, kP)).epsilon(1e-12));
}

TEST_CASE("total harvest accounting") {
    BlockAllocation a{0.8, 0.2, 0.8, 0.2};
    const double e1 = harvest_phase1(a, kH0, kP);
    CHECK(total_harvest(a, 0.0, kH0, kP) == e1);
    CHECK(total_harvest(a, 1e-7, kH0, kP) == Approx(e1 + 1e-7).epsilon(1e-15));
    CHECK_THROWS_AS(total_harvest(a, -1e-9, kH0, kP), ValidationError);
}

TEST_CASE("RF path gain pins the log-domain arithmetic") {
    const double g = rf_path_gain(4.0, kP);
    CHECK(g == Approx(1.22548e5).epsilon(1e-4));
    // log-domain recomputation
    const double lambda = kSpeedOfLight / kP.f_c;
    const double g_db = 20 * std::log10(4 * kPi * kP.d_ref / lambda) +
                        10 * kP.beta_pl * std::log10(4.0 / kP.d_ref);
    CHECK(g == Approx(std::pow(10.0, g_db / 10.0)).epsilon(1e-12));

    CHECK(rf_path_gain(1.0, kP) == Approx(std::pow(4 * kPi / lambda, 2)).epsilon(1e-12));

    SystemParams p5 = kP;
    p5.f_c = 5e9;
    CHECK(rf_path_gain(4.0, p5) / g == Approx(std::pow(5.0 / 2.4, 2)).epsilon(1e-12));
    CHECK_THROWS_AS(rf_path_gain(0.5, kP), ValidationError);
}

TEST_CASE("RF rate reference value and limits") {
    CHECK(rf_rate(0.2, 6.05e-7, {}, 4.0, kP) == Approx(1.2610e7).epsilon(1e-3));
    CHECK(rf_rate(0.2, 0.0, {}, 4.0, kP) == 0.0);
    CHECK(rf_rate(1e-6, 1e-7, {}, 4.0, kP) < rf_rate(1e-3, 1e-7, {}, 4.0, kP));
}

TEST_CASE("end-to-end rate is the weaker hop") {
    CHECK(end_to_end_rate(4.35e7, 1.26e7) == 1.26e7);
    CHECK(end_to_end_rate(5.0, 5.0) == 5.0);
}

TEST_CASE("block simulation: carryover reaches steady state at block 2") {
    BlockAllocation a{0.8, 0.2, 0.8, 0.2};
    const auto one = simulate_blocks(1, a, kG, kP);
    REQUIRE(one.size() == 1);
    CHECK(one[0].e_h == Approx(one[0].e1).epsilon(1e-15));

    const auto three = simulate_blocks(3, a, kG, kP);
    REQUIRE(three.size() == 3);
    CHECK(three[1].e_h == three[2].e_h);
    CHECK(three[1].e_h == Approx(three[1].e1 + three[0].e2).epsilon(1e-15));
    CHECK(three[0].e2 == three[1].e2);  // constant allocation

    const auto no_carry = simulate_blocks(3, a, kG, kP, PolicyCase::jo_no_e2);
    for (const auto& b : no_carry) CHECK(b.e_h == Approx(b.e1).epsilon(1e-15));
    CHECK(no_carry[0].r_rf == no_carry[2].r_rf);
}

TEST_CASE("rate monotonicity in the physical drivers") {
    Rng rng(31);
    for (int k = 0; k < 200; ++k) {
        const double i_b = rng.uniform(0.55, 1.0);
        const double a_pk = rng.uniform(0.0, std::min(i_b - kP.i_min, kP.i_max - i_b));
        const double t = rng.uniform(0.05, 0.95);
        BlockAllocation a{i_b, a_pk, t, 1 - t};
        const double h = rng.uniform(1e-7, 1e-5);
        const double eh = rng.uniform(1e-9, 1e-5);
        const double du = rng.uniform(4.0, 8.0);

        BlockAllocation more_a = a;
        more_a.a_peak = std::min(a.a_peak * 1.1, std::min(i_b - kP.i_min, kP.i_max - i_b));
        CHECK(vlc_rate(more_a, h, kP) >= vlc_rate(a, h, kP));
        CHECK(vlc_rate(a, h * 1.1, kP) >= vlc_rate(a, h, kP));

        CHECK(rf_rate(1 - t, eh * 1.1, {}, du, kP) >= rf_rate(1 - t, eh, {}, du, kP));
        RfFading strong{RfFading::Mode::fixed_unit, 1.5};
        CHECK(rf_rate(1 - t, eh, strong, du, kP) >= rf_rate(1 - t, eh, {}, du, kP));
        CHECK(rf_rate(1 - t, eh, {}, du + 0.5, kP) <= rf_rate(1 - t, eh, {}, du, kP));
        SystemParams p5 = kP;
        p5.f_c = 5e9;
        CHECK(rf_rate(1 - t, eh, {}, du, p5) <= rf_rate(1 - t, eh, {}, du, kP));
    }
}

TEST_CASE("time-split tension at fixed bias") {
    // More VLC time raises the VLC rate and starves the RF hop.
    double prev_rv = 0.0;
    double prev_rr = std::numeric_limits<double>::infinity();
    for (double t = 0.05; t <= 0.95 + 1e-9; t += 0.05) {
        BlockAllocation a{0.8, 0.2, t, 1 - t};
        const double rv = vlc_rate(a, kH0, kP);
        const double eh = total_harvest(a, harvest_phase2(a.t_rf, kH0, kP), kH0, kP);
        const double rr = rf_rate(a.t_rf, eh, {}, 4.0, kP);
        CHECK(rv >= prev_rv - 1e-9);
        CHECK(rr <= prev_rr + 1e-9);
        prev_rv = rv;
        prev_rr = rr;
    }
}

TEST_CASE("DC-bias tension at fixed time split") {
    // With A at its cap, raising the bias trades VLC rate for harvested energy.
    double prev_rv = std::numeric_limits<double>::infinity();
    double prev_rr = 0.0;
    for (double i_b = 0.55; i_b <= 1.0 + 1e-9; i_b += 0.01) {
        BlockAllocation a{std::min(i_b, 1.0), max_peak_amplitude(std::min(i_b, 1.0), kP),
                          0.5, 0.5};
        const double rv = vlc_rate(a, kH0, kP);
        const double eh = total_harvest(a, harvest_phase2(a.t_rf, kH0, kP), kH0, kP);
        const double rr = rf_rate(a.t_rf, eh, {}, 4.0, kP);
        CHECK(rv <= prev_rv + 1e-9);
        CHECK(rr >= prev_rr - 1e-9);
        prev_rv = rv;
        prev_rr = rr;
    }
}

TEST_CASE("all outputs stay finite and nonnegative") {
    Rng rng(99);
    for (int k = 0; k < 500; ++k) {
        const double i_b = rng.uniform(kP.i_min, kP.i_max);
        const double a_pk = rng.uniform(0.0, max_peak_amplitude(i_b, kP));
        const double t = rng.uniform(1e-3, 1 - 1e-3);
        BlockAllocation a{i_b, a_pk, t, 1 - t};
        const double h = rng.uniform(0.0, 1e-5);
        const auto rep = link_report(a, rng.uniform(0.0, 1e-6), h, rng.uniform(4, 8), {}, kP);
        for (const double v : {rep.r_vlc, rep.r_rf, rep.r_end2end, rep.e1, rep.e2,
                               rep.e_h, rep.p_h, rep.snr_vlc, rep.snr_rf}) {
            CHECK(std::isfinite(v));
            CHECK(v >= 0.0);
        }
    }
}

TEST_CASE("rayleigh fading draws are unit-mean exponential") {
    Rng rng(123);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) sum += rayleigh_sample(rng).h_rf_sq;
    CHECK(sum / n == Approx(1.0).margin(0.01));
}
