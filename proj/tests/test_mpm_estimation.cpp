#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "driftcast/errors.hpp"
#include "driftcast/mpm.hpp"
#include "driftcast/rng.hpp"

using namespace driftcast;

namespace {

MultiSeries sampled(std::size_t t, double dt, double (*f)(double)) {
    MultiSeries s(t, 1, dt, {"x"});
    for (std::size_t i = 0; i < t; ++i) s(i, 0) = f(i * dt);
    return s;
}

double max_interior_error(const MultiSeries& s, double dt, double (*deriv)(double)) {
    const DriftSamples d = estimate_drift(window(s, s.size(), s.size()), dt);
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < s.size(); ++i)
        worst = std::max(worst, std::abs(d.samples(i, 0) - deriv(i * dt)));
    return worst;
}

} // namespace

TEST_CASE("linear ramp gives the exact slope everywhere") {
    MultiSeries s(10, 2, 0.5, {"x", "y"});
    for (std::size_t i = 0; i < 10; ++i) {
        s(i, 0) = 3.0 * (i * 0.5);
        s(i, 1) = -1.5 * (i * 0.5);
    }
    const DriftSamples d = estimate_drift(window(s, 10, 10), 0.5);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(d.samples(i, 0) == doctest::Approx(3.0).epsilon(1e-12));
        CHECK(d.samples(i, 1) == doctest::Approx(-1.5).epsilon(1e-12));
    }
    CHECK(d.mean[0] == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(d.mean[1] == doctest::Approx(-1.5).epsilon(1e-12));
}

TEST_CASE("constant series gives zero drift") {
    MultiSeries s(8, 1, 1.0, {"x"});
    for (std::size_t i = 0; i < 8; ++i) s(i, 0) = 4.2;
    const DriftSamples d = estimate_drift(window(s, 8, 8), 1.0);
    for (std::size_t i = 0; i < 8; ++i) CHECK(d.samples(i, 0) == 0.0);
    CHECK(d.mean[0] == 0.0);
}

TEST_CASE("fourth-order stencil is exact on cubics") {
    const MultiSeries s = sampled(40, 0.1, [](double t) { return t * t * t; });
    const DriftSamples d = estimate_drift(window(s, 40, 40), 0.1);
    for (std::size_t i = 2; i + 2 < 40; ++i)
        CHECK(std::abs(d.samples(i, 0) - 3.0 * (i * 0.1) * (i * 0.1)) <= 1e-10);
}

TEST_CASE("quintic error shrinks 16x when dt halves") {
    auto quintic = [](double t) { return t * t * t * t * t; };
    auto dquintic = [](double t) { return 5.0 * t * t * t * t; };
    // same physical span, two resolutions
    const MultiSeries coarse = sampled(41, 0.1, quintic);
    const MultiSeries fine = sampled(81, 0.05, quintic);
    const double e_coarse = max_interior_error(coarse, 0.1, dquintic);
    const double e_fine = max_interior_error(fine, 0.05, dquintic);
    const double ratio = e_coarse / e_fine;
    CHECK(ratio >= 16.0 * 0.75);
    CHECK(ratio <= 16.0 * 1.25);
}

TEST_CASE("windows under 5 rows are rejected") {
    MultiSeries s(10, 1, 1.0, {"x"});
    CHECK_THROWS_AS(estimate_drift(window(s, 10, 4), 1.0), WindowTooSmall);
}

TEST_CASE("identical drift samples give zero covariance and diffusion") {
    DriftSamples d;
    d.samples = Mat(6, 2, 1.5);
    d.mean = {1.5, 1.5};
    const SdeParams p = estimate_diffusion(d, 0.1);
    CHECK(frobenius_norm(p.covariance) == 0.0);
    CHECK(frobenius_norm(p.diffusion) == 0.0);
}

TEST_CASE("two-sample scalar residuals match the hand formula") {
    const double r = 0.7, dt = 0.25;
    DriftSamples d;
    d.samples = Mat(2, 1);
    d.samples(0, 0) = r;
    d.samples(1, 0) = -r;
    d.mean = {0.0};
    const SdeParams p = estimate_diffusion(d, dt);
    // C = (r^2 + r^2) dt / (2 - 1), B = sqrt(C)
    CHECK(p.covariance(0, 0) == doctest::Approx(2.0 * r * r * dt).epsilon(1e-14));
    CHECK(p.diffusion(0, 0) == doctest::Approx(r * std::sqrt(2.0 * dt)).epsilon(1e-13));
}

TEST_CASE("diffusion squares back to the covariance on random data") {
    SeededRng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t w = 30, n = 8;
        DriftSamples d;
        d.samples = Mat(w, n);
        for (std::size_t i = 0; i < w; ++i)
            for (std::size_t j = 0; j < n; ++j) d.samples(i, j) = rng.standard_normal();
        d.mean.assign(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t i = 0; i < w; ++i) sum += d.samples(i, j);
            d.mean[j] = sum / w;
        }
        const SdeParams p = estimate_diffusion(d, 0.3);
        const Mat bb = p.diffusion * p.diffusion;
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                err += (bb(i, j) - p.covariance(i, j)) * (bb(i, j) - p.covariance(i, j));
        CHECK(std::sqrt(err) <= 1e-10 * frobenius_norm(p.covariance));
        // symmetry
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                CHECK(p.covariance(i, j) == doctest::Approx(p.covariance(j, i)).epsilon(1e-12));
    }
}

TEST_CASE("select_window branches") {
    WindowPolicy policy;
    policy.w_base = 20;
    policy.w_min = 10;
    policy.w_max = 30;
    policy.threshold = 1.0;
    policy.lookback = 5;
    const double dt = 1.0;
    const std::size_t t = policy.w_max + policy.lookback + 10;

    SUBCASE("steady rows pick w_max") {
        MultiSeries s(t, 1, dt, {"x"});
        for (std::size_t i = 0; i < t; ++i) s(i, 0) = 7.0;
        const WindowDecision d = select_window(s, t, policy, dt);
        CHECK(d.drift_magnitude == 0.0);
        CHECK(d.chosen_width == policy.w_max);
        CHECK(d.regime == Regime::Steady);
    }
    SUBCASE("fast ramp picks w_min") {
        MultiSeries s(t, 1, dt, {"x"});
        for (std::size_t i = 0; i < t; ++i) s(i, 0) = 2.0 * i; // D = 2 > threshold
        const WindowDecision d = select_window(s, t, policy, dt);
        CHECK(d.drift_magnitude == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(d.chosen_width == policy.w_min);
        CHECK(d.regime == Regime::Transient);
    }
    SUBCASE("D equal to the threshold falls to w_base") {
        MultiSeries s(t, 1, dt, {"x"});
        for (std::size_t i = 0; i < t; ++i) s(i, 0) = 1.0 * i; // D = 1 = threshold
        const WindowDecision d = select_window(s, t, policy, dt);
        CHECK(d.drift_magnitude == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(d.chosen_width == policy.w_base);
        CHECK(d.regime == Regime::Nominal);
    }
    SUBCASE("insufficient history is rejected") {
        MultiSeries s(t, 1, dt, {"x"});
        CHECK_THROWS_AS(select_window(s, policy.w_max + policy.lookback - 1, policy, dt), OutOfBounds);
    }
}

TEST_CASE("translation invariance of drift, covariance and D") {
    SeededRng rng(29);
    const std::size_t t = 60;
    MultiSeries a(t, 2, 0.5, {"x", "y"});
    MultiSeries b(t, 2, 0.5, {"x", "y"});
    for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = 0; j < 2; ++j) {
            const double v = rng.standard_normal();
            a(i, j) = v;
            b(i, j) = v + 1000.0;
        }
    const DriftSamples da = estimate_drift(window(a, t, t), 0.5);
    const DriftSamples db = estimate_drift(window(b, t, t), 0.5);
    for (std::size_t i = 0; i < t; ++i)
        for (std::size_t j = 0; j < 2; ++j)
            CHECK(da.samples(i, j) == doctest::Approx(db.samples(i, j)).epsilon(1e-9));
    WindowPolicy policy;
    policy.w_base = 20;
    policy.w_min = 10;
    policy.w_max = 30;
    policy.threshold = 1.0;
    policy.lookback = 5;
    const WindowDecision wa = select_window(a, t, policy, 0.5);
    const WindowDecision wb = select_window(b, t, policy, 0.5);
    CHECK(wa.drift_magnitude == doctest::Approx(wb.drift_magnitude).epsilon(1e-9));
}

TEST_CASE("policy validation") {
    WindowPolicy p;
    p.w_min = 4; // below the stencil minimum
    p.threshold = 1.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.w_min = 50;
    p.w_base = 40; // base below min
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.w_base = 100;
    p.threshold = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("default threshold keeps both branches reachable on mixed data") {
    WindowPolicy policy;
    policy.w_base = 20;
    policy.w_min = 10;
    policy.w_max = 30;
    policy.lookback = 5;
    SeededRng rng(3);
    const std::size_t t = 200;
    MultiSeries s(t, 1, 1.0, {"x"});
    double v = 0.0;
    for (std::size_t i = 0; i < t; ++i) {
        v += 0.05 + 0.02 * rng.standard_normal();
        s(i, 0) = v;
    }
    const double thr = default_threshold(s, policy, 1.0);
    CHECK(thr > 0.0);
    CHECK(std::isfinite(thr));
}
