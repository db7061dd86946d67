#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "degenheat/coefficients.hpp"

using namespace degenheat;
using Catch::Approx;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

// Closed-form accumulated integral for the quarter-turn arc on [0, 1]:
// 1/p = e^{-i pi t / 2}, antiderivative -2i (1 - e^{-i pi t / 2}) / pi.
cd arc_omega_exact(double t) {
    const double clamped = std::min(t, 1.0);
    const cd at_ramp = cd{0.0, -2.0 / kPi} * (1.0 - std::polar(1.0, -0.5 * kPi * clamped));
    if (t <= 1.0) return at_ramp;
    // Beyond the ramp 1/p is frozen at e^{-i pi/2} = -i.
    return at_ramp + cd{0.0, -(t - 1.0)};
}

// Composite Simpson rule, independent of the adaptive machinery.
template <class F>
cd simpson(F&& f, double a, double b, int panels) {
    const double h = (b - a) / (2.0 * panels);
    cd acc = f(a) + f(b);
    for (int i = 1; i < 2 * panels; ++i) acc += f(a + i * h) * ((i % 2) ? 4.0 : 2.0);
    return acc * (h / 3.0);
}

const CoefficientProfile kArc = CoefficientProfile::phase_arc(0.0, kPi / 2.0, 0.0, 1.0);

}  // namespace

TEST_CASE("eval_p per kind") {
    SECTION("constant") {
        const auto p = CoefficientProfile::constant(cd{1.0, 0.0});
        REQUIRE(eval_p(p, 5.0) == cd{1.0, 0.0});
    }

    SECTION("phase arc clamps below and above the ramp") {
        const auto p = CoefficientProfile::phase_arc(0.0, kPi / 2.0, 1.0, 2.0);
        REQUIRE(eval_p(p, 0.5) == cd{1.0, 0.0});
        const cd mid = eval_p(p, 1.5);
        REQUIRE(mid.real() == Approx(std::cos(kPi / 4.0)).epsilon(1e-15));
        REQUIRE(mid.imag() == Approx(std::sin(kPi / 4.0)).epsilon(1e-15));
        REQUIRE(std::abs(eval_p(p, 100.0) - std::polar(1.0, kPi / 2.0)) < 1e-15);
    }

    SECTION("phase arc stays on the unit circle") {
        const auto p = CoefficientProfile::phase_arc(-0.3, 2.1, 0.5, 3.0);
        for (double t : {0.0, 0.5, 1.0, 2.9, 3.0, 7.0}) {
            REQUIRE(std::abs(eval_p(p, t)) == Approx(1.0).epsilon(1e-15));
        }
    }

    SECTION("rational") {
        // (1 + t^2) / (1 + t)
        const auto p = CoefficientProfile::rational({1.0, 0.0, 1.0}, {1.0, 1.0});
        REQUIRE(eval_p(p, 2.0).real() == Approx(5.0 / 3.0).epsilon(1e-15));
        REQUIRE(eval_p(p, 2.0).imag() == 0.0);
    }

    SECTION("table interpolates and extends by boundary values") {
        const auto p = CoefficientProfile::table({0.0, 1.0, 2.0},
                                                 {cd{1.0, 0.0}, cd{0.5, 0.5}, cd{0.0, 1.0}});
        REQUIRE(eval_p(p, 0.5) == cd{0.75, 0.25});
        REQUIRE(eval_p(p, 10.0) == cd{0.0, 1.0});
    }

    SECTION("negative time is rejected") {
        REQUIRE_THROWS_AS(eval_p(CoefficientProfile::constant(cd{1.0, 0.0}), -0.1), DomainError);
    }
}

TEST_CASE("profile construction validation") {
    REQUIRE_THROWS_AS(CoefficientProfile::phase_arc(0.0, 1.0, 2.0, 2.0), DomainError);
    REQUIRE_THROWS_AS(CoefficientProfile::rational({}, {1.0}), DomainError);
    REQUIRE_THROWS_AS(CoefficientProfile::rational({1.0}, {0.0, 0.0}), DomainError);
    REQUIRE_THROWS_AS(
        CoefficientProfile::table({0.0, 0.0}, {cd{1.0, 0.0}, cd{2.0, 0.0}}), DomainError);
}

TEST_CASE("eval_p_inv") {
    SECTION("constant reciprocals") {
        REQUIRE(eval_p_inv(CoefficientProfile::constant(cd{2.0, 0.0}), 1.0) == cd{0.5, 0.0});
        const cd inv_i = eval_p_inv(CoefficientProfile::constant(cd{0.0, 1.0}), 1.0);
        REQUIRE(inv_i.real() == Approx(0.0).margin(1e-16));
        REQUIRE(inv_i.imag() == Approx(-1.0).epsilon(1e-15));
    }

    SECTION("vanishing table knot trips the floor") {
        const auto p = CoefficientProfile::table({0.0, 1.0}, {cd{1.0, 0.0}, cd{0.0, 0.0}});
        REQUIRE_THROWS_AS(eval_p_inv(p, 1.0), DegenerateCoefficientError);
    }

    SECTION("phase arc inverts on the circle") {
        const cd inv = eval_p_inv(kArc, 0.5);
        REQUIRE(inv.real() == Approx(std::cos(kPi / 4.0)).epsilon(1e-15));
        REQUIRE(inv.imag() == Approx(-std::sin(kPi / 4.0)).epsilon(1e-15));
    }
}

TEST_CASE("omega closed forms") {
    SECTION("real constant") {
        const OmegaCache cache(CoefficientProfile::constant(cd{1.0, 0.0}));
        REQUIRE(std::abs(cache.omega(2.0) - cd{2.0, 0.0}) < 1e-12);
    }

    SECTION("imaginary constant") {
        const OmegaCache cache(CoefficientProfile::constant(cd{0.0, 1.0}));
        REQUIRE(std::abs(cache.omega(1.0) - cd{0.0, -1.0}) < 1e-12);
    }

    SECTION("quarter-turn arc against the antiderivative") {
        const OmegaCache cache(kArc);
        const cd got = cache.omega(1.0);
        const cd expected = arc_omega_exact(1.0);
        REQUIRE(expected.real() == Approx(2.0 / kPi).epsilon(1e-15));
        REQUIRE(expected.imag() == Approx(-2.0 / kPi).epsilon(1e-15));
        REQUIRE(std::abs(got - expected) < 1e-12);
        // Cross-check the antiderivative itself with an independent rule.
        const cd simpson_value =
            simpson([&](double eta) { return eval_p_inv(kArc, eta); }, 0.0, 1.0, 4096);
        REQUIRE(std::abs(simpson_value - expected) < 1e-12);
    }

    SECTION("beyond the ramp the rate freezes") {
        const OmegaCache cache(kArc);
        REQUIRE(std::abs(cache.omega(2.5) - arc_omega_exact(2.5)) < 1e-12);
    }

    SECTION("omega(0) = 0 and negative t rejected") {
        const OmegaCache cache(kArc);
        REQUIRE(cache.omega(0.0) == cd{});
        REQUIRE_THROWS_AS(cache.omega(-1.0), DomainError);
    }
}

TEST_CASE("omega0 and mean_h") {
    const OmegaCache unit(CoefficientProfile::constant(cd{1.0, 0.0}));

    SECTION("difference of accumulations") {
        REQUIRE(std::abs(unit.omega0(3.0, 1.0) - cd{2.0, 0.0}) < 1e-12);
    }

    SECTION("coincident endpoints give exactly zero") {
        const OmegaCache cache(kArc);
        REQUIRE(cache.omega0(0.7, 0.7) == cd{});
    }

    SECTION("arc difference matches the antiderivative") {
        const OmegaCache cache(kArc);
        const cd expected = arc_omega_exact(1.0) - arc_omega_exact(0.5);
        REQUIRE(std::abs(cache.omega0(1.0, 0.5) - expected) < 1e-12);
    }

    SECTION("mean of a constant") {
        const OmegaCache cache(CoefficientProfile::constant(cd{2.0, 0.0}));
        REQUIRE(std::abs(cache.mean_h(1.3, 0.4) - cd{0.5, 0.0}) < 1e-12);
    }

    SECTION("arc mean over the full ramp") {
        const OmegaCache cache(kArc);
        const cd h = cache.mean_h(1.0, 0.0);
        REQUIRE(h.real() == Approx(2.0 / kPi).margin(1e-12));
        REQUIRE(h.imag() == Approx(-2.0 / kPi).margin(1e-12));
        REQUIRE(std::arg(h) == Approx(-kPi / 4.0).margin(1e-12));
    }

    SECTION("ordering preconditions") {
        REQUIRE_THROWS_AS(unit.omega0(1.0, 2.0), DomainError);
        REQUIRE_THROWS_AS(unit.mean_h(1.0, 1.0), DomainError);
        REQUIRE_THROWS_AS(unit.mean_h(1.0, -0.5), DomainError);
    }
}

TEST_CASE("omega additivity over abutting intervals") {
    const OmegaCache cache(kArc, 1e-12);
    std::mt19937 rng(7041);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        double a = 3.0 * unit(rng);
        double b = a + 3.0 * unit(rng);
        double c = b + 3.0 * unit(rng);
        const cd whole = cache.omega0(c, a);
        const cd split = cache.omega0(c, b) + cache.omega0(b, a);
        REQUIRE(std::abs(whole - split) <= 2.0 * cache.tolerance());
    }
}

TEST_CASE("Re omega is nonnegative and nondecreasing when Re p >= 0") {
    for (const auto& profile :
         {kArc, CoefficientProfile::constant(cd{0.5, 2.0}),
          CoefficientProfile::table({0.0, 1.0, 2.0}, {cd{1.0, 0.0}, cd{0.2, 0.9}, cd{0.1, 1.5}})}) {
        const OmegaCache cache(profile);
        double previous = 0.0;
        for (double t = 0.125; t <= 4.0; t += 0.125) {
            const double current = cache.omega(t).real();
            REQUIRE(current >= previous - 2.0 * cache.tolerance());
            previous = current;
        }
        REQUIRE(previous >= 0.0);
    }
}

TEST_CASE("checkpoints accumulate the panel prefix") {
    const OmegaCache cache(CoefficientProfile::constant(cd{1.0, 0.0}));
    (void)cache.omega(1.0);
    const auto checkpoints = cache.checkpoints();
    REQUIRE(checkpoints.size() >= 16);  // 1.0 / panel width
    for (const auto& [t, value] : checkpoints) {
        REQUIRE(std::abs(value - cd{t, 0.0}) < 1e-12);
    }
}

TEST_CASE("cache values are identical under concurrent reads") {
    const OmegaCache cache(kArc, 1e-12);
    std::vector<double> queries;
    for (int i = 1; i <= 64; ++i) queries.push_back(0.05 * i);

    std::vector<cd> sequential(queries.size());
    for (std::size_t i = 0; i < queries.size(); ++i) sequential[i] = cache.omega(queries[i]);

    const OmegaCache fresh(kArc, 1e-12);
    std::vector<cd> parallel(queries.size());
    std::vector<std::thread> pool;
    for (int w = 0; w < 4; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < queries.size(); i += 4) parallel[i] = fresh.omega(queries[i]);
        });
    }
    for (auto& t : pool) t.join();

    for (std::size_t i = 0; i < queries.size(); ++i) REQUIRE(parallel[i] == sequential[i]);
}
