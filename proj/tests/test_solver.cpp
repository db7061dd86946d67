#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "degenheat/solver.hpp"

using namespace degenheat;
using Catch::Approx;
using cd = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

ProblemSpec heat_problem() {
    ProblemSpec problem;
    problem.coefficient = CoefficientProfile::constant(cd{1.0, 0.0});
    problem.phi = DataFunction::gaussian(1.0);
    problem.source = SourceFunction::zero();
    return problem;
}

// Closed-form evolution of the unit Gaussian under the plain heat flow.
double heat_gaussian_exact(double t, double x) {
    const double s = 1.0 + 4.0 * t;
    return std::exp(-x * x / s) / std::sqrt(s);
}

}  // namespace

TEST_CASE("homogeneous term against closed forms") {
    SECTION("Gaussian evolves to the dilated Gaussian") {
        const Solver solver(heat_problem());
        const cd u = solver.solve_homogeneous(0.25, 0.0);
        REQUIRE(u.real() == Approx(1.0 / std::sqrt(2.0)).margin(1e-8));
        REQUIRE(std::abs(u.imag()) < 1e-10);
    }

    SECTION("constant datum is preserved exactly by the unit kernel mass") {
        ProblemSpec problem = heat_problem();
        problem.phi = DataFunction::constant(cd{2.5, -1.0});
        const Solver solver(problem);
        for (double t : {0.1, 0.7}) {
            for (double x : {-3.0, 0.4}) {
                REQUIRE(std::abs(solver.solve_homogeneous(t, x) - cd{2.5, -1.0}) < 1e-9);
            }
        }
    }

    SECTION("sine is an eigenfunction with multiplier e^{-t}") {
        ProblemSpec problem = heat_problem();
        problem.phi = DataFunction::sine(1.0);
        const Solver solver(problem);
        for (double t : {0.2, 1.0}) {
            for (double x : {-1.0, 0.5, 2.0}) {
                REQUIRE(std::abs(solver.solve_homogeneous(t, x) - cd{std::exp(-t) * std::sin(x), 0.0}) <
                        1e-8);
            }
        }
    }

    SECTION("sine under a phase arc picks up the complex multiplier") {
        // The Fourier multiplier at wavenumber one is exp(-omega(t)) for any
        // admissible coefficient; compare against the arc's closed form.
        ProblemSpec problem = heat_problem();
        problem.coefficient = CoefficientProfile::phase_arc(0.0, kPi / 2.0, 0.0, 1.0);
        problem.phi = DataFunction::sine(1.0);
        const Solver solver(problem);
        const double t = 0.75;
        const cd omega = cd{0.0, -2.0 / kPi} * (1.0 - std::polar(1.0, -0.5 * kPi * t));
        const cd expected = std::exp(-omega) * std::sin(0.4);
        REQUIRE(std::abs(solver.solve_homogeneous(t, 0.4) - expected) < 1e-8);
    }

    SECTION("degenerate regime refuses and names the time") {
        ProblemSpec problem = heat_problem();
        problem.coefficient = CoefficientProfile::constant(cd{0.0, 1.0});
        const Solver solver(problem);
        try {
            solver.solve_homogeneous(0.5, 0.0);
            FAIL("expected DegenerateRegimeError");
        } catch (const DegenerateRegimeError& e) {
            REQUIRE(std::string(e.what()).find("t = 0.5") != std::string::npos);
        }
    }
}

TEST_CASE("source term") {
    SECTION("zero source contributes nothing") {
        const Solver solver(heat_problem());
        REQUIRE(solver.solve_duhamel(0.8, 0.3) == cd{});
    }

    SECTION("constant-coefficient discriminator: corrected form integrates the ODE") {
        // 2 u_t = 1 with zero datum has u = t/2; the corrected weight 1/p
        // reproduces it, the unweighted form overshoots to u = t.
        ProblemSpec problem;
        problem.coefficient = CoefficientProfile::constant(cd{2.0, 0.0});
        problem.phi = DataFunction::zero();
        problem.source = SourceFunction::constant(cd{1.0, 0.0});
        problem.hoelder = HoelderParams{0.0, 1.0};

        problem.duhamel_form = DuhamelForm::corrected;
        const Solver corrected(problem);
        REQUIRE(std::abs(corrected.solve(1.0, 0.0) - cd{0.5, 0.0}) < 1e-6);

        problem.duhamel_form = DuhamelForm::paper;
        const Solver paper(problem);
        REQUIRE(std::abs(paper.solve(1.0, 0.0) - cd{1.0, 0.0}) < 1e-6);
    }

    SECTION("manufactured source reproduces t e^{-x^2}") {
        ProblemSpec problem;
        problem.coefficient = CoefficientProfile::constant(cd{1.0, 0.0});
        problem.phi = DataFunction::zero();
        problem.source = SourceFunction::mms(ExactFieldId::t_gaussian);
        problem.hoelder = HoelderParams{6.0, 1.0};
        const Solver solver(problem);
        REQUIRE(std::abs(solver.solve_duhamel(0.5, 0.0) - cd{0.5, 0.0}) < 1e-5);
    }
}

TEST_CASE("full solve superposes the two terms") {
    SECTION("zero source reduces to the homogeneous value") {
        const Solver solver(heat_problem());
        REQUIRE(solver.solve(0.25, 0.0) == solver.solve_homogeneous(0.25, 0.0));
    }

    SECTION("sine datum plus unit source") {
        ProblemSpec problem = heat_problem();
        problem.phi = DataFunction::sine(1.0);
        problem.source = SourceFunction::constant(cd{1.0, 0.0});
        problem.hoelder = HoelderParams{0.0, 1.0};
        const Solver solver(problem);
        const cd u = solver.solve(1.0, kPi / 2.0);
        REQUIRE(std::abs(u - cd{std::exp(-1.0) + 1.0, 0.0}) < 1e-6);
    }
}

TEST_CASE("solve_grid") {
    SECTION("single-point grid reduces to solve") {
        const Solver solver(heat_problem());
        GridSpec grid{0.25, 0.25, 1, 0.0, 0.0, 1};
        const SolutionField field = solver.solve_grid(grid);
        REQUIRE(field.nt() == 1);
        REQUIRE(field.nx() == 1);
        REQUIRE(field.at(0, 0) == solver.solve(0.25, 0.0));
    }

    SECTION("constant datum gives a constant matrix") {
        ProblemSpec problem = heat_problem();
        problem.phi = DataFunction::constant(cd{3.0, 0.5});
        const Solver solver(problem);
        const SolutionField field = solver.solve_grid({0.1, 0.5, 3, -1.0, 1.0, 5});
        for (std::size_t i = 0; i < field.nt(); ++i)
            for (std::size_t j = 0; j < field.nx(); ++j)
                REQUIRE(std::abs(field.at(i, j) - cd{3.0, 0.5}) < 1e-9);
    }

    SECTION("heat benchmark matches the closed form in sup norm") {
        const Solver solver(heat_problem());
        const SolutionField field = solver.solve_grid({0.1, 1.0, 5, -5.0, 5.0, 41});
        double sup = 0.0;
        for (std::size_t i = 0; i < field.nt(); ++i)
            for (std::size_t j = 0; j < field.nx(); ++j)
                sup = std::max(sup,
                               std::abs(field.at(i, j) - cd{heat_gaussian_exact(field.t(i), field.x(j)), 0.0}));
        REQUIRE(sup < 1e-6);
    }

    SECTION("results are bitwise identical for any thread count") {
        const Solver solver(heat_problem());
        const GridSpec grid{0.1, 1.0, 4, -3.0, 3.0, 9};
        const SolutionField one = solver.solve_grid(grid, 1);
        const Solver fresh(heat_problem());
        const SolutionField three = fresh.solve_grid(grid, 3);
        REQUIRE(one.values() == three.values());
    }

    SECTION("first failing point aborts with its coordinates") {
        ProblemSpec problem = heat_problem();
        problem.coefficient = CoefficientProfile::constant(cd{0.0, 1.0});
        const Solver solver(problem);
        try {
            solver.solve_grid({0.5, 1.0, 2, -1.0, 1.0, 3});
            FAIL("expected DegenerateRegimeError");
        } catch (const DegenerateRegimeError& e) {
            REQUIRE(std::string(e.what()).find("t = 0.5") != std::string::npos);
        }
    }

    SECTION("grid validation") {
        const Solver solver(heat_problem());
        REQUIRE_THROWS_AS(solver.solve_grid({0.0, 1.0, 5, -1.0, 1.0, 5}), DomainError);
        REQUIRE_THROWS_AS(solver.solve_grid({0.5, 0.1, 5, -1.0, 1.0, 5}), DomainError);
        REQUIRE_THROWS_AS(solver.solve_grid({0.5, 0.7, 1, -1.0, 1.0, 3}), DomainError);
    }
}

TEST_CASE("linearity over data") {
    // Piecewise-linear tables are closed under linear combination, so the
    // combined problem sees exactly the combined data.
    std::vector<double> knots;
    std::vector<cd> v1, v2, combo;
    const cd alpha{2.0, -1.0};
    const cd beta{0.0, 0.5};
    for (int i = 0; i <= 400; ++i) {
        const double x = -10.0 + 0.05 * i;
        knots.push_back(x);
        const cd a{std::exp(-x * x), 0.0};
        const cd b{std::sin(x), 0.0};
        v1.push_back(a);
        v2.push_back(b);
        combo.push_back(alpha * a + beta * b);
    }
    const cd f1{0.3, 0.0};
    const cd f2{0.1, 0.2};

    const auto make = [&](std::vector<cd> phi_values, cd source_value) {
        ProblemSpec problem;
        problem.coefficient = CoefficientProfile::constant(cd{1.0, 0.0});
        problem.phi = DataFunction::table(knots, std::move(phi_values));
        problem.source = SourceFunction::constant(source_value);
        problem.hoelder = HoelderParams{0.0, 1.0};
        return problem;
    };

    const Solver s1(make(v1, f1));
    const Solver s2(make(v2, f2));
    const Solver sc(make(combo, alpha * f1 + beta * f2));
    for (double t : {0.3, 0.8}) {
        for (double x : {-0.7, 0.9}) {
            const cd expected = alpha * s1.solve(t, x) + beta * s2.solve(t, x);
            REQUIRE(std::abs(sc.solve(t, x) - expected) < 3e-8);
        }
    }
}

TEST_CASE("translation equivariance") {
    // Shifting the tabulated datum shifts the solution; in shifted
    // coordinates both solves see identical data.
    const double shift = 1.375;
    std::vector<double> knots, shifted_knots;
    std::vector<cd> values;
    for (int i = 0; i <= 800; ++i) {
        const double x = -10.0 + 0.025 * i;
        knots.push_back(x);
        shifted_knots.push_back(x + shift);
        values.push_back(cd{std::exp(-x * x) * (1.0 + 0.3 * std::sin(2.0 * x)), 0.0});
    }
    ProblemSpec base;
    base.coefficient = CoefficientProfile::constant(cd{1.0, 0.0});
    base.phi = DataFunction::table(knots, values);
    ProblemSpec shifted = base;
    shifted.phi = DataFunction::table(shifted_knots, values);

    const Solver solver(base);
    const Solver solver_shifted(shifted);
    for (double t : {0.2, 0.6}) {
        for (double x : {-0.5, 0.0, 1.1}) {
            REQUIRE(std::abs(solver.solve(t, x) - solver_shifted.solve(t, x + shift)) < 1e-9);
        }
    }
}

TEST_CASE("homogeneous amplitude bound") {
    // max_x |u_hom(t, .)| <= sup|phi| sqrt(|omega| / Re omega) plus the
    // quadrature budget, including beyond the arc's decay horizon.
    ProblemSpec problem = heat_problem();
    problem.coefficient = CoefficientProfile::phase_arc(0.0, kPi / 2.0, 0.0, 1.0);
    const Solver solver(problem);
    for (double t : {0.25, 1.0, 2.5, 4.0}) {
        const cd omega = solver.cache().omega(t);
        const double bound =
            problem.phi.sup_abs() * std::sqrt(std::abs(omega) / omega.real()) + 1e-8;
        double observed = 0.0;
        for (int j = -12; j <= 12; ++j) {
            observed = std::max(observed, std::abs(solver.solve_homogeneous(t, 0.5 * j)));
        }
        REQUIRE(observed <= bound);
    }
}

TEST_CASE("time consistency of the homogeneous flow") {
    // Propagate to t1, restart from the tabulated field, propagate to t2;
    // compare against the direct solve at t1 + t2 on the interior half.
    const double t1 = 0.2, t2 = 0.3;
    const Solver first(heat_problem());
    std::vector<double> knots;
    std::vector<cd> values;
    for (int i = 0; i <= 4000; ++i) {
        const double x = -10.0 + 0.005 * i;
        knots.push_back(x);
        values.push_back(first.solve(t1, x));
    }
    ProblemSpec restarted = heat_problem();
    restarted.phi = DataFunction::table(std::move(knots), std::move(values));
    const Solver second(restarted);
    const Solver direct(heat_problem());
    for (int j = -10; j <= 10; ++j) {
        const double x = 0.5 * j;
        REQUIRE(std::abs(second.solve(t2, x) - direct.solve(t1 + t2, x)) < 1e-5);
    }
}
