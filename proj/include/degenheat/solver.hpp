#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "degenheat/coefficients.hpp"
#include "degenheat/errors.hpp"
#include "degenheat/kernel.hpp"
#include "degenheat/problem.hpp"
#include "degenheat/quadrature.hpp"

namespace degenheat {

namespace detail {

template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) body(i);
        });
    }
    for (auto& worker : pool) worker.join();
}

inline std::string grid_point_prefix(double t, double x) {
    return "solve_grid: failure at grid point (t = " + std::to_string(t) + ", x = " +
           std::to_string(x) + "): ";
}

// Rethrows the captured exception with the grid point prepended, preserving
// the dynamic type for the caller's error classification.
[[noreturn]] inline void rethrow_at_point(std::exception_ptr error, double t, double x) {
    const std::string prefix = grid_point_prefix(t, x);
    try {
        std::rethrow_exception(std::move(error));
    } catch (const DegenerateRegimeError& e) {
        throw DegenerateRegimeError(prefix + e.what());
    } catch (const DegenerateCoefficientError& e) {
        throw DegenerateCoefficientError(prefix + e.what());
    } catch (const DegenerateKernelError& e) {
        throw DegenerateKernelError(prefix + e.what());
    } catch (const NonConvergenceError& e) {
        throw NonConvergenceError(prefix + e.what(), e.partial());
    } catch (const DomainError& e) {
        throw DomainError(prefix + e.what());
    } catch (const Error& e) {
        throw Error(prefix + e.what());
    } catch (const std::exception& e) {
        throw Error(prefix + e.what());
    }
}

}  // namespace detail

/// Evaluates the kernel representation of the solution: the homogeneous
/// convolution against phi plus the inhomogeneous double integral against
/// the source. Pure given the problem; the omega cache is shared across
/// calls and safe under concurrent reads.
class Solver {
public:
    explicit Solver(ProblemSpec problem)
        : problem_(std::move(problem)),
          cache_(problem_.coefficient, problem_.tolerances.omega_tol, problem_.tolerances.p_floor) {
        problem_.validate();
    }

    /// Truncated convolution of the kernel at omega(t) against phi.
    std::complex<double> solve_homogeneous(double t, double x) const {
        const std::complex<double> w = regime_omega(t);
        if (problem_.phi.is_zero()) return {};
        const KernelEvaluator kernel(w);
        const double radius = decay_radius(w, problem_.tolerances.tail_tol);
        const DataFunction& phi = problem_.phi;
        const QuadResult r = integrate_line([&](double y) { return kernel(y - x) * phi(y); }, x,
                                            radius, problem_.tolerances.quad_tol);
        evaluations_.fetch_add(r.evaluations, std::memory_order_relaxed);
        return r.value;
    }

    /// Source contribution: the outer integral over tau of the weighted,
    /// truncated spatial convolution of the kernel at omega0(t, tau) against
    /// f(tau, .). The tau -> t slice is handled by integrate_duhamel with a
    /// Hoelder-derived bound when the problem carries one.
    std::complex<double> solve_duhamel(double t, double x) const {
        if (!(t > 0.0)) throw DomainError("solve_duhamel: t must be positive");
        if (problem_.source.is_zero()) return {};
        const Tolerances& tols = problem_.tolerances;
        const double eps = tols.eps_split_rel * t;

        const std::complex<double> omega_slice = cache_.omega0(t, t - eps);
        require_regime(omega_slice, t, t - eps);

        const double inner_tol = 0.25 * tols.quad_tol / std::max(1.0, t);
        const bool corrected = problem_.duhamel_form == DuhamelForm::corrected;
        const auto inner = [&](double tau) {
            const std::complex<double> w = cache_.omega0(t, tau);
            require_regime(w, t, tau);
            const KernelEvaluator kernel(w);
            const double radius = decay_radius(w, tols.tail_tol);
            const SourceFunction& source = problem_.source;
            const CoefficientProfile& coefficient = problem_.coefficient;
            const QuadResult r =
                integrate_line([&](double y) { return kernel(y - x) * source(tau, y, coefficient); },
                               x, radius, inner_tol);
            evaluations_.fetch_add(r.evaluations, std::memory_order_relaxed);
            const std::complex<double> weight =
                corrected ? eval_p_inv(coefficient, tau, tols.p_floor) : std::complex<double>{1.0, 0.0};
            return weight * r.value;
        };

        std::optional<double> slice_bound;
        if (problem_.hoelder) {
            const double weight_end =
                corrected ? std::abs(eval_p_inv(problem_.coefficient, t - eps, tols.p_floor)) : 1.0;
            slice_bound = 2.0 * eps * weight_end * problem_.hoelder->bound *
                          kernel_abs_moment(omega_slice, problem_.hoelder->exponent);
        }

        const QuadResult outer = integrate_duhamel(inner, t, eps, 0.5 * tols.quad_tol, slice_bound);
        evaluations_.fetch_add(outer.evaluations, std::memory_order_relaxed);
        return outer.value;
    }

    std::complex<double> solve(double t, double x) const {
        return solve_homogeneous(t, x) + solve_duhamel(t, x);
    }

    /// Evaluates solve at every grid point. Points are independent; the
    /// result is identical for any thread count. The first failing point (in
    /// row-major order) aborts the run with its coordinates.
    SolutionField solve_grid(const GridSpec& grid, unsigned threads = 1) const {
        grid.validate();
        const std::vector<double> ts = grid.t_points();
        const std::vector<double> xs = grid.x_points();

        // Fail fast on an inadmissible time row and warm the cache while the
        // run is still single-threaded.
        for (double t : ts) (void)regime_omega(t);

        std::vector<std::complex<double>> values(ts.size() * xs.size());
        std::mutex failure_mutex;
        std::size_t failed_index = values.size();
        std::exception_ptr failure;

        detail::parallel_for(values.size(), threads, [&](std::size_t idx) {
            const std::size_t i = idx / xs.size();
            const std::size_t j = idx % xs.size();
            try {
                values[idx] = solve(ts[i], xs[j]);
            } catch (...) {
                std::scoped_lock lock(failure_mutex);
                if (idx < failed_index) {
                    failed_index = idx;
                    failure = std::current_exception();
                }
            }
        });

        if (failure) {
            detail::rethrow_at_point(failure, ts[failed_index / xs.size()],
                                     xs[failed_index % xs.size()]);
        }

        FieldProvenance provenance;
        provenance.method = "kernel";
        provenance.homogeneous_term = !problem_.phi.is_zero();
        provenance.duhamel_term = !problem_.source.is_zero();
        provenance.duhamel_form = problem_.duhamel_form;
        provenance.tolerances = problem_.tolerances;
        provenance.quad_evaluations = evaluations_.load();
        return SolutionField(ts, xs, std::move(values), std::move(provenance));
    }

    const ProblemSpec& problem() const noexcept { return problem_; }
    const OmegaCache& cache() const noexcept { return cache_; }
    std::size_t quad_evaluations() const noexcept { return evaluations_.load(); }

private:
    std::complex<double> regime_omega(double t) const {
        const std::complex<double> w = cache_.omega(t);
        if (!(w.real() >= problem_.tolerances.rho_min)) {
            throw DegenerateRegimeError("degenerate regime: Re omega(t) = " +
                                        std::to_string(w.real()) + " is below rho_min = " +
                                        std::to_string(problem_.tolerances.rho_min) + " at t = " +
                                        std::to_string(t));
        }
        return w;
    }

    void require_regime(std::complex<double> w, double t, double tau) const {
        if (!(w.real() >= problem_.tolerances.rho_min)) {
            throw DegenerateRegimeError("degenerate regime: Re omega0(t, tau) = " +
                                        std::to_string(w.real()) + " is below rho_min = " +
                                        std::to_string(problem_.tolerances.rho_min) + " at t = " +
                                        std::to_string(t) + ", tau = " + std::to_string(tau));
        }
    }

    ProblemSpec problem_;
    OmegaCache cache_;
    mutable std::atomic<std::size_t> evaluations_{0};
};

}  // namespace degenheat
