#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "degenheat/errors.hpp"
#include "degenheat/problem.hpp"
#include "degenheat/solver.hpp"

namespace degenheat {

namespace detail {

inline double uniform_spacing(const std::vector<double>& grid, const char* axis) {
    if (grid.size() < 2) throw DomainError(std::string("fd_residual: ") + axis + " grid too small");
    const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double step = grid[i] - grid[i - 1];
        if (std::abs(step - h) > 1e-9 * std::max(1.0, std::abs(h)))
            throw DomainError(std::string("fd_residual: ") + axis + " grid is not uniform");
    }
    return h;
}

/// Complex tridiagonal solve (Thomas). sub/sup have length n-1. Overwrites
/// rhs with the solution. No pivoting; a forward-sweep pivot below the floor
/// signals breakdown.
inline void thomas_solve(std::span<const std::complex<double>> sub,
                         std::span<const std::complex<double>> diag,
                         std::span<const std::complex<double>> sup,
                         std::span<std::complex<double>> rhs,
                         std::span<std::complex<double>> scratch, double pivot_floor) {
    const std::size_t n = diag.size();
    if (n == 0) return;
    std::complex<double> pivot = diag[0];
    if (!(std::abs(pivot) > pivot_floor))
        throw OracleError("tridiagonal solve: pivot magnitude " + std::to_string(std::abs(pivot)) +
                          " below floor at row 0");
    rhs[0] /= pivot;
    for (std::size_t i = 1; i < n; ++i) {
        scratch[i - 1] = sup[i - 1] / pivot;
        pivot = diag[i] - sub[i - 1] * scratch[i - 1];
        if (!(std::abs(pivot) > pivot_floor))
            throw OracleError("tridiagonal solve: pivot magnitude " + std::to_string(std::abs(pivot)) +
                              " below floor at row " + std::to_string(i));
        rhs[i] = (rhs[i] - sub[i - 1] * rhs[i - 1]) / pivot;
    }
    for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= scratch[i] * rhs[i + 1];
}

/// Four-point Lagrange interpolation on a uniform grid; falls back to the
/// nearest interior stencil at the edges.
inline std::complex<double> interpolate_uniform(const std::vector<double>& xs,
                                                const std::vector<std::complex<double>>& values,
                                                double q) {
    const std::size_t n = xs.size();
    const double h = (xs.back() - xs.front()) / static_cast<double>(n - 1);
    double pos = (q - xs.front()) / h;
    pos = std::clamp(pos, 0.0, static_cast<double>(n - 1));
    std::size_t cell = std::min(static_cast<std::size_t>(pos), n - 2);
    const std::size_t base = std::min(std::max(cell, std::size_t{1}) - 1, n - 4);
    std::complex<double> acc{};
    for (std::size_t k = 0; k < 4; ++k) {
        double weight = 1.0;
        for (std::size_t m = 0; m < 4; ++m) {
            if (m == k) continue;
            weight *= (q - xs[base + m]) / (xs[base + k] - xs[base + m]);
        }
        acc += weight * values[base + k];
    }
    return acc;
}

}  // namespace detail

struct ResidualSample {
    double t = 0.0;
    double x = 0.0;
    double abs_residual = 0.0;
};

/// Norms of p(t) u_t - u_xx - f evaluated by centered differences on the
/// field's grid. The one-cell spatial boundary layers, where the centered
/// stencil is undefined, are excluded; the time endpoints use one-sided
/// second-order stencils.
struct ResidualReport {
    double sup_norm = 0.0;
    double l2_norm = 0.0;
    double dt = 0.0;
    double dx = 0.0;
    std::vector<ResidualSample> per_row_worst;
    ResidualSample worst;
    double derivative_scale = 0.0;  // max over interior of |p u_t|, |u_xx|, |f|
    std::size_t interior_rows = 0;
    std::size_t interior_cols = 0;
};

inline ResidualReport fd_residual(const SolutionField& field, const ProblemSpec& problem) {
    if (field.nt() < 3 || field.nx() < 3)
        throw DomainError("fd_residual: grid must be at least 3 x 3");
    ResidualReport report;
    report.dt = detail::uniform_spacing(field.t_grid(), "t");
    report.dx = detail::uniform_spacing(field.x_grid(), "x");
    report.interior_rows = field.nt();
    report.interior_cols = field.nx() - 2;

    const double inv_dx2 = 1.0 / (report.dx * report.dx);
    const double inv_2dt = 1.0 / (2.0 * report.dt);
    double sum_sq = 0.0;

    for (std::size_t i = 0; i < field.nt(); ++i) {
        const double t = field.t(i);
        const std::complex<double> p = eval_p(problem.coefficient, t);
        ResidualSample row_worst{t, field.x(1), 0.0};
        for (std::size_t j = 1; j + 1 < field.nx(); ++j) {
            const std::complex<double> u_xx =
                (field.at(i, j - 1) - 2.0 * field.at(i, j) + field.at(i, j + 1)) * inv_dx2;
            std::complex<double> u_t;
            if (i == 0) {
                u_t = (-3.0 * field.at(0, j) + 4.0 * field.at(1, j) - field.at(2, j)) * inv_2dt;
            } else if (i + 1 == field.nt()) {
                u_t = (3.0 * field.at(i, j) - 4.0 * field.at(i - 1, j) + field.at(i - 2, j)) * inv_2dt;
            } else {
                u_t = (field.at(i + 1, j) - field.at(i - 1, j)) * inv_2dt;
            }
            const std::complex<double> f = problem.source(t, field.x(j), problem.coefficient);
            const std::complex<double> r = p * u_t - u_xx - f;
            const double mag = std::abs(r);
            sum_sq += mag * mag;
            if (mag > row_worst.abs_residual) row_worst = {t, field.x(j), mag};
            report.derivative_scale = std::max(
                {report.derivative_scale, std::abs(p * u_t), std::abs(u_xx), std::abs(f)});
        }
        report.per_row_worst.push_back(row_worst);
        if (row_worst.abs_residual > report.worst.abs_residual) report.worst = row_worst;
    }
    report.sup_norm = report.worst.abs_residual;
    report.l2_norm = std::sqrt(sum_sq * report.dx * report.dt);
    return report;
}

struct InitialTraceRow {
    double t = 0.0;
    double sup_error = 0.0;
};

/// sup_x |u(t_k, x) - phi(x)| for a decreasing sequence of times; a
/// conforming solver drives the sequence toward zero.
struct InitialTraceReport {
    std::vector<InitialTraceRow> rows;
    bool decreasing = false;
    double final_over_first = 0.0;
};

inline InitialTraceReport initial_check(const ProblemSpec& problem, std::span<const double> times,
                                        std::span<const double> x_grid) {
    if (times.empty()) throw DomainError("initial_check: need at least one time");
    for (std::size_t k = 0; k < times.size(); ++k) {
        if (!(times[k] > 0.0)) throw DomainError("initial_check: times must be positive");
        if (k > 0 && !(times[k] < times[k - 1]))
            throw DomainError("initial_check: times must be strictly decreasing");
    }
    const Solver solver(problem);
    InitialTraceReport report;
    for (double t : times) {
        double sup = 0.0;
        for (double x : x_grid) {
            sup = std::max(sup, std::abs(solver.solve(t, x) - problem.phi(x)));
        }
        report.rows.push_back({t, sup});
    }
    report.decreasing = true;
    for (std::size_t k = 1; k < report.rows.size(); ++k) {
        if (report.rows[k].sup_error > report.rows[k - 1].sup_error * 1.05 + 1e-9)
            report.decreasing = false;
    }
    const double first = report.rows.front().sup_error;
    report.final_over_first = first > 0.0 ? report.rows.back().sup_error / first : 0.0;
    return report;
}

struct OracleConfig {
    double domain_halfwidth = 12.0;
    double dt = 1e-3;
    double dx = 0.02;
    double theta = 0.5;            // 1/2 = trapezoidal; up to 1 for robustness runs
    double pivot_floor = 1e-14;
    double tail_check_tol = 1e-8;  // |phi|, |f| must be below this near the boundary
};

/// Independent reference solution: theta-weighted time stepping of
/// u_t = (1/p)(u_xx + f) on [-L, L] with zero boundary values and a complex
/// tridiagonal solve per step, 1/p frozen at the step midpoint. The result
/// is sampled onto the requested grid by cubic interpolation. Deliberately
/// shares nothing with the kernel representation.
inline SolutionField cn_oracle(const ProblemSpec& problem, const GridSpec& grid,
                               const OracleConfig& config = {}) {
    grid.validate();
    problem.validate();
    if (!(config.domain_halfwidth > 0.0)) throw DomainError("cn_oracle: domain halfwidth must be positive");
    if (!(config.dt > 0.0)) throw DomainError("cn_oracle: dt must be positive");
    if (!(config.dx > 0.0)) throw DomainError("cn_oracle: dx must be positive");
    if (!(config.theta >= 0.5 && config.theta <= 1.0))
        throw DomainError("cn_oracle: theta must lie in [1/2, 1]");

    const double halfwidth = config.domain_halfwidth;
    const std::vector<double> requested_t = grid.t_points();
    const std::vector<double> requested_x = grid.x_points();
    if (requested_x.front() < -halfwidth || requested_x.back() > halfwidth)
        throw OracleError("cn_oracle: requested x grid extends beyond the computational domain");

    // Boundary-tail check: the data must have died out near +-L.
    const double phi_scale = std::max(1.0, problem.phi.sup_abs());
    for (double s : {1.0, 0.98, 0.95, 0.9}) {
        for (double sign : {-1.0, 1.0}) {
            const double x = sign * s * halfwidth;
            const double mag = std::abs(problem.phi(x));
            if (mag > config.tail_check_tol * phi_scale)
                throw OracleError("cn_oracle: domain too small, |phi(" + std::to_string(x) +
                                  ")| = " + std::to_string(mag));
            if (!problem.source.is_zero()) {
                for (double t : {requested_t.front(), 0.5 * (requested_t.front() + requested_t.back()),
                                 requested_t.back()}) {
                    const double fm = std::abs(problem.source(t, x, problem.coefficient));
                    if (fm > config.tail_check_tol * std::max(1.0, phi_scale))
                        throw OracleError("cn_oracle: domain too small, |f(" + std::to_string(t) +
                                          ", " + std::to_string(x) + ")| = " + std::to_string(fm));
                }
            }
        }
    }

    const std::size_t n = static_cast<std::size_t>(std::lround(2.0 * halfwidth / config.dx)) + 1;
    if (n < 4) throw DomainError("cn_oracle: dx too coarse for the domain");
    const double h = 2.0 * halfwidth / static_cast<double>(n - 1);
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = -halfwidth + h * static_cast<double>(i);

    std::vector<std::complex<double>> u(n);
    for (std::size_t i = 0; i < n; ++i) u[i] = problem.phi(xs[i]);
    u.front() = u.back() = {};

    const std::size_t interior = n - 2;
    std::vector<std::complex<double>> sub(interior - 1), diag(interior), sup(interior - 1),
        rhs(interior), scratch(interior);
    const bool has_source = !problem.source.is_zero();

    const auto advance = [&](double t_now, double step) {
        const std::complex<double> p_inv =
            eval_p_inv(problem.coefficient, t_now + 0.5 * step, problem.tolerances.p_floor);
        const std::complex<double> r = step * p_inv / (h * h);
        const std::complex<double> theta_r = config.theta * r;
        const std::complex<double> expl_r = (1.0 - config.theta) * r;
        for (std::size_t i = 0; i < interior; ++i) {
            const std::complex<double> lap = u[i] - 2.0 * u[i + 1] + u[i + 2];
            rhs[i] = u[i + 1] + expl_r * lap;
            if (has_source) {
                const std::complex<double> f_mix =
                    config.theta * problem.source(t_now + step, xs[i + 1], problem.coefficient) +
                    (1.0 - config.theta) * problem.source(t_now, xs[i + 1], problem.coefficient);
                rhs[i] += step * p_inv * f_mix;
            }
            diag[i] = 1.0 + 2.0 * theta_r;
        }
        std::fill(sub.begin(), sub.end(), -theta_r);
        std::fill(sup.begin(), sup.end(), -theta_r);
        detail::thomas_solve(sub, diag, sup, rhs, scratch, config.pivot_floor);
        for (std::size_t i = 0; i < interior; ++i) u[i + 1] = rhs[i];
    };

    std::vector<std::complex<double>> values;
    values.reserve(requested_t.size() * requested_x.size());
    double t_now = 0.0;
    for (double target : requested_t) {
        while (target - t_now > 1e-13 * std::max(1.0, target)) {
            const double step = std::min(config.dt, target - t_now);
            advance(t_now, step);
            t_now += step;
        }
        for (double xq : requested_x) values.push_back(detail::interpolate_uniform(xs, u, xq));
    }

    FieldProvenance provenance;
    provenance.method = "cn_oracle";
    provenance.homogeneous_term = !problem.phi.is_zero();
    provenance.duhamel_term = has_source;
    provenance.duhamel_form = problem.duhamel_form;
    provenance.tolerances = problem.tolerances;
    return SolutionField(requested_t, requested_x, std::move(values), std::move(provenance));
}

struct MmsData {
    SourceFunction source;
    DataFunction phi;
};

/// Manufactured problem data for a registry exact field: the source
/// f = p(t) du/dt - d2u/dx2 (derived from the coefficient the source is
/// later evaluated with) and the matching initial datum phi = u(0, .).
inline MmsData mms_source(std::string_view exact_field, std::complex<double> scale = {1.0, 0.0}) {
    const ExactFieldId id = exact_field_from_name(exact_field);
    DataFunction phi = DataFunction::zero();
    switch (id) {
        case ExactFieldId::constant: phi = DataFunction::constant(scale); break;
        case ExactFieldId::t_gaussian: phi = DataFunction::zero(); break;
        case ExactFieldId::decaying_sine: phi = DataFunction::sine(1.0); break;
        case ExactFieldId::heat_gaussian: phi = DataFunction::gaussian(1.0); break;
    }
    return {SourceFunction::mms(id, scale), std::move(phi)};
}

struct FieldDifference {
    double sup_norm = 0.0;
    double l2_norm = 0.0;
};

inline FieldDifference compare_fields(const SolutionField& a, const SolutionField& b) {
    if (a.nt() != b.nt() || a.nx() != b.nx())
        throw GridMismatchError("compare_fields: grid dimensions differ");
    for (std::size_t i = 0; i < a.nt(); ++i)
        if (std::abs(a.t(i) - b.t(i)) > 1e-12 * std::max(1.0, std::abs(a.t(i))))
            throw GridMismatchError("compare_fields: t grids differ");
    for (std::size_t j = 0; j < a.nx(); ++j)
        if (std::abs(a.x(j) - b.x(j)) > 1e-12 * std::max(1.0, std::abs(a.x(j))))
            throw GridMismatchError("compare_fields: x grids differ");

    FieldDifference diff;
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < a.values().size(); ++k) {
        const double mag = std::abs(a.values()[k] - b.values()[k]);
        diff.sup_norm = std::max(diff.sup_norm, mag);
        sum_sq += mag * mag;
    }
    diff.l2_norm = std::sqrt(sum_sq / static_cast<double>(a.values().size()));
    return diff;
}

}  // namespace degenheat
