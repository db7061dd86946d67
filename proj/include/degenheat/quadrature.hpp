#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "degenheat/errors.hpp"

namespace degenheat {

/// Result of an adaptive integration. On success error_estimate is at or
/// below the requested tolerance; slice_bound is populated only by
/// integrate_duhamel when a near-diagonal correction bound was supplied.
struct QuadResult {
    std::complex<double> value{};
    double error_estimate = 0.0;
    std::size_t evaluations = 0;
    std::optional<double> slice_bound{};
};

/// Subdivision limit was reached with the accumulated error estimate still
/// above tolerance. Carries the partial result.
class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& message, QuadResult partial)
        : Error(message), partial_(std::move(partial)) {}
    const QuadResult& partial() const noexcept { return partial_; }

private:
    QuadResult partial_;
};

inline constexpr std::size_t kDefaultMaxPanels = std::size_t{1} << 20;

namespace detail {

// Gauss-Kronrod 7/15 embedded pair on [-1, 1]. Nodes are symmetric; the
// 7-point Gauss rule sits on the odd-index Kronrod abscissae plus the center.
inline constexpr double kGk15Nodes[7] = {
    0.99145537112081263921, 0.94910791234275852453, 0.86486442335976907279,
    0.74153118559939443986, 0.58608723546769113029, 0.40584515137739716691,
    0.20778495500789846760,
};
inline constexpr double kGk15Weights[8] = {
    0.02293532201052922496, 0.06309209262997855329, 0.10479001032225018384,
    0.14065325971552591875, 0.16900472663926790283, 0.19035057806478540991,
    0.20443294007529889241, 0.20948214108472782801,
};
inline constexpr double kG7Weights[4] = {
    0.12948496616886969327, 0.27970539148927666790, 0.38183005050511894495,
    0.41795918367346938776,
};

struct QuadPanel {
    double a = 0.0;
    double b = 0.0;
    std::complex<double> value{};
    double error = 0.0;
};

// Max-heap ordering by error estimate; ties broken by position so the
// subdivision sequence is deterministic.
struct QuadPanelWorse {
    bool operator()(const QuadPanel& lhs, const QuadPanel& rhs) const noexcept {
        if (lhs.error != rhs.error) return lhs.error < rhs.error;
        return lhs.a > rhs.a;
    }
};

template <class F>
QuadPanel gk15_apply(F& integrand, double a, double b, std::size_t& evaluations) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    const std::complex<double> f_mid = integrand(mid);
    std::complex<double> kronrod = kGk15Weights[7] * f_mid;
    std::complex<double> gauss = kG7Weights[3] * f_mid;
    for (int i = 0; i < 7; ++i) {
        const std::complex<double> lo = integrand(mid - half * kGk15Nodes[i]);
        const std::complex<double> hi = integrand(mid + half * kGk15Nodes[i]);
        kronrod += kGk15Weights[i] * (lo + hi);
        if (i % 2 == 1) gauss += kG7Weights[i / 2] * (lo + hi);
    }
    evaluations += 15;

    QuadPanel panel;
    panel.a = a;
    panel.b = b;
    panel.value = half * kronrod;
    panel.error = std::abs(half * (kronrod - gauss));
    if (!std::isfinite(panel.value.real()) || !std::isfinite(panel.value.imag()) ||
        !std::isfinite(panel.error)) {
        throw DomainError("integrate_finite: integrand produced a non-finite value in [" +
                          std::to_string(a) + ", " + std::to_string(b) + "]");
    }
    return panel;
}

}  // namespace detail

/// Adaptive integration of a complex-valued integrand over [a, b].
///
/// Each panel is estimated with the embedded 7/15 pair; the panel with the
/// largest pair-difference estimate is bisected until the accumulated
/// estimate drops below tol. Deterministic for a fixed tolerance. Throws
/// NonConvergenceError (carrying the partial result) if the panel budget or
/// the width floor is exhausted first.
template <class F>
QuadResult integrate_finite(F&& integrand, double a, double b, double tol,
                            std::size_t max_panels = kDefaultMaxPanels) {
    if (!(a <= b)) throw DomainError("integrate_finite: requires a <= b");
    if (!(tol > 0.0)) throw DomainError("integrate_finite: tolerance must be positive");

    QuadResult result;
    if (a == b) return result;

    std::size_t evaluations = 0;
    std::priority_queue<detail::QuadPanel, std::vector<detail::QuadPanel>, detail::QuadPanelWorse>
        active;
    std::vector<detail::QuadPanel> settled;  // too narrow to split further

    active.push(detail::gk15_apply(integrand, a, b, evaluations));
    double total_error = active.top().error;
    std::size_t panel_count = 1;
    const double width_floor = (b - a) * 0x1p-46;

    while (total_error > tol && !active.empty() && panel_count < max_panels) {
        detail::QuadPanel worst = active.top();
        active.pop();
        if (worst.b - worst.a <= width_floor) {
            settled.push_back(worst);
            continue;
        }
        const double mid = 0.5 * (worst.a + worst.b);
        detail::QuadPanel left = detail::gk15_apply(integrand, worst.a, mid, evaluations);
        detail::QuadPanel right = detail::gk15_apply(integrand, mid, worst.b, evaluations);
        total_error += left.error + right.error - worst.error;
        active.push(std::move(left));
        active.push(std::move(right));
        ++panel_count;
    }

    std::vector<detail::QuadPanel> panels = std::move(settled);
    panels.reserve(panels.size() + active.size());
    while (!active.empty()) {
        panels.push_back(active.top());
        active.pop();
    }
    std::sort(panels.begin(), panels.end(),
              [](const detail::QuadPanel& lhs, const detail::QuadPanel& rhs) { return lhs.a < rhs.a; });

    std::complex<double> sum{};
    double error = 0.0;
    for (const detail::QuadPanel& panel : panels) {
        sum += panel.value;
        error += panel.error;
    }
    result.value = sum;
    result.error_estimate = error;
    result.evaluations = evaluations;

    if (error > tol) {
        throw NonConvergenceError("integrate_finite: error estimate " + std::to_string(error) +
                                      " above tolerance " + std::to_string(tol) + " after " +
                                      std::to_string(panel_count) + " panels",
                                  result);
    }
    return result;
}

/// Integrates over [center - radius, center + radius]. The caller guarantees
/// (via decay_radius) that the integrand's tail beyond the window is below
/// tolerance; the tail is excluded by construction.
template <class F>
QuadResult integrate_line(F&& integrand, double center, double radius, double tol,
                          std::size_t max_panels = kDefaultMaxPanels) {
    if (!(radius > 0.0)) throw DomainError("integrate_line: radius must be positive");
    return integrate_finite(std::forward<F>(integrand), center - radius, center + radius, tol,
                            max_panels);
}

/// Integrates inner(tau) over [0, t]. The last slice [t - eps_split, t] is
/// approximated by eps_split * inner(t - eps_split), with its magnitude added
/// to the error estimate; hoelder_slice_bound (computed by the caller from
/// the data's Hoelder modulus, when available) is recorded and added on top.
template <class F>
QuadResult integrate_duhamel(F&& inner, double t, double eps_split, double tol,
                             std::optional<double> hoelder_slice_bound = std::nullopt,
                             std::size_t max_panels = kDefaultMaxPanels) {
    if (!(t > 0.0)) throw DomainError("integrate_duhamel: t must be positive");
    if (!(eps_split > 0.0 && eps_split < t))
        throw DomainError("integrate_duhamel: eps_split must lie in (0, t)");

    QuadResult result = integrate_finite(inner, 0.0, t - eps_split, tol, max_panels);
    const std::complex<double> edge = inner(t - eps_split);
    result.value += eps_split * edge;
    result.evaluations += 1;
    result.error_estimate += eps_split * std::abs(edge);
    if (hoelder_slice_bound) {
        result.error_estimate += *hoelder_slice_bound;
        result.slice_bound = hoelder_slice_bound;
    }
    return result;
}

}  // namespace degenheat
