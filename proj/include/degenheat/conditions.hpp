#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "degenheat/coefficients.hpp"
#include "degenheat/errors.hpp"

namespace degenheat {

/// Numeric reading of "strictly positive real part": Re p must clear this
/// threshold. cos(pi/2) rounds to ~6e-17 in double, so a clamped phase arc
/// that ends at a right angle would otherwise never close its segment.
inline constexpr double kPositiveRealEps = 1e-12;

struct PositiveSegment {
    double begin = 0.0;
    double end = 0.0;
};

/// Sampling-based verdicts for the hypotheses on p: continuity,
/// nonvanishing, nonnegative real part with Re p(0) > 0, and the upper bound
/// on the running integral of Im(1/p). Violations are verdicts, not errors.
struct ConditionReport {
    bool continuous_ok = false;

    bool nonvanishing_ok = false;
    double worst_abs_p = std::numeric_limits<double>::infinity();
    double worst_abs_p_t = 0.0;

    bool repart_ok = false;
    double min_re_p = std::numeric_limits<double>::infinity();
    double re_p_at_zero = 0.0;

    // sup over sampled t of the running integral of Im(1/p); the running
    // infimum is recorded alongside since only the upper side is constrained.
    double p0_estimate = std::numeric_limits<double>::quiet_NaN();
    double p0_running_inf = std::numeric_limits<double>::quiet_NaN();

    std::vector<PositiveSegment> positive_segments;

    double t_max = 0.0;
    std::size_t samples_used = 0;
    bool sampling_based = true;

    bool passes() const {
        return continuous_ok && nonvanishing_ok && repart_ok && std::isfinite(p0_estimate);
    }
};

namespace detail {

struct SampleTracker {
    double worst_abs = std::numeric_limits<double>::infinity();
    double worst_abs_t = 0.0;
    double min_re = std::numeric_limits<double>::infinity();
    bool all_finite = true;
    std::size_t count = 0;

    void observe(double t, std::complex<double> p) {
        ++count;
        if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) {
            all_finite = false;
            return;
        }
        const double mag = std::abs(p);
        if (mag < worst_abs) {
            worst_abs = mag;
            worst_abs_t = t;
        }
        min_re = std::min(min_re, p.real());
    }
};

// True when a jump larger than jump_tol survives bisection down to the width
// floor; a continuous p shrinks every jump below tolerance on the way down.
inline bool jump_persists(const CoefficientProfile& profile, SampleTracker& tracker, double a,
                          std::complex<double> pa, double b, std::complex<double> pb,
                          double jump_tol, double width_floor, int depth) {
    const bool finite_ends = std::isfinite(pa.real()) && std::isfinite(pa.imag()) &&
                             std::isfinite(pb.real()) && std::isfinite(pb.imag());
    if (finite_ends && std::abs(pb - pa) <= jump_tol) return false;
    if (depth <= 0 || (b - a) <= width_floor) return true;
    const double mid = 0.5 * (a + b);
    const std::complex<double> pm = eval_p(profile, mid);
    tracker.observe(mid, pm);
    return jump_persists(profile, tracker, a, pa, mid, pm, jump_tol, width_floor, depth - 1) ||
           jump_persists(profile, tracker, mid, pm, b, pb, jump_tol, width_floor, depth - 1);
}

// Bisects Re p - eps between samples of opposite sign; 60 rounds pins the
// crossing to the double-precision limit deterministically.
inline double refine_sign_change(const CoefficientProfile& profile, SampleTracker& tracker,
                                 double lo, double hi, bool lo_positive) {
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        const std::complex<double> pm = eval_p(profile, mid);
        tracker.observe(mid, pm);
        const bool mid_positive = pm.real() > kPositiveRealEps;
        if (mid_positive == lo_positive) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace detail

/// Evaluates the hypotheses on an adaptively refined sample of [0, t_max].
inline ConditionReport check_conditions(const CoefficientProfile& profile, double t_max,
                                        std::size_t samples) {
    if (!(t_max > 0.0)) throw DomainError("check_conditions: t_max must be positive");
    if (samples < 2) throw DomainError("check_conditions: need at least 2 samples");

    ConditionReport report;
    report.t_max = t_max;

    detail::SampleTracker tracker;
    std::vector<double> ts(samples);
    std::vector<std::complex<double>> ps(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        ts[i] = t_max * static_cast<double>(i) / static_cast<double>(samples - 1);
        ps[i] = eval_p(profile, ts[i]);
        tracker.observe(ts[i], ps[i]);
    }
    report.re_p_at_zero = ps.front().real();

    double scale = 0.0;
    for (const auto& p : ps) {
        if (std::isfinite(p.real()) && std::isfinite(p.imag())) scale = std::max(scale, std::abs(p));
    }
    const double jump_tol = 1e-6 * scale + 1e-9;
    const double width_floor = t_max * 1e-13;

    bool continuous = tracker.all_finite;
    for (std::size_t i = 0; i + 1 < samples && continuous; ++i) {
        if (std::abs(ps[i + 1] - ps[i]) > jump_tol ||
            !std::isfinite(ps[i].real()) || !std::isfinite(ps[i + 1].real())) {
            if (detail::jump_persists(profile, tracker, ts[i], ps[i], ts[i + 1], ps[i + 1], jump_tol,
                                      width_floor, 48)) {
                continuous = false;
            }
        }
    }
    report.continuous_ok = continuous && tracker.all_finite;

    // Maximal Re p > 0 segments, boundaries refined between differing samples.
    std::vector<bool> positive(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        positive[i] = std::isfinite(ps[i].real()) && ps[i].real() > kPositiveRealEps;
    }
    bool open = false;
    PositiveSegment current;
    for (std::size_t i = 0; i < samples; ++i) {
        if (positive[i] && !open) {
            current.begin = (i == 0) ? ts[0]
                                     : detail::refine_sign_change(profile, tracker, ts[i - 1], ts[i],
                                                                  /*lo_positive=*/false);
            open = true;
        } else if (!positive[i] && open) {
            current.end =
                detail::refine_sign_change(profile, tracker, ts[i - 1], ts[i], /*lo_positive=*/true);
            if (current.end > current.begin) report.positive_segments.push_back(current);
            open = false;
        }
    }
    if (open) {
        current.end = ts.back();
        if (current.end > current.begin) report.positive_segments.push_back(current);
    }

    report.worst_abs_p = tracker.worst_abs;
    report.worst_abs_p_t = tracker.worst_abs_t;
    report.min_re_p = tracker.min_re;
    report.nonvanishing_ok = tracker.all_finite && tracker.worst_abs > kDefaultPFloor;
    report.repart_ok =
        tracker.all_finite && tracker.min_re >= -kPositiveRealEps && report.re_p_at_zero > 0.0;

    // Running integral of Im(1/p) at the sample times; sup and inf recorded.
    try {
        const OmegaCache cache(profile, 1e-10);
        double sup = 0.0;  // the t = 0 sample contributes 0
        double inf = 0.0;
        for (std::size_t i = 1; i < samples; ++i) {
            const double running = cache.omega(ts[i]).imag();
            sup = std::max(sup, running);
            inf = std::min(inf, running);
        }
        report.p0_estimate = sup;
        report.p0_running_inf = inf;
    } catch (const Error&) {
        report.p0_estimate = std::numeric_limits<double>::infinity();
        report.p0_running_inf = -std::numeric_limits<double>::infinity();
    }

    report.samples_used = tracker.count;
    return report;
}

/// One evaluation row for a (t, tau) pair. lhs = Re of the accumulated
/// integral over [tau, t]; mid and rhs are the two products it is compared
/// against; delta_margin = pi/2 - |arg H|, the largest angle consistent with
/// the constraint |arg H| <= pi/2 - delta. With that choice sin(delta) =
/// cos(arg H), so mid and rhs coincide and lhs = mid is an exact algebraic
/// identity; the sign of mid - rhs is reported, not asserted.
struct LemmaPairRow {
    double t = 0.0;
    double tau = 0.0;
    std::complex<double> mean_value{};
    double abs_h = 0.0;
    double arg_h = 0.0;
    double delta_margin = 0.0;
    double lhs = 0.0;
    double mid = 0.0;
    double rhs = 0.0;
    double identity_error = 0.0;
    double mid_minus_rhs = 0.0;
    bool segment_positivity_ok = false;  // Re p > 0 across [tau, t] (sampled)
    bool endpoint_positivity_ok = false;  // Re p(tau) > 0
    bool valid = false;              // t > tau >= 0 held
    std::string note;
};

/// Origin-anchored row (tau = 0): the mean over the whole history.
struct LemmaOriginRow {
    double t = 0.0;
    std::complex<double> mean_value{};
    double abs_h = 0.0;
    double arg_h = 0.0;
    double delta_margin = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
};

struct LemmaReport {
    std::vector<LemmaPairRow> pair_rows;
    std::vector<LemmaOriginRow> origin_rows;
    double quad_tolerance = 0.0;
    bool identities_ok = false;
};

namespace detail {

inline bool re_p_positive_on(const CoefficientProfile& profile, double tau, double t) {
    constexpr int kSamples = 65;
    for (int i = 0; i < kSamples; ++i) {
        const double s = tau + (t - tau) * static_cast<double>(i) / (kSamples - 1);
        if (!(eval_p(profile, s).real() > kPositiveRealEps)) return false;
    }
    return true;
}

}  // namespace detail

inline LemmaReport lemma_report(const OmegaCache& cache,
                                std::span<const std::pair<double, double>> eval_points) {
    LemmaReport report;
    report.quad_tolerance = cache.tolerance();
    const double identity_tol = 4.0 * cache.tolerance() + 1e-14;
    bool identities_ok = true;

    std::vector<double> origin_times;
    for (const auto& [t, tau] : eval_points) {
        LemmaPairRow row;
        row.t = t;
        row.tau = tau;
        if (!(tau >= 0.0) || !(t > tau)) {
            row.note = "requires t > tau >= 0";
            report.pair_rows.push_back(std::move(row));
            continue;
        }
        row.valid = true;

        const std::complex<double> w0 = cache.omega0(t, tau);
        row.mean_value = w0 / (t - tau);
        row.abs_h = std::abs(row.mean_value);
        row.arg_h = std::arg(row.mean_value);
        row.delta_margin = 0.5 * std::numbers::pi - std::abs(row.arg_h);
        row.lhs = w0.real();
        row.mid = (t - tau) * row.abs_h * std::cos(row.arg_h);
        row.rhs = (t - tau) * row.abs_h * std::sin(row.delta_margin);
        row.identity_error = std::abs(row.lhs - row.mid);
        row.mid_minus_rhs = row.mid - row.rhs;

        row.segment_positivity_ok = detail::re_p_positive_on(cache.profile(), tau, t);
        row.endpoint_positivity_ok = eval_p(cache.profile(), tau).real() > kPositiveRealEps;
        if (!row.segment_positivity_ok) row.note = "Re p not strictly positive on [tau, t]";

        if (row.identity_error > identity_tol * std::max(1.0, std::abs(w0))) identities_ok = false;
        report.pair_rows.push_back(std::move(row));

        if (std::find(origin_times.begin(), origin_times.end(), t) == origin_times.end()) {
            origin_times.push_back(t);
        }
    }

    for (double t : origin_times) {
        if (!(t > 0.0)) continue;
        LemmaOriginRow row;
        row.t = t;
        const std::complex<double> w = cache.omega(t);
        row.mean_value = w / t;
        row.abs_h = std::abs(row.mean_value);
        row.arg_h = std::arg(row.mean_value);
        row.delta_margin = 0.5 * std::numbers::pi - std::abs(row.arg_h);
        row.lhs = w.real();
        row.rhs = t * row.abs_h * std::sin(row.delta_margin);
        report.origin_rows.push_back(row);
    }

    report.identities_ok = identities_ok;
    return report;
}

}  // namespace degenheat
