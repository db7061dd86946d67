#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "degenheat/errors.hpp"
#include "degenheat/quadrature.hpp"

namespace degenheat {

inline constexpr double kDefaultPFloor = 1e-12;
inline constexpr double kDefaultOmegaTolerance = 1e-12;

enum class ProfileKind { constant, phase_arc, rational, table };

struct ConstantCoefficient {
    std::complex<double> value{1.0, 0.0};
};

/// p(t) = exp(i theta(t)) with theta linear on [ramp_begin, ramp_end] and
/// clamped outside, so |p(t)| = 1 for all t.
struct PhaseArcCoefficient {
    double theta_begin = 0.0;
    double theta_end = 0.0;
    double ramp_begin = 0.0;
    double ramp_end = 1.0;

    double theta_at(double t) const {
        if (t <= ramp_begin) return theta_begin;
        if (t >= ramp_end) return theta_end;
        const double s = (t - ramp_begin) / (ramp_end - ramp_begin);
        return theta_begin + (theta_end - theta_begin) * s;
    }
};

/// Ratio of two real-coefficient polynomials in t, ascending powers.
struct RationalCoefficient {
    std::vector<double> numerator;
    std::vector<double> denominator;
};

/// Linear interpolation between strictly increasing knots, constant
/// extrapolation outside.
struct TableCoefficient {
    std::vector<double> times;
    std::vector<std::complex<double>> values;
};

class CoefficientProfile {
public:
    using Storage =
        std::variant<ConstantCoefficient, PhaseArcCoefficient, RationalCoefficient, TableCoefficient>;

    static CoefficientProfile constant(std::complex<double> value) {
        return CoefficientProfile(ConstantCoefficient{value});
    }

    static CoefficientProfile phase_arc(double theta_begin, double theta_end, double ramp_begin,
                                        double ramp_end) {
        if (!(ramp_begin < ramp_end))
            throw DomainError("phase_arc: ramp interval must satisfy ramp_begin < ramp_end");
        if (!std::isfinite(theta_begin) || !std::isfinite(theta_end))
            throw DomainError("phase_arc: angles must be finite");
        return CoefficientProfile(PhaseArcCoefficient{theta_begin, theta_end, ramp_begin, ramp_end});
    }

    static CoefficientProfile rational(std::vector<double> numerator,
                                       std::vector<double> denominator) {
        if (numerator.empty() || denominator.empty())
            throw DomainError("rational: coefficient lists must be non-empty");
        const bool den_nonzero = std::any_of(denominator.begin(), denominator.end(),
                                             [](double c) { return c != 0.0; });
        if (!den_nonzero) throw DomainError("rational: denominator is identically zero");
        return CoefficientProfile(RationalCoefficient{std::move(numerator), std::move(denominator)});
    }

    static CoefficientProfile table(std::vector<double> times,
                                    std::vector<std::complex<double>> values) {
        if (times.empty() || times.size() != values.size())
            throw DomainError("table: need matching non-empty knot lists");
        for (std::size_t i = 1; i < times.size(); ++i) {
            if (!(times[i - 1] < times[i]))
                throw DomainError("table: knot times must be strictly increasing");
        }
        return CoefficientProfile(TableCoefficient{std::move(times), std::move(values)});
    }

    ProfileKind kind() const noexcept {
        return static_cast<ProfileKind>(storage_.index());
    }

    const Storage& storage() const noexcept { return storage_; }

    template <class T>
    const T& as() const {
        return std::get<T>(storage_);
    }

private:
    explicit CoefficientProfile(Storage storage) : storage_(std::move(storage)) {}
    Storage storage_;
};

namespace detail {

inline double polynomial_at(std::span<const double> coefficients, double t) {
    double acc = 0.0;
    for (std::size_t i = coefficients.size(); i-- > 0;) acc = acc * t + coefficients[i];
    return acc;
}

}  // namespace detail

inline std::complex<double> eval_p(const CoefficientProfile& profile, double t) {
    if (!(t >= 0.0)) throw DomainError("eval_p: t must be nonnegative, got " + std::to_string(t));
    return std::visit(
        [t](const auto& p) -> std::complex<double> {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, ConstantCoefficient>) {
                return p.value;
            } else if constexpr (std::is_same_v<T, PhaseArcCoefficient>) {
                return std::polar(1.0, p.theta_at(t));
            } else if constexpr (std::is_same_v<T, RationalCoefficient>) {
                return {detail::polynomial_at(p.numerator, t) / detail::polynomial_at(p.denominator, t),
                        0.0};
            } else {
                const auto& times = p.times;
                if (t <= times.front()) return p.values.front();
                if (t >= times.back()) return p.values.back();
                const auto it = std::upper_bound(times.begin(), times.end(), t);
                const std::size_t hi = static_cast<std::size_t>(it - times.begin());
                const double w = (t - times[hi - 1]) / (times[hi] - times[hi - 1]);
                return p.values[hi - 1] + w * (p.values[hi] - p.values[hi - 1]);
            }
        },
        profile.storage());
}

inline std::complex<double> eval_p_inv(const CoefficientProfile& profile, double t,
                                       double p_floor = kDefaultPFloor) {
    if (!(t >= 0.0)) throw DomainError("eval_p_inv: t must be nonnegative");
    if (profile.kind() == ProfileKind::phase_arc) {
        // |p| = 1 exactly; invert on the unit circle without a division.
        return std::polar(1.0, -profile.as<PhaseArcCoefficient>().theta_at(t));
    }
    const std::complex<double> p = eval_p(profile, t);
    const double mag = std::abs(p);
    if (!(mag > p_floor)) {
        throw DegenerateCoefficientError("eval_p_inv: |p(t)| = " + std::to_string(mag) + " at t = " +
                                         std::to_string(t) + " is at or below the nonvanishing floor " +
                                         std::to_string(p_floor));
    }
    return 1.0 / p;
}

/// Cumulative-quadrature cache for omega(t) = integral of 1/p over [0, t].
///
/// The axis is tiled into fixed dyadic panels of width 2^-4; each panel's
/// integral is computed adaptively to a per-panel tolerance that depends only
/// on the panel index, and the remainder [k*width, t] is integrated per
/// query. Every returned value is therefore a pure function of (profile,
/// tolerance, t) regardless of query or thread order, and omega is additive
/// over abutting intervals within the refinement tolerance by construction.
///
/// Concurrent reads are safe; checkpoint insertion is internally
/// synchronized.
class OmegaCache {
public:
    explicit OmegaCache(CoefficientProfile profile, double tolerance = kDefaultOmegaTolerance,
                        double p_floor = kDefaultPFloor)
        : profile_(std::move(profile)), tolerance_(tolerance), p_floor_(p_floor) {
        if (!(tolerance > 0.0)) throw DomainError("OmegaCache: tolerance must be positive");
    }

    std::complex<double> omega(double t) const {
        if (!(t >= 0.0)) throw DomainError("omega: t must be nonnegative");
        if (t == 0.0) return {};
        std::size_t full = static_cast<std::size_t>(t / kPanelWidth);
        while (full > 0 && static_cast<double>(full) * kPanelWidth > t) --full;
        std::complex<double> acc{};
        for (std::size_t k = 0; k < full; ++k) acc += panel(k);
        const double from = static_cast<double>(full) * kPanelWidth;
        if (t > from) acc += tail(from, t);
        return acc;
    }

    /// omega(t) - omega(tau); exactly consistent with omega by construction.
    std::complex<double> omega0(double t, double tau) const {
        if (!(tau >= 0.0) || !(t >= tau)) throw DomainError("omega0: need 0 <= tau <= t");
        if (t == tau) return {};
        return omega(t) - omega(tau);
    }

    /// Mean value of 1/p over [tau, t]; with tau = 0 this is the mean over
    /// the whole history used by the origin-anchored decay estimate.
    std::complex<double> mean_h(double t, double tau) const {
        if (!(tau >= 0.0) || !(t > tau)) throw DomainError("mean_H: need t > tau >= 0");
        return omega0(t, tau) / (t - tau);
    }

    double tolerance() const noexcept { return tolerance_; }
    double p_floor() const noexcept { return p_floor_; }
    const CoefficientProfile& profile() const noexcept { return profile_; }

    /// Accumulated checkpoints (k * width, omega(k * width)) over the
    /// contiguous prefix of cached panels.
    std::vector<std::pair<double, std::complex<double>>> checkpoints() const {
        std::scoped_lock lock(mutex_);
        std::vector<std::pair<double, std::complex<double>>> out;
        std::complex<double> acc{};
        for (std::size_t k = 0; panels_.count(k) != 0; ++k) {
            acc += panels_.at(k);
            out.emplace_back(static_cast<double>(k + 1) * kPanelWidth, acc);
        }
        return out;
    }

    static constexpr double kPanelWidth = 0.0625;

private:
    std::complex<double> integrate_segment(double a, double b, double tol) const {
        return integrate_finite([this](double eta) { return eval_p_inv(profile_, eta, p_floor_); }, a,
                                b, tol)
            .value;
    }

    double panel_tolerance(std::size_t k) const {
        const double n = static_cast<double>(k + 1);
        // Summable allocation (total <= tol/4) with a floor at the double-
        // precision noise level so deep panels cannot thrash.
        return std::max(0.25 * tolerance_ * (6.0 / (std::numbers::pi * std::numbers::pi)) / (n * n),
                        1e-16);
    }

    std::complex<double> panel(std::size_t k) const {
        {
            std::scoped_lock lock(mutex_);
            const auto it = panels_.find(k);
            if (it != panels_.end()) return it->second;
        }
        const double a = static_cast<double>(k) * kPanelWidth;
        const std::complex<double> value = integrate_segment(a, a + kPanelWidth, panel_tolerance(k));
        std::scoped_lock lock(mutex_);
        return panels_.emplace(k, value).first->second;
    }

    std::complex<double> tail(double from, double t) const {
        {
            std::scoped_lock lock(mutex_);
            const auto it = tails_.find(t);
            if (it != tails_.end()) return it->second;
        }
        const std::complex<double> value = integrate_segment(from, t, 0.5 * tolerance_);
        std::scoped_lock lock(mutex_);
        return tails_.emplace(t, value).first->second;
    }

    CoefficientProfile profile_;
    double tolerance_;
    double p_floor_;
    mutable std::mutex mutex_;
    mutable std::map<std::size_t, std::complex<double>> panels_;
    mutable std::map<double, std::complex<double>> tails_;
};

}  // namespace degenheat
