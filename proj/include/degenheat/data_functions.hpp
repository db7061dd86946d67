#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "degenheat/coefficients.hpp"
#include "degenheat/errors.hpp"

namespace degenheat {

/// Bounded continuous initial datum phi(x). Named kinds cover the built-in
/// registry; tables interpolate linearly and extend by their boundary values.
class DataFunction {
public:
    enum class Kind { zero, constant, gaussian, sine, sech, table };

    static DataFunction zero() { return DataFunction(Kind::zero); }

    static DataFunction constant(std::complex<double> value) {
        DataFunction f(Kind::constant);
        f.value_ = value;
        return f;
    }

    /// exp(-a x^2), a > 0.
    static DataFunction gaussian(double a) {
        if (!(a > 0.0)) throw DomainError("gaussian: decay rate must be positive");
        DataFunction f(Kind::gaussian);
        f.param_ = a;
        return f;
    }

    /// sin(k x), k != 0.
    static DataFunction sine(double k) {
        if (k == 0.0) throw DomainError("sine: wavenumber must be nonzero");
        DataFunction f(Kind::sine);
        f.param_ = k;
        return f;
    }

    static DataFunction sech() { return DataFunction(Kind::sech); }

    static DataFunction table(std::vector<double> knots, std::vector<std::complex<double>> values) {
        if (knots.empty() || knots.size() != values.size())
            throw DomainError("table: need matching non-empty knot lists");
        for (std::size_t i = 1; i < knots.size(); ++i) {
            if (!(knots[i - 1] < knots[i]))
                throw DomainError("table: knots must be strictly increasing");
        }
        DataFunction f(Kind::table);
        f.knots_ = std::move(knots);
        f.values_ = std::move(values);
        return f;
    }

    std::complex<double> operator()(double x) const {
        switch (kind_) {
            case Kind::zero: return {};
            case Kind::constant: return value_;
            case Kind::gaussian: return {std::exp(-param_ * x * x), 0.0};
            case Kind::sine: return {std::sin(param_ * x), 0.0};
            case Kind::sech: return {1.0 / std::cosh(x), 0.0};
            case Kind::table: {
                if (x <= knots_.front()) return values_.front();
                if (x >= knots_.back()) return values_.back();
                const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
                const std::size_t hi = static_cast<std::size_t>(it - knots_.begin());
                const double w = (x - knots_[hi - 1]) / (knots_[hi] - knots_[hi - 1]);
                return values_[hi - 1] + w * (values_[hi] - values_[hi - 1]);
            }
        }
        return {};
    }

    /// Exact supremum of |phi| per kind.
    double sup_abs() const {
        switch (kind_) {
            case Kind::zero: return 0.0;
            case Kind::constant: return std::abs(value_);
            case Kind::gaussian:
            case Kind::sine:
            case Kind::sech: return 1.0;
            case Kind::table: {
                double sup = 0.0;
                for (const auto& v : values_) sup = std::max(sup, std::abs(v));
                return sup;
            }
        }
        return 0.0;
    }

    bool is_zero() const noexcept { return kind_ == Kind::zero; }
    Kind kind() const noexcept { return kind_; }
    std::complex<double> constant_value() const noexcept { return value_; }
    double parameter() const noexcept { return param_; }
    const std::vector<double>& knots() const noexcept { return knots_; }
    const std::vector<std::complex<double>>& knot_values() const noexcept { return values_; }

private:
    explicit DataFunction(Kind kind) : kind_(kind) {}

    Kind kind_;
    std::complex<double> value_{};
    double param_ = 0.0;
    std::vector<double> knots_;
    std::vector<std::complex<double>> values_;
};

/// Smooth reference fields with closed-form time derivative and second
/// spatial derivative, used to manufacture sources and as benchmark targets.
enum class ExactFieldId { constant, t_gaussian, decaying_sine, heat_gaussian };

inline std::string_view exact_field_name(ExactFieldId id) {
    switch (id) {
        case ExactFieldId::constant: return "constant";
        case ExactFieldId::t_gaussian: return "t_gaussian";
        case ExactFieldId::decaying_sine: return "decaying_sine";
        case ExactFieldId::heat_gaussian: return "heat_gaussian";
    }
    return "";
}

inline ExactFieldId exact_field_from_name(std::string_view name) {
    if (name == "constant") return ExactFieldId::constant;
    if (name == "t_gaussian") return ExactFieldId::t_gaussian;
    if (name == "decaying_sine") return ExactFieldId::decaying_sine;
    if (name == "heat_gaussian") return ExactFieldId::heat_gaussian;
    throw DomainError("unknown exact field '" + std::string(name) +
                      "'; known: constant, t_gaussian, decaying_sine, heat_gaussian");
}

struct ExactFieldValues {
    std::complex<double> u{};
    std::complex<double> du_dt{};
    std::complex<double> d2u_dx2{};
};

inline ExactFieldValues exact_field_values(ExactFieldId id, std::complex<double> scale, double t,
                                           double x) {
    ExactFieldValues out;
    switch (id) {
        case ExactFieldId::constant: {
            out.u = scale;
            break;
        }
        case ExactFieldId::t_gaussian: {
            // u = t exp(-x^2)
            const double g = std::exp(-x * x);
            out.u = scale * (t * g);
            out.du_dt = scale * g;
            out.d2u_dx2 = scale * (t * g * (4.0 * x * x - 2.0));
            break;
        }
        case ExactFieldId::decaying_sine: {
            // u = exp(-t) sin(x); time derivative and u_xx are both -u.
            const double u = std::exp(-t) * std::sin(x);
            out.u = scale * u;
            out.du_dt = scale * (-u);
            out.d2u_dx2 = scale * (-u);
            break;
        }
        case ExactFieldId::heat_gaussian: {
            // u = (1+4t)^{-1/2} exp(-x^2/(1+4t)); u_t = u_xx.
            const double s = 1.0 + 4.0 * t;
            const double u = std::exp(-x * x / s) / std::sqrt(s);
            const double uxx = u * (4.0 * x * x / (s * s) - 2.0 / s);
            out.u = scale * u;
            out.du_dt = scale * uxx;
            out.d2u_dx2 = scale * uxx;
            break;
        }
    }
    return out;
}

/// Source term f(t, x). The manufactured kind derives its values from the
/// coefficient it is evaluated with: f = p(t) du/dt - d2u/dx2 of the chosen
/// exact field. Tables interpolate bilinearly with constant extension.
class SourceFunction {
public:
    enum class Kind { zero, constant, mms, table };

    static SourceFunction zero() { return SourceFunction(Kind::zero); }

    static SourceFunction constant(std::complex<double> value) {
        SourceFunction f(Kind::constant);
        f.value_ = value;
        return f;
    }

    static SourceFunction mms(ExactFieldId field, std::complex<double> scale = {1.0, 0.0}) {
        SourceFunction f(Kind::mms);
        f.field_ = field;
        f.value_ = scale;
        return f;
    }

    static SourceFunction table(std::vector<double> t_knots, std::vector<double> x_knots,
                                std::vector<std::complex<double>> values) {
        if (t_knots.empty() || x_knots.empty() || values.size() != t_knots.size() * x_knots.size())
            throw DomainError("source table: values must be a (t x x) matrix over non-empty knots");
        for (std::size_t i = 1; i < t_knots.size(); ++i)
            if (!(t_knots[i - 1] < t_knots[i]))
                throw DomainError("source table: t knots must be strictly increasing");
        for (std::size_t i = 1; i < x_knots.size(); ++i)
            if (!(x_knots[i - 1] < x_knots[i]))
                throw DomainError("source table: x knots must be strictly increasing");
        SourceFunction f(Kind::table);
        f.t_knots_ = std::move(t_knots);
        f.x_knots_ = std::move(x_knots);
        f.values_ = std::move(values);
        return f;
    }

    std::complex<double> operator()(double t, double x, const CoefficientProfile& coefficient) const {
        switch (kind_) {
            case Kind::zero: return {};
            case Kind::constant: return value_;
            case Kind::mms: {
                const ExactFieldValues v = exact_field_values(field_, value_, t, x);
                return eval_p(coefficient, t) * v.du_dt - v.d2u_dx2;
            }
            case Kind::table: return interpolate(t, x);
        }
        return {};
    }

    bool is_zero() const noexcept { return kind_ == Kind::zero; }
    Kind kind() const noexcept { return kind_; }
    std::complex<double> constant_value() const noexcept { return value_; }
    ExactFieldId field() const noexcept { return field_; }
    const std::vector<double>& t_knots() const noexcept { return t_knots_; }
    const std::vector<double>& x_knots() const noexcept { return x_knots_; }
    const std::vector<std::complex<double>>& knot_values() const noexcept { return values_; }

private:
    explicit SourceFunction(Kind kind) : kind_(kind) {}

    std::complex<double> interpolate(double t, double x) const {
        const auto bracket = [](const std::vector<double>& knots, double q, std::size_t& lo,
                                double& w) {
            if (q <= knots.front()) {
                lo = 0;
                w = 0.0;
            } else if (q >= knots.back()) {
                lo = knots.size() - 1;
                w = 0.0;
            } else {
                const auto it = std::upper_bound(knots.begin(), knots.end(), q);
                lo = static_cast<std::size_t>(it - knots.begin()) - 1;
                w = (q - knots[lo]) / (knots[lo + 1] - knots[lo]);
            }
        };
        std::size_t ti = 0, xi = 0;
        double tw = 0.0, xw = 0.0;
        bracket(t_knots_, t, ti, tw);
        bracket(x_knots_, x, xi, xw);
        const std::size_t nx = x_knots_.size();
        const std::size_t ti1 = std::min(ti + 1, t_knots_.size() - 1);
        const std::size_t xi1 = std::min(xi + 1, nx - 1);
        const std::complex<double> lo =
            values_[ti * nx + xi] + xw * (values_[ti * nx + xi1] - values_[ti * nx + xi]);
        const std::complex<double> hi =
            values_[ti1 * nx + xi] + xw * (values_[ti1 * nx + xi1] - values_[ti1 * nx + xi]);
        return lo + tw * (hi - lo);
    }

    Kind kind_;
    std::complex<double> value_{1.0, 0.0};
    ExactFieldId field_ = ExactFieldId::constant;
    std::vector<double> t_knots_;
    std::vector<double> x_knots_;
    std::vector<std::complex<double>> values_;
};

}  // namespace degenheat
