#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "degenheat/errors.hpp"

namespace degenheat {

/// Argument pack for one kernel evaluation: the accumulated coefficient
/// integral omega and the spatial offset z = y - x.
struct KernelArg {
    std::complex<double> omega{};
    double z = 0.0;
};

namespace detail {

inline void require_decaying(std::complex<double> omega, const char* where) {
    if (!(omega.real() > 0.0)) {
        throw DegenerateKernelError(std::string(where) + ": Re omega = " +
                                    std::to_string(omega.real()) +
                                    " is not positive; the kernel does not decay");
    }
}

}  // namespace detail

/// Evaluates exp(-z^2 / (4 omega)) / (2 sqrt(pi omega)) for a fixed omega.
///
/// The reciprocal of omega and the normalization are computed once; each
/// evaluation then costs one real exp and one polar assembly, so grid loops
/// only scale by z^2. The square root is the principal branch, which has
/// positive real part on Re omega > 0 and keeps the kernel continuous in t.
/// Magnitudes below the double range come back as exact zero, never as an
/// overflow or a NaN phase.
class KernelEvaluator {
public:
    explicit KernelEvaluator(std::complex<double> omega) : omega_(omega) {
        detail::require_decaying(omega, "kernel_eval");
        inverse_ = 1.0 / omega;
        normalization_ = 0.5 / std::sqrt(std::numbers::pi * omega);
    }

    std::complex<double> operator()(double z) const {
        const double q = 0.25 * z * z;
        const double exponent = -q * inverse_.real();
        if (!(exponent > -750.0)) return {0.0, 0.0};
        return std::polar(std::exp(exponent), -q * inverse_.imag()) * normalization_;
    }

    std::complex<double> omega() const noexcept { return omega_; }

private:
    std::complex<double> omega_;
    std::complex<double> inverse_;
    std::complex<double> normalization_;
};

inline std::complex<double> kernel_eval(const KernelArg& arg) {
    return KernelEvaluator(arg.omega)(arg.z);
}

/// Analytic value of the kernel's total integral over the real line: exactly
/// one for every omega with Re omega > 0 (complex Gaussian integral on the
/// principal branch). Exists so quadrature tests have an oracle target.
inline std::complex<double> kernel_mass(std::complex<double> omega) {
    detail::require_decaying(omega, "kernel_mass");
    return {1.0, 0.0};
}

/// Radius R such that |exp(-z^2/(4 omega))| <= tol for |z| >= R, i.e.
/// R = sqrt(4 |omega|^2 ln(1/tol) / Re omega).
inline double decay_radius(std::complex<double> omega, double tol) {
    detail::require_decaying(omega, "decay_radius");
    if (!(tol > 0.0 && tol < 1.0)) throw DomainError("decay_radius: tol must lie in (0, 1)");
    return 2.0 * std::abs(omega) * std::sqrt(std::log(1.0 / tol) / omega.real());
}

/// L1 norm of the kernel: integral of |Q(omega, z)| dz = sqrt(|omega| / Re omega).
/// This is the factor by which the homogeneous term can amplify sup |phi|.
inline double kernel_l1_norm(std::complex<double> omega) {
    detail::require_decaying(omega, "kernel_l1_norm");
    return std::sqrt(std::abs(omega) / omega.real());
}

/// Absolute moment of the kernel: integral of |Q(omega, z)| |z|^alpha dz.
/// With a = Re omega / (4 |omega|^2) this is
/// Gamma((alpha+1)/2) a^{-(alpha+1)/2} / (2 sqrt(pi |omega|)). Drives the
/// near-diagonal Duhamel slice bound for Hoelder-continuous sources.
inline double kernel_abs_moment(std::complex<double> omega, double alpha) {
    detail::require_decaying(omega, "kernel_abs_moment");
    if (!(alpha >= 0.0)) throw DomainError("kernel_abs_moment: alpha must be nonnegative");
    const double mag = std::abs(omega);
    const double a = omega.real() / (4.0 * mag * mag);
    return std::tgamma(0.5 * (alpha + 1.0)) * std::pow(a, -0.5 * (alpha + 1.0)) /
           (2.0 * std::sqrt(std::numbers::pi * mag));
}

}  // namespace degenheat
