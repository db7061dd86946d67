#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "degenheat/coefficients.hpp"
#include "degenheat/data_functions.hpp"
#include "degenheat/errors.hpp"

namespace degenheat {

/// Hoelder modulus of the source in x: |f(t,x) - f(t,y)| <= bound |x-y|^exponent.
struct HoelderParams {
    double bound = 0.0;
    double exponent = 1.0;

    void validate() const {
        if (!(bound >= 0.0)) throw DomainError("hoelder: bound must be nonnegative");
        if (!(exponent > 0.0 && exponent <= 1.0))
            throw DomainError("hoelder: expected 0 < alpha <= 1, got " + std::to_string(exponent));
    }
};

/// Which weight multiplies the source slice inside the inhomogeneous term:
/// `corrected` applies 1/p(tau) (the form produced by dividing the equation
/// by p before transforming); `paper` applies none and is kept selectable for
/// fidelity experiments.
enum class DuhamelForm { paper, corrected };

inline std::string_view to_string(DuhamelForm form) {
    return form == DuhamelForm::paper ? "paper" : "corrected";
}

inline DuhamelForm duhamel_form_from_string(std::string_view name) {
    if (name == "paper") return DuhamelForm::paper;
    if (name == "corrected") return DuhamelForm::corrected;
    throw DomainError("duhamel_form: expected 'paper' or 'corrected', got '" + std::string(name) +
                      "'");
}

struct Tolerances {
    double quad_tol = 1e-9;       // absolute target for the solution integrals
    double rho_min = 1e-10;       // floor on Re omega below which solves refuse
    double tail_tol = 1e-16;      // kernel magnitude at the truncation radius
    double eps_split_rel = 1e-6;  // near-diagonal slice width, relative to t
    double p_floor = 1e-12;       // nonvanishing floor for |p|
    double omega_tol = 1e-12;     // omega cache refinement tolerance

    void validate() const {
        if (!(quad_tol > 0.0)) throw DomainError("tolerances: quad_tol must be positive");
        if (!(rho_min > 0.0)) throw DomainError("tolerances: rho_min must be positive");
        if (!(tail_tol > 0.0 && tail_tol < 1.0))
            throw DomainError("tolerances: tail_tol must lie in (0, 1)");
        if (!(eps_split_rel > 0.0 && eps_split_rel < 1.0))
            throw DomainError("tolerances: eps_split must lie in (0, 1)");
        if (!(p_floor > 0.0)) throw DomainError("tolerances: p_floor must be positive");
        if (!(omega_tol > 0.0)) throw DomainError("tolerances: omega_tol must be positive");
    }
};

struct ProblemSpec {
    CoefficientProfile coefficient = CoefficientProfile::constant({1.0, 0.0});
    DataFunction phi = DataFunction::zero();
    SourceFunction source = SourceFunction::zero();
    std::optional<HoelderParams> hoelder{};
    DuhamelForm duhamel_form = DuhamelForm::corrected;
    Tolerances tolerances{};

    void validate() const {
        tolerances.validate();
        if (hoelder) hoelder->validate();
    }
};

/// Rectangular evaluation grid. A count of one denotes a single point and
/// requires a degenerate range; otherwise ranges must be increasing. Times
/// are strictly positive (the datum at t = 0 is the limit, not a row).
struct GridSpec {
    double t_begin = 0.1;
    double t_end = 1.0;
    std::size_t t_count = 5;
    double x_begin = -5.0;
    double x_end = 5.0;
    std::size_t x_count = 41;

    void validate() const {
        const auto check_axis = [](double begin, double end, std::size_t count, const char* name) {
            if (count == 0) throw DomainError(std::string("grid: ") + name + " count must be >= 1");
            if (count == 1) {
                if (begin != end)
                    throw DomainError(std::string("grid: single-point ") + name +
                                      " range must be degenerate");
            } else if (!(begin < end)) {
                throw DomainError(std::string("grid: ") + name + " range must be increasing");
            }
        };
        check_axis(t_begin, t_end, t_count, "t");
        check_axis(x_begin, x_end, x_count, "x");
        if (!(t_begin > 0.0)) throw DomainError("grid: t range must be strictly positive");
    }

    std::vector<double> t_points() const { return linspace(t_begin, t_end, t_count); }
    std::vector<double> x_points() const { return linspace(x_begin, x_end, x_count); }

private:
    static std::vector<double> linspace(double begin, double end, std::size_t count) {
        std::vector<double> out(count);
        if (count == 1) {
            out[0] = begin;
            return out;
        }
        for (std::size_t i = 0; i < count; ++i) {
            out[i] = begin + (end - begin) * static_cast<double>(i) / static_cast<double>(count - 1);
        }
        return out;
    }
};

struct FieldProvenance {
    std::string method = "kernel";  // "kernel" or "cn_oracle"
    bool homogeneous_term = true;
    bool duhamel_term = true;
    DuhamelForm duhamel_form = DuhamelForm::corrected;
    Tolerances tolerances{};
    std::size_t quad_evaluations = 0;
};

/// u(t, x) sampled on a rectangular grid, t-major storage.
class SolutionField {
public:
    SolutionField(std::vector<double> t_grid, std::vector<double> x_grid,
                  std::vector<std::complex<double>> values, FieldProvenance provenance)
        : t_grid_(std::move(t_grid)),
          x_grid_(std::move(x_grid)),
          values_(std::move(values)),
          provenance_(std::move(provenance)) {
        if (values_.size() != t_grid_.size() * x_grid_.size())
            throw DomainError("SolutionField: value count does not match the grid");
        for (const auto& v : values_) {
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw DomainError("SolutionField: non-finite value");
        }
    }

    std::size_t nt() const noexcept { return t_grid_.size(); }
    std::size_t nx() const noexcept { return x_grid_.size(); }
    double t(std::size_t i) const { return t_grid_[i]; }
    double x(std::size_t j) const { return x_grid_[j]; }
    const std::vector<double>& t_grid() const noexcept { return t_grid_; }
    const std::vector<double>& x_grid() const noexcept { return x_grid_; }

    std::complex<double> at(std::size_t i, std::size_t j) const { return values_[i * nx() + j]; }
    const std::vector<std::complex<double>>& values() const noexcept { return values_; }
    const FieldProvenance& provenance() const noexcept { return provenance_; }

private:
    std::vector<double> t_grid_;
    std::vector<double> x_grid_;
    std::vector<std::complex<double>> values_;
    FieldProvenance provenance_;
};

}  // namespace degenheat
