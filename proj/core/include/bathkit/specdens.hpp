// specdens.hpp - Spectral densities J(omega), temperatures and the quantum noise S_beta(omega)
//
// Frequencies and J values are in cm^-1. Every spectral density is evaluated
// through its odd extension, J(-w) = -J(w).

#pragma once

#include <istream>
#include <string>
#include <variant>
#include <vector>

namespace bathkit {

// J(w) = 2 lambda w gamma / (w^2 + gamma^2); lambda is the reorganization energy.
struct Debye {
    double lambda{0.0};
    double gamma{1.0};
};

// J(w) = (pi/2) alpha w exp(-|w|/omega_c).
struct OhmicExp {
    double alpha{0.0};
    double omega_c{1.0};
};

// Antisymmetrized Lorentzian pair centred at +/-center, normalized so that
// (1/pi) int_0^inf J(w)/w dw = lambda:
//   J(w) = 4 lambda gamma w (center^2 + gamma^2)
//          / ([(w-center)^2 + gamma^2] [(w+center)^2 + gamma^2])
struct LorentzianPeak {
    double lambda{0.0};
    double gamma{1.0};
    double center{0.0};
};

struct LorentzianSum {
    std::vector<LorentzianPeak> peaks;
};

struct TabulatedPoint {
    double omega{0.0};
    double value{0.0};
};

// Piecewise-linear J on (0, w_last], anchored at (0, 0), zero beyond w_last.
class Tabulated {
public:
    // Throws InputError unless abscissae are finite, strictly increasing and > 0
    // and at least two points are given.
    explicit Tabulated(std::vector<TabulatedPoint> points);

    double eval(double omega) const;
    double slope_at_origin() const noexcept { return points_.front().value / points_.front().omega; }
    const std::vector<TabulatedPoint>& points() const noexcept { return points_; }

private:
    std::vector<TabulatedPoint> points_;
};

using SpectralComponent = std::variant<Debye, OhmicExp, LorentzianSum, Tabulated>;

// A sum of one or more spectral components. Immutable after construction.
class SpectralDensity {
public:
    explicit SpectralDensity(SpectralComponent component);
    explicit SpectralDensity(std::vector<SpectralComponent> components);

    static SpectralDensity debye(double lambda, double gamma);
    static SpectralDensity ohmic_exp(double alpha, double omega_c);
    static SpectralDensity lorentzian_sum(std::vector<LorentzianPeak> peaks);
    static SpectralDensity tabulated(std::vector<TabulatedPoint> points);

    // J(omega) in cm^-1.
    double eval(double omega) const;
    // dJ/domega at 0. Analytic for closed forms; first-segment slope for tables.
    double slope_at_origin() const;

    const std::vector<SpectralComponent>& components() const noexcept { return components_; }

private:
    std::vector<SpectralComponent> components_;
};

// Parses a two-column CSV (omega cm^-1, J cm^-1). A non-numeric first line is
// treated as a header. Errors carry the offending line number.
SpectralDensity load_tabulated(std::istream& source);

class Temperature {
public:
    static Temperature zero() noexcept { return Temperature{}; }
    // kelvin == 0 maps to zero(); negative or non-finite values throw InputError.
    static Temperature kelvin(double kelvin);

    bool is_zero() const noexcept { return kelvin_ == 0.0; }
    double in_kelvin() const noexcept { return kelvin_; }
    // Inverse temperature in cm. Throws std::logic_error at zero temperature.
    double beta() const;

    friend bool operator==(const Temperature&, const Temperature&) = default;

private:
    Temperature() = default;
    double kelvin_{0.0};
};

// S_beta(w) = 1/2 J(w) (coth(beta w / 2) + 1), evaluated as J(w) / (1 - exp(-beta w))
// away from the origin and through its Laurent series for |beta w| < 1e-6.
class NoiseKernel {
public:
    static constexpr double series_threshold = 1e-6;

    NoiseKernel(SpectralDensity sd, Temperature temperature)
        : sd_(std::move(sd)), temperature_(temperature) {}

    double eval(double omega) const;

    const SpectralDensity& spectral_density() const noexcept { return sd_; }
    const Temperature& temperature() const noexcept { return temperature_; }

private:
    SpectralDensity sd_;
    Temperature temperature_;
};

// Debye(35, 106.1) plus three underdamped peaks. A structured test environment;
// these are not measured data for any real complex.
SpectralDensity surrogate_spectral_density();

} // namespace bathkit
