#include "bathkit/specdens.hpp"

#include "bathkit/error.hpp"
#include "bathkit/units.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace bathkit {

namespace {

bool finite(double x) { return std::isfinite(x); }

void validate(const Debye& d) {
    if (!finite(d.lambda) || d.lambda < 0.0)
        throw InputError("debye: lambda must be finite and >= 0");
    if (!finite(d.gamma) || d.gamma <= 0.0)
        throw InputError("debye: gamma must be finite and > 0");
}

void validate(const OhmicExp& o) {
    if (!finite(o.alpha) || o.alpha < 0.0)
        throw InputError("ohmic_exp: alpha must be finite and >= 0");
    if (!finite(o.omega_c) || o.omega_c <= 0.0)
        throw InputError("ohmic_exp: omega_c must be finite and > 0");
}

void validate(const LorentzianSum& l) {
    if (l.peaks.empty())
        throw InputError("lorentzian_sum: at least one peak is required");
    for (const auto& p : l.peaks) {
        if (!finite(p.lambda) || p.lambda < 0.0)
            throw InputError("lorentzian_sum: lambda must be finite and >= 0");
        if (!finite(p.gamma) || p.gamma <= 0.0)
            throw InputError("lorentzian_sum: gamma must be finite and > 0");
        if (!finite(p.center) || p.center < 0.0)
            throw InputError("lorentzian_sum: center must be finite and >= 0");
    }
}

void validate(const Tabulated&) {}

// Each closed form is written so that J(-w) = -J(w) holds bit-exactly.
double eval_positive(const Debye& d, double w) {
    return 2.0 * d.lambda * w * d.gamma / (w * w + d.gamma * d.gamma);
}

double eval_positive(const OhmicExp& o, double w) {
    return 0.5 * std::numbers::pi * o.alpha * w * std::exp(-std::abs(w) / o.omega_c);
}

double eval_positive(const LorentzianSum& l, double w) {
    double sum = 0.0;
    for (const auto& p : l.peaks) {
        const double g2 = p.gamma * p.gamma;
        const double lo = (w - p.center) * (w - p.center) + g2;
        const double hi = (w + p.center) * (w + p.center) + g2;
        sum += 4.0 * p.lambda * p.gamma * w * (p.center * p.center + g2) / (lo * hi);
    }
    return sum;
}

double eval_positive(const Tabulated& t, double w) { return t.eval(w); }

double slope(const Debye& d) { return 2.0 * d.lambda / d.gamma; }
double slope(const OhmicExp& o) { return 0.5 * std::numbers::pi * o.alpha; }
double slope(const LorentzianSum& l) {
    double sum = 0.0;
    for (const auto& p : l.peaks)
        sum += 4.0 * p.lambda * p.gamma / (p.center * p.center + p.gamma * p.gamma);
    return sum;
}
double slope(const Tabulated& t) { return t.slope_at_origin(); }

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view s, double& out) {
    s = trim(s);
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

} // namespace

// ------------------------------- Tabulated ----------------------------------

Tabulated::Tabulated(std::vector<TabulatedPoint> points) : points_(std::move(points)) {
    if (points_.size() < 2)
        throw InputError("tabulated: fewer than 2 points");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const auto& p = points_[i];
        if (!finite(p.omega) || !finite(p.value))
            throw InputError("tabulated: non-finite entry at point " + std::to_string(i + 1));
        if (i == 0 && p.omega <= 0.0)
            throw InputError("tabulated: first abscissa must be > 0");
        if (i > 0 && p.omega <= points_[i - 1].omega)
            throw InputError("tabulated: non-increasing abscissae at point " + std::to_string(i + 1));
    }
}

double Tabulated::eval(double omega) const {
    const double w = std::abs(omega);
    double value;
    if (w > points_.back().omega) {
        value = 0.0;
    } else if (w <= points_.front().omega) {
        value = points_.front().value * (w / points_.front().omega);
    } else {
        auto hi = std::upper_bound(points_.begin(), points_.end(), w,
                                   [](double x, const TabulatedPoint& p) { return x < p.omega; });
        if (hi == points_.end()) return omega < 0.0 ? -points_.back().value : points_.back().value;
        auto lo = hi - 1;
        const double frac = (w - lo->omega) / (hi->omega - lo->omega);
        value = lo->value + frac * (hi->value - lo->value);
    }
    return omega < 0.0 ? -value : value;
}

// ---------------------------- SpectralDensity -------------------------------

SpectralDensity::SpectralDensity(SpectralComponent component)
    : SpectralDensity(std::vector<SpectralComponent>{std::move(component)}) {}

SpectralDensity::SpectralDensity(std::vector<SpectralComponent> components)
    : components_(std::move(components)) {
    if (components_.empty())
        throw InputError("spectral density: at least one component is required");
    for (const auto& c : components_)
        std::visit([](const auto& v) { validate(v); }, c);
}

SpectralDensity SpectralDensity::debye(double lambda, double gamma) {
    return SpectralDensity(Debye{lambda, gamma});
}

SpectralDensity SpectralDensity::ohmic_exp(double alpha, double omega_c) {
    return SpectralDensity(OhmicExp{alpha, omega_c});
}

SpectralDensity SpectralDensity::lorentzian_sum(std::vector<LorentzianPeak> peaks) {
    return SpectralDensity(LorentzianSum{std::move(peaks)});
}

SpectralDensity SpectralDensity::tabulated(std::vector<TabulatedPoint> points) {
    return SpectralDensity(Tabulated(std::move(points)));
}

double SpectralDensity::eval(double omega) const {
    // Evaluate at |w| and flip the sign so oddness never depends on rounding.
    const double w = std::abs(omega);
    double sum = 0.0;
    for (const auto& c : components_)
        sum += std::visit([w](const auto& v) { return eval_positive(v, w); }, c);
    return omega < 0.0 ? -sum : sum;
}

double SpectralDensity::slope_at_origin() const {
    double sum = 0.0;
    for (const auto& c : components_)
        sum += std::visit([](const auto& v) { return slope(v); }, c);
    return sum;
}

SpectralDensity load_tabulated(std::istream& source) {
    std::vector<TabulatedPoint> points;
    std::string line;
    std::size_t line_no = 0;
    bool seen_content = false;
    while (std::getline(source, line)) {
        ++line_no;
        std::string_view view = trim(line);
        if (view.empty() || view.front() == '#') continue;
        const auto comma = view.find(',');
        double omega = 0.0;
        double value = 0.0;
        const bool ok = comma != std::string_view::npos &&
                        view.find(',', comma + 1) == std::string_view::npos &&
                        parse_double(view.substr(0, comma), omega) &&
                        parse_double(view.substr(comma + 1), value);
        if (!ok) {
            if (!seen_content) {
                seen_content = true; // header row
                continue;
            }
            throw InputError("line " + std::to_string(line_no) +
                             ": expected two numeric columns 'omega,J'");
        }
        seen_content = true;
        if (!finite(omega) || !finite(value))
            throw InputError("line " + std::to_string(line_no) + ": non-finite value");
        if (points.empty() && omega <= 0.0)
            throw InputError("line " + std::to_string(line_no) + ": first abscissa must be > 0");
        if (!points.empty() && omega <= points.back().omega)
            throw InputError("line " + std::to_string(line_no) + ": non-increasing abscissae");
        points.push_back({omega, value});
    }
    if (points.size() < 2)
        throw InputError("tabulated spectral density: fewer than 2 points (read " +
                         std::to_string(points.size()) + ")");
    return SpectralDensity(Tabulated(std::move(points)));
}

// ------------------------------ Temperature ---------------------------------

Temperature Temperature::kelvin(double kelvin) {
    if (!finite(kelvin) || kelvin < 0.0)
        throw InputError("temperature must be finite and >= 0 K");
    Temperature t;
    t.kelvin_ = kelvin;
    return t;
}

double Temperature::beta() const {
    if (is_zero()) throw std::logic_error("beta is infinite at zero temperature");
    return 1.0 / (units::boltzmann_cm1_per_k * kelvin_);
}

// ------------------------------ NoiseKernel ---------------------------------

double NoiseKernel::eval(double omega) const {
    if (temperature_.is_zero())
        return omega > 0.0 ? sd_.eval(omega) : 0.0;

    const double beta = temperature_.beta();
    const double x = beta * omega;
    if (std::abs(x) < series_threshold) {
        if (omega == 0.0) return sd_.slope_at_origin() / beta;
        // coth(x/2) + 1 = 2/x + 1 + x/6 + O(x^3)
        return 0.5 * sd_.eval(omega) * (2.0 / x + 1.0 + x / 6.0);
    }
    return sd_.eval(omega) / -std::expm1(-x);
}

SpectralDensity surrogate_spectral_density() {
    return SpectralDensity(std::vector<SpectralComponent>{
        Debye{35.0, 106.1},
        LorentzianSum{{
            {4.0, 15.0, 117.0},
            {3.0, 12.0, 185.0},
            {2.5, 20.0, 340.0},
        }},
    });
}

} // namespace bathkit
