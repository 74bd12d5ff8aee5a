// discretize.hpp - Low-rank discretization of the fluctuation-dissipation relation
//
// The sampled integrand f(t_i, w_j) = S_beta(w_j) exp(-i 2 pi c w_j t_i) is
// compressed with a column ID; the selected frequencies become bath modes and
// their weights are fitted with NNLS against a refined quadrature of C(t).

#pragma once

#include "bathkit/error.hpp"
#include "bathkit/lowrank.hpp"
#include "bathkit/specdens.hpp"

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bathkit {

using Complex = std::complex<double>;

// Uniform times on [0, t_max] and midpoint-offset frequencies on [-omega_max, omega_max].
class FdrGrid {
public:
    static constexpr Eigen::Index default_n_time = 1000;
    static constexpr Eigen::Index default_n_freq = 10000;

    // n_freq must be even so that no frequency sits at 0.
    FdrGrid(double t_max_fs, double omega_max_cm1,
            Eigen::Index n_time = default_n_time, Eigen::Index n_freq = default_n_freq);

    double t_max() const noexcept { return t_max_; }
    double omega_max() const noexcept { return omega_max_; }
    Eigen::Index n_time() const noexcept { return n_time_; }
    Eigen::Index n_freq() const noexcept { return n_freq_; }

    double time(Eigen::Index i) const noexcept;
    // omega_max * (2j + 1 - n) / n: exactly antisymmetric under j -> n-1-j.
    double freq(Eigen::Index j) const noexcept;
    double freq_step() const noexcept { return 2.0 * omega_max_ / static_cast<double>(n_freq_); }

    std::vector<double> times() const;
    std::vector<double> freqs() const;

    friend bool operator==(const FdrGrid&, const FdrGrid&) = default;

private:
    double t_max_;
    double omega_max_;
    Eigen::Index n_time_;
    Eigen::Index n_freq_;
};

// Rows [0, m) hold Re f, rows [m, 2m) hold Im f.
struct FdrMatrix {
    FdrGrid grid;
    RealMatrix realified;
};

struct AssembleOptions {
    std::uint64_t memory_cap_bytes{std::uint64_t{4} << 30};
};

// Throws ResourceError when 2 m n doubles exceed the memory cap.
FdrMatrix assemble_fdr(const NoiseKernel& kernel, const FdrGrid& grid,
                       const AssembleOptions& options = {});

struct QuadratureOptions {
    std::size_t initial_points{10000};
    double rel_tol{1e-6};
    std::size_t max_points{std::size_t{1} << 20};
};

// C(t) = int_{-omega_max}^{omega_max} S_beta(w) exp(-i 2 pi c w t) dw by the
// midpoint rule, doubling the point count until successive results agree to
// rel_tol relative to max_t |C|. Throws ConvergenceError at max_points.
std::vector<Complex> reference_bcf(const NoiseKernel& kernel, const std::vector<double>& times_fs,
                                   double omega_max_cm1, const QuadratureOptions& options = {});

struct BathMode {
    double omega_cm1{0.0};
    double z{0.0};      // fitted frequency weight, cm^-1
    double g_cm1{0.0};  // sqrt(z S_beta(omega))

    friend bool operator==(const BathMode&, const BathMode&) = default;
};

struct BcfErrors {
    double max_abs_error{0.0};
    double mean_abs_error{0.0};
    double rel_error{0.0};  // max_abs_error / max_t |C_ref|

    friend bool operator==(const BcfErrors&, const BcfErrors&) = default;
};

struct BathDiagnostics {
    Eigen::Index id_rank{0};
    Eigen::Index mode_count{0};
    double id_error_estimate{0.0};
    double nnls_residual{0.0};
    int nnls_iterations{0};
    bool nnls_converged{false};
    BcfErrors errors;

    friend bool operator==(const BathDiagnostics&, const BathDiagnostics&) = default;
};

struct BathModel {
    std::vector<BathMode> modes;  // ascending omega
    Temperature temperature{Temperature::zero()};
    std::optional<SpectralDensity> spectral_density;  // absent for hand-built models
    std::optional<FdrGrid> grid;
    double tol{0.0};
    BathDiagnostics diagnostics;

    Eigen::Index mode_count() const noexcept { return static_cast<Eigen::Index>(modes.size()); }
    double t_max() const;  // grid window, or 0 without a grid
};

struct DiscretizeOptions {
    AssembleOptions assemble;
    QuadratureOptions quadrature;
    NnlsOptions nnls;
};

// Thrown when NNLS hits its iteration cap; carries what was computed.
class NnlsNotConverged : public ConvergenceError {
public:
    NnlsNotConverged(const std::string& what, BathDiagnostics partial)
        : ConvergenceError(what), partial_(std::move(partial)) {}
    const BathDiagnostics& partial() const noexcept { return partial_; }

private:
    BathDiagnostics partial_;
};

BathModel discretize_bath(const NoiseKernel& kernel, const FdrGrid& grid, double tol,
                          const DiscretizeOptions& options = {});

// C(t) = sum_k g_k^2 exp(-i 2 pi c w_k t).
std::vector<Complex> reconstruct_bcf(const BathModel& model, const std::vector<double>& times_fs);

BcfErrors compare_bcf(const std::vector<Complex>& approx, const std::vector<Complex>& reference);

// Recomputes the errors of the model against the quadrature oracle over the
// model's frequency window (or omega_max_cm1 when given).
BcfErrors error_report(const BathModel& model, const NoiseKernel& kernel,
                       const std::vector<double>& times_fs,
                       std::optional<double> omega_max_cm1 = std::nullopt,
                       const QuadratureOptions& options = {});

} // namespace bathkit
