#include "bathkit/discretize.hpp"

#include "bathkit/error.hpp"
#include "bathkit/units.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bathkit {

using Eigen::Index;

// --------------------------------- FdrGrid ----------------------------------

FdrGrid::FdrGrid(double t_max_fs, double omega_max_cm1, Index n_time, Index n_freq)
    : t_max_(t_max_fs), omega_max_(omega_max_cm1), n_time_(n_time), n_freq_(n_freq) {
    if (!std::isfinite(t_max_fs) || t_max_fs < 0.0)
        throw InputError("grid: t_max must be finite and >= 0 fs");
    if (!std::isfinite(omega_max_cm1) || omega_max_cm1 <= 0.0)
        throw InputError("grid: omega_max must be finite and > 0 cm^-1");
    if (n_time < 1) throw InputError("grid: n_time must be >= 1");
    if (n_time > 1 && t_max_fs == 0.0) throw InputError("grid: t_max must be > 0 when n_time > 1");
    if (n_freq < 2 || n_freq % 2 != 0) throw InputError("grid: n_freq must be even and >= 2");
}

double FdrGrid::time(Index i) const noexcept {
    if (n_time_ == 1) return 0.0;
    if (i == n_time_ - 1) return t_max_;
    return t_max_ * static_cast<double>(i) / static_cast<double>(n_time_ - 1);
}

double FdrGrid::freq(Index j) const noexcept {
    return omega_max_ * static_cast<double>(2 * j + 1 - n_freq_) / static_cast<double>(n_freq_);
}

std::vector<double> FdrGrid::times() const {
    std::vector<double> out(static_cast<std::size_t>(n_time_));
    for (Index i = 0; i < n_time_; ++i) out[static_cast<std::size_t>(i)] = time(i);
    return out;
}

std::vector<double> FdrGrid::freqs() const {
    std::vector<double> out(static_cast<std::size_t>(n_freq_));
    for (Index j = 0; j < n_freq_; ++j) out[static_cast<std::size_t>(j)] = freq(j);
    return out;
}

double BathModel::t_max() const { return grid ? grid->t_max() : 0.0; }

// ------------------------------- FDR matrix ---------------------------------

FdrMatrix assemble_fdr(const NoiseKernel& kernel, const FdrGrid& grid,
                       const AssembleOptions& options) {
    const Index m = grid.n_time();
    const Index n = grid.n_freq();
    const double bytes = 2.0 * static_cast<double>(m) * static_cast<double>(n) * sizeof(double);
    if (bytes > static_cast<double>(options.memory_cap_bytes)) {
        std::ostringstream msg;
        msg << "FDR matrix needs " << bytes / (1u << 20) << " MiB (2 x " << m << " x " << n
            << " doubles), above the cap of " << options.memory_cap_bytes / (1u << 20)
            << " MiB; use a coarser grid";
        throw ResourceError(msg.str());
    }

    FdrMatrix out{grid, RealMatrix(2 * m, n)};
    const auto times = grid.times();
    for (Index j = 0; j < n; ++j) {
        const double omega = grid.freq(j);
        const double s = kernel.eval(omega);
        const double rate = units::angular_frequency(omega);
        auto col = out.realified.col(j);
        for (Index i = 0; i < m; ++i) {
            const double phase = rate * times[static_cast<std::size_t>(i)];
            col[i] = s * std::cos(phase);
            col[m + i] = -s * std::sin(phase);
        }
    }
    if (!out.realified.allFinite())
        throw PhysicsError("FDR matrix has non-finite entries; check the spectral density");
    return out;
}

// ---------------------------- Reference BCF ---------------------------------

namespace {

std::vector<Complex> midpoint_bcf(const NoiseKernel& kernel, const std::vector<double>& times,
                                  double omega_max, std::size_t points) {
    const double h = 2.0 * omega_max / static_cast<double>(points);
    const auto np = static_cast<double>(points);
    std::vector<double> weights(points);
    for (std::size_t j = 0; j < points; ++j) {
        const double omega = omega_max * (2.0 * static_cast<double>(j) + 1.0 - np) / np;
        weights[j] = kernel.eval(omega) * h;
    }

    // exp(-i a w_j t) by complex recurrence, re-seeded every block to bound drift.
    constexpr std::size_t block = 256;
    std::vector<Complex> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double a = units::angular_frequency(1.0) * times[i];
        const Complex step = std::polar(1.0, -a * h);
        Complex acc{0.0, 0.0};
        Complex phase;
        for (std::size_t j = 0; j < points; ++j) {
            if (j % block == 0) {
                const double omega = omega_max * (2.0 * static_cast<double>(j) + 1.0 - np) / np;
                phase = std::polar(1.0, -a * omega);
            }
            acc += weights[j] * phase;
            phase *= step;
        }
        out[i] = acc;
    }
    return out;
}

} // namespace

std::vector<Complex> reference_bcf(const NoiseKernel& kernel, const std::vector<double>& times_fs,
                                   double omega_max_cm1, const QuadratureOptions& options) {
    if (!(omega_max_cm1 > 0.0)) throw InputError("reference_bcf: omega_max must be > 0");
    if (options.initial_points < 2) throw InputError("reference_bcf: need at least 2 points");
    std::size_t points = options.initial_points;
    auto coarse = midpoint_bcf(kernel, times_fs, omega_max_cm1, points);
    double change = 0.0;
    double scale = 0.0;
    while (2 * points <= options.max_points) {
        points *= 2;
        auto fine = midpoint_bcf(kernel, times_fs, omega_max_cm1, points);
        change = 0.0;
        scale = 0.0;
        for (std::size_t i = 0; i < fine.size(); ++i) {
            change = std::max(change, std::abs(fine[i] - coarse[i]));
            scale = std::max(scale, std::abs(fine[i]));
        }
        if (change <= options.rel_tol * scale) return fine;
        coarse = std::move(fine);
    }
    std::ostringstream msg;
    msg << "reference_bcf: quadrature did not reach relative tolerance " << options.rel_tol
        << " within " << options.max_points << " points (achieved "
        << (scale > 0.0 ? change / scale : change) << ")";
    throw ConvergenceError(msg.str());
}

// ------------------------------ Reconstruction ------------------------------

std::vector<Complex> reconstruct_bcf(const BathModel& model, const std::vector<double>& times_fs) {
    std::vector<Complex> out(times_fs.size(), Complex{0.0, 0.0});
    for (std::size_t i = 0; i < times_fs.size(); ++i) {
        Complex acc{0.0, 0.0};
        for (const auto& mode : model.modes) {
            const double phase = units::angular_frequency(mode.omega_cm1) * times_fs[i];
            acc += mode.g_cm1 * mode.g_cm1 * Complex(std::cos(phase), -std::sin(phase));
        }
        out[i] = acc;
    }
    return out;
}

BcfErrors compare_bcf(const std::vector<Complex>& approx, const std::vector<Complex>& reference) {
    if (approx.size() != reference.size())
        throw InputError("compare_bcf: series lengths differ");
    BcfErrors e;
    if (approx.empty()) return e;
    double peak = 0.0;
    double sum = 0.0;
    for (std::size_t i = 0; i < approx.size(); ++i) {
        const double d = std::abs(approx[i] - reference[i]);
        e.max_abs_error = std::max(e.max_abs_error, d);
        sum += d;
        peak = std::max(peak, std::abs(reference[i]));
    }
    e.mean_abs_error = sum / static_cast<double>(approx.size());
    e.rel_error = peak > 0.0 ? e.max_abs_error / peak : e.max_abs_error;
    return e;
}

BcfErrors error_report(const BathModel& model, const NoiseKernel& kernel,
                       const std::vector<double>& times_fs, std::optional<double> omega_max_cm1,
                       const QuadratureOptions& options) {
    double omega_max = 0.0;
    if (omega_max_cm1) {
        omega_max = *omega_max_cm1;
    } else if (model.grid) {
        omega_max = model.grid->omega_max();
    } else {
        throw InputError("error_report: model has no grid; pass omega_max explicitly");
    }
    return compare_bcf(reconstruct_bcf(model, times_fs),
                       reference_bcf(kernel, times_fs, omega_max, options));
}

// ------------------------------- Pipeline -----------------------------------

BathModel discretize_bath(const NoiseKernel& kernel, const FdrGrid& grid, double tol,
                          const DiscretizeOptions& options) {
    if (!(tol > 0.0 && tol <= 1.0)) throw InputError("discretize: tol must lie in (0, 1]");

    const FdrMatrix fdr = assemble_fdr(kernel, grid, options.assemble);
    const IdResult id = column_id(fdr.realified, IdOptions{tol, std::nullopt});

    const auto times = grid.times();
    const auto c_ref = reference_bcf(kernel, times, grid.omega_max(), options.quadrature);
    const Index m = grid.n_time();
    RealVector target(2 * m);
    for (Index i = 0; i < m; ++i) {
        target[i] = c_ref[static_cast<std::size_t>(i)].real();
        target[m + i] = c_ref[static_cast<std::size_t>(i)].imag();
    }

    BathModel model;
    model.temperature = kernel.temperature();
    model.spectral_density = kernel.spectral_density();
    model.grid = grid;
    model.tol = tol;
    model.diagnostics.id_rank = id.rank;
    model.diagnostics.id_error_estimate = id.frobenius_error_estimate;

    NnlsResult fit;
    if (id.rank > 0) {
        const RealMatrix basis = select_columns(fdr.realified, id.selected);
        fit = nnls(basis, target, options.nnls);
    } else {
        fit.converged = true;
        fit.residual_norm = target.norm();
    }
    model.diagnostics.nnls_residual = fit.residual_norm;
    model.diagnostics.nnls_iterations = fit.iterations;
    model.diagnostics.nnls_converged = fit.converged;

    for (Index k = 0; k < id.rank; ++k) {
        const double z = fit.z[k];
        if (z <= 0.0) continue;
        const double omega = grid.freq(id.selected[static_cast<std::size_t>(k)]);
        const double s = kernel.eval(omega);
        if (s < 0.0) {
            std::ostringstream msg;
            msg << "S_beta(" << omega << " cm^-1) = " << s
                << " < 0: spectral density is unphysical at a selected frequency";
            throw PhysicsError(msg.str());
        }
        model.modes.push_back({omega, z, std::sqrt(z * s)});
    }
    std::sort(model.modes.begin(), model.modes.end(),
              [](const BathMode& a, const BathMode& b) { return a.omega_cm1 < b.omega_cm1; });
    model.diagnostics.mode_count = model.mode_count();
    model.diagnostics.errors = compare_bcf(reconstruct_bcf(model, times), c_ref);

    if (!fit.converged) {
        throw NnlsNotConverged("NNLS hit its iteration cap (" + std::to_string(fit.iterations) +
                                   " iterations) before satisfying the KKT tolerance",
                               model.diagnostics);
    }
    return model;
}

} // namespace bathkit
