#include "bathkit/dynamics.hpp"

#include "bathkit/error.hpp"
#include "bathkit/units.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace bathkit {

using Eigen::Index;

// ------------------------------ Truncation ----------------------------------

FockTruncation FockTruncation::adaptive(const DiscreteModel& model) {
    FockTruncation t;
    for (const auto& mode : model.modes()) {
        if (mode.omega_cm1 == 0.0) {
            t.caps.push_back(10);
            continue;
        }
        const double ratio = mode.g_cm1 / mode.omega_cm1;
        const double estimate = std::ceil(8.0 * ratio * ratio) + 3.0;
        t.caps.push_back(static_cast<int>(std::min(10.0, estimate)));
    }
    return t;
}

FockTruncation FockTruncation::uniform(const DiscreteModel& model, int cap) {
    if (cap < 1) throw InputError("Fock truncation: caps must be >= 1");
    FockTruncation t;
    t.caps.assign(static_cast<std::size_t>(model.total_modes()), cap);
    return t;
}

Index FockTruncation::dimension(Index system_dim, Index max_dimension) const {
    double dim = static_cast<double>(system_dim);
    for (int cap : caps) {
        if (cap < 1) throw InputError("Fock truncation: caps must be >= 1");
        dim *= cap + 1;
    }
    if (dim > static_cast<double>(max_dimension)) {
        std::ostringstream msg;
        msg << "Fock space dimension " << dim << " exceeds the cap of " << max_dimension;
        throw ResourceError(msg.str());
    }
    return static_cast<Index>(dim);
}

// ------------------------------ Hamiltonian ---------------------------------

FockHamiltonian::FockHamiltonian(const DiscreteModel& model, const FockTruncation& truncation,
                                 Index max_dimension) {
    const auto modes = model.modes();
    if (truncation.caps.size() != modes.size()) {
        throw InputError("Fock truncation has " + std::to_string(truncation.caps.size()) +
                         " caps for " + std::to_string(modes.size()) + " modes");
    }
    system_dim_ = model.system().dim();
    const Index total = truncation.dimension(system_dim_, max_dimension);
    bath_dim_ = total / system_dim_;

    h_s_ = model.system().h_s;
    for (const auto& c : model.system().couplings) v_sb_.push_back(c.v_sb);

    Index stride = bath_dim_;
    bath_energy_ = Eigen::VectorXd::Zero(bath_dim_);
    for (std::size_t k = 0; k < modes.size(); ++k) {
        const int cap = truncation.caps[k];
        stride /= cap + 1;
        modes_.push_back({modes[k].coupling, modes[k].g_cm1, stride, cap});
        for (Index b = 0; b < bath_dim_; ++b)
            bath_energy_[b] += modes[k].omega_cm1 * static_cast<double>((b / stride) % (cap + 1));
    }
}

void FockHamiltonian::apply(const ComplexVector& in, ComplexVector& out) const {
    const Index dim = dimension();
    if (in.size() != dim) throw InputError("FockHamiltonian::apply: dimension mismatch");
    out.resize(dim);
    Eigen::Map<const ComplexMatrix> x(in.data(), bath_dim_, system_dim_);
    Eigen::Map<ComplexMatrix> y(out.data(), bath_dim_, system_dim_);
    for (Index s = 0; s < system_dim_; ++s) {
        y.col(s).array() = bath_energy_.array() * x.col(s).array();
        for (Index r = 0; r < system_dim_; ++r)
            if (h_s_(s, r) != Complex{}) y.col(s) += h_s_(s, r) * x.col(r);
    }

    ComplexMatrix phi(bath_dim_, system_dim_);
    std::size_t current = static_cast<std::size_t>(-1);
    for (const auto& mode : modes_) {
        if (mode.coupling != current) {
            const auto& v = v_sb_[mode.coupling];
            for (Index s = 0; s < system_dim_; ++s) {
                phi.col(s).setZero();
                for (Index r = 0; r < system_dim_; ++r)
                    if (v(s, r) != Complex{}) phi.col(s) += v(s, r) * x.col(r);
            }
            current = mode.coupling;
        }
        if (mode.g == 0.0) continue;
        const Index stride = mode.stride;
        const Index block = stride * (mode.cap + 1);
        for (Index s = 0; s < system_dim_; ++s) {
            const Complex* src = phi.col(s).data();
            Complex* dst = y.col(s).data();
            for (Index base = 0; base < bath_dim_; base += block) {
                for (int q = 0; q <= mode.cap; ++q) {
                    Complex* d = dst + base + q * stride;
                    if (q > 0) {
                        const double up = mode.g * std::sqrt(static_cast<double>(q));
                        const Complex* lower = src + base + (q - 1) * stride;
                        for (Index i = 0; i < stride; ++i) d[i] += up * lower[i];
                    }
                    if (q < mode.cap) {
                        const double down = mode.g * std::sqrt(static_cast<double>(q + 1));
                        const Complex* upper = src + base + (q + 1) * stride;
                        for (Index i = 0; i < stride; ++i) d[i] += down * upper[i];
                    }
                }
            }
        }
    }
}

ComplexMatrix FockHamiltonian::dense() const {
    const Index dim = dimension();
    ComplexMatrix h(dim, dim);
    ComplexVector e = ComplexVector::Zero(dim);
    ComplexVector col;
    for (Index j = 0; j < dim; ++j) {
        e[j] = 1.0;
        apply(e, col);
        h.col(j) = col;
        e[j] = 0.0;
    }
    return h;
}

// ------------------------------ Propagation ---------------------------------

double lanczos_step(const FockHamiltonian& h, ComplexVector& psi, double tau_fs, int krylov_dim,
                    double* energy_out) {
    if (krylov_dim < 1) throw InputError("lanczos: krylov_dim must be >= 1");
    const double nu = psi.norm();
    if (nu == 0.0) {
        if (energy_out) *energy_out = 0.0;
        return 0.0;
    }

    std::vector<ComplexVector> basis;
    basis.reserve(static_cast<std::size_t>(krylov_dim));
    basis.push_back(psi / nu);
    std::vector<double> alpha;
    std::vector<double> beta;
    double beta_last = 0.0;
    bool happy = false;
    ComplexVector w;
    double scale = 1.0;

    for (int j = 0; j < krylov_dim; ++j) {
        const auto& v = basis[static_cast<std::size_t>(j)];
        h.apply(v, w);
        double a = v.dot(w).real();
        if (j == 0 && energy_out) *energy_out = a * nu * nu;
        w -= a * v;
        if (j > 0) w -= beta.back() * basis[static_cast<std::size_t>(j - 1)];
        // One pass of local reorthogonalization.
        const Complex c0 = v.dot(w);
        w -= c0 * v;
        a += c0.real();
        if (j > 0) w -= basis[static_cast<std::size_t>(j - 1)].dot(w) * basis[static_cast<std::size_t>(j - 1)];
        alpha.push_back(a);
        const double b = w.norm();
        scale = std::max({scale, std::abs(a), b});
        if (b <= 1e-13 * scale) {
            happy = true;
            break;
        }
        if (j == krylov_dim - 1) {
            beta_last = b;
            break;
        }
        beta.push_back(b);
        basis.push_back(w / b);
    }

    const Index k = static_cast<Index>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (Index i = 0; i < k; ++i) {
        t(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(t);
    const double rate = units::angular_frequency(1.0) * tau_fs;
    ComplexVector coeffs = ComplexVector::Zero(k);
    for (Index l = 0; l < k; ++l) {
        const Complex ph = std::polar(1.0, -rate * eig.eigenvalues()[l]);
        coeffs += (ph * eig.eigenvectors()(0, l)) * eig.eigenvectors().col(l).cast<Complex>();
    }

    psi.setZero();
    for (Index l = 0; l < k; ++l) psi += (nu * coeffs[l]) * basis[static_cast<std::size_t>(l)];
    return happy ? 0.0 : nu * beta_last * std::abs(coeffs[k - 1]);
}

namespace {

void record(const FockHamiltonian& h, const ComplexVector& psi, double t,
            const PropagationOptions& options, PropagationResult& out, ComplexVector& scratch) {
    const Index d = h.system_dim();
    Eigen::Map<const ComplexMatrix> x(psi.data(), h.bath_dim(), d);
    out.times.push_back(t);
    for (Index s = 0; s < d; ++s) out.populations[static_cast<std::size_t>(s)].push_back(x.col(s).squaredNorm());
    if (d > 1) out.coherence.push_back(x.col(options.coherence_col).dot(x.col(options.coherence_row)));
    out.norm.push_back(psi.norm());
    h.apply(psi, scratch);
    out.energy.push_back(psi.dot(scratch).real());
}

} // namespace

PropagationResult propagate(const DiscreteModel& model, const FockTruncation& truncation,
                            const ComplexVector& system_state, const PropagationOptions& options) {
    if (!(options.dt_fs > 0.0) || !(options.t_max_fs >= 0.0))
        throw InputError("propagate: need dt > 0 and t_max >= 0");
    if (!(options.tol > 0.0)) throw InputError("propagate: tol must be > 0");
    const Index d = model.system().dim();
    if (system_state.size() != d) throw InputError("propagate: initial state has the wrong dimension");
    if (std::abs(system_state.norm() - 1.0) > 1e-10) throw InputError("propagate: initial state is not normalized");
    if (d > 1) {
        const auto in_range = [d](Index i) { return i >= 0 && i < d; };
        if (!in_range(options.coherence_row) || !in_range(options.coherence_col))
            throw InputError("propagate: coherence indices out of range");
    }

    const FockHamiltonian h(model, truncation, options.max_dimension);
    ComplexVector psi = ComplexVector::Zero(h.dimension());
    for (Index s = 0; s < d; ++s) psi[s * h.bath_dim()] = system_state[s];

    const auto steps = static_cast<long>(std::llround(options.t_max_fs / options.dt_fs));
    PropagationResult out;
    out.populations.resize(static_cast<std::size_t>(d));
    ComplexVector scratch;
    record(h, psi, 0.0, options, out, scratch);

    for (long step = 1; step <= steps; ++step) {
        bool accepted = false;
        for (int halvings = 0; halvings <= 3 && !accepted; ++halvings) {
            const int substeps = 1 << halvings;
            ComplexVector trial = psi;
            double worst = 0.0;
            for (int q = 0; q < substeps; ++q) {
                worst = std::max(worst, lanczos_step(h, trial, options.dt_fs / substeps, options.krylov_dim));
                if (worst > options.tol) break;
            }
            if (worst <= options.tol) {
                psi = std::move(trial);
                accepted = true;
                out.max_halvings = std::max(out.max_halvings, halvings);
            }
        }
        if (!accepted) {
            std::ostringstream msg;
            msg << "propagate: Lanczos error above tol " << options.tol << " at t = "
                << static_cast<double>(step) * options.dt_fs
                << " fs even with dt/8; increase krylov_dim or reduce dt";
            throw ConvergenceError(msg.str());
        }
        record(h, psi, static_cast<double>(step) * options.dt_fs, options, out, scratch);
    }
    return out;
}

// ------------------------------- Dephasing ----------------------------------

namespace {

bool is_diagonal(const ComplexMatrix& m) {
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = 0; j < m.cols(); ++j)
            if (i != j && m(i, j) != Complex{0.0, 0.0}) return false;
    return true;
}

} // namespace

bool is_pure_dephasing(const DiscreteModel& model) {
    const auto& sys = model.system();
    if (sys.dim() != 2 || !is_diagonal(sys.h_s)) return false;
    return std::all_of(sys.couplings.begin(), sys.couplings.end(),
                       [](const SystemCoupling& c) { return is_diagonal(c.v_sb); });
}

std::vector<double> dephasing_gamma(const DiscreteModel& model, const std::vector<double>& times_fs) {
    if (!is_pure_dephasing(model))
        throw InputError("dephasing_gamma: needs a two-level system with diagonal H_S and couplings");
    const auto& couplings = model.system().couplings;
    std::vector<double> gamma(times_fs.size(), 0.0);
    for (const auto& mode : model.modes()) {
        if (mode.omega_cm1 == 0.0) throw InputError("dephasing_gamma: zero-frequency mode");
        const auto& v = couplings[mode.coupling].v_sb;
        const double dv = (v(0, 0) - v(1, 1)).real();
        const double amp = dv * dv * mode.g_cm1 * mode.g_cm1 / (mode.omega_cm1 * mode.omega_cm1);
        const double rate = units::angular_frequency(mode.omega_cm1);
        for (std::size_t i = 0; i < times_fs.size(); ++i) {
            const double half = std::sin(0.5 * rate * times_fs[i]);
            gamma[i] += 2.0 * amp * half * half;  // 1 - cos x = 2 sin^2(x/2)
        }
    }
    return gamma;
}

// --------------------------- Convergence study ------------------------------

double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw InputError("sup_distance: series lengths differ");
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    return d;
}

ConvergenceReport convergence_study(const NoiseKernel& kernel, const SystemSpec& system,
                                    const std::vector<double>& tol_sweep, const FdrGrid& grid,
                                    const ConvergenceOptions& options) {
    if (tol_sweep.empty()) throw InputError("convergence_study: empty tolerance sweep");
    validate_system(system);
    std::set<std::string> labels;
    for (const auto& c : system.couplings) labels.insert(c.bath_label);

    ConvergenceReport report;
    for (double tol : tol_sweep) {
        BathModel bath = discretize_bath(kernel, grid, tol, options.discretize);
        report.tols.push_back(tol);
        report.mode_counts.push_back(bath.mode_count());
        report.id_ranks.push_back(bath.diagnostics.id_rank);
        report.bcf_rel_errors.push_back(bath.diagnostics.errors.rel_error);

        std::vector<LabeledBath> baths;
        for (const auto& label : labels) baths.push_back({label, bath});
        const DiscreteModel model = build_model(system, std::move(baths));

        if (is_pure_dephasing(model)) {
            report.observable = "dephasing_gamma";
            if (report.times.empty()) report.times = grid.times();
            report.series.push_back(dephasing_gamma(model, report.times));
        } else {
            report.observable = "population_0";
            ComplexVector psi0 = ComplexVector::Zero(system.dim());
            psi0[0] = 1.0;
            auto result = propagate(model, FockTruncation::adaptive(model), psi0, options.propagation);
            if (report.times.empty()) report.times = result.times;
            report.series.push_back(std::move(result.populations[0]));
        }
    }
    for (std::size_t i = 1; i < report.series.size(); ++i)
        report.distances.push_back(sup_distance(report.series[i], report.series[i - 1]));
    report.monotone = true;
    for (std::size_t i = 1; i < report.distances.size(); ++i)
        if (report.distances[i] > (1.0 + options.slack) * report.distances[i - 1]) report.monotone = false;
    return report;
}

} // namespace bathkit
