// dynamics.hpp - Desk-scale validation of discrete bath models
//
// Exact wavefunction propagation in a truncated Fock space (matrix-free
// Lanczos exponential, bath starts in the vacuum) and the closed-form
// independent-boson dephasing function used as an any-M oracle.

#pragma once

#include "bathkit/discretize.hpp"
#include "bathkit/hamiltonian.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace bathkit {

using ComplexVector = Eigen::VectorXcd;

inline constexpr Eigen::Index default_max_dimension = Eigen::Index{1} << 22;

// Occupation caps n_k, one per entry of DiscreteModel::modes().
struct FockTruncation {
    std::vector<int> caps;

    // n_k = min(10, ceil(8 (g_k/w_k)^2) + 3).
    static FockTruncation adaptive(const DiscreteModel& model);
    static FockTruncation uniform(const DiscreteModel& model, int cap);

    // d_s * prod(n_k + 1); throws ResourceError above max_dimension.
    Eigen::Index dimension(Eigen::Index system_dim,
                           Eigen::Index max_dimension = default_max_dimension) const;
};

// Matrix-free action of the star Hamiltonian (cm^-1) on the product basis
// |s> (x) |q_1 ... q_M>, system index most significant.
class FockHamiltonian {
public:
    FockHamiltonian(const DiscreteModel& model, const FockTruncation& truncation,
                    Eigen::Index max_dimension = default_max_dimension);

    Eigen::Index dimension() const noexcept { return system_dim_ * bath_dim_; }
    Eigen::Index system_dim() const noexcept { return system_dim_; }
    Eigen::Index bath_dim() const noexcept { return bath_dim_; }

    void apply(const ComplexVector& in, ComplexVector& out) const;
    // Dense matrix, for tests on small spaces.
    ComplexMatrix dense() const;

private:
    struct Mode {
        std::size_t coupling;
        double g;
        Eigen::Index stride;
        int cap;
    };
    Eigen::Index system_dim_{0};
    Eigen::Index bath_dim_{1};
    ComplexMatrix h_s_;
    std::vector<ComplexMatrix> v_sb_;
    Eigen::VectorXd bath_energy_;
    std::vector<Mode> modes_;
};

struct PropagationOptions {
    double t_max_fs{1000.0};
    double dt_fs{1.0};
    int krylov_dim{30};
    double tol{1e-10};
    Eigen::Index max_dimension{default_max_dimension};
    Eigen::Index coherence_row{0};
    Eigen::Index coherence_col{1};
};

struct PropagationResult {
    std::vector<double> times;
    std::vector<std::vector<double>> populations;  // [site][sample]
    std::vector<Complex> coherence;                // rho_{row,col}
    std::vector<double> norm;
    std::vector<double> energy;                    // <H>, cm^-1
    int max_halvings{0};                           // step refinements used
};

// Fixed-step Lanczos propagation of psi0 (system state; bath vacuum). A step
// whose error estimate exceeds tol is retried on dt/2, dt/4, dt/8 before a
// ConvergenceError is raised.
PropagationResult propagate(const DiscreteModel& model, const FockTruncation& truncation,
                            const ComplexVector& system_state, const PropagationOptions& options);

// psi(t + tau) = exp(-i 2 pi c H tau) psi for a single step; returns the
// Lanczos error estimate. Exposed for tests.
double lanczos_step(const FockHamiltonian& h, ComplexVector& psi, double tau_fs, int krylov_dim,
                    double* energy_out = nullptr);

// True when the model is a two-level system with diagonal H_S and diagonal couplings.
bool is_pure_dephasing(const DiscreteModel& model);

// Gamma(t) = sum_k (v_00 - v_11)^2 g_k^2 (1 - cos(2 pi c w_k t)) / w_k^2, so that
// |rho_01(t) / rho_01(0)| = exp(-Gamma(t)). For V = sigma_z the prefactor is 4.
std::vector<double> dephasing_gamma(const DiscreteModel& model, const std::vector<double>& times_fs);

struct ConvergenceOptions {
    DiscretizeOptions discretize;
    PropagationOptions propagation;
    double slack{0.2};
};

struct ConvergenceReport {
    std::string observable;  // "dephasing_gamma" or "population_0"
    std::vector<double> tols;
    std::vector<Eigen::Index> mode_counts;
    std::vector<Eigen::Index> id_ranks;
    std::vector<double> bcf_rel_errors;
    std::vector<double> times;
    std::vector<std::vector<double>> series;  // [tol][sample]
    std::vector<double> distances;            // sup |series[i+1] - series[i]|
    bool monotone{false};
};

// Discretizes the bath at each tolerance, binds it to every coupling label of
// the system and evaluates the observable. Pure-dephasing systems use the
// closed form; anything else is propagated from site 0.
ConvergenceReport convergence_study(const NoiseKernel& kernel, const SystemSpec& system,
                                    const std::vector<double>& tol_sweep, const FdrGrid& grid,
                                    const ConvergenceOptions& options = {});

// sup_t |a(t) - b(t)|
double sup_distance(const std::vector<double>& a, const std::vector<double>& b);

} // namespace bathkit
