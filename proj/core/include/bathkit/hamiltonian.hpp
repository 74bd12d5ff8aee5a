// hamiltonian.hpp - Finite-temperature system-bath star Hamiltonians
//
//   H = H_S + sum_c sum_{k in bath(c)} w_k a_ck^+ a_ck
//           + sum_c V_c sum_{k in bath(c)} g_k (a_ck^+ + a_ck)
//
// Each coupling c owns an independent copy of the modes of the bath it names,
// so several sites can reference one BathModel. Frequencies may be negative.

#pragma once

#include "bathkit/discretize.hpp"

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace bathkit {

using ComplexMatrix = Eigen::MatrixXcd;

struct SystemCoupling {
    std::string bath_label;
    ComplexMatrix v_sb;
};

struct SystemSpec {
    ComplexMatrix h_s;
    std::vector<SystemCoupling> couplings;

    Eigen::Index dim() const noexcept { return h_s.rows(); }
};

struct LabeledBath {
    std::string label;
    BathModel bath;
};

// One oscillator of the assembled model.
struct ModeRef {
    std::size_t coupling{0};
    double omega_cm1{0.0};
    double g_cm1{0.0};
};

class DiscreteModel {
public:
    const SystemSpec& system() const noexcept { return system_; }
    const std::vector<LabeledBath>& baths() const noexcept { return baths_; }

    // Throws InputError for an unknown label.
    const BathModel& bath(const std::string& label) const;

    // Couplings in order, each expanded to its bath's modes (ascending omega).
    std::vector<ModeRef> modes() const;
    Eigen::Index total_modes() const;

private:
    friend DiscreteModel build_model(SystemSpec system, std::vector<LabeledBath> baths);
    SystemSpec system_;
    std::vector<LabeledBath> baths_;
};

inline constexpr double hermiticity_tolerance = 1e-10;

// Checks dimensions, Hermiticity (within 1e-10 of max |entry|, absolute floor
// 1e-10) and that every coupling label names exactly one bath.
void validate_system(const SystemSpec& system);

DiscreteModel build_model(SystemSpec system, std::vector<LabeledBath> baths);

// Location of the first entry violating Hermiticity, or nullopt.
struct MatrixLocation {
    Eigen::Index row{0};
    Eigen::Index col{0};
};
std::optional<MatrixLocation> hermiticity_violation(const ComplexMatrix& m,
                                                    double tol = hermiticity_tolerance);

// Projector |site><site| in dimension dim.
ComplexMatrix site_projector(Eigen::Index dim, Eigen::Index site);

} // namespace bathkit
