#include "bathkit/hamiltonian.hpp"

#include "bathkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace bathkit {

using Eigen::Index;

std::optional<MatrixLocation> hermiticity_violation(const ComplexMatrix& m, double tol) {
    if (m.rows() != m.cols()) return MatrixLocation{0, 0};
    const double scale = std::max(1.0, m.size() ? m.cwiseAbs().maxCoeff() : 0.0);
    for (Index i = 0; i < m.rows(); ++i)
        for (Index j = i; j < m.cols(); ++j)
            if (std::abs(m(i, j) - std::conj(m(j, i))) > tol * scale) return MatrixLocation{i, j};
    return std::nullopt;
}

ComplexMatrix site_projector(Index dim, Index site) {
    if (site < 0 || site >= dim) throw InputError("site_projector: site out of range");
    ComplexMatrix p = ComplexMatrix::Zero(dim, dim);
    p(site, site) = 1.0;
    return p;
}

void validate_system(const SystemSpec& system) {
    const Index d = system.h_s.rows();
    if (d < 1 || system.h_s.cols() != d) throw InputError("system: h_s must be square with dim >= 1");
    if (!system.h_s.allFinite()) throw InputError("system: h_s has non-finite entries");
    if (auto loc = hermiticity_violation(system.h_s)) {
        std::ostringstream msg;
        msg << "system: h_s is not Hermitian at (" << loc->row << ", " << loc->col << ")";
        throw InputError(msg.str());
    }
    for (std::size_t c = 0; c < system.couplings.size(); ++c) {
        const auto& v = system.couplings[c].v_sb;
        if (v.rows() != d || v.cols() != d) {
            throw InputError("system: coupling " + std::to_string(c) + " has shape " +
                             std::to_string(v.rows()) + "x" + std::to_string(v.cols()) +
                             ", expected " + std::to_string(d) + "x" + std::to_string(d));
        }
        if (!v.allFinite()) throw InputError("system: coupling " + std::to_string(c) + " has non-finite entries");
        if (auto loc = hermiticity_violation(v)) {
            std::ostringstream msg;
            msg << "system: v_sb of coupling " << c << " is not Hermitian at (" << loc->row << ", "
                << loc->col << ")";
            throw InputError(msg.str());
        }
    }
}

DiscreteModel build_model(SystemSpec system, std::vector<LabeledBath> baths) {
    validate_system(system);
    std::set<std::string> labels;
    for (const auto& b : baths) {
        if (!labels.insert(b.label).second) throw InputError("model: duplicate bath label '" + b.label + "'");
        for (const auto& mode : b.bath.modes) {
            if (!std::isfinite(mode.omega_cm1) || !std::isfinite(mode.g_cm1) || mode.g_cm1 < 0.0)
                throw InputError("model: bath '" + b.label + "' has a mode with invalid omega or g");
        }
    }
    for (const auto& c : system.couplings) {
        if (!labels.count(c.bath_label))
            throw InputError("model: coupling references unknown bath '" + c.bath_label + "'");
    }
    DiscreteModel model;
    model.system_ = std::move(system);
    model.baths_ = std::move(baths);
    return model;
}

const BathModel& DiscreteModel::bath(const std::string& label) const {
    for (const auto& b : baths_)
        if (b.label == label) return b.bath;
    throw InputError("model: unknown bath '" + label + "'");
}

std::vector<ModeRef> DiscreteModel::modes() const {
    std::vector<ModeRef> out;
    for (std::size_t c = 0; c < system_.couplings.size(); ++c)
        for (const auto& mode : bath(system_.couplings[c].bath_label).modes)
            out.push_back({c, mode.omega_cm1, mode.g_cm1});
    return out;
}

Index DiscreteModel::total_modes() const {
    Index total = 0;
    for (const auto& c : system_.couplings) total += bath(c.bath_label).mode_count();
    return total;
}

} // namespace bathkit
