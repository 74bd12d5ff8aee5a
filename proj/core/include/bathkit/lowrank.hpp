// lowrank.hpp - Column interpolative decomposition and non-negative least squares
//
// Real dense kernels used by the bath discretizer. Both routines are
// deterministic for a fixed input: pivot and entering-variable ties are
// broken by the lowest column index.

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

namespace bathkit {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

struct IdOptions {
    double tol{1e-2};                      // relative to the first pivot |R_11|
    std::optional<Eigen::Index> max_rank;  // hard cap on the returned rank
};

// f ~= f(:, selected) * interp
struct IdResult {
    Eigen::Index rank{0};
    std::vector<Eigen::Index> selected;   // pivot order
    RealMatrix interp;                    // rank x n
    double frobenius_error_estimate{0.0}; // ||R_22||_F of the truncated pivoted QR
};

// Column ID via Householder QR with column pivoting, truncated at the first
// diagonal |R_kk| <= tol * |R_11|. Throws InputError on non-finite entries or
// when neither tol > 0 nor max_rank is supplied.
IdResult column_id(const RealMatrix& f, const IdOptions& options = {});

// Gathers the columns `selected` of f in the given order.
RealMatrix select_columns(const RealMatrix& f, const std::vector<Eigen::Index>& selected);

struct NnlsOptions {
    double kappa{10.0};                    // dual tolerance multiplier
    std::optional<int> max_iterations;     // default 3 n
};

struct NnlsResult {
    RealVector z;
    double residual_norm{0.0};
    int iterations{0};
    bool converged{false};
};

// min ||A z - b||_2 s.t. z >= 0, Lawson-Hanson active-set method. Inactive
// components are exact zeros. Hitting the iteration cap returns the current
// iterate with converged == false.
NnlsResult nnls(const RealMatrix& a, const RealVector& b, const NnlsOptions& options = {});

// Dual tolerance kappa * ||A||_inf * ||b||_2 * eps used by nnls().
double nnls_dual_tolerance(const RealMatrix& a, const RealVector& b, double kappa = 10.0);

} // namespace bathkit
