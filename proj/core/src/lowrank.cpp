#include "bathkit/lowrank.hpp"

#include "bathkit/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace bathkit {

using Eigen::Index;

// ---------------------------------------------------------------------------
// Interpolative decomposition
// ---------------------------------------------------------------------------

IdResult column_id(const RealMatrix& f, const IdOptions& options) {
    if (f.size() == 0) throw InputError("column_id: empty matrix");
    if (!f.allFinite()) throw InputError("column_id: matrix has non-finite entries");
    if (!(options.tol > 0.0) && !options.max_rank)
        throw InputError("column_id: need tol > 0 or max_rank");
    if (options.max_rank && *options.max_rank < 0)
        throw InputError("column_id: max_rank must be >= 0");

    const Index m = f.rows();
    const Index n = f.cols();
    Index limit = std::min(m, n);
    if (options.max_rank) limit = std::min(limit, *options.max_rank);

    RealMatrix work = f;
    std::vector<Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Index{0});

    // vn1: running residual column norms, vn2: norms at last recomputation
    // (the LAPACK xLAQP2 downdating scheme).
    RealVector vn1 = work.colwise().norm().transpose();
    RealVector vn2 = vn1;
    const double tol3z = std::sqrt(std::numeric_limits<double>::epsilon());

    RealVector householder_workspace(n);
    double r11 = 0.0;
    Index rank = 0;
    for (Index k = 0; k < limit; ++k) {
        Index p = k;
        for (Index j = k + 1; j < n; ++j)
            if (vn1[j] > vn1[p]) p = j;
        const double pivot_norm = vn1[p];
        if (k == 0) r11 = pivot_norm;
        if (pivot_norm == 0.0) break;
        if (options.tol > 0.0 && pivot_norm <= options.tol * r11) break;

        if (p != k) {
            work.col(k).swap(work.col(p));
            std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(p)]);
            std::swap(vn1[k], vn1[p]);
            std::swap(vn2[k], vn2[p]);
        }

        double tau = 0.0;
        double beta = 0.0;
        auto column = work.col(k).tail(m - k);
        column.makeHouseholderInPlace(tau, beta);
        work(k, k) = beta;
        if (k + 1 < n) {
            work.bottomRightCorner(m - k, n - k - 1)
                .applyHouseholderOnTheLeft(column.tail(m - k - 1), tau,
                                           householder_workspace.data());
        }
        ++rank;

        for (Index j = k + 1; j < n; ++j) {
            if (vn1[j] == 0.0) continue;
            double temp = std::abs(work(k, j)) / vn1[j];
            temp = std::max(0.0, 1.0 - temp * temp);
            const double ratio = vn1[j] / vn2[j];
            if (temp * ratio * ratio <= tol3z) {
                vn1[j] = k + 1 < m ? work.col(j).tail(m - k - 1).norm() : 0.0;
                vn2[j] = vn1[j];
            } else {
                vn1[j] *= std::sqrt(temp);
            }
        }
    }

    IdResult result;
    result.rank = rank;
    result.selected.assign(perm.begin(), perm.begin() + rank);
    result.interp = RealMatrix::Zero(rank, n);
    if (rank > 0) {
        const auto r11_block = work.topLeftCorner(rank, rank).triangularView<Eigen::Upper>();
        const RealMatrix coeffs = r11_block.solve(work.topRightCorner(rank, n - rank));
        for (Index i = 0; i < rank; ++i)
            result.interp(i, perm[static_cast<std::size_t>(i)]) = 1.0;
        for (Index j = 0; j < n - rank; ++j)
            result.interp.col(perm[static_cast<std::size_t>(rank + j)]) = coeffs.col(j);
    }
    result.frobenius_error_estimate =
        rank < m && rank < n ? work.bottomRightCorner(m - rank, n - rank).norm()
                             : 0.0;
    return result;
}

RealMatrix select_columns(const RealMatrix& f, const std::vector<Index>& selected) {
    RealMatrix out(f.rows(), static_cast<Index>(selected.size()));
    for (std::size_t i = 0; i < selected.size(); ++i) {
        if (selected[i] < 0 || selected[i] >= f.cols())
            throw InputError("select_columns: index out of range");
        out.col(static_cast<Index>(i)) = f.col(selected[i]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Non-negative least squares
// ---------------------------------------------------------------------------

double nnls_dual_tolerance(const RealMatrix& a, const RealVector& b, double kappa) {
    const double a_inf = a.size() ? a.cwiseAbs().rowwise().sum().maxCoeff() : 0.0;
    return kappa * a_inf * b.norm() * std::numeric_limits<double>::epsilon();
}

namespace {

// Least squares restricted to the passive columns; other entries are zero.
RealVector passive_solve(const RealMatrix& a, const RealVector& b,
                         const std::vector<char>& passive) {
    std::vector<Index> cols;
    for (Index j = 0; j < a.cols(); ++j)
        if (passive[static_cast<std::size_t>(j)]) cols.push_back(j);
    RealVector s = RealVector::Zero(a.cols());
    if (cols.empty()) return s;
    const RealMatrix sub = select_columns(a, cols);
    const RealVector sol = sub.colPivHouseholderQr().solve(b);
    for (std::size_t i = 0; i < cols.size(); ++i) s[cols[i]] = sol[static_cast<Index>(i)];
    return s;
}

} // namespace

NnlsResult nnls(const RealMatrix& a, const RealVector& b, const NnlsOptions& options) {
    if (a.rows() < 1 || a.cols() < 1) throw InputError("nnls: empty matrix");
    if (b.size() != a.rows()) throw InputError("nnls: dimension mismatch between A and b");
    if (!a.allFinite() || !b.allFinite()) throw InputError("nnls: non-finite input");

    const Index n = a.cols();
    const double dual_tol = nnls_dual_tolerance(a, b, options.kappa);
    const int max_iterations = options.max_iterations.value_or(static_cast<int>(3 * n));

    // For tall systems work on the triangular factor: ||Az - b||^2 =
    // ||Rz - Q^T b||^2 + ||b_perp||^2, and A^T(b - Az) = R^T(Q^T b - Rz).
    RealMatrix sys;
    RealVector rhs;
    double perp2 = 0.0;
    if (a.rows() > n) {
        Eigen::HouseholderQR<RealMatrix> qr(a);
        RealVector qtb = qr.householderQ().adjoint() * b;
        sys = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
        rhs = qtb.head(n);
        perp2 = qtb.tail(a.rows() - n).squaredNorm();
    } else {
        sys = a;
        rhs = b;
    }

    RealVector z = RealVector::Zero(n);
    std::vector<char> passive(static_cast<std::size_t>(n), 0);
    std::vector<char> excluded(static_cast<std::size_t>(n), 0);
    RealVector w = sys.transpose() * rhs;

    NnlsResult result;
    bool converged = false;
    int iterations = 0;
    while (true) {
        Index entering = -1;
        double best = dual_tol;
        for (Index j = 0; j < n; ++j) {
            const auto uj = static_cast<std::size_t>(j);
            if (!passive[uj] && !excluded[uj] && w[j] > best) {
                best = w[j];
                entering = j;
            }
        }
        if (entering < 0) {
            converged = true;
            break;
        }
        if (iterations >= max_iterations) break;
        passive[static_cast<std::size_t>(entering)] = 1;

        bool first_pass = true;
        bool rejected = false;
        while (true) {
            ++iterations;
            RealVector s = passive_solve(sys, rhs, passive);
            if (first_pass && s[entering] <= 0.0) {
                // Rounding made the entering column useless; skip it this round.
                passive[static_cast<std::size_t>(entering)] = 0;
                excluded[static_cast<std::size_t>(entering)] = 1;
                rejected = true;
                break;
            }
            first_pass = false;

            double alpha = std::numeric_limits<double>::infinity();
            Index blocking = -1;
            for (Index j = 0; j < n; ++j) {
                if (!passive[static_cast<std::size_t>(j)] || s[j] > 0.0) continue;
                const double step = z[j] / (z[j] - s[j]);
                if (step < alpha) {
                    alpha = step;
                    blocking = j;
                }
            }
            if (blocking < 0) {
                z = s;
                break;
            }
            z += alpha * (s - z);
            z[blocking] = 0.0;
            for (Index j = 0; j < n; ++j) {
                const auto uj = static_cast<std::size_t>(j);
                if (passive[uj] && z[j] <= 0.0) {
                    passive[uj] = 0;
                    z[j] = 0.0;
                }
            }
            if (iterations >= max_iterations) break;
        }
        if (!rejected) {
            std::fill(excluded.begin(), excluded.end(), 0);
            w = sys.transpose() * (rhs - sys * z);
        }
        if (iterations >= max_iterations && !rejected) {
            // Still check optimality below; the cap only matters if it is not met.
            bool optimal = true;
            for (Index j = 0; j < n; ++j)
                if (!passive[static_cast<std::size_t>(j)] && w[j] > dual_tol) optimal = false;
            converged = optimal;
            break;
        }
    }

    for (Index j = 0; j < n; ++j)
        if (!passive[static_cast<std::size_t>(j)]) z[j] = 0.0;

    result.z = z;
    result.residual_norm = std::sqrt((sys * z - rhs).squaredNorm() + perp2);
    result.iterations = iterations;
    result.converged = converged;
    return result;
}

} // namespace bathkit
