#pragma once

#include <Eigen/Dense>

#include <vector>

namespace bent {

/// Linear matrix inequality in max-min-eigenvalue form:
///   maximize t  subject to  Q_b - t I >= 0 for every block b,  E x = rhs,
///   t <= t_cap,  sum_b trace(Q_b) <= trace_cap.
/// The unknown vector x holds, per block, the upper triangle of Q_b in
/// row-major order, followed by `free_vars` unconstrained scalars.
struct LmiProblem {
    std::vector<int> block_sizes;
    int free_vars = 0;
    Eigen::MatrixXd E;
    Eigen::VectorXd rhs;

    int gram_vars() const;
    /// Offset of block b inside x.
    int block_offset(int b) const;
};

/// Offset of entry (i, j) inside an n x n block's upper triangle.
int triangle_index(int n, int i, int j);

struct SdpOptions {
    int max_iterations = 500;
    double gap_tolerance = 1e-9;
    double t_cap = 1.0;
    /// Keeps the barrier bounded when the Gram slice is unbounded; raised
    /// automatically if the starting point already exceeds it.
    double trace_cap = 1e4;
};

struct SdpResult {
    enum class Status { Converged, Inconsistent, IterationLimit };
    Status status = Status::Converged;
    double t = 0;
    std::vector<Eigen::MatrixXd> blocks;
    Eigen::VectorXd free;
    /// Dual estimates W_b >= 0 from the final barrier iterate.
    std::vector<Eigen::MatrixXd> duals;
    double equality_residual = 0;
    int iterations = 0;
};

/// Log-barrier path following on the affine slice of the equality
/// constraints. Throws NumericalBreakdown on non-finite iterates.
SdpResult solve_max_min_eigenvalue(const LmiProblem &problem, const SdpOptions &options = {});

}  // namespace bent
