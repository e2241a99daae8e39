#include "bent/sdp.hpp"

#include <cmath>
#include <limits>

#include "bent/error.hpp"

namespace bent {

int LmiProblem::gram_vars() const {
    int total = 0;
    for (int n : block_sizes) {
        total += n * (n + 1) / 2;
    }
    return total;
}

int LmiProblem::block_offset(int b) const {
    int total = 0;
    for (int i = 0; i < b; i++) {
        total += block_sizes[static_cast<std::size_t>(i)] * (block_sizes[static_cast<std::size_t>(i)] + 1) / 2;
    }
    return total;
}

int triangle_index(int n, int i, int j) {
    if (i > j) {
        std::swap(i, j);
    }
    return i * n - i * (i - 1) / 2 + (j - i);
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd unpack(const VectorXd &x, int offset, int n) {
    MatrixXd m(n, n);
    for (int i = 0; i < n; i++) {
        for (int j = i; j < n; j++) {
            m(i, j) = m(j, i) = x(offset + triangle_index(n, i, j));
        }
    }
    return m;
}

int numeric_rank(const VectorXd &singular, double scale) {
    int rank = 0;
    double cutoff = 1e-10 * std::max(1.0, scale);
    for (Eigen::Index i = 0; i < singular.size(); i++) {
        if (singular(i) > cutoff) {
            rank++;
        }
    }
    return rank;
}

// Affine slice: x_gram = x0 + N y, with blocks Q_b(y) = C_b + sum_i y_i A_bi.
struct Slice {
    VectorXd x0;
    MatrixXd N;
    std::vector<MatrixXd> C;
    std::vector<std::vector<MatrixXd>> A;
    // sum_b trace(Q_b(y)) = trace0 + trace_dir . y
    double trace0 = 0;
    VectorXd trace_dir;
};

struct BarrierState {
    bool feasible = false;
    double value = 0;
    std::vector<Eigen::LLT<MatrixXd>> factors;
};

class Barrier {
   public:
    Barrier(const Slice &slice, double t_cap, double trace_cap) : s_(slice), cap_(t_cap), trace_cap_(trace_cap) {
    }

    double trace_slack(const VectorXd &y) const {
        return trace_cap_ - s_.trace0 - s_.trace_dir.dot(y);
    }

    // Q_b(y) - t I for every block.
    std::vector<MatrixXd> shifted(const VectorXd &y, double t) const {
        std::vector<MatrixXd> out;
        for (std::size_t b = 0; b < s_.C.size(); b++) {
            MatrixXd m = s_.C[b];
            for (Eigen::Index i = 0; i < y.size(); i++) {
                m.noalias() += y(i) * s_.A[b][static_cast<std::size_t>(i)];
            }
            m.diagonal().array() -= t;
            out.push_back(std::move(m));
        }
        return out;
    }

    BarrierState evaluate(const VectorXd &y, double t, double eta) const {
        BarrierState st;
        double slack = trace_slack(y);
        if (!(t < cap_) || !(slack > 0)) {
            return st;
        }
        double value = -eta * t - std::log(cap_ - t) - std::log(slack);
        for (auto &m : shifted(y, t)) {
            Eigen::LLT<MatrixXd> llt(m);
            if (llt.info() != Eigen::Success) {
                return st;
            }
            auto diag = llt.matrixLLT().diagonal();
            for (Eigen::Index i = 0; i < diag.size(); i++) {
                if (!(diag(i) > 0)) {
                    return st;
                }
                value -= 2 * std::log(diag(i));
            }
            st.factors.push_back(std::move(llt));
        }
        st.feasible = std::isfinite(value);
        st.value = value;
        return st;
    }

    // Gradient and Hessian in z = (y, t).
    void derivatives(const BarrierState &st, const VectorXd &y, double t, double eta, VectorXd &grad,
                     MatrixXd &hess) const {
        Eigen::Index r = s_.N.cols();
        grad = VectorXd::Zero(r + 1);
        hess = MatrixXd::Zero(r + 1, r + 1);
        for (std::size_t b = 0; b < s_.C.size(); b++) {
            const auto &llt = st.factors[b];
            Eigen::Index n = s_.C[b].rows();
            MatrixXd Linv = llt.matrixL().solve(MatrixXd::Identity(n, n));
            // Rows of B are vec(L^{-1} A L^{-T}) for each direction.
            MatrixXd B(r + 1, n * n);
            for (Eigen::Index i = 0; i <= r; i++) {
                MatrixXd dir = i < r ? MatrixXd(s_.A[b][static_cast<std::size_t>(i)])
                                     : MatrixXd(-MatrixXd::Identity(n, n));
                MatrixXd m = Linv * dir * Linv.transpose();
                B.row(i) = Eigen::Map<const VectorXd>(m.data(), n * n).transpose();
                grad(i) -= m.trace();
            }
            hess.noalias() += B * B.transpose();
        }
        grad(r) += -eta + 1 / (cap_ - t);
        hess(r, r) += 1 / ((cap_ - t) * (cap_ - t));
        double slack = trace_slack(y);
        grad.head(r) += s_.trace_dir / slack;
        hess.topLeftCorner(r, r).noalias() += s_.trace_dir * s_.trace_dir.transpose() / (slack * slack);
    }

    std::vector<MatrixXd> inverses(const BarrierState &st) const {
        std::vector<MatrixXd> out;
        for (const auto &llt : st.factors) {
            Eigen::Index n = llt.matrixLLT().rows();
            out.push_back(llt.solve(MatrixXd::Identity(n, n)));
        }
        return out;
    }

   private:
    const Slice &s_;
    double cap_;
    double trace_cap_;
};

}  // namespace

SdpResult solve_max_min_eigenvalue(const LmiProblem &problem, const SdpOptions &options) {
    SdpResult result;
    int ng = problem.gram_vars();
    int nf = problem.free_vars;
    Eigen::Index rows = problem.E.rows();
    MatrixXd Eg = problem.E.leftCols(ng);
    MatrixXd Ef = problem.E.rightCols(nf);
    double scale = problem.E.cwiseAbs().maxCoeff();

    // Project out the free variables: they absorb whatever lies in range(Ef).
    MatrixXd Uf(rows, 0);
    Eigen::BDCSVD<MatrixXd> svd_f;
    if (nf > 0) {
        svd_f.compute(Ef, Eigen::ComputeThinU | Eigen::ComputeThinV);
        int rank = numeric_rank(svd_f.singularValues(), scale);
        Uf = svd_f.matrixU().leftCols(rank);
    }
    MatrixXd G = Eg - Uf * (Uf.transpose() * Eg);
    VectorXd h = problem.rhs - Uf * (Uf.transpose() * problem.rhs);

    Eigen::BDCSVD<MatrixXd> svd(G, Eigen::ComputeThinU | Eigen::ComputeFullV);
    int rank = numeric_rank(svd.singularValues(), scale);
    svd.setThreshold(1e-10 * std::max(1.0, scale) / std::max(1.0, svd.singularValues()(0)));
    Slice slice;
    slice.x0 = svd.solve(h);
    double inconsistency = (G * slice.x0 - h).cwiseAbs().maxCoeff();
    if (!(inconsistency <= 1e-8 * std::max(1.0, h.cwiseAbs().maxCoeff()))) {
        result.status = SdpResult::Status::Inconsistent;
        result.t = -std::numeric_limits<double>::infinity();
        result.equality_residual = inconsistency;
        return result;
    }
    slice.N = svd.matrixV().rightCols(ng - rank);
    Eigen::Index r = slice.N.cols();
    for (std::size_t b = 0; b < problem.block_sizes.size(); b++) {
        int n = problem.block_sizes[b];
        int off = problem.block_offset(static_cast<int>(b));
        slice.C.push_back(unpack(slice.x0, off, n));
        std::vector<MatrixXd> dirs;
        for (Eigen::Index i = 0; i < r; i++) {
            dirs.push_back(unpack(slice.N.col(i), off, n));
        }
        slice.A.push_back(std::move(dirs));
    }
    slice.trace_dir = VectorXd::Zero(r);
    for (std::size_t b = 0; b < slice.C.size(); b++) {
        slice.trace0 += slice.C[b].trace();
        for (Eigen::Index i = 0; i < r; i++) {
            slice.trace_dir(i) += slice.A[b][static_cast<std::size_t>(i)].trace();
        }
    }

    Barrier barrier(slice, options.t_cap, std::max(options.trace_cap, 10 * (std::abs(slice.trace0) + 1)));
    VectorXd y = VectorXd::Zero(r);
    double lmin = std::numeric_limits<double>::infinity();
    for (const auto &c : slice.C) {
        Eigen::SelfAdjointEigenSolver<MatrixXd> es(c, Eigen::EigenvaluesOnly);
        lmin = std::min(lmin, es.eigenvalues()(0));
    }
    double t = std::min(lmin - 1, options.t_cap - 1);
    double m_total = 1;
    for (int n : problem.block_sizes) {
        m_total += n;
    }

    double eta = 1;
    int iterations = 0;
    bool converged = false;
    BarrierState st = barrier.evaluate(y, t, eta);
    if (!st.feasible) {
        throw Error(ErrorCode::NumericalBreakdown, "barrier start point is not interior");
    }
    while (iterations < options.max_iterations) {
        // Centering; stalled phases are cut short since the next eta recenters anyway.
        for (int inner = 0; inner < 50 && iterations < options.max_iterations; inner++) {
            VectorXd grad;
            MatrixXd hess;
            barrier.derivatives(st, y, t, eta, grad, hess);
            hess.diagonal().array() += 1e-14 * std::max(1.0, hess.diagonal().cwiseAbs().maxCoeff());
            VectorXd dz = hess.ldlt().solve(-grad);
            if (!dz.allFinite()) {
                throw Error(ErrorCode::NumericalBreakdown, "non-finite Newton direction");
            }
            double decrement = -grad.dot(dz);
            iterations++;
            if (decrement / 2 < 1e-10) {
                break;
            }
            double step = 1;
            BarrierState next;
            while (step > 1e-14) {
                next = barrier.evaluate(y + step * dz.head(r), t + step * dz(r), eta);
                if (next.feasible && next.value <= st.value - 0.25 * step * decrement) {
                    break;
                }
                step *= 0.5;
            }
            if (!(step > 1e-14)) {
                break;
            }
            y += step * dz.head(r);
            t += step * dz(r);
            st = std::move(next);
        }
        if (m_total / eta < options.gap_tolerance) {
            converged = true;
            break;
        }
        eta *= 8;
        st = barrier.evaluate(y, t, eta);
    }

    result.status = converged ? SdpResult::Status::Converged : SdpResult::Status::IterationLimit;
    result.t = t;
    result.iterations = iterations;
    VectorXd xg = slice.x0 + slice.N * y;
    for (std::size_t b = 0; b < problem.block_sizes.size(); b++) {
        result.blocks.push_back(unpack(xg, problem.block_offset(static_cast<int>(b)), problem.block_sizes[b]));
    }
    for (auto &s : barrier.inverses(st)) {
        result.duals.push_back(s / eta);
    }
    if (nf > 0) {
        svd_f.setThreshold(1e-10 * std::max(1.0, scale) / std::max(1.0, svd_f.singularValues()(0)));
        result.free = svd_f.solve(problem.rhs - Eg * xg);
    } else {
        result.free = VectorXd(0);
    }
    VectorXd x(ng + nf);
    x << xg, result.free;
    result.equality_residual = (problem.E * x - problem.rhs).cwiseAbs().maxCoeff();
    if (!std::isfinite(result.t) || !x.allFinite()) {
        throw Error(ErrorCode::NumericalBreakdown, "solver produced non-finite values");
    }
    return result;
}

}  // namespace bent
