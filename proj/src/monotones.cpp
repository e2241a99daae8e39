#include "bent/monotones.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bent/error.hpp"

namespace bent {

namespace {

constexpr double kSingleTol = 1e-12;
constexpr double kAggregateTol = 1e-10;

void require_same_dim(const SchmidtVector &a, const SchmidtVector &b) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "dimensions " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()) + " differ");
    }
}

}  // namespace

MonotoneVector vidal_monotones(const SchmidtVector &lambda) {
    MonotoneVector out;
    out.e.resize(static_cast<std::size_t>(lambda.dim()));
    double acc = 0;
    for (int k = lambda.dim() - 1; k >= 0; k--) {
        acc += lambda[k];
        out.e[static_cast<std::size_t>(k)] = acc;
    }
    out.e[0] = 1.0;
    return out;
}

bool can_reach(const SchmidtVector &from, const SchmidtVector &to) {
    require_same_dim(from, to);
    auto ef = vidal_monotones(from);
    auto et = vidal_monotones(to);
    for (std::size_t k = 0; k < ef.e.size(); k++) {
        if (ef.e[k] < et.e[k] - kSingleTol) {
            return false;
        }
    }
    return true;
}

ConversionProbability success_probability(const SchmidtVector &from, const SchmidtVector &to) {
    require_same_dim(from, to);
    auto ef = vidal_monotones(from);
    auto et = vidal_monotones(to);
    ConversionProbability best{1.0, 1};
    double best_ratio = INFINITY;
    for (std::size_t k = 0; k < ef.e.size(); k++) {
        // Ranks beyond the target's Schmidt rank impose no constraint.
        if (et.e[k] <= 0) {
            continue;
        }
        double ratio = ef.e[k] / et.e[k];
        if (ratio < best_ratio - kSingleTol) {
            best_ratio = ratio;
            best.k0 = static_cast<int>(k) + 1;
        }
    }
    best.p = std::clamp(best_ratio, 0.0, 1.0);
    return best;
}

bool ensemble_feasible(const SchmidtVector &from, const std::vector<EnsembleBranch> &branches) {
    double total = 0;
    for (const auto &b : branches) {
        require_same_dim(from, b.target);
        if (!(b.probability >= 0 && b.probability <= 1)) {
            throw Error(ErrorCode::BadProbabilities, "branch probability outside [0, 1]");
        }
        total += b.probability;
    }
    if (std::abs(total - 1.0) > kSingleTol) {
        throw Error(ErrorCode::BadProbabilities, "branch probabilities sum to " + std::to_string(total));
    }
    auto ef = vidal_monotones(from);
    std::vector<double> average(ef.e.size(), 0.0);
    for (const auto &b : branches) {
        auto eb = vidal_monotones(b.target);
        for (std::size_t k = 0; k < average.size(); k++) {
            average[k] += b.probability * eb.e[k];
        }
    }
    for (std::size_t k = 0; k < average.size(); k++) {
        if (ef.e[k] < average[k] - kAggregateTol) {
            return false;
        }
    }
    return true;
}

bool check_optimal_residuals(const SchmidtVector &from, const SchmidtVector &to,
                             const std::vector<EnsembleBranch> &branches) {
    if (branches.empty()) {
        throw Error(ErrorCode::NotOptimalProtocol, "protocol has no branches");
    }
    require_same_dim(from, to);
    require_same_dim(to, branches.front().target);
    auto optimal = success_probability(from, to);
    if (std::abs(branches.front().probability - optimal.p) > kAggregateTol) {
        throw Error(ErrorCode::NotOptimalProtocol,
                    "target branch probability " + std::to_string(branches.front().probability) +
                        " differs from optimum " + std::to_string(optimal.p));
    }
    auto k0 = static_cast<std::size_t>(optimal.k0 - 1);
    for (std::size_t j = 1; j < branches.size(); j++) {
        require_same_dim(from, branches[j].target);
        if (vidal_monotones(branches[j].target).e[k0] > kAggregateTol) {
            return false;
        }
    }
    return true;
}

}  // namespace bent
