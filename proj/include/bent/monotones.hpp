#pragma once

#include <vector>

#include "bent/schmidt.hpp"

namespace bent {

/// Tail sums e_k = sum_{i >= k} lambda_i, stored 0-based (e[0] == 1).
struct MonotoneVector {
    std::vector<double> e;
};

struct EnsembleBranch {
    double probability;
    SchmidtVector target;
};

/// Optimal single-shot conversion probability and the 1-based index k0 of the
/// monotone ratio that attains the minimum.
struct ConversionProbability {
    double p;
    int k0;
};

MonotoneVector vidal_monotones(const SchmidtVector &lambda);

/// True iff `from` can be converted to `to` deterministically (majorization).
bool can_reach(const SchmidtVector &from, const SchmidtVector &to);

ConversionProbability success_probability(const SchmidtVector &from, const SchmidtVector &to);

/// True iff `from` -> {p_j, target_j} is achievable by LOCC on average.
bool ensemble_feasible(const SchmidtVector &from, const std::vector<EnsembleBranch> &branches);

/// Given an optimal protocol from -> {P, to; p_j, residual_j}, checks that every
/// residual has vanishing monotone at the minimizing index k0.
bool check_optimal_residuals(const SchmidtVector &from, const SchmidtVector &to,
                             const std::vector<EnsembleBranch> &branches);

}  // namespace bent
