#pragma once

#include <map>
#include <string>
#include <vector>

#include "bent/schmidt.hpp"

namespace bent {

inline constexpr int kMaxQubits = 3;

/// A 2^n x 2^n state viewed as 2n qubits. lam is indexed by the n-bit string
/// i_1 ... i_n (i_1 most significant) and is non-decreasing in that index.
struct QubitEmbedding {
    int n = 0;
    std::vector<double> lam;
};

/// Subsets S of B-side qubits use bit (n - k) for qubit k, so the mask lines
/// up with the index bits of lam.
using QubitMask = unsigned;

struct SplittingTable {
    int n = 0;
    std::map<QubitMask, double> geometric;  // every nonempty S -> E_g
};

/// Pads lambda with zeros to 2^n (n = ceil(log2 d)) and sorts ascending.
QubitEmbedding make_embedding(const SchmidtVector &lambda);

double splitting_geometric(const QubitEmbedding &q, QubitMask subset);
SplittingTable all_splittings(const QubitEmbedding &q);
QubitEmbedding reconstruct(int n, const SplittingTable &table);

/// "01" style key: character k - 1 is '1' iff qubit k is in S.
std::string mask_to_key(QubitMask mask, int n);
QubitMask key_to_mask(const std::string &key);

}  // namespace bent
