#include "bent/splittings.hpp"

#include <algorithm>
#include <cmath>

#include "bent/error.hpp"

namespace bent {

namespace {

void require_qubits(int n) {
    if (n < 1 || n > kMaxQubits) {
        throw Error(ErrorCode::DimensionTooLarge, "qubit count must be in [1, 3], got " + std::to_string(n));
    }
}

}  // namespace

QubitEmbedding make_embedding(const SchmidtVector &lambda) {
    int n = 1;
    while ((1 << n) < lambda.dim()) {
        n++;
    }
    require_qubits(n);
    QubitEmbedding q{n, std::vector<double>(lambda.values().begin(), lambda.values().end())};
    q.lam.resize(std::size_t{1} << n, 0.0);
    std::sort(q.lam.begin(), q.lam.end());
    return q;
}

double splitting_geometric(const QubitEmbedding &q, QubitMask subset) {
    require_qubits(q.n);
    QubitMask full = (1u << q.n) - 1;
    if (subset == 0 || (subset & ~full) != 0) {
        throw Error(ErrorCode::EmptySubset, "subset must be a nonempty set of the " + std::to_string(q.n) + " qubits");
    }
    // Marginals group lam by the S coordinates; sorting puts the maximum on the all-ones group.
    double best = 0;
    for (QubitMask pattern = 0; pattern <= full; pattern++) {
        if ((pattern & ~subset) != 0) {
            continue;
        }
        double m = 0;
        for (std::size_t i = 0; i < q.lam.size(); i++) {
            if ((static_cast<QubitMask>(i) & subset) == pattern) {
                m += q.lam[i];
            }
        }
        best = std::max(best, m);
    }
    return std::clamp(1.0 - best, 0.0, 1.0);
}

SplittingTable all_splittings(const QubitEmbedding &q) {
    require_qubits(q.n);
    SplittingTable table{q.n, {}};
    for (QubitMask s = 1; s < (1u << q.n); s++) {
        table.geometric[s] = splitting_geometric(q, s);
    }
    return table;
}

QubitEmbedding reconstruct(int n, const SplittingTable &table) {
    require_qubits(n);
    const QubitMask full = (1u << n) - 1;
    for (QubitMask s = 1; s <= full; s++) {
        if (!table.geometric.contains(s)) {
            throw Error(ErrorCode::InconsistentTable, "missing splitting " + mask_to_key(s, n));
        }
    }
    QubitEmbedding q{n, std::vector<double>(std::size_t{1} << n, 0.0)};
    // Peel from the all-ones index downwards: lam_T = m_T - sum_{U strictly containing T} lam_U.
    std::vector<QubitMask> order;
    for (QubitMask s = 1; s <= full; s++) {
        order.push_back(s);
    }
    std::sort(order.begin(), order.end(), [](QubitMask a, QubitMask b) {
        int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
        return pa != pb ? pa > pb : a > b;
    });
    double assigned = 0;
    for (QubitMask t : order) {
        double value = 1.0 - table.geometric.at(t);
        for (QubitMask u = t + 1; u <= full; u++) {
            if ((u & t) == t) {
                value -= q.lam[u];
            }
        }
        q.lam[t] = value;
        assigned += value;
    }
    q.lam[0] = 1.0 - assigned;
    for (double &v : q.lam) {
        if (v < -1e-9) {
            throw Error(ErrorCode::InconsistentTable, "reconstructed coefficient " + std::to_string(v) + " < 0");
        }
        v = std::max(v, 0.0);
    }
    for (std::size_t i = 0; i + 1 < q.lam.size(); i++) {
        if (q.lam[i] > q.lam[i + 1] + 1e-9) {
            throw Error(ErrorCode::InconsistentTable, "reconstructed coefficients are not sorted by index");
        }
    }
    return q;
}

std::string mask_to_key(QubitMask mask, int n) {
    std::string key(static_cast<std::size_t>(n), '0');
    for (int k = 1; k <= n; k++) {
        if (mask & (1u << (n - k))) {
            key[static_cast<std::size_t>(k - 1)] = '1';
        }
    }
    return key;
}

QubitMask key_to_mask(const std::string &key) {
    int n = static_cast<int>(key.size());
    if (n < 1 || n > kMaxQubits) {
        throw Error(ErrorCode::ParseError, "splitting key '" + key + "' must have 1 to 3 characters");
    }
    QubitMask mask = 0;
    for (int k = 1; k <= n; k++) {
        char c = key[static_cast<std::size_t>(k - 1)];
        if (c != '0' && c != '1') {
            throw Error(ErrorCode::ParseError, "splitting key '" + key + "' must be a bit string");
        }
        if (c == '1') {
            mask |= 1u << (n - k);
        }
    }
    return mask;
}

}  // namespace bent
