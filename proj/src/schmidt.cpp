#include "bent/schmidt.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "bent/error.hpp"

namespace bent {

namespace {

// Push the last ulp of normalization error into the largest entry.
void settle_leading(std::vector<double> &values) {
    if (values.size() < 2) {
        values[0] = 1.0;
        return;
    }
    double tail = std::accumulate(values.begin() + 1, values.end(), 0.0);
    values[0] = std::max(1.0 - tail, values[1]);
}

}  // namespace

RandomStream derive_stream(std::uint64_t seed, std::uint64_t chunk) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(chunk), static_cast<std::uint32_t>(chunk >> 32),
                      0x62656e74u};
    return RandomStream(seq);
}

SchmidtVector SchmidtVector::trusted(std::vector<double> values) {
    return SchmidtVector(std::move(values));
}

SchmidtVector new_sorted(std::span<const double> raw) {
    if (raw.empty()) {
        throw Error(ErrorCode::NotNormalized, "empty Schmidt vector");
    }
    double sum = 0;
    for (double v : raw) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::NotNormalized, "non-finite Schmidt coefficient");
        }
        if (v < -1e-12) {
            throw Error(ErrorCode::NegativeCoefficient, "coefficient " + std::to_string(v) + " < 0");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
        throw Error(ErrorCode::NotNormalized, "coefficients sum to " + std::to_string(sum));
    }
    std::vector<double> values(raw.begin(), raw.end());
    for (double &v : values) {
        v = std::clamp(v, 0.0, 1.0);
    }
    std::sort(values.begin(), values.end(), std::greater<>());
    double clamped_sum = std::accumulate(values.begin(), values.end(), 0.0);
    for (double &v : values) {
        v /= clamped_sum;
    }
    settle_leading(values);
    return SchmidtVector::trusted(std::move(values));
}

PCoordinates to_p(const SchmidtVector &lambda) {
    int d = lambda.dim();
    PCoordinates out;
    out.p.resize(static_cast<std::size_t>(d));
    for (int i = 0; i + 1 < d; i++) {
        out.p[static_cast<std::size_t>(i)] = (i + 1) * (lambda[i] - lambda[i + 1]);
    }
    out.p.back() = d * lambda[d - 1];
    return out;
}

SchmidtVector from_p(const PCoordinates &p) {
    int d = static_cast<int>(p.p.size());
    std::vector<double> lambda(static_cast<std::size_t>(d), 0.0);
    double acc = 0;
    for (int j = d - 1; j >= 0; j--) {
        acc += p.p[static_cast<std::size_t>(j)] / (j + 1);
        lambda[static_cast<std::size_t>(j)] = acc;
    }
    return new_sorted(lambda);
}

SchmidtVector embed(const SchmidtVector &lambda, int k) {
    if (k < lambda.dim()) {
        throw Error(ErrorCode::DimensionShrink,
                    "cannot embed dimension " + std::to_string(lambda.dim()) + " into " + std::to_string(k));
    }
    std::vector<double> values(lambda.values().begin(), lambda.values().end());
    values.resize(static_cast<std::size_t>(k), 0.0);
    return SchmidtVector::trusted(std::move(values));
}

SchmidtVector sample_uniform(int d, RandomStream &stream) {
    std::exponential_distribution<double> expo(1.0);
    std::vector<double> values(static_cast<std::size_t>(d));
    double sum = 0;
    for (double &v : values) {
        v = expo(stream);
        sum += v;
    }
    for (double &v : values) {
        v /= sum;
    }
    std::sort(values.begin(), values.end(), std::greater<>());
    settle_leading(values);
    return SchmidtVector::trusted(std::move(values));
}

SchmidtVector maximally_entangled(int d) {
    return SchmidtVector::trusted(std::vector<double>(static_cast<std::size_t>(d), 1.0 / d));
}

SchmidtVector parse_schmidt(std::string_view text) {
    std::vector<double> raw;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(',', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string token(text.substr(start, end - start));
        token.erase(0, token.find_first_not_of(" \t"));
        token.erase(token.find_last_not_of(" \t") + 1);
        double v = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
        if (token.empty() || ec != std::errc() || ptr != token.data() + token.size()) {
            throw Error(ErrorCode::ParseError, "bad Schmidt coefficient '" + token + "'");
        }
        raw.push_back(v);
        start = end + 1;
    }
    return new_sorted(raw);
}

std::string format_schmidt(const SchmidtVector &lambda) {
    std::ostringstream out;
    out.precision(12);
    for (int i = 0; i < lambda.dim(); i++) {
        if (i) {
            out << ',';
        }
        out << lambda[i];
    }
    return out.str();
}

}  // namespace bent
