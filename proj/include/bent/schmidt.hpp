#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bent {

/// Largest Schmidt rank accepted by the permutation-sum measures (d! terms).
inline constexpr int kMaxDim = 10;

using RandomStream = std::mt19937_64;

/// Independent stream for chunk `chunk` of a computation seeded with `seed`.
RandomStream derive_stream(std::uint64_t seed, std::uint64_t chunk);

/// Sorted (descending), normalized Schmidt coefficients of a d x d pure state.
///
/// Construct through new_sorted(); every instance satisfies the invariants
/// entries in [0, 1], non-increasing, sum 1 within 1e-12.
class SchmidtVector {
   public:
    int dim() const noexcept {
        return static_cast<int>(values_.size());
    }
    double operator[](int i) const {
        return values_[static_cast<std::size_t>(i)];
    }
    std::span<const double> values() const noexcept {
        return values_;
    }

    bool operator==(const SchmidtVector &) const = default;

    /// Wraps a vector the caller guarantees to be sorted and normalized.
    static SchmidtVector trusted(std::vector<double> values);

   private:
    explicit SchmidtVector(std::vector<double> values) : values_(std::move(values)) {
    }
    std::vector<double> values_;
};

/// Barycentric coordinates over the extreme points of the sorted simplex.
struct PCoordinates {
    std::vector<double> p;
};

SchmidtVector new_sorted(std::span<const double> raw);
inline SchmidtVector new_sorted(std::initializer_list<double> raw) {
    return new_sorted(std::span<const double>(raw.begin(), raw.size()));
}

PCoordinates to_p(const SchmidtVector &lambda);
SchmidtVector from_p(const PCoordinates &p);

/// Pads with zeros up to dimension k.
SchmidtVector embed(const SchmidtVector &lambda, int k);

/// Flat (Lebesgue) draw on the probability simplex, sorted descending.
SchmidtVector sample_uniform(int d, RandomStream &stream);

/// Maximally entangled d x d state (1/d, ..., 1/d).
SchmidtVector maximally_entangled(int d);

/// Parses "0.6,0.3,0.1" (any order) into a canonical SchmidtVector.
SchmidtVector parse_schmidt(std::string_view text);
std::string format_schmidt(const SchmidtVector &lambda);

}  // namespace bent
