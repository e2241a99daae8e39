#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bent/measures.hpp"
#include "bent/schmidt.hpp"

namespace bent {

struct VolumeEstimate {
    double fraction = 0;
    double std_error = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 0;
};

/// Monte Carlo estimate of E_s(phi): one minus the fraction of uniformly drawn
/// states that can reach phi.
VolumeEstimate mc_source_entanglement(const SchmidtVector &phi, std::uint64_t n, std::uint64_t seed);
/// Monte Carlo estimate of E_a(phi): fraction of uniformly drawn states phi can reach.
VolumeEstimate mc_accessible_entanglement(const SchmidtVector &phi, std::uint64_t n, std::uint64_t seed);

struct Polygon2D {
    std::vector<std::pair<double, double>> vertices;  // counterclockwise
};

/// Shoelace area; non-negative for counterclockwise input.
double polygon_area(const Polygon2D &polygon);

enum class SetKind { Source, Accessible };

struct ExactRegion {
    Polygon2D polygon;   // (lambda_1, lambda_2) coordinates
    double area_ratio;   // area over the ordered-simplex area
    bool degenerate;     // measure-zero set; area_ratio is 0
};

/// Source or accessible set of a 3x3 state as an exact polygon. The ratio is
/// 1 - E_s for the source set and E_a for the accessible set.
ExactRegion exact_polygon_3(const SchmidtVector &phi, SetKind which);

struct CollisionPair {
    SchmidtVector first;
    SchmidtVector second;
    std::vector<double> first_values;
    std::vector<double> second_values;
};

/// Pairs of sampled states whose measure tuples agree within tol while their
/// Schmidt vectors differ by more than 10 tol in max norm.
std::vector<CollisionPair> injectivity_scan(const std::vector<MeasureId> &ids, int d, std::uint64_t n, double tol,
                                            std::uint64_t seed = 0, std::size_t max_pairs = 1000);

}  // namespace bent
