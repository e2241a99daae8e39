#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bent/measures.hpp"
#include "bent/schmidt.hpp"

namespace bent {

enum class RowLabel { Generic, SourceOfPhi, AccessibleFromPhi, Incomparable, ProductState };
std::string label_name(RowLabel label);

/// Source when psi can reach phi, accessible when phi can reach psi
/// (source wins for LU-equivalent states), incomparable otherwise.
RowLabel relation_label(const SchmidtVector &psi, const SchmidtVector &phi);

struct ScanRow {
    SchmidtVector state;
    std::vector<double> values;
    RowLabel label = RowLabel::Generic;
};

struct ScanConfig {
    int d = 3;
    std::vector<MeasureId> ids;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::optional<SchmidtVector> phi;
    /// Draw tensor products of two independent uniform sqrt(d) x sqrt(d) states.
    bool products = false;
};

std::vector<ScanRow> scan(const ScanConfig &config);

/// Header lambda_1..lambda_d, one column per measure, then label.
void write_scan_csv(std::ostream &out, int d, const std::vector<MeasureId> &ids, const std::vector<ScanRow> &rows);
/// 12 significant digits.
std::string format_number(double x);

struct BoundaryFamily {
    std::string name;
    int d = 3;
    std::string parameter;  // lambda_1 or lambda_3
    double t_min = 0;
    double t_max = 0;
    std::function<SchmidtVector(double)> at;
};

std::vector<std::string> family_names(int d);
/// The extreme-point families whose images bound (E_s, generalizations) plots.
std::vector<std::string> envelope_family_names(int d);
/// phi is required by white-line (3x3 target) and used as the second factor
/// by product-pair (2x2, default maximally entangled).
BoundaryFamily boundary_family(int d, const std::string &name, const std::optional<SchmidtVector> &phi = {});

struct CurveRow {
    std::string curve;
    double t = 0;
    SchmidtVector state;
    std::vector<double> values;
};

/// steps + 1 states uniformly spaced in the family parameter.
std::vector<CurveRow> boundary(int d, const std::string &name, int steps, const std::vector<MeasureId> &ids,
                               const std::optional<SchmidtVector> &phi = {});

/// Curves that bound the source and accessible images of phi: each fixes one
/// or two Vidal monotones at their phi value plus one coefficient equality.
std::vector<CurveRow> image_boundaries(const SchmidtVector &phi, const std::vector<MeasureId> &ids, int steps);

void write_curve_csv(std::ostream &out, int d, const std::vector<MeasureId> &ids, const std::vector<CurveRow> &rows);

enum class Direction { From, To };

struct PsuccRow {
    SchmidtVector state;
    double p = 0;
    int k0 = 0;
    std::vector<double> values;
};

/// From: P(phi -> psi); To: P(psi -> phi), for uniformly drawn psi.
std::vector<PsuccRow> psucc_field(const SchmidtVector &phi, Direction direction, std::uint64_t n, std::uint64_t seed,
                                  const std::vector<MeasureId> &ids = {});
void write_psucc_csv(std::ostream &out, int d, const std::vector<MeasureId> &ids, const std::vector<PsuccRow> &rows);

struct EnvelopeBin {
    double lo = 0, hi = 0;
    std::size_t count = 0;
    // Per secondary measure.
    std::vector<double> scan_min, scan_max, family_min, family_max;
    /// Distance (max norm over all measures) from the bin's extremal scan
    /// points to the nearest family point.
    double attainment = 0;
    /// How far scan extrema poke outside the family extrema of the bin.
    double excess = 0;
};

struct EnvelopeReport {
    std::vector<EnvelopeBin> bins;
    double worst_attainment = 0;
    double worst_excess = 0;
};

/// Bins scan rows by the first measure and compares per-bin extrema of the
/// others against densely sampled envelope families.
EnvelopeReport envelope_check(int d, const std::vector<MeasureId> &ids, const std::vector<ScanRow> &rows,
                              int bins = 100, int family_steps = 200000);

struct OptimizedPoint {
    double level = 0;
    SchmidtVector state;
    std::vector<double> values;
    double objective = 0;
    double residual = 0;  // |fixed measure - level|
};

/// Maximizes (or minimizes) `target` subject to `fixed` == level on the
/// simplex of p-coordinates. Steps follow the gradient projected onto the level
/// set, falling back to compass directions at kinks, and every trial point is
/// pulled back onto the level set. Best of `restarts` random starts; returns
/// nothing when the level cannot be met within 1e-6.
std::optional<OptimizedPoint> optimize_at_level(int d, MeasureId target, MeasureId fixed, double level, bool maximize,
                                                int restarts, std::uint64_t seed);

/// Levels i / steps, i = 0..steps, of the fixed measure.
std::vector<OptimizedPoint> numerical_boundary(int d, MeasureId target, MeasureId fixed, bool maximize, int steps,
                                               int restarts, std::uint64_t seed);

}  // namespace bent
