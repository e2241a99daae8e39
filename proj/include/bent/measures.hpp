#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bent/schmidt.hpp"

namespace bent {

struct MeasureId {
    enum class Kind { Es, EsGen, Ea, Ef, Neg, Geo };
    Kind kind = Kind::Es;
    int k = 0;  // target embedding dimension; EsGen only

    static MeasureId es() {
        return {Kind::Es, 0};
    }
    static MeasureId es_gen(int k) {
        return {Kind::EsGen, k};
    }
    static MeasureId ea() {
        return {Kind::Ea, 0};
    }
    static MeasureId ef() {
        return {Kind::Ef, 0};
    }
    static MeasureId neg() {
        return {Kind::Neg, 0};
    }
    static MeasureId geo() {
        return {Kind::Geo, 0};
    }

    /// Column / JSON name: es, esgen4, ea, ef, neg, geo.
    std::string name() const;

    bool operator==(const MeasureId &) const = default;
};

/// Accepts es, ea, ef, neg, geo, esgen:K and esgenK.
MeasureId parse_measure_id(std::string_view text);
std::vector<MeasureId> parse_measure_ids(std::string_view comma_separated);

struct MeasurePoint {
    SchmidtVector state;
    std::vector<std::pair<MeasureId, double>> values;
};

// Source entanglement, three algebraically equivalent routes.
double es_permutation(const SchmidtVector &lambda);
double es_simplified(const SchmidtVector &lambda);
/// Unclamped homogeneous form; accepts unnormalized, unsorted input.
double es_simplified_raw(std::span<const double> lambda);
/// Unclamped; ignores p_d and accepts unnormalized probes.
double es_p_form(const PCoordinates &p);

/// Closed-form polynomial / piecewise-polynomial expressions for d <= 4.
double evaluate_closed(const SchmidtVector &lambda, MeasureId id);

/// Normalization sup_phi E_s(Psi^k(phi)) over d x d states, attained at the
/// maximally entangled state. Cached per (d, k).
double generalization_constant(int d, int k);
double es_generalized(const SchmidtVector &lambda, int k);

double ent_formation(const SchmidtVector &lambda);
double negativity(const SchmidtVector &lambda);
double geometric(const SchmidtVector &lambda);

SchmidtVector tensor_schmidt(const SchmidtVector &a, const SchmidtVector &b);

/// Any measure by id. Ea uses closed forms and is available for d <= 4 only.
double evaluate(const SchmidtVector &lambda, MeasureId id);
MeasurePoint measure_point(const SchmidtVector &lambda, const std::vector<MeasureId> &ids);

}  // namespace bent
