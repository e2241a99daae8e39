#pragma once

#include <gmpxx.h>

#include <Eigen/Dense>
#include <json.hpp>

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "bent/measures.hpp"
#include "bent/polynomial.hpp"
#include "bent/sdp.hpp"

namespace bent {

using RationalMatrix = std::vector<std::vector<mpq_class>>;

// Measures as polynomials. The p-form uses p_1..p_{d-1} with p_d eliminated;
// the q-form substitutes p_i = q_i^2 so that p_i >= 0 holds automatically.
SparsePolynomial measure_polynomial_p(MeasureId id, int d);
SparsePolynomial measure_polynomial(MeasureId id, int d);
/// p_d = 1 - sum q_i^2, the one remaining inequality of the ordered simplex.
SparsePolynomial simplex_polynomial(int d);

/// Real system f_i >= 0, h_j = 0, g_k != 0.
struct PolynomialSystem {
    int nvars = 0;
    std::vector<SparsePolynomial> fs, hs, gs;
    std::string description;
};

/// Does some d x d state attain all target values? Encoded in q-variables.
PolynomialSystem target_system(int d, const std::vector<std::pair<MeasureId, mpq_class>> &targets);

struct ConeTerm {
    std::vector<int> factors;  // indices into fs; empty is the plain SOS term
    SparsePolynomial product;
    int degree = 0;  // degree of the SOS multiplier
    std::vector<Exponent> basis;
};

struct IdealTerm {
    int constraint = 0;
    int degree = 0;
    std::vector<Exponent> basis;
};

struct GramProblem {
    PolynomialSystem system;
    int degree = 0;
    int monoid_exponent = 1;
    SparsePolynomial g_squared;
    std::vector<ConeTerm> cone;
    std::vector<IdealTerm> ideal;
    std::vector<Exponent> rows;
    LmiProblem lmi;
};

GramProblem build_certificate_problem(const PolynomialSystem &system, int d0);

struct SosMultiplier {
    std::vector<int> factors;
    std::vector<Exponent> basis;
    RationalMatrix gram;
};

struct IdealMultiplier {
    int constraint = 0;
    SparsePolynomial polynomial;
};

/// sum_a s_a prod(f_a) + g^2 + sum_j t_j h_j = 0 with every s_a SOS.
struct Certificate {
    PolynomialSystem system;
    int degree = 0;
    int monoid_exponent = 1;
    std::vector<SosMultiplier> sos;
    std::vector<IdealMultiplier> ideal;
    double margin = 0;  // smallest Gram eigenvalue reported by the solver
};

struct NotFoundAtDegree {
    int degree = 0;
    double margin = 0;
    std::string reason;
};

using FeasibilityOutcome = std::variant<Certificate, NotFoundAtDegree>;

FeasibilityOutcome solve_feasibility(const GramProblem &problem, const SdpOptions &options = {});

struct VerificationReport {
    bool ok = false;
    double max_residual = 0;
    double min_eigenvalue = 0;
    /// Residual absorbed into the plain SOS term and positive semidefiniteness
    /// confirmed in exact arithmetic.
    bool exact = false;
    std::string diagnostic;
};

/// Recomputes the identity from the certificate alone.
VerificationReport verify_certificate(const Certificate &c);

// Plain SOS decomposition F = z^T Q z.
struct GramDecomposition {
    SparsePolynomial polynomial;
    std::vector<Exponent> basis;
    RationalMatrix gram;
    double margin = 0;
};

/// Moment functional mu with moment matrix M(mu) >= 0 and <F, mu> < 0, so
/// trace(M(mu) Q) < 0 for every Gram representation Q of F.
struct DualWitness {
    std::vector<Exponent> basis;
    SparsePolynomial::Terms moments;
    mpq_class value;
};

using SosOutcome = std::variant<GramDecomposition, DualWitness>;

SosOutcome sos_decompose(const SparsePolynomial &F, int d0);

struct DecompositionCheck {
    double max_residual = 0;
    double min_eigenvalue = 0;
};
DecompositionCheck check_decomposition(const GramDecomposition &g);

Eigen::MatrixXd moment_matrix(const DualWitness &w);
bool verify_dual_witness(const DualWitness &w, const SparsePolynomial &F);

// Exact helpers.
SparsePolynomial gram_polynomial(const std::vector<Exponent> &basis, const RationalMatrix &gram);
bool exact_psd(RationalMatrix m);
Eigen::MatrixXd to_double(const RationalMatrix &m);
/// Shortest decimal that round-trips, read back exactly.
mpq_class rationalize(double x);

nlohmann::json certificate_to_json(const Certificate &c, const VerificationReport &report);
Certificate certificate_from_json(const nlohmann::json &j);
nlohmann::json polynomial_to_json(const SparsePolynomial &p);
SparsePolynomial polynomial_from_json(const nlohmann::json &j, int nvars);

}  // namespace bent
