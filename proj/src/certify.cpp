#include "bent/certify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "bent/error.hpp"

namespace bent {

namespace {

constexpr std::size_t kMaxBasis = 50;

void require_poly_dim(int d) {
    if (d < 2 || d > kMaxDim) {
        throw Error(ErrorCode::UnsupportedDim, "polynomial measures need 2 <= d <= " + std::to_string(kMaxDim));
    }
}

Exponent zero_exponent(int n) {
    return Exponent(static_cast<std::size_t>(n), 0);
}

Exponent add_exponents(const Exponent &a, const Exponent &b) {
    Exponent out(a.size());
    for (std::size_t i = 0; i < a.size(); i++) {
        out[i] = a[i] + b[i];
    }
    return out;
}

SparsePolynomial double_exponents(const SparsePolynomial &p) {
    SparsePolynomial out(p.nvars());
    for (const auto &[e, c] : p.terms()) {
        Exponent doubled = e;
        for (auto &v : doubled) {
            v *= 2;
        }
        out.add_term(doubled, c);
    }
    return out;
}

// Schmidt coefficients as linear forms in p_1..p_{d-1}.
std::vector<SparsePolynomial> lambda_forms(int d) {
    int n = d - 1;
    std::vector<SparsePolynomial> p;
    SparsePolynomial last = SparsePolynomial::constant(n, 1);
    for (int i = 0; i < n; i++) {
        p.push_back(SparsePolynomial::variable(n, i));
        last -= p.back();
    }
    p.push_back(last);
    std::vector<SparsePolynomial> lambda(static_cast<std::size_t>(d), SparsePolynomial(n));
    for (int j = 0; j < d; j++) {
        for (int i = j; i < d; i++) {
            lambda[static_cast<std::size_t>(j)] += p[static_cast<std::size_t>(i)] * mpq_class(1, i + 1);
        }
    }
    return lambda;
}

// 1 - sum over permutations of (sigma . lambda)^{k-1} / prod(sigma_i - sigma_{i+1}),
// with lambda zero-padded from d to k entries.
SparsePolynomial raw_source_polynomial(int d, int k) {
    auto lambda = lambda_forms(d);
    std::vector<int> sigma(static_cast<std::size_t>(k));
    std::iota(sigma.begin(), sigma.end(), 1);
    std::map<std::vector<int>, mpq_class> weights;
    do {
        mpz_class denom = 1;
        for (int i = 0; i + 1 < k; i++) {
            denom *= sigma[static_cast<std::size_t>(i)] - sigma[static_cast<std::size_t>(i) + 1];
        }
        std::vector<int> key(sigma.begin(), sigma.begin() + d);
        mpq_class w(mpz_class(1), denom);
        w.canonicalize();
        weights[key] += w;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    SparsePolynomial out = SparsePolynomial::constant(d - 1, 1);
    for (const auto &[key, w] : weights) {
        if (w == 0) {
            continue;
        }
        SparsePolynomial dot(d - 1);
        for (int i = 0; i < d; i++) {
            dot += lambda[static_cast<std::size_t>(i)] * mpq_class(key[static_cast<std::size_t>(i)]);
        }
        out -= dot.pow(static_cast<unsigned>(k - 1)) * w;
    }
    return out;
}

std::string rational_to_string(const mpq_class &q) {
    mpz_class den = q.get_den();
    int twos = 0, fives = 0;
    while (mpz_divisible_ui_p(den.get_mpz_t(), 2)) {
        den /= 2;
        twos++;
    }
    while (mpz_divisible_ui_p(den.get_mpz_t(), 5)) {
        den /= 5;
        fives++;
    }
    if (den != 1 || q.get_den() == 1) {
        return q.get_str();
    }
    int digits = std::max(twos, fives);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(digits));
    mpz_class scaled = q.get_num() * scale / q.get_den();
    bool negative = scaled < 0;
    std::string s = mpz_class(abs(scaled)).get_str();
    if (static_cast<int>(s.size()) <= digits) {
        s.insert(0, static_cast<std::size_t>(digits + 1 - static_cast<int>(s.size())), '0');
    }
    s.insert(s.size() - static_cast<std::size_t>(digits), ".");
    return (negative ? "-" : "") + s;
}

SparsePolynomial monoid_square(const PolynomialSystem &system, int exponent) {
    SparsePolynomial g = SparsePolynomial::constant(system.nvars, 1);
    for (const auto &gk : system.gs) {
        g = g * gk.pow(static_cast<unsigned>(exponent));
    }
    return g * g;
}

SparsePolynomial cone_product(const PolynomialSystem &system, const std::vector<int> &factors) {
    SparsePolynomial product = SparsePolynomial::constant(system.nvars, 1);
    for (int f : factors) {
        product = product * system.fs.at(static_cast<std::size_t>(f));
    }
    return product;
}

RationalMatrix rationalize_matrix(const Eigen::MatrixXd &m) {
    RationalMatrix out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); i++) {
        for (Eigen::Index j = 0; j < m.cols(); j++) {
            // Symmetrize before rounding so the exact matrix is symmetric.
            out[static_cast<std::size_t>(i)].push_back(rationalize(0.5 * (m(i, j) + m(j, i))));
        }
    }
    return out;
}

double min_eigenvalue(const RationalMatrix &m) {
    if (m.empty()) {
        return 0;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_double(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double max_abs_coefficient(const SparsePolynomial &p) {
    double worst = 0;
    for (const auto &[e, c] : p.terms()) {
        worst = std::max(worst, std::abs(c.get_d()));
    }
    return worst;
}

// Subtracts `residual` from z^T Q z by editing Q; false if some monomial has
// no matching basis pair.
bool absorb_residual(const std::vector<Exponent> &basis, RationalMatrix &gram, const SparsePolynomial &residual) {
    for (const auto &[e, c] : residual.terms()) {
        int best_i = -1, best_j = -1;
        for (std::size_t i = 0; i < basis.size() && (best_i < 0 || best_i != best_j); i++) {
            for (std::size_t j = i; j < basis.size(); j++) {
                if (add_exponents(basis[i], basis[j]) != e) {
                    continue;
                }
                if (best_i < 0 || i == j) {
                    best_i = static_cast<int>(i);
                    best_j = static_cast<int>(j);
                }
                break;
            }
        }
        if (best_i < 0) {
            return false;
        }
        auto i = static_cast<std::size_t>(best_i), j = static_cast<std::size_t>(best_j);
        if (i == j) {
            gram[i][i] -= c;
        } else {
            mpq_class half = c / 2;
            gram[i][j] -= half;
            gram[j][i] -= half;
        }
    }
    return true;
}

}  // namespace

SparsePolynomial measure_polynomial_p(MeasureId id, int d) {
    require_poly_dim(d);
    switch (id.kind) {
        case MeasureId::Kind::Geo:
            return SparsePolynomial::constant(d - 1, 1) - lambda_forms(d)[0];
        case MeasureId::Kind::Es:
            return raw_source_polynomial(d, d);
        case MeasureId::Kind::EsGen: {
            if (id.k < d) {
                throw Error(ErrorCode::DimensionShrink, "generalization needs k >= d");
            }
            if (id.k > kMaxDim) {
                throw Error(ErrorCode::DimensionTooLarge, "embedding dimension above " + std::to_string(kMaxDim));
            }
            SparsePolynomial raw = raw_source_polynomial(d, id.k);
            // p = 0 is the maximally entangled state.
            mpq_class normalizer = raw.coefficient(zero_exponent(d - 1));
            return raw * mpq_class(1 / normalizer);
        }
        default:
            throw Error(ErrorCode::UnsupportedClosedForm, "measure " + id.name() + " is not polynomial");
    }
}

SparsePolynomial measure_polynomial(MeasureId id, int d) {
    return double_exponents(measure_polynomial_p(id, d));
}

SparsePolynomial simplex_polynomial(int d) {
    require_poly_dim(d);
    SparsePolynomial out = SparsePolynomial::constant(d - 1, 1);
    for (int i = 0; i < d - 1; i++) {
        out -= SparsePolynomial::variable(d - 1, i).pow(2);
    }
    return out;
}

PolynomialSystem target_system(int d, const std::vector<std::pair<MeasureId, mpq_class>> &targets) {
    PolynomialSystem system;
    system.nvars = d - 1;
    system.fs.push_back(simplex_polynomial(d));
    system.description = "d=" + std::to_string(d);
    for (const auto &[id, value] : targets) {
        system.hs.push_back(measure_polynomial(id, d) - SparsePolynomial::constant(d - 1, value));
        system.description += " " + id.name() + "=" + rational_to_string(value);
    }
    return system;
}

GramProblem build_certificate_problem(const PolynomialSystem &system, int d0) {
    if (d0 < 0 || d0 % 2 != 0) {
        throw Error(ErrorCode::DegreeTooSmall, "degree must be a nonnegative even integer, got " + std::to_string(d0));
    }
    if (system.fs.size() > 10) {
        throw Error(ErrorCode::ProblemTooLarge, "at most 10 inequality constraints");
    }
    int n = system.nvars;
    auto check_vars = [&](const std::vector<SparsePolynomial> &ps) {
        for (const auto &p : ps) {
            if (p.nvars() != n) {
                throw Error(ErrorCode::VariableMismatch, "constraint variable count differs from system");
            }
        }
    };
    check_vars(system.fs);
    check_vars(system.hs);
    check_vars(system.gs);

    GramProblem problem;
    problem.system = system;
    problem.degree = d0;
    problem.g_squared = monoid_square(system, problem.monoid_exponent);
    if (problem.g_squared.degree() > d0) {
        throw Error(ErrorCode::DegreeTooSmall, "g^2 has degree " + std::to_string(problem.g_squared.degree()));
    }
    bool constraint_term = false;
    std::size_t nf = system.fs.size();
    for (std::size_t mask = 0; mask < (std::size_t{1} << nf); mask++) {
        ConeTerm term;
        for (std::size_t i = 0; i < nf; i++) {
            if (mask & (std::size_t{1} << i)) {
                term.factors.push_back(static_cast<int>(i));
            }
        }
        term.product = cone_product(system, term.factors);
        if (term.product.is_zero()) {
            continue;
        }
        int free_degree = d0 - term.product.degree();
        if (free_degree < 0) {
            continue;
        }
        term.degree = free_degree - free_degree % 2;
        term.basis = monomials_up_to(n, term.degree / 2);
        if (term.basis.size() > kMaxBasis) {
            throw Error(ErrorCode::ProblemTooLarge, "monomial basis of size " + std::to_string(term.basis.size()));
        }
        constraint_term = constraint_term || !term.factors.empty();
        problem.cone.push_back(std::move(term));
    }
    for (std::size_t j = 0; j < system.hs.size(); j++) {
        const auto &h = system.hs[j];
        if (h.is_zero() || h.degree() > d0) {
            continue;
        }
        IdealTerm term;
        term.constraint = static_cast<int>(j);
        term.degree = d0 - h.degree();
        term.basis = monomials_up_to(n, term.degree);
        constraint_term = true;
        problem.ideal.push_back(std::move(term));
    }
    if (!constraint_term) {
        throw Error(ErrorCode::DegreeTooSmall, "no constraint multiplier fits in degree " + std::to_string(d0));
    }

    problem.rows = monomials_up_to(n, d0);
    std::map<Exponent, int, GradedLex> row_of;
    for (std::size_t i = 0; i < problem.rows.size(); i++) {
        row_of[problem.rows[i]] = static_cast<int>(i);
    }
    LmiProblem &lmi = problem.lmi;
    for (const auto &term : problem.cone) {
        lmi.block_sizes.push_back(static_cast<int>(term.basis.size()));
    }
    for (const auto &term : problem.ideal) {
        lmi.free_vars += static_cast<int>(term.basis.size());
    }
    int ng = lmi.gram_vars();
    lmi.E = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(problem.rows.size()), ng + lmi.free_vars);
    lmi.rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(problem.rows.size()));
    for (std::size_t b = 0; b < problem.cone.size(); b++) {
        const auto &term = problem.cone[b];
        int size = static_cast<int>(term.basis.size());
        int off = lmi.block_offset(static_cast<int>(b));
        for (int i = 0; i < size; i++) {
            for (int j = i; j < size; j++) {
                Exponent base = add_exponents(term.basis[static_cast<std::size_t>(i)], term.basis[static_cast<std::size_t>(j)]);
                double mult = i == j ? 1.0 : 2.0;
                for (const auto &[e, c] : term.product.terms()) {
                    lmi.E(row_of.at(add_exponents(base, e)), off + triangle_index(size, i, j)) += mult * c.get_d();
                }
            }
        }
    }
    int col = ng;
    for (const auto &term : problem.ideal) {
        const auto &h = system.hs[static_cast<std::size_t>(term.constraint)];
        for (const auto &beta : term.basis) {
            for (const auto &[e, c] : h.terms()) {
                lmi.E(row_of.at(add_exponents(beta, e)), col) += c.get_d();
            }
            col++;
        }
    }
    for (const auto &[e, c] : problem.g_squared.terms()) {
        lmi.rhs(row_of.at(e)) -= c.get_d();
    }
    return problem;
}

FeasibilityOutcome solve_feasibility(const GramProblem &problem, const SdpOptions &options) {
    SdpResult r = solve_max_min_eigenvalue(problem.lmi, options);
    if (r.status == SdpResult::Status::Inconsistent) {
        return NotFoundAtDegree{problem.degree, r.t, "coefficient equations have no solution"};
    }
    if (!(r.t > 0)) {
        std::string reason = "largest attainable smallest Gram eigenvalue is " + std::to_string(r.t);
        if (r.status == SdpResult::Status::IterationLimit) {
            reason += " (iteration limit reached)";
        }
        return NotFoundAtDegree{problem.degree, r.t, reason};
    }
    Certificate c;
    c.system = problem.system;
    c.degree = problem.degree;
    c.monoid_exponent = problem.monoid_exponent;
    c.margin = r.t;
    for (std::size_t b = 0; b < problem.cone.size(); b++) {
        c.sos.push_back({problem.cone[b].factors, problem.cone[b].basis, rationalize_matrix(r.blocks[b])});
    }
    Eigen::Index col = 0;
    for (const auto &term : problem.ideal) {
        IdealMultiplier m{term.constraint, SparsePolynomial(problem.system.nvars)};
        for (const auto &beta : term.basis) {
            m.polynomial.add_term(beta, rationalize(r.free(col++)));
        }
        c.ideal.push_back(std::move(m));
    }
    return c;
}

VerificationReport verify_certificate(const Certificate &c) {
    VerificationReport report;
    const auto &system = c.system;
    int n = system.nvars;
    SparsePolynomial total(n);
    try {
        total = monoid_square(system, c.monoid_exponent);
        for (const auto &s : c.sos) {
            if (s.gram.size() != s.basis.size()) {
                report.diagnostic = "Gram matrix size differs from its basis";
                return report;
            }
            for (const auto &row : s.gram) {
                if (row.size() != s.basis.size()) {
                    report.diagnostic = "Gram matrix is not square";
                    return report;
                }
            }
            total += gram_polynomial(s.basis, s.gram) * cone_product(system, s.factors);
        }
        for (const auto &t : c.ideal) {
            if (t.constraint < 0 || static_cast<std::size_t>(t.constraint) >= system.hs.size()) {
                report.diagnostic = "ideal multiplier refers to a missing constraint";
                return report;
            }
            total += t.polynomial * system.hs[static_cast<std::size_t>(t.constraint)];
        }
    } catch (const std::exception &e) {
        report.diagnostic = e.what();
        return report;
    }
    report.max_residual = max_abs_coefficient(total);
    report.min_eigenvalue = std::numeric_limits<double>::infinity();
    for (const auto &s : c.sos) {
        if (!s.gram.empty()) {
            report.min_eigenvalue = std::min(report.min_eigenvalue, min_eigenvalue(s.gram));
        }
    }
    bool residual_ok = report.max_residual <= 1e-6;
    bool psd_ok = report.min_eigenvalue >= -1e-8;
    report.ok = residual_ok && psd_ok;
    if (!residual_ok) {
        report.diagnostic = "identity residual " + std::to_string(report.max_residual) + " exceeds 1e-6";
    } else if (!psd_ok) {
        report.diagnostic = "Gram eigenvalue " + std::to_string(report.min_eigenvalue) + " below -1e-8";
    }
    if (report.ok) {
        auto plain = std::find_if(c.sos.begin(), c.sos.end(), [](const SosMultiplier &s) { return s.factors.empty(); });
        if (plain != c.sos.end()) {
            RationalMatrix corrected = plain->gram;
            bool exact = absorb_residual(plain->basis, corrected, total);
            for (const auto &s : c.sos) {
                exact = exact && exact_psd(&s == &*plain ? corrected : s.gram);
            }
            report.exact = exact;
        }
    }
    return report;
}

namespace {

// When every Gram matrix of F is singular the barrier stalls just below zero.
// Starting from the dominant eigenspaces of the solver's matrix (largest rank
// first), Q = L L^T is fitted to the coefficient equations by minimum-norm
// Gauss-Newton on L; the result is positive semidefinite by construction.
std::optional<Eigen::MatrixXd> low_rank_gram(const LmiProblem &lmi, const Eigen::MatrixXd &Q) {
    int size = lmi.block_sizes[0];
    double scale = std::max(1.0, lmi.rhs.cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
    double top = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    auto pack = [&](const Eigen::MatrixXd &M) {
        Eigen::VectorXd tri(lmi.gram_vars());
        for (int i = 0; i < size; i++) {
            for (int j = i; j < size; j++) {
                tri(triangle_index(size, i, j)) = M(i, j);
            }
        }
        return tri;
    };
    int rank = 0;
    while (rank < size && es.eigenvalues()(size - 1 - rank) >= 1e-6 * top) {
        rank++;
    }
    for (int k = rank; k >= 1; k--) {
        Eigen::MatrixXd L = es.eigenvectors().rightCols(k) *
                            es.eigenvalues().tail(k).cwiseSqrt().asDiagonal();
        auto residual_of = [&](const Eigen::MatrixXd &M) {
            return Eigen::VectorXd(lmi.rhs - lmi.E * pack(M * M.transpose()));
        };
        for (int it = 0; it < 50; it++) {
            Eigen::VectorXd residual = residual_of(L);
            if (residual.cwiseAbs().maxCoeff() <= 1e-14 * scale) {
                break;
            }
            Eigen::MatrixXd J(lmi.E.rows(), size * k);
            for (int p = 0; p < size; p++) {
                for (int c = 0; c < k; c++) {
                    Eigen::MatrixXd dQ = Eigen::MatrixXd::Zero(size, size);
                    dQ.row(p) += L.col(c).transpose();
                    dQ.col(p) += L.col(c);
                    J.col(c * size + p) = lmi.E * pack(dQ);
                }
            }
            Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(residual);
            Eigen::Map<const Eigen::MatrixXd> dL(step.data(), size, k);
            double length = 1;
            while (length > 1e-6 && residual_of(L + length * dL).norm() >= residual.norm()) {
                length *= 0.5;
            }
            if (!(length > 1e-6)) {
                break;
            }
            L += length * dL;
        }
        if (residual_of(L).cwiseAbs().maxCoeff() <= 1e-12 * scale) {
            return Eigen::MatrixXd(L * L.transpose());
        }
    }
    return std::nullopt;
}

}  // namespace

SosOutcome sos_decompose(const SparsePolynomial &F, int d0) {
    if (d0 < 0 || d0 % 2 != 0 || F.degree() > d0) {
        throw Error(ErrorCode::DegreeTooSmall, "need an even bound d0 >= deg F");
    }
    int n = F.nvars();
    if (F.is_zero()) {
        return GramDecomposition{F, {}, {}, 0};
    }
    // Half-degree box: every exponent of an SOS summand lies within half the
    // per-variable and total-degree range of F.
    Exponent lo(static_cast<std::size_t>(n), std::numeric_limits<int>::max()), hi(static_cast<std::size_t>(n), 0);
    int min_deg = std::numeric_limits<int>::max(), max_deg = 0;
    for (const auto &[e, c] : F.terms()) {
        int deg = std::accumulate(e.begin(), e.end(), 0);
        min_deg = std::min(min_deg, deg);
        max_deg = std::max(max_deg, deg);
        for (std::size_t i = 0; i < e.size(); i++) {
            lo[i] = std::min(lo[i], e[i]);
            hi[i] = std::max(hi[i], e[i]);
        }
    }
    std::vector<Exponent> basis;
    for (const auto &e : monomials_up_to(n, max_deg / 2)) {
        int deg = std::accumulate(e.begin(), e.end(), 0);
        bool keep = 2 * deg >= min_deg;
        for (std::size_t i = 0; i < e.size() && keep; i++) {
            keep = 2 * e[i] >= lo[i] && 2 * e[i] <= hi[i];
        }
        if (keep) {
            basis.push_back(e);
        }
    }
    if (basis.size() > kMaxBasis) {
        throw Error(ErrorCode::ProblemTooLarge, "monomial basis of size " + std::to_string(basis.size()));
    }
    std::map<Exponent, int, GradedLex> row_of;
    for (std::size_t i = 0; i < basis.size(); i++) {
        for (std::size_t j = i; j < basis.size(); j++) {
            row_of.emplace(add_exponents(basis[i], basis[j]), 0);
        }
    }
    for (const auto &[e, c] : F.terms()) {
        if (!row_of.count(e)) {
            // No Gram matrix reproduces this coefficient at all.
            DualWitness w{basis, SparsePolynomial::Terms{}, 0};
            w.moments[e] = c > 0 ? -1 : 1;
            w.value = -abs(c);
            return w;
        }
    }
    int row = 0;
    for (auto &[e, idx] : row_of) {
        idx = row++;
    }
    int size = static_cast<int>(basis.size());
    LmiProblem lmi;
    lmi.block_sizes = {size};
    lmi.E = Eigen::MatrixXd::Zero(row, lmi.gram_vars());
    lmi.rhs = Eigen::VectorXd::Zero(row);
    for (int i = 0; i < size; i++) {
        for (int j = i; j < size; j++) {
            auto e = add_exponents(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)]);
            lmi.E(row_of.at(e), triangle_index(size, i, j)) = i == j ? 1.0 : 2.0;
        }
    }
    for (const auto &[e, c] : F.terms()) {
        lmi.rhs(row_of.at(e)) = c.get_d();
    }
    SdpResult r = solve_max_min_eigenvalue(lmi);
    if (r.status != SdpResult::Status::Inconsistent && r.t >= -1e-8) {
        GramDecomposition g{F, basis, rationalize_matrix(r.blocks[0]), r.t};
        auto check = check_decomposition(g);
        if (check.max_residual <= 1e-9 && check.min_eigenvalue >= -1e-8) {
            return g;
        }
        throw Error(ErrorCode::SolverDidNotConverge,
                    "Gram matrix failed its checks (residual " + std::to_string(check.max_residual) + ")");
    }
    auto try_reduced = [&]() -> std::optional<GramDecomposition> {
        if (r.status == SdpResult::Status::Inconsistent || r.t < -1e-4) {
            return std::nullopt;
        }
        auto Q = low_rank_gram(lmi, r.blocks[0]);
        if (!Q) {
            return std::nullopt;
        }
        GramDecomposition g{F, basis, rationalize_matrix(*Q), 0};
        auto check = check_decomposition(g);
        if (check.max_residual <= 1e-9 && check.min_eigenvalue >= -1e-8) {
            g.margin = check.min_eigenvalue;
            return g;
        }
        return std::nullopt;
    };
    if (r.status == SdpResult::Status::Inconsistent || r.t > -1e-7) {
        if (auto g = try_reduced()) {
            return *g;
        }
        throw Error(ErrorCode::SolverDidNotConverge, "smallest Gram eigenvalue near zero: " + std::to_string(r.t));
    }

    // Project the barrier dual onto moment structure.
    std::map<Exponent, std::pair<double, int>, GradedLex> sums;
    const auto &W = r.duals[0];
    for (int i = 0; i < size; i++) {
        for (int j = 0; j < size; j++) {
            auto &slot = sums[add_exponents(basis[static_cast<std::size_t>(i)], basis[static_cast<std::size_t>(j)])];
            slot.first += W(i, j);
            slot.second++;
        }
    }
    std::map<Exponent, double, GradedLex> mu;
    for (const auto &[e, s] : sums) {
        mu[e] = s.first / s.second;
    }
    // Blend in point evaluations to keep the projected matrix strictly positive.
    std::mt19937_64 rng(0);
    std::uniform_real_distribution<double> unif(-1, 1);
    int points = 2 * size + 1;
    std::map<Exponent, double, GradedLex> pts;
    for (int k = 0; k < points; k++) {
        std::vector<double> x(static_cast<std::size_t>(n));
        for (auto &v : x) {
            v = unif(rng);
        }
        for (const auto &[e, unused] : mu) {
            double m = 1;
            for (std::size_t i = 0; i < e.size(); i++) {
                m *= std::pow(x[i], e[i]);
            }
            pts[e] += m / points;
        }
    }
    double value = 0, point_value = 0;
    for (const auto &[e, c] : F.terms()) {
        value += c.get_d() * mu[e];
        point_value += c.get_d() * pts[e];
    }
    double delta = point_value > 0 ? 0.5 * std::abs(value) / point_value : std::abs(value);
    DualWitness w{basis, SparsePolynomial::Terms{}, 0};
    for (const auto &[e, m] : mu) {
        mpq_class q = rationalize(m + delta * pts[e]);
        if (q != 0) {
            w.moments[e] = q;
        }
    }
    for (const auto &[e, c] : F.terms()) {
        auto it = w.moments.find(e);
        if (it != w.moments.end()) {
            w.value += c * it->second;
        }
    }
    if (verify_dual_witness(w, F)) {
        return w;
    }
    if (auto g = try_reduced()) {
        return *g;
    }
    throw Error(ErrorCode::SolverDidNotConverge, "dual witness failed exact verification");
}

DecompositionCheck check_decomposition(const GramDecomposition &g) {
    DecompositionCheck out;
    out.max_residual = max_abs_coefficient(gram_polynomial(g.basis, g.gram) - g.polynomial);
    out.min_eigenvalue = min_eigenvalue(g.gram);
    return out;
}

namespace {

RationalMatrix exact_moment_matrix(const DualWitness &w) {
    std::size_t n = w.basis.size();
    RationalMatrix m(n, std::vector<mpq_class>(n));
    for (std::size_t i = 0; i < n; i++) {
        for (std::size_t j = 0; j < n; j++) {
            auto it = w.moments.find(add_exponents(w.basis[i], w.basis[j]));
            if (it != w.moments.end()) {
                m[i][j] = it->second;
            }
        }
    }
    return m;
}

}  // namespace

Eigen::MatrixXd moment_matrix(const DualWitness &w) {
    return to_double(exact_moment_matrix(w));
}

bool verify_dual_witness(const DualWitness &w, const SparsePolynomial &F) {
    mpq_class value = 0;
    for (const auto &[e, c] : F.terms()) {
        auto it = w.moments.find(e);
        if (it != w.moments.end()) {
            value += c * it->second;
        }
    }
    return value == w.value && value < 0 && exact_psd(exact_moment_matrix(w));
}

SparsePolynomial gram_polynomial(const std::vector<Exponent> &basis, const RationalMatrix &gram) {
    int n = basis.empty() ? 0 : static_cast<int>(basis.front().size());
    SparsePolynomial out(n);
    for (std::size_t i = 0; i < basis.size(); i++) {
        out.add_term(add_exponents(basis[i], basis[i]), gram[i][i]);
        for (std::size_t j = i + 1; j < basis.size(); j++) {
            out.add_term(add_exponents(basis[i], basis[j]), gram[i][j] + gram[j][i]);
        }
    }
    return out;
}

bool exact_psd(RationalMatrix m) {
    std::size_t n = m.size();
    for (std::size_t i = 0; i < n; i++) {
        if (m[i].size() != n) {
            return false;
        }
        for (std::size_t j = 0; j < i; j++) {
            if (m[i][j] != m[j][i]) {
                return false;
            }
        }
    }
    for (std::size_t k = 0; k < n; k++) {
        const mpq_class pivot = m[k][k];
        if (pivot < 0) {
            return false;
        }
        if (pivot == 0) {
            for (std::size_t i = k + 1; i < n; i++) {
                if (m[i][k] != 0) {
                    return false;
                }
            }
            continue;
        }
        for (std::size_t i = k + 1; i < n; i++) {
            if (m[i][k] == 0) {
                continue;
            }
            mpq_class f = m[i][k] / pivot;
            for (std::size_t j = k + 1; j < n; j++) {
                m[i][j] -= f * m[k][j];
            }
        }
    }
    return true;
}

Eigen::MatrixXd to_double(const RationalMatrix &m) {
    auto n = static_cast<Eigen::Index>(m.size());
    Eigen::MatrixXd out(n, n);
    for (Eigen::Index i = 0; i < n; i++) {
        for (Eigen::Index j = 0; j < n; j++) {
            out(i, j) = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get_d();
        }
    }
    return out;
}

mpq_class rationalize(double x) {
    if (!std::isfinite(x)) {
        throw Error(ErrorCode::NumericalBreakdown, "non-finite value cannot be rationalized");
    }
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return parse_rational(std::string(buf, res.ptr));
}

nlohmann::json polynomial_to_json(const SparsePolynomial &p) {
    nlohmann::json terms = nlohmann::json::array();
    for (const auto &[e, c] : p.terms()) {
        terms.push_back({{"exponent", e}, {"coefficient", rational_to_string(c)}});
    }
    return terms;
}

SparsePolynomial polynomial_from_json(const nlohmann::json &j, int nvars) {
    SparsePolynomial p(nvars);
    for (const auto &term : j) {
        p.add_term(term.at("exponent").get<Exponent>(), parse_rational(term.at("coefficient").get<std::string>()));
    }
    return p;
}

nlohmann::json certificate_to_json(const Certificate &c, const VerificationReport &report) {
    using nlohmann::json;
    auto poly_list = [](const std::vector<SparsePolynomial> &ps) {
        json out = json::array();
        for (const auto &p : ps) {
            out.push_back(polynomial_to_json(p));
        }
        return out;
    };
    json sos = json::array();
    for (const auto &s : c.sos) {
        json gram = json::array();
        for (const auto &row : s.gram) {
            json r = json::array();
            for (const auto &v : row) {
                r.push_back(rational_to_string(v));
            }
            gram.push_back(r);
        }
        sos.push_back({{"factors", s.factors}, {"basis", s.basis}, {"gram", gram}});
    }
    json ideal = json::array();
    for (const auto &t : c.ideal) {
        ideal.push_back({{"constraint", t.constraint}, {"polynomial", polynomial_to_json(t.polynomial)}});
    }
    return {
        {"system",
         {{"nvars", c.system.nvars},
          {"description", c.system.description},
          {"fs", poly_list(c.system.fs)},
          {"hs", poly_list(c.system.hs)},
          {"gs", poly_list(c.system.gs)}}},
        {"degree", c.degree},
        {"monoid_exponent", c.monoid_exponent},
        {"margin", c.margin},
        {"sos", sos},
        {"ideal", ideal},
        {"verification",
         {{"ok", report.ok},
          {"max_residual", report.max_residual},
          {"min_eigenvalue", report.min_eigenvalue},
          {"exact", report.exact},
          {"diagnostic", report.diagnostic}}},
    };
}

Certificate certificate_from_json(const nlohmann::json &j) {
    Certificate c;
    try {
        const auto &sys = j.at("system");
        c.system.nvars = sys.at("nvars").get<int>();
        c.system.description = sys.value("description", "");
        for (const char *key : {"fs", "hs", "gs"}) {
            auto &dest = std::string(key) == "fs" ? c.system.fs : std::string(key) == "hs" ? c.system.hs : c.system.gs;
            for (const auto &p : sys.at(key)) {
                dest.push_back(polynomial_from_json(p, c.system.nvars));
            }
        }
        c.degree = j.at("degree").get<int>();
        c.monoid_exponent = j.value("monoid_exponent", 1);
        c.margin = j.value("margin", 0.0);
        for (const auto &s : j.at("sos")) {
            SosMultiplier m;
            m.factors = s.at("factors").get<std::vector<int>>();
            m.basis = s.at("basis").get<std::vector<Exponent>>();
            for (const auto &row : s.at("gram")) {
                std::vector<mpq_class> r;
                for (const auto &v : row) {
                    r.push_back(parse_rational(v.get<std::string>()));
                }
                m.gram.push_back(std::move(r));
            }
            c.sos.push_back(std::move(m));
        }
        for (const auto &t : j.at("ideal")) {
            c.ideal.push_back(
                {t.at("constraint").get<int>(), polynomial_from_json(t.at("polynomial"), c.system.nvars)});
        }
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::ParseError, std::string("certificate JSON: ") + e.what());
    }
    return c;
}

}  // namespace bent
