#pragma once

#include <gmpxx.h>

#include <map>
#include <span>
#include <string>
#include <vector>

namespace bent {

using Exponent = std::vector<int>;

/// Graded lexicographic order: total degree first, then lexicographic.
struct GradedLex {
    bool operator()(const Exponent &a, const Exponent &b) const;
};

/// Multivariate polynomial with exact rational coefficients. Zero
/// coefficients are never stored.
class SparsePolynomial {
   public:
    using Terms = std::map<Exponent, mpq_class, GradedLex>;

    explicit SparsePolynomial(int nvars = 0) : nvars_(nvars) {
    }

    static SparsePolynomial constant(int nvars, const mpq_class &c);
    static SparsePolynomial variable(int nvars, int index);
    static SparsePolynomial monomial(const Exponent &exponent, const mpq_class &c);

    int nvars() const noexcept {
        return nvars_;
    }
    const Terms &terms() const noexcept {
        return terms_;
    }
    bool is_zero() const noexcept {
        return terms_.empty();
    }
    /// Total degree; -1 for the zero polynomial.
    int degree() const;
    mpq_class coefficient(const Exponent &exponent) const;

    void add_term(const Exponent &exponent, const mpq_class &c);

    SparsePolynomial &operator+=(const SparsePolynomial &other);
    SparsePolynomial &operator-=(const SparsePolynomial &other);
    SparsePolynomial &operator*=(const mpq_class &scalar);

    friend SparsePolynomial operator+(SparsePolynomial a, const SparsePolynomial &b) {
        return a += b;
    }
    friend SparsePolynomial operator-(SparsePolynomial a, const SparsePolynomial &b) {
        return a -= b;
    }
    friend SparsePolynomial operator*(const SparsePolynomial &a, const SparsePolynomial &b);
    friend SparsePolynomial operator*(SparsePolynomial a, const mpq_class &s) {
        return a *= s;
    }
    bool operator==(const SparsePolynomial &other) const {
        return nvars_ == other.nvars_ && terms_ == other.terms_;
    }

    SparsePolynomial pow(unsigned exponent) const;

    /// Replaces variable `index` by `value` (same variable count).
    SparsePolynomial substitute(int index, const SparsePolynomial &value) const;
    /// Composition: variable i becomes values[i]; the result lives in the
    /// variable space shared by all values.
    SparsePolynomial compose(const std::vector<SparsePolynomial> &values) const;

    double evaluate(std::span<const double> point) const;
    mpq_class evaluate_exact(std::span<const mpq_class> point) const;

    std::string to_string(const std::vector<std::string> &names = {}) const;

   private:
    int nvars_;
    Terms terms_;
};

/// All exponents in `nvars` variables with total degree <= max_degree, graded lex order.
std::vector<Exponent> monomials_up_to(int nvars, int max_degree);

/// Exact rational from a decimal literal such as "0.2", "-1.5e-3" or "3/7".
mpq_class parse_rational(const std::string &text);
/// Exact value of a double.
inline mpq_class exact_rational(double x) {
    return mpq_class(x);
}

}  // namespace bent
