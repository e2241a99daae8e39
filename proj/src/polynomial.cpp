#include "bent/polynomial.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <sstream>

#include "bent/error.hpp"

namespace bent {

namespace {

void require_same_vars(int a, int b) {
    if (a != b) {
        throw Error(ErrorCode::VariableMismatch,
                    "polynomials in " + std::to_string(a) + " and " + std::to_string(b) + " variables");
    }
}

int total_degree(const Exponent &e) {
    return std::accumulate(e.begin(), e.end(), 0);
}

}  // namespace

bool GradedLex::operator()(const Exponent &a, const Exponent &b) const {
    int da = total_degree(a), db = total_degree(b);
    if (da != db) {
        return da < db;
    }
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

SparsePolynomial SparsePolynomial::constant(int nvars, const mpq_class &c) {
    SparsePolynomial p(nvars);
    p.add_term(Exponent(static_cast<std::size_t>(nvars), 0), c);
    return p;
}

SparsePolynomial SparsePolynomial::variable(int nvars, int index) {
    Exponent e(static_cast<std::size_t>(nvars), 0);
    e.at(static_cast<std::size_t>(index)) = 1;
    return monomial(e, 1);
}

SparsePolynomial SparsePolynomial::monomial(const Exponent &exponent, const mpq_class &c) {
    SparsePolynomial p(static_cast<int>(exponent.size()));
    p.add_term(exponent, c);
    return p;
}

int SparsePolynomial::degree() const {
    int d = -1;
    for (const auto &[e, c] : terms_) {
        d = std::max(d, total_degree(e));
    }
    return d;
}

mpq_class SparsePolynomial::coefficient(const Exponent &exponent) const {
    auto it = terms_.find(exponent);
    return it == terms_.end() ? mpq_class(0) : it->second;
}

void SparsePolynomial::add_term(const Exponent &exponent, const mpq_class &c) {
    require_same_vars(nvars_, static_cast<int>(exponent.size()));
    if (c == 0) {
        return;
    }
    auto [it, inserted] = terms_.emplace(exponent, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) {
            terms_.erase(it);
        }
    }
}

SparsePolynomial &SparsePolynomial::operator+=(const SparsePolynomial &other) {
    require_same_vars(nvars_, other.nvars_);
    for (const auto &[e, c] : other.terms_) {
        add_term(e, c);
    }
    return *this;
}

SparsePolynomial &SparsePolynomial::operator-=(const SparsePolynomial &other) {
    require_same_vars(nvars_, other.nvars_);
    for (const auto &[e, c] : other.terms_) {
        add_term(e, -c);
    }
    return *this;
}

SparsePolynomial &SparsePolynomial::operator*=(const mpq_class &scalar) {
    if (scalar == 0) {
        terms_.clear();
        return *this;
    }
    for (auto &[e, c] : terms_) {
        c *= scalar;
    }
    return *this;
}

SparsePolynomial operator*(const SparsePolynomial &a, const SparsePolynomial &b) {
    require_same_vars(a.nvars_, b.nvars_);
    SparsePolynomial out(a.nvars_);
    Exponent e(static_cast<std::size_t>(a.nvars_));
    for (const auto &[ea, ca] : a.terms_) {
        for (const auto &[eb, cb] : b.terms_) {
            for (std::size_t i = 0; i < e.size(); i++) {
                e[i] = ea[i] + eb[i];
            }
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

SparsePolynomial SparsePolynomial::pow(unsigned exponent) const {
    SparsePolynomial result = constant(nvars_, 1);
    SparsePolynomial base = *this;
    while (exponent) {
        if (exponent & 1u) {
            result = result * base;
        }
        exponent >>= 1;
        if (exponent) {
            base = base * base;
        }
    }
    return result;
}

SparsePolynomial SparsePolynomial::substitute(int index, const SparsePolynomial &value) const {
    require_same_vars(nvars_, value.nvars_);
    std::vector<SparsePolynomial> values;
    for (int i = 0; i < nvars_; i++) {
        values.push_back(i == index ? value : variable(nvars_, i));
    }
    return compose(values);
}

SparsePolynomial SparsePolynomial::compose(const std::vector<SparsePolynomial> &values) const {
    require_same_vars(nvars_, static_cast<int>(values.size()));
    int out_vars = values.empty() ? 0 : values.front().nvars();
    for (const auto &v : values) {
        require_same_vars(out_vars, v.nvars());
    }
    // Cache powers per variable.
    std::vector<std::vector<SparsePolynomial>> powers(values.size());
    SparsePolynomial out(out_vars);
    for (const auto &[e, c] : terms_) {
        SparsePolynomial term = constant(out_vars, c);
        for (std::size_t i = 0; i < e.size(); i++) {
            if (e[i] == 0) {
                continue;
            }
            auto &cache = powers[i];
            if (cache.empty()) {
                cache.push_back(constant(out_vars, 1));
            }
            while (static_cast<int>(cache.size()) <= e[i]) {
                cache.push_back(cache.back() * values[i]);
            }
            term = term * cache[static_cast<std::size_t>(e[i])];
        }
        out += term;
    }
    return out;
}

double SparsePolynomial::evaluate(std::span<const double> point) const {
    require_same_vars(nvars_, static_cast<int>(point.size()));
    double total = 0;
    for (const auto &[e, c] : terms_) {
        double term = c.get_d();
        for (std::size_t i = 0; i < e.size(); i++) {
            for (int k = 0; k < e[i]; k++) {
                term *= point[i];
            }
        }
        total += term;
    }
    return total;
}

mpq_class SparsePolynomial::evaluate_exact(std::span<const mpq_class> point) const {
    require_same_vars(nvars_, static_cast<int>(point.size()));
    mpq_class total = 0;
    for (const auto &[e, c] : terms_) {
        mpq_class term = c;
        for (std::size_t i = 0; i < e.size(); i++) {
            for (int k = 0; k < e[i]; k++) {
                term *= point[i];
            }
        }
        total += term;
    }
    return total;
}

std::string SparsePolynomial::to_string(const std::vector<std::string> &names) const {
    if (terms_.empty()) {
        return "0";
    }
    std::ostringstream out;
    bool first = true;
    for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
        const auto &[e, c] = *it;
        mpq_class mag = abs(c);
        if (first) {
            out << (c < 0 ? "-" : "");
        } else {
            out << (c < 0 ? " - " : " + ");
        }
        first = false;
        bool is_const = total_degree(e) == 0;
        if (mag != 1 || is_const) {
            out << mag.get_str();
            if (!is_const) {
                out << '*';
            }
        }
        bool first_factor = true;
        for (std::size_t i = 0; i < e.size(); i++) {
            if (e[i] == 0) {
                continue;
            }
            if (!first_factor) {
                out << '*';
            }
            first_factor = false;
            out << (i < names.size() ? names[i] : "x" + std::to_string(i + 1));
            if (e[i] > 1) {
                out << '^' << e[i];
            }
        }
    }
    return out.str();
}

std::vector<Exponent> monomials_up_to(int nvars, int max_degree) {
    std::vector<Exponent> out;
    Exponent e(static_cast<std::size_t>(nvars), 0);
    // Enumerate all exponents with entries <= max_degree, keep those within the degree bound.
    std::function<void(int, int)> rec = [&](int var, int remaining) {
        if (var == nvars) {
            out.push_back(e);
            return;
        }
        for (int k = 0; k <= remaining; k++) {
            e[static_cast<std::size_t>(var)] = k;
            rec(var + 1, remaining - k);
        }
        e[static_cast<std::size_t>(var)] = 0;
    };
    if (max_degree >= 0) {
        rec(0, max_degree);
    }
    std::sort(out.begin(), out.end(), GradedLex{});
    return out;
}

mpq_class parse_rational(const std::string &text) {
    std::string t = text;
    t.erase(0, t.find_first_not_of(" \t"));
    t.erase(t.find_last_not_of(" \t") + 1);
    auto fail = [&]() { return Error(ErrorCode::ParseError, "bad rational literal '" + text + "'"); };
    if (t.empty()) {
        throw fail();
    }
    if (t.find('/') != std::string::npos) {
        mpq_class q;
        if (q.set_str(t, 10) != 0 || q.get_den() == 0) {
            throw fail();
        }
        q.canonicalize();
        return q;
    }
    bool negative = false;
    std::size_t pos = 0;
    if (t[pos] == '+' || t[pos] == '-') {
        negative = t[pos] == '-';
        pos++;
    }
    std::string digits;
    long scale = 0;
    bool seen_digit = false, seen_point = false;
    for (; pos < t.size(); pos++) {
        char c = t[pos];
        if (c >= '0' && c <= '9') {
            digits += c;
            seen_digit = true;
            if (seen_point) {
                scale--;
            }
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else {
            break;
        }
    }
    if (!seen_digit) {
        throw fail();
    }
    if (pos < t.size()) {
        if (t[pos] != 'e' && t[pos] != 'E') {
            throw fail();
        }
        std::string exponent = t.substr(pos + 1);
        try {
            std::size_t used = 0;
            long ex = std::stol(exponent, &used);
            if (used != exponent.size()) {
                throw fail();
            }
            scale += ex;
        } catch (const std::logic_error &) {
            throw fail();
        }
    }
    mpz_class numerator(digits, 10);
    mpz_class ten_power;
    mpz_ui_pow_ui(ten_power.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    mpq_class q = scale >= 0 ? mpq_class(numerator * ten_power) : mpq_class(numerator, ten_power);
    q.canonicalize();
    return negative ? mpq_class(-q) : q;
}

}  // namespace bent
