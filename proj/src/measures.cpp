#include "bent/measures.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <shared_mutex>

#include "bent/error.hpp"
#include "bent/numeric.hpp"

namespace bent {

namespace {

void require_dim_cap(int d) {
    if (d > kMaxDim) {
        throw Error(ErrorCode::DimensionTooLarge,
                    "dimension " + std::to_string(d) + " exceeds cap " + std::to_string(kMaxDim));
    }
}

// sum over sigma in S_m of (sum_k sigma_k x_k - shift)^(m-1) / prod_{k<m} (sigma_k - sigma_{k+1}),
// with x zero-padded to length m.
double divided_symmetrization(std::span<const double> x, int m, double shift) {
    require_dim_cap(m);
    std::array<int, kMaxDim> sigma{};
    std::iota(sigma.begin(), sigma.begin() + m, 1);
    int nx = static_cast<int>(x.size());
    CompensatedSum total;
    do {
        double dot = -shift;
        for (int i = 0; i < nx; i++) {
            dot += sigma[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
        }
        long long denom = 1;
        for (int i = 0; i + 1 < m; i++) {
            denom *= sigma[static_cast<std::size_t>(i)] - sigma[static_cast<std::size_t>(i) + 1];
        }
        double power = 1;
        for (int i = 0; i + 1 < m; i++) {
            power *= dot;
        }
        total.add(power / static_cast<double>(denom));
    } while (std::next_permutation(sigma.begin(), sigma.begin() + m));
    return total.value();
}

double clamp_unit(double value, const char *what) {
    if (!(value >= -1e-9 && value <= 1 + 1e-9)) {
        throw Error(ErrorCode::NumericalBreakdown,
                    std::string(what) + " evaluated to " + std::to_string(value) + " outside [0, 1]");
    }
    return std::clamp(value, 0.0, 1.0);
}

double es_closed_3(double l2, double l3) {
    return 3 * l2 * l2 - 6 * l2 * l3 - 6 * (l3 - 1) * l3;
}

double ea_closed_3(double l1, double l2, double l3) {
    double upper = 12 * l2 * l3;
    double lower = 12 * (l2 * l3 - 0.25 * (1 - 2 * l1) * (1 - 2 * l1));
    if (std::abs(l1 - 0.5) <= 1e-12) {
        if (std::abs(upper - lower) > 1e-8) {
            throw Error(ErrorCode::NumericalBreakdown, "3x3 accessible branches disagree at boundary");
        }
        return upper;
    }
    return l1 > 0.5 ? upper : lower;
}

// Unnormalized E_s of the 3x3 state embedded in 4 dimensions, times 27/13.
double es_gen4_closed_3(double l2, double l3) {
    return 27.0 / 13.0 *
           (2 * l2 * l2 * l2 + 6 * l2 * l2 * l3 + 3 * (3 - 4 * l2) * l3 * l3 - 10 * l3 * l3 * l3);
}

double es_closed_4(double l2, double l3, double l4) {
    return 4 * l2 * l2 * l2 + 12 * l2 * l2 * l3 - 24 * l2 * l2 * l4 - 24 * l2 * l3 * l3 +
           24 * l2 * l3 * l4 + 12 * l2 * l4 * l4 - 20 * l3 * l3 * l3 + 12 * l3 * l3 * l4 + 18 * l3 * l3 +
           48 * l3 * l4 * l4 - 36 * l3 * l4 + 20 * l4 * l4 * l4 - 30 * l4 * l4 + 12 * l4;
}

// E_s of the 4x4 state embedded in 5 dimensions (unnormalized).
double es_embed5_closed_4(double l2, double l3, double l4) {
    double l2_2 = l2 * l2, l3_2 = l3 * l3, l4_2 = l4 * l4;
    return -5 * (-l2_2 * l2_2 - 21 * l4_2 * l4_2 + l3_2 * l3 * (9 * l3 - 8) + 4 * l4_2 * l4 * (8 - 15 * l3) -
                 6 * l4_2 * (l3 * (3 * l3 - 8) + 2) + 12 * l3_2 * (3 * l3 - 2) * l4 -
                 4 * l2_2 * l2 * (l3 + l4) - 6 * l2_2 * (l3_2 - 5 * l4_2 + 2 * l3 * l4) +
                 12 * l2 * (l3 - l4) * (l3_2 + l4_2 + 4 * l3 * l4));
}

// E_s of the 4x4 state embedded in 6 dimensions (unnormalized), fully expanded.
double es_embed6_closed_4(double a, double b, double c) {
    double a2 = a * a, a3 = a2 * a, a4 = a3 * a, a5 = a4 * a;
    double b2 = b * b, b3 = b2 * b, b4 = b3 * b, b5 = b4 * b;
    double c2 = c * c, c3 = c2 * c, c4 = c3 * c, c5 = c4 * c;
    return 6 * a5 + 30 * a4 * b + 30 * a4 * c + 60 * a3 * b2 + 120 * a3 * b * c + 60 * a3 * c2 + 60 * a2 * b3 +
           180 * a2 * b2 * c + 180 * a2 * b * c2 - 540 * a2 * c3 - 120 * a * b4 - 480 * a * b3 * c -
           720 * a * b2 * c2 + 720 * a * b * c3 + 180 * a * c4 - 84 * b5 - 420 * b4 * c + 75 * b4 -
           840 * b3 * c2 + 300 * b3 * c + 360 * b2 * c3 + 450 * b2 * c2 + 1080 * b * c4 - 900 * b * c3 +
           336 * c5 - 525 * c4 + 200 * c3;
}

struct Branch {
    std::vector<double> margins;  // each condition holds iff margin >= 0
    double value;
};

double ea_closed_4(double l1, double l2, double l3, double l4) {
    const double third = 1.0 / 3.0;
    // Shared sub-expressions of the middle branches.
    double poly_a = -3 * l2 * (l4 - 1) * (l4 - 1) - 6 * l2 * l2 * (l4 - 1) - 4 * l2 * l2 * l2 + l4 * l4 * (4 * l4 - 3);
    double upper_half = l1 - 0.5;        // l1 >= 1/2
    double lower_third = third - l1;     // l1 <= 1/3
    double a_margin = l1 - (0.5 - l4);   // l1 >= 1/2 - l4
    double b_margin = (1 - 2 * l2) - l1; // l1 <= 1 - 2 l2

    std::array<Branch, 8> branches{{
        {{upper_half, -b_margin}, 24 * l4 * (6 * l2 * l3 + l4 * (-3 * l3 + l4))},
        {{upper_half, b_margin},
         12 * (-std::pow(l2 - l3, 3) - 3 * (l2 + l3) * l4 * l4 + 3 * l4 * l4 * l4 + 3 * (l2 + l3) * (l2 + l3) * l4)},
        {{lower_third, a_margin},
         2 * (-36 * l1 * l1 * l1 - 18 * l1 * ((1 - 2 * l2) * (1 - 2 * l2) - 2 * l4 * l4 + 4 * l2 * l4) -
              36 * l1 * l1 * (l2 - 1) + 12 * poly_a + 5)},
        {{lower_third, -a_margin},
         4 * (-30 * l1 * l1 * l1 +
              6 * (-3 * l2 * (l4 - 1) * (l4 - 1) - 6 * l2 * l2 * (l4 - 1) - 4 * l2 * l2 * l2 + 2 * l4 * l4 * l4) -
              18 * l1 * ((l4 - 1) * (l4 - 1) + 2 * l2 * (l4 - 1) + 2 * l2 * l2) - 9 * l4 -
              18 * l1 * l1 * (l2 + 2 * l4 - 2) + 4)},
        {{-lower_third, -upper_half, a_margin, b_margin},
         6 * (6 * l1 * l1 * l1 + 12 * (-2 * l2 * l2 + l4 * l4 - 2 * l2 * (l4 - 1)) * l1 - 6 * l1 * l1 * (2 * l2 + 1) +
              4 * poly_a + 1)},
        {{-lower_third, -upper_half, -a_margin, b_margin},
         12 * (-std::pow(l1 + 2 * l2 - 1, 3) - 6 * (l1 + l2) * l4 * l4 + 4 * l4 * l4 * l4 -
               3 * ((1 - 2 * l2) * (1 - 2 * l2) + 4 * l1 * l1 + 4 * l1 * (l2 - 1)) * l4)},
        {{-lower_third, -upper_half, a_margin, -b_margin},
         6 * (std::pow(2 * l1 - 1, 3) + 16 * l4 * l4 * l4 + 12 * l4 * l4 * (l1 - l2 - 1) -
              24 * l2 * (l1 + l2 - 1) * l4)},
        {{-lower_third, -upper_half, -a_margin, -b_margin},
         12 * l4 * (-12 * (l1 * l1 + l2 * l2 + l1 * (l2 - 1)) + 4 * l4 * l4 + 12 * l2 - 6 * (l1 + l2) * l4 - 3)},
    }};

    constexpr double slack = 1e-12;
    const Branch *chosen = nullptr;
    for (const auto &branch : branches) {
        bool active = std::all_of(branch.margins.begin(), branch.margins.end(),
                                  [](double m) { return m >= -slack; });
        if (!active) {
            continue;
        }
        if (chosen == nullptr) {
            chosen = &branch;
        } else {
            if (std::abs(branch.value - chosen->value) > 1e-8) {
                throw Error(ErrorCode::NumericalBreakdown, "4x4 accessible branches disagree at region boundary");
            }
        }
    }
    if (chosen == nullptr) {
        throw Error(ErrorCode::NumericalBreakdown, "no 4x4 accessible branch matches the state");
    }
    return chosen->value;
}

}  // namespace

std::string MeasureId::name() const {
    switch (kind) {
        case Kind::Es:
            return "es";
        case Kind::EsGen:
            return "esgen" + std::to_string(k);
        case Kind::Ea:
            return "ea";
        case Kind::Ef:
            return "ef";
        case Kind::Neg:
            return "neg";
        case Kind::Geo:
            return "geo";
    }
    return "?";
}

MeasureId parse_measure_id(std::string_view text) {
    std::string t(text);
    t.erase(0, t.find_first_not_of(" \t"));
    t.erase(t.find_last_not_of(" \t") + 1);
    for (auto &ch : t) {
        ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    }
    if (t == "es") {
        return MeasureId::es();
    }
    if (t == "ea") {
        return MeasureId::ea();
    }
    if (t == "ef") {
        return MeasureId::ef();
    }
    if (t == "neg") {
        return MeasureId::neg();
    }
    if (t == "geo") {
        return MeasureId::geo();
    }
    if (t.rfind("esgen", 0) == 0) {
        std::string_view rest = std::string_view(t).substr(5);
        if (!rest.empty() && rest.front() == ':') {
            rest.remove_prefix(1);
        }
        int k = 0;
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), k);
        if (!rest.empty() && ec == std::errc() && ptr == rest.data() + rest.size() && k >= 1) {
            return MeasureId::es_gen(k);
        }
    }
    throw Error(ErrorCode::UnknownMeasure, "unknown measure '" + std::string(text) + "'");
}

std::vector<MeasureId> parse_measure_ids(std::string_view comma_separated) {
    std::vector<MeasureId> out;
    std::size_t start = 0;
    while (start <= comma_separated.size()) {
        std::size_t end = comma_separated.find(',', start);
        if (end == std::string_view::npos) {
            end = comma_separated.size();
        }
        out.push_back(parse_measure_id(comma_separated.substr(start, end - start)));
        start = end + 1;
    }
    return out;
}

double es_permutation(const SchmidtVector &lambda) {
    int d = lambda.dim();
    require_dim_cap(d);
    double sum = divided_symmetrization(lambda.values(), d, (d + 1) / 2.0);
    return clamp_unit(1 - sum, "source entanglement");
}

double es_simplified_raw(std::span<const double> lambda) {
    int d = static_cast<int>(lambda.size());
    return 1 - divided_symmetrization(lambda, d, 0.0);
}

double es_simplified(const SchmidtVector &lambda) {
    require_dim_cap(lambda.dim());
    return clamp_unit(es_simplified_raw(lambda.values()), "source entanglement");
}

double es_p_form(const PCoordinates &p) {
    int d = static_cast<int>(p.p.size());
    require_dim_cap(d);
    std::array<int, kMaxDim> sigma{};
    std::iota(sigma.begin(), sigma.begin() + d, 1);
    CompensatedSum total;
    do {
        double base = 0;
        int prefix = 0;
        for (int k = 0; k + 1 < d; k++) {
            prefix += sigma[static_cast<std::size_t>(k)];
            base += p.p[static_cast<std::size_t>(k)] / (k + 1) * prefix;
        }
        long long denom = 1;
        for (int i = 0; i + 1 < d; i++) {
            denom *= sigma[static_cast<std::size_t>(i)] - sigma[static_cast<std::size_t>(i) + 1];
        }
        double power = 1;
        for (int i = 0; i + 1 < d; i++) {
            power *= base;
        }
        total.add(power / static_cast<double>(denom));
    } while (std::next_permutation(sigma.begin(), sigma.begin() + d));
    return 1 - total.value();
}

double evaluate_closed(const SchmidtVector &lambda, MeasureId id) {
    int d = lambda.dim();
    auto unsupported = [&]() -> Error {
        return Error(ErrorCode::UnsupportedClosedForm,
                     "no closed form for " + id.name() + " at dimension " + std::to_string(d));
    };
    switch (id.kind) {
        case MeasureId::Kind::Es:
            if (d == 2) {
                return clamp_unit(2 * (1 - lambda[0]), "closed-form Es");
            }
            if (d == 3) {
                return clamp_unit(es_closed_3(lambda[1], lambda[2]), "closed-form Es");
            }
            if (d == 4) {
                return clamp_unit(es_closed_4(lambda[1], lambda[2], lambda[3]), "closed-form Es");
            }
            throw unsupported();
        case MeasureId::Kind::Ea:
            if (d == 2) {
                return clamp_unit(2 * (1 - lambda[0]), "closed-form Ea");
            }
            if (d == 3) {
                return clamp_unit(ea_closed_3(lambda[0], lambda[1], lambda[2]), "closed-form Ea");
            }
            if (d == 4) {
                return clamp_unit(ea_closed_4(lambda[0], lambda[1], lambda[2], lambda[3]), "closed-form Ea");
            }
            throw unsupported();
        case MeasureId::Kind::EsGen:
            if (id.k == d) {
                return evaluate_closed(lambda, MeasureId::es());
            }
            if (d == 3 && id.k == 4) {
                return clamp_unit(es_gen4_closed_3(lambda[1], lambda[2]), "closed-form EsGen4");
            }
            if (d == 4 && id.k == 5) {
                return clamp_unit(es_embed5_closed_4(lambda[1], lambda[2], lambda[3]) * (256.0 / 255.0),
                                  "closed-form EsGen5");
            }
            if (d == 4 && id.k == 6) {
                return clamp_unit(es_embed6_closed_4(lambda[1], lambda[2], lambda[3]) * (512.0 / 499.0),
                                  "closed-form EsGen6");
            }
            throw unsupported();
        default:
            throw unsupported();
    }
}

double generalization_constant(int d, int k) {
    if (k < d) {
        throw Error(ErrorCode::DimensionShrink, "generalization needs k >= d");
    }
    require_dim_cap(k);
    static std::shared_mutex mutex;
    static std::map<std::pair<int, int>, double> cache;
    {
        std::shared_lock lock(mutex);
        auto it = cache.find({d, k});
        if (it != cache.end()) {
            return it->second;
        }
    }
    double value = es_simplified(embed(maximally_entangled(d), k));
    std::unique_lock lock(mutex);
    cache.emplace(std::make_pair(d, k), value);
    return value;
}

double es_generalized(const SchmidtVector &lambda, int k) {
    int d = lambda.dim();
    if (k < d) {
        throw Error(ErrorCode::DimensionShrink, "generalization needs k >= d");
    }
    require_dim_cap(k);
    if (k == d) {
        return es_simplified(lambda);
    }
    double raw = 1 - divided_symmetrization(lambda.values(), k, 0.0);
    return clamp_unit(raw / generalization_constant(d, k), "generalized source entanglement");
}

double ent_formation(const SchmidtVector &lambda) {
    double s = 0;
    for (double v : lambda.values()) {
        if (v > 0) {
            s -= v * std::log2(v);
        }
    }
    return std::max(0.0, s);
}

double negativity(const SchmidtVector &lambda) {
    int d = lambda.dim();
    if (d < 2) {
        return 0;
    }
    double s = 0;
    for (int i = 0; i < d; i++) {
        for (int j = i + 1; j < d; j++) {
            s += std::sqrt(lambda[i] * lambda[j]);
        }
    }
    return std::clamp(2.0 / (d - 1) * s, 0.0, 1.0);
}

double geometric(const SchmidtVector &lambda) {
    return 1 - lambda[0];
}

SchmidtVector tensor_schmidt(const SchmidtVector &a, const SchmidtVector &b) {
    require_dim_cap(a.dim() * b.dim());
    std::vector<double> products;
    products.reserve(static_cast<std::size_t>(a.dim() * b.dim()));
    for (double x : a.values()) {
        for (double y : b.values()) {
            products.push_back(x * y);
        }
    }
    return new_sorted(products);
}

double evaluate(const SchmidtVector &lambda, MeasureId id) {
    switch (id.kind) {
        case MeasureId::Kind::Es:
            return es_simplified(lambda);
        case MeasureId::Kind::EsGen:
            return es_generalized(lambda, id.k);
        case MeasureId::Kind::Ea:
            return evaluate_closed(lambda, id);
        case MeasureId::Kind::Ef:
            return ent_formation(lambda);
        case MeasureId::Kind::Neg:
            return negativity(lambda);
        case MeasureId::Kind::Geo:
            return geometric(lambda);
    }
    throw Error(ErrorCode::UnknownMeasure, "unhandled measure kind");
}

MeasurePoint measure_point(const SchmidtVector &lambda, const std::vector<MeasureId> &ids) {
    MeasurePoint point{lambda, {}};
    point.values.reserve(ids.size());
    for (const auto &id : ids) {
        point.values.emplace_back(id, evaluate(lambda, id));
    }
    return point;
}

}  // namespace bent
