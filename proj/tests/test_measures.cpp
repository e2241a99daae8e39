#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "bent/error.hpp"
#include "bent/measures.hpp"
#include "bent/monotones.hpp"
#include "bent/schmidt.hpp"

using namespace bent;

namespace {

double cubic_es3(const SchmidtVector &l) {
    double a = l[1], b = l[2];
    return 3 * a * a - 6 * a * b - 6 * (b - 1) * b;
}

double esgen4_oracle(const SchmidtVector &l) {
    double a = l[1], b = l[2];
    return 27.0 / 13.0 * (2 * a * a * a + 6 * a * a * b + 3 * (3 - 4 * a) * b * b - 10 * b * b * b);
}

}  // namespace

TEST_CASE("source entanglement examples") {
    auto psi = new_sorted({0.6, 0.3, 0.1});
    CHECK(es_permutation(psi) == doctest::Approx(0.63).epsilon(1e-12));
    CHECK(es_simplified(psi) == doctest::Approx(0.63).epsilon(1e-12));
    CHECK(es_p_form(to_p(psi)) == doctest::Approx(0.63).epsilon(1e-12));
    CHECK(evaluate_closed(psi, MeasureId::es()) == doctest::Approx(0.63).epsilon(1e-12));
    CHECK(es_permutation(new_sorted({1, 0, 0})) == doctest::Approx(0.0));
    CHECK(es_permutation(maximally_entangled(3)) == doctest::Approx(1.0).epsilon(1e-12));
    auto l = new_sorted({0.8, 0.15, 0.05});
    CHECK(es_simplified(l) == doctest::Approx(0.3075).epsilon(1e-12));
    CHECK(es_simplified(l) == doctest::Approx(cubic_es3(l)).epsilon(1e-12));
}

TEST_CASE("p-form ignores the last coordinate") {
    auto p = to_p(new_sorted({0.6, 0.3, 0.1}));
    double base = es_p_form(p);
    for (double last : {0.0, 0.1, 0.7, 2.5}) {
        PCoordinates probe = p;
        probe.p.back() = last;
        CHECK(es_p_form(probe) == doctest::Approx(base).epsilon(1e-14));
    }
}

TEST_CASE("accessible entanglement closed forms") {
    CHECK(evaluate_closed(new_sorted({0.6, 0.3, 0.1}), MeasureId::ea()) == doctest::Approx(0.36).epsilon(1e-12));
    CHECK(evaluate_closed(new_sorted({0.45, 0.35, 0.2}), MeasureId::ea()) == doctest::Approx(0.81).epsilon(1e-12));
    auto fig = new_sorted({0.6 / 1.1, 0.37 / 1.1, 0.13 / 1.1});
    CHECK(evaluate_closed(fig, MeasureId::ea()) == doctest::Approx(12 * fig[1] * fig[2]).epsilon(1e-12));
    CHECK(evaluate_closed(fig, MeasureId::ea()) == doctest::Approx(0.5772 / 1.21).epsilon(1e-12));
    CHECK(evaluate_closed(maximally_entangled(4), MeasureId::ea()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(evaluate_closed(maximally_entangled(5), MeasureId::ea()), Error);
}

TEST_CASE("generalized source entanglement") {
    auto l = new_sorted({0.5, 0.3, 0.2});
    CHECK(evaluate_closed(l, MeasureId::es_gen(4)) == doctest::Approx(esgen4_oracle(l)).epsilon(1e-12));
    CHECK(evaluate_closed(l, MeasureId::es_gen(4)) == doctest::Approx(0.61892).epsilon(1e-5));
    CHECK(evaluate_closed(maximally_entangled(3), MeasureId::es_gen(4)) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(es_generalized(l, 4) - evaluate_closed(l, MeasureId::es_gen(4))) <= 1e-9);
    CHECK(es_generalized(l, 3) == doctest::Approx(es_permutation(l)).epsilon(1e-14));
    CHECK(es_generalized(new_sorted({1, 0}), 4) == doctest::Approx(0.0));
}

TEST_CASE("generalization constants are grid suprema") {
    struct Case {
        int d, k, steps;
    };
    for (auto c : {Case{3, 4, 240}, Case{4, 5, 48}, Case{4, 6, 48}}) {
        double best = 0;
        std::vector<int> counts(static_cast<std::size_t>(c.d), 0);
        // Enumerate sorted compositions of steps into d parts.
        std::function<void(int, int, int)> rec = [&](int pos, int remaining, int cap) {
            if (pos == c.d - 1) {
                if (remaining > cap) {
                    return;
                }
                counts[static_cast<std::size_t>(pos)] = remaining;
                std::vector<double> lam;
                for (int x : counts) {
                    lam.push_back(static_cast<double>(x) / c.steps);
                }
                lam.resize(static_cast<std::size_t>(c.k), 0.0);
                best = std::max(best, es_permutation(SchmidtVector::trusted(lam)));
                return;
            }
            for (int x = std::min(cap, remaining); x * (c.d - pos) >= remaining; x--) {
                counts[static_cast<std::size_t>(pos)] = x;
                rec(pos + 1, remaining - x, x);
            }
        };
        rec(0, c.steps, c.steps);
        double constant = generalization_constant(c.d, c.k);
        CHECK(best <= constant + 1e-12);
        CHECK(constant - best <= 1e-6);
    }
}

TEST_CASE("formula equivalence on random states") {
    auto stream = derive_stream(21, 0);
    double worst = 0;
    for (int d = 2; d <= 6; d++) {
        for (int i = 0; i < (d == 6 ? 500 : 2000); i++) {
            auto l = sample_uniform(d, stream);
            double perm = es_permutation(l);
            worst = std::max(worst, std::abs(perm - es_simplified(l)));
            worst = std::max(worst, std::abs(perm - es_p_form(to_p(l))));
            if (d <= 4) {
                worst = std::max(worst, std::abs(perm - evaluate_closed(l, MeasureId::es())));
            }
            CHECK(perm >= -1e-12);
            CHECK(perm <= 1 + 1e-12);
        }
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("1 - Es is homogeneous of degree d - 1 on unnormalized vectors") {
    auto stream = derive_stream(22, 0);
    for (int d = 2; d <= 5; d++) {
        for (int i = 0; i < 200; i++) {
            auto l = sample_uniform(d, stream);
            std::vector<double> raw(l.values().begin(), l.values().end());
            double c = 0.1 + 1.9 * static_cast<double>(i) / 200;
            std::vector<double> scaled = raw;
            for (auto &x : scaled) {
                x *= c;
            }
            double lhs = 1 - es_simplified_raw(scaled);
            double rhs = std::pow(c, d - 1) * (1 - es_simplified_raw(raw));
            CHECK(std::abs(lhs - rhs) <= 1e-10);
        }
    }
}

TEST_CASE("closed forms for the generalizations at d=4") {
    auto stream = derive_stream(23, 0);
    for (int i = 0; i < 300; i++) {
        auto l = sample_uniform(4, stream);
        for (int k : {5, 6}) {
            CHECK(std::abs(evaluate_closed(l, MeasureId::es_gen(k)) - es_generalized(l, k)) <= 1e-9);
        }
    }
    CHECK_THROWS_AS(evaluate_closed(maximally_entangled(5), MeasureId::es()), Error);
}

TEST_CASE("other measures") {
    CHECK(ent_formation(new_sorted({0.5, 0.5})) == doctest::Approx(1.0));
    long double ef = 0;
    for (long double x : {0.6L, 0.3L, 0.1L}) {
        ef -= x * std::log2(x);
    }
    CHECK(ent_formation(new_sorted({0.6, 0.3, 0.1})) == doctest::Approx(static_cast<double>(ef)).epsilon(1e-14));
    CHECK(ent_formation(new_sorted({0.6, 0.3, 0.1})) == doctest::Approx(1.29546).epsilon(1e-5));
    CHECK(negativity(maximally_entangled(3)) == doctest::Approx(1.0));
    CHECK(negativity(new_sorted({1, 0, 0})) == doctest::Approx(0.0));
    CHECK(geometric(new_sorted({1, 0, 0})) == 0.0);
    CHECK(geometric(new_sorted({0.6, 0.3, 0.1})) == doctest::Approx(0.4));
}

TEST_CASE("tensor products") {
    auto a = tensor_schmidt(new_sorted({0.5, 0.5}), new_sorted({0.5, 0.5}));
    for (int i = 0; i < 4; i++) {
        CHECK(a[i] == doctest::Approx(0.25));
    }
    auto b = tensor_schmidt(new_sorted({0.7, 0.3}), new_sorted({0.7, 0.3}));
    CHECK(b[0] == doctest::Approx(0.49));
    CHECK(b[1] == doctest::Approx(0.21));
    CHECK(b[2] == doctest::Approx(0.21));
    CHECK(b[3] == doctest::Approx(0.09));
    CHECK_THROWS_AS(tensor_schmidt(maximally_entangled(4), maximally_entangled(3)), Error);
}

TEST_CASE("two-qubit specializations and non-additivity") {
    for (double l1 = 0.5; l1 < 0.95; l1 += 0.1) {
        auto l = new_sorted({l1, 1 - l1});
        CHECK(es_permutation(l) == doctest::Approx(2 * (1 - l1)).epsilon(1e-12));
        CHECK(es_permutation(embed(l, 4)) == doctest::Approx(4 * std::pow(1 - l1, 3)).epsilon(1e-12));
        double expected = 2 * (1 - l1) * (1 - l1) * (1 + 2 * l1 * (1 + 6 * l1 * (2 * l1 - 1)));
        CHECK(std::abs(es_simplified(tensor_schmidt(l, l)) - expected) <= 1e-10);
    }
    auto l = new_sorted({0.7, 0.3});
    CHECK(std::abs(es_simplified(tensor_schmidt(l, l)) - 2 * es_simplified(l)) > 1e-3);
}

TEST_CASE("measures are non-increasing under LOCC") {
    auto stream = derive_stream(24, 0);
    std::vector<MeasureId> ids{MeasureId::es(),  MeasureId::es_gen(4), MeasureId::ea(),
                               MeasureId::ef(),  MeasureId::neg(),     MeasureId::geo()};
    int pairs = 0;
    for (int i = 0; i < 10000; i++) {
        auto psi = sample_uniform(3, stream);
        auto phi = sample_uniform(3, stream);
        if (!can_reach(psi, phi)) {
            std::swap(psi, phi);
        }
        if (!can_reach(psi, phi)) {
            continue;
        }
        pairs++;
        for (auto id : ids) {
            CHECK(evaluate(phi, id) <= evaluate(psi, id) + 1e-12);
        }
    }
    CHECK(pairs > 1000);
}

TEST_CASE("measure ids parse") {
    CHECK(parse_measure_id("es") == MeasureId::es());
    CHECK(parse_measure_id("esgen5") == MeasureId::es_gen(5));
    CHECK(parse_measure_id("ea").name() == "ea");
    CHECK(MeasureId::es_gen(6).name() == "esgen6");
    CHECK(parse_measure_ids("es,esgen4,geo").size() == 3);
    CHECK_THROWS_AS(parse_measure_id("entropy"), Error);
}
