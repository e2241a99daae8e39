#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "bent/error.hpp"
#include "bent/schmidt.hpp"

using namespace bent;

namespace {

// lambda_j = sum_{i >= j} p_i / i, built directly from the definition.
std::vector<double> apply_m(const std::vector<double> &p) {
    std::size_t d = p.size();
    std::vector<double> lam(d, 0.0);
    for (std::size_t j = 0; j < d; j++) {
        for (std::size_t i = j; i < d; i++) {
            lam[j] += p[i] / static_cast<double>(i + 1);
        }
    }
    return lam;
}

ErrorCode code_of(auto &&f) {
    try {
        f();
    } catch (const Error &e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::ParseError;
}

}  // namespace

TEST_CASE("new_sorted sorts and renormalizes") {
    auto a = new_sorted({0.1, 0.3, 0.6});
    CHECK(a[0] == doctest::Approx(0.6));
    CHECK(a[1] == doctest::Approx(0.3));
    CHECK(a[2] == doctest::Approx(0.1));

    auto b = new_sorted({1, 0, 0});
    CHECK(b[0] == 1.0);
    CHECK(b[1] == 0.0);

    auto c = new_sorted({0.3333333334, 0.3333333333, 0.3333333333});
    double sum = c[0] + c[1] + c[2];
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(c[0] >= c[1]);
    CHECK(c[1] >= c[2]);
}

TEST_CASE("new_sorted errors") {
    CHECK(code_of([] { new_sorted({0.5, 0.6, -0.1}); }) == ErrorCode::NegativeCoefficient);
    CHECK(code_of([] { new_sorted({0.5, 0.2}); }) == ErrorCode::NotNormalized);
}

TEST_CASE("to_p inverts the triangular map") {
    auto p = to_p(new_sorted({0.6, 0.3, 0.1}));
    REQUIRE(p.p.size() == 3);
    CHECK(p.p[0] == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(p.p[1] == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(p.p[2] == doctest::Approx(0.3).epsilon(1e-14));
    auto lam = apply_m(p.p);
    CHECK(lam[0] == doctest::Approx(0.6));
    CHECK(lam[1] == doctest::Approx(0.3));
    CHECK(lam[2] == doctest::Approx(0.1));
}

TEST_CASE("from_p extreme points") {
    auto me = from_p({{0, 0, 1}});
    for (int i = 0; i < 3; i++) {
        CHECK(me[i] == doctest::Approx(1.0 / 3));
    }
    auto sep = from_p({{1, 0, 0}});
    CHECK(sep[0] == 1.0);
    CHECK(sep[2] == 0.0);
    CHECK(code_of([] { from_p({{0.5, 0.6, -0.1}}); }) == ErrorCode::NegativeCoefficient);
}

TEST_CASE("to_p and from_p round trip") {
    auto stream = derive_stream(7, 0);
    double worst = 0;
    for (int d = 2; d <= 6; d++) {
        for (int i = 0; i < 2000; i++) {
            auto lam = sample_uniform(d, stream);
            auto p = to_p(lam);
            for (double x : p.p) {
                CHECK(x >= -1e-15);
            }
            auto back = from_p(p);
            for (int j = 0; j < d; j++) {
                worst = std::max(worst, std::abs(back[j] - lam[j]));
            }
            auto direct = apply_m(p.p);
            for (int j = 0; j < d; j++) {
                worst = std::max(worst, std::abs(direct[static_cast<std::size_t>(j)] - lam[j]));
            }
        }
    }
    CHECK(worst <= 1e-12);
}

TEST_CASE("embed pads with zeros") {
    auto a = embed(new_sorted({0.6, 0.4}), 3);
    REQUIRE(a.dim() == 3);
    CHECK(a[2] == 0.0);
    auto me = embed(maximally_entangled(3), 4);
    CHECK(me.dim() == 4);
    CHECK(me[3] == 0.0);
    auto lam = new_sorted({0.5, 0.3, 0.2});
    CHECK(embed(lam, 3) == lam);
    CHECK(code_of([&] { embed(lam, 2); }) == ErrorCode::DimensionShrink);
}

TEST_CASE("sample_uniform mean of the largest coefficient at d=2") {
    auto stream = derive_stream(0, 0);
    const int n = 1000000;
    double sum = 0;
    for (int i = 0; i < n; i++) {
        sum += sample_uniform(2, stream)[0];
    }
    double mean = sum / n;
    // lambda_1 is uniform on [1/2, 1].
    double sigma = 0.5 / std::sqrt(12.0) / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean - 0.75) < 3 * sigma);
}

TEST_CASE("sample_uniform passes a Kolmogorov-Smirnov test at d=2") {
    auto stream = derive_stream(3, 1);
    const int n = 200000;
    std::vector<double> xs(n);
    for (auto &x : xs) {
        x = sample_uniform(2, stream)[0];
    }
    std::sort(xs.begin(), xs.end());
    double dmax = 0;
    for (int i = 0; i < n; i++) {
        double f = 2 * xs[static_cast<std::size_t>(i)] - 1;
        dmax = std::max({dmax, std::abs(f - static_cast<double>(i) / n), std::abs(f - static_cast<double>(i + 1) / n)});
    }
    // alpha = 1e-3 critical value.
    CHECK(dmax * std::sqrt(static_cast<double>(n)) < 1.95);
}

TEST_CASE("sample_uniform is sorted, normalized and deterministic") {
    auto s1 = derive_stream(42, 5);
    auto s2 = derive_stream(42, 5);
    auto s3 = derive_stream(42, 6);
    bool differs = false;
    for (int i = 0; i < 100; i++) {
        auto a = sample_uniform(5, s1);
        auto b = sample_uniform(5, s2);
        auto c = sample_uniform(5, s3);
        CHECK(a == b);
        differs = differs || !(a == c);
        double sum = 0;
        for (int j = 0; j < 5; j++) {
            sum += a[j];
            if (j > 0) {
                CHECK(a[j - 1] >= a[j]);
            }
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(differs);
}

TEST_CASE("parse and format") {
    auto lam = parse_schmidt("0.6,0.3,0.1");
    CHECK(lam.dim() == 3);
    CHECK(lam[0] == doctest::Approx(0.6));
    CHECK(parse_schmidt(format_schmidt(lam)) == lam);
    CHECK(code_of([] { parse_schmidt("0.6,abc"); }) == ErrorCode::ParseError);
}
