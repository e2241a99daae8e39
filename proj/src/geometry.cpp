#include "bent/geometry.hpp"

#include <gmpxx.h>

#include <array>
#include <cmath>
#include <mutex>
#include <unordered_map>

#include "bent/error.hpp"
#include "bent/monotones.hpp"
#include "bent/parallel.hpp"

namespace bent {

namespace {

enum class Direction { SampleReachesPhi, PhiReachesSample };

std::uint64_t count_comparable(const SchmidtVector &phi, std::uint64_t n, std::uint64_t seed, Direction direction) {
    const auto target = vidal_monotones(phi).e;
    const int d = phi.dim();
    std::vector<std::uint64_t> hits((n + kSampleChunk - 1) / kSampleChunk, 0);
    for_each_chunk(n, kSampleChunk, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        auto stream = derive_stream(seed, chunk);
        std::uint64_t local = 0;
        for (std::size_t i = begin; i < end; i++) {
            auto psi = sample_uniform(d, stream);
            double tail = 0;
            bool ok = true;
            for (int k = d - 1; k >= 1 && ok; k--) {
                tail += psi[k];
                double diff = tail - target[static_cast<std::size_t>(k)];
                ok = direction == Direction::SampleReachesPhi ? diff >= -1e-12 : diff <= 1e-12;
            }
            local += ok ? 1 : 0;
        }
        hits[chunk] = local;
    });
    std::uint64_t total = 0;
    for (auto h : hits) {
        total += h;
    }
    return total;
}

VolumeEstimate make_estimate(double fraction, std::uint64_t n, std::uint64_t seed) {
    return {fraction, std::sqrt(fraction * (1 - fraction) / static_cast<double>(n)), n, seed};
}

using Point = std::array<mpq_class, 2>;

// Half-plane a x + b y <= c.
struct HalfPlane {
    mpq_class a, b, c;
    mpq_class slack(const Point &p) const {
        return c - a * p[0] - b * p[1];
    }
};

std::vector<Point> clip(const std::vector<Point> &poly, const HalfPlane &h) {
    std::vector<Point> out;
    std::size_t m = poly.size();
    for (std::size_t i = 0; i < m; i++) {
        const Point &cur = poly[i];
        const Point &nxt = poly[(i + 1) % m];
        mpq_class sc = h.slack(cur);
        mpq_class sn = h.slack(nxt);
        if (sc >= 0) {
            out.push_back(cur);
        }
        if ((sc > 0 && sn < 0) || (sc < 0 && sn > 0)) {
            mpq_class t = sc / (sc - sn);
            out.push_back({cur[0] + t * (nxt[0] - cur[0]), cur[1] + t * (nxt[1] - cur[1])});
        }
    }
    return out;
}

mpq_class cross(const Point &o, const Point &a, const Point &b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Drops repeated and collinear vertices.
std::vector<Point> simplify(std::vector<Point> poly) {
    bool changed = true;
    while (changed && poly.size() >= 3) {
        changed = false;
        for (std::size_t i = 0; i < poly.size(); i++) {
            const Point &prev = poly[(i + poly.size() - 1) % poly.size()];
            const Point &next = poly[(i + 1) % poly.size()];
            if (poly[i] == next || cross(prev, poly[i], next) == 0) {
                poly.erase(poly.begin() + static_cast<std::ptrdiff_t>(i));
                changed = true;
                break;
            }
        }
    }
    if (poly.size() < 3) {
        poly.clear();
    }
    return poly;
}

mpq_class shoelace(const std::vector<Point> &poly) {
    mpq_class twice = 0;
    for (std::size_t i = 0; i < poly.size(); i++) {
        const Point &a = poly[i];
        const Point &b = poly[(i + 1) % poly.size()];
        twice += a[0] * b[1] - b[0] * a[1];
    }
    return twice / 2;
}

}  // namespace

VolumeEstimate mc_source_entanglement(const SchmidtVector &phi, std::uint64_t n, std::uint64_t seed) {
    auto hits = count_comparable(phi, n, seed, Direction::SampleReachesPhi);
    return make_estimate(1.0 - static_cast<double>(hits) / static_cast<double>(n), n, seed);
}

VolumeEstimate mc_accessible_entanglement(const SchmidtVector &phi, std::uint64_t n, std::uint64_t seed) {
    auto hits = count_comparable(phi, n, seed, Direction::PhiReachesSample);
    return make_estimate(static_cast<double>(hits) / static_cast<double>(n), n, seed);
}

double polygon_area(const Polygon2D &polygon) {
    double twice = 0;
    const auto &v = polygon.vertices;
    for (std::size_t i = 0; i < v.size(); i++) {
        const auto &a = v[i];
        const auto &b = v[(i + 1) % v.size()];
        twice += a.first * b.second - b.first * a.second;
    }
    return std::max(0.0, twice / 2);
}

ExactRegion exact_polygon_3(const SchmidtVector &phi, SetKind which) {
    if (phi.dim() != 3) {
        throw Error(ErrorCode::UnsupportedDim, "exact polygons need a 3x3 state");
    }
    auto e = vidal_monotones(phi).e;
    mpq_class e2(e[1]);
    mpq_class e3(e[2]);
    std::vector<Point> simplex = {
        Point{mpq_class(1), mpq_class(0)},
        Point{mpq_class(1, 2), mpq_class(1, 2)},
        Point{mpq_class(1, 3), mpq_class(1, 3)},
    };
    mpq_class full_area = shoelace(simplex);

    // E_2 = 1 - x and E_3 = 1 - x - y in (lambda_1, lambda_2) = (x, y).
    std::vector<HalfPlane> planes;
    if (which == SetKind::Source) {
        planes.push_back({1, 0, 1 - e2});
        planes.push_back({1, 1, 1 - e3});
    } else {
        planes.push_back({-1, 0, e2 - 1});
        planes.push_back({-1, -1, e3 - 1});
    }
    auto poly = simplex;
    for (const auto &h : planes) {
        poly = clip(poly, h);
    }
    poly = simplify(std::move(poly));

    ExactRegion region{};
    mpq_class area = poly.empty() ? mpq_class(0) : shoelace(poly);
    region.degenerate = area == 0;
    region.area_ratio = mpq_class(area / full_area).get_d();
    for (const auto &p : poly) {
        region.polygon.vertices.emplace_back(p[0].get_d(), p[1].get_d());
    }
    return region;
}

std::vector<CollisionPair> injectivity_scan(const std::vector<MeasureId> &ids, int d, std::uint64_t n, double tol,
                                            std::uint64_t seed, std::size_t max_pairs) {
    std::vector<SchmidtVector> states;
    std::vector<std::vector<double>> values(n);
    states.reserve(n);
    {
        std::vector<std::vector<SchmidtVector>> per_chunk((n + kSampleChunk - 1) / kSampleChunk);
        for_each_chunk(n, kSampleChunk, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
            auto stream = derive_stream(seed, chunk);
            for (std::size_t i = begin; i < end; i++) {
                auto s = sample_uniform(d, stream);
                std::vector<double> v;
                v.reserve(ids.size());
                for (const auto &id : ids) {
                    v.push_back(evaluate(s, id));
                }
                values[i] = std::move(v);
                per_chunk[chunk].push_back(std::move(s));
            }
        });
        for (auto &chunk : per_chunk) {
            for (auto &s : chunk) {
                states.push_back(std::move(s));
            }
        }
    }

    const std::size_t m = ids.size();
    auto cell_of = [&](const std::vector<double> &v) {
        std::vector<std::int64_t> cell(m);
        for (std::size_t j = 0; j < m; j++) {
            cell[j] = static_cast<std::int64_t>(std::floor(v[j] / tol));
        }
        return cell;
    };
    struct CellHash {
        std::size_t operator()(const std::vector<std::int64_t> &c) const {
            std::size_t h = 1469598103934665603ull;
            for (auto x : c) {
                h ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
            }
            return h;
        }
    };
    std::unordered_map<std::vector<std::int64_t>, std::vector<std::size_t>, CellHash> grid;
    std::vector<CollisionPair> pairs;
    std::size_t neighbours = 1;
    for (std::size_t j = 0; j < m; j++) {
        neighbours *= 3;
    }
    for (std::size_t i = 0; i < n && pairs.size() < max_pairs; i++) {
        auto cell = cell_of(values[i]);
        for (std::size_t code = 0; code < neighbours && pairs.size() < max_pairs; code++) {
            auto probe = cell;
            std::size_t c = code;
            for (std::size_t j = 0; j < m; j++) {
                probe[j] += static_cast<std::int64_t>(c % 3) - 1;
                c /= 3;
            }
            auto it = grid.find(probe);
            if (it == grid.end()) {
                continue;
            }
            for (std::size_t other : it->second) {
                bool close = true;
                for (std::size_t j = 0; j < m && close; j++) {
                    close = std::abs(values[i][j] - values[other][j]) <= tol;
                }
                if (!close) {
                    continue;
                }
                double dist = 0;
                for (int k = 0; k < d; k++) {
                    dist = std::max(dist, std::abs(states[i][k] - states[other][k]));
                }
                if (dist > 10 * tol) {
                    pairs.push_back({states[other], states[i], values[other], values[i]});
                    if (pairs.size() >= max_pairs) {
                        break;
                    }
                }
            }
        }
        grid[cell].push_back(i);
    }
    return pairs;
}

}  // namespace bent
