#include "bent/region.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>

#include "bent/error.hpp"
#include "bent/monotones.hpp"
#include "bent/parallel.hpp"

namespace bent {

namespace {

std::vector<double> evaluate_all(const SchmidtVector &lambda, const std::vector<MeasureId> &ids) {
    std::vector<double> out;
    out.reserve(ids.size());
    for (const auto &id : ids) {
        out.push_back(evaluate(lambda, id));
    }
    return out;
}

void require_3_or_4(int d, const char *what) {
    if (d != 3 && d != 4) {
        throw Error(ErrorCode::UnsupportedDim, std::string(what) + " are defined for d = 3 and d = 4 only");
    }
}

int square_root_dim(int d) {
    int a = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d))));
    if (a * a != d || a < 2) {
        throw Error(ErrorCode::UnsupportedDim, "product sampling needs d to be a square, got " + std::to_string(d));
    }
    return a;
}

// Collects per-chunk outputs in chunk order.
template <typename Row, typename Fn>
std::vector<Row> chunked_rows(std::uint64_t n, Fn make_row) {
    std::size_t chunks = (n + kSampleChunk - 1) / kSampleChunk;
    std::vector<std::vector<Row>> parts(chunks);
    for_each_chunk(n, kSampleChunk, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        auto &part = parts[chunk];
        part.reserve(end - begin);
        RandomStream stream = make_row.stream(chunk);
        for (std::size_t i = begin; i < end; i++) {
            part.push_back(make_row(stream));
        }
    });
    std::vector<Row> rows;
    rows.reserve(n);
    for (auto &part : parts) {
        std::move(part.begin(), part.end(), std::back_inserter(rows));
    }
    return rows;
}

struct ScanRowMaker {
    const ScanConfig *config;
    int factor_dim = 0;

    RandomStream stream(std::size_t chunk) const {
        return derive_stream(config->seed, chunk);
    }
    ScanRow operator()(RandomStream &stream) const {
        if (config->products) {
            SchmidtVector a = sample_uniform(factor_dim, stream);
            SchmidtVector b = sample_uniform(factor_dim, stream);
            SchmidtVector psi = tensor_schmidt(a, b);
            return {psi, evaluate_all(psi, config->ids), RowLabel::ProductState};
        }
        SchmidtVector psi = sample_uniform(config->d, stream);
        RowLabel label = config->phi ? relation_label(psi, *config->phi) : RowLabel::Generic;
        return {psi, evaluate_all(psi, config->ids), label};
    }
};

struct PsuccRowMaker {
    const SchmidtVector *phi;
    Direction direction;
    std::uint64_t seed;
    const std::vector<MeasureId> *ids;

    RandomStream stream(std::size_t chunk) const {
        return derive_stream(seed, chunk);
    }
    PsuccRow operator()(RandomStream &stream) const {
        SchmidtVector psi = sample_uniform(phi->dim(), stream);
        ConversionProbability cp =
            direction == Direction::From ? success_probability(*phi, psi) : success_probability(psi, *phi);
        return {psi, cp.p, cp.k0, evaluate_all(psi, *ids)};
    }
};

void write_lambda_header(std::ostream &out, int d) {
    for (int i = 1; i <= d; i++) {
        out << (i > 1 ? "," : "") << "lambda_" << i;
    }
}

void write_lambda(std::ostream &out, const SchmidtVector &s) {
    for (int i = 0; i < s.dim(); i++) {
        out << (i > 0 ? "," : "") << format_number(s[i]);
    }
}

void write_values(std::ostream &out, const std::vector<double> &values) {
    for (double v : values) {
        out << ',' << format_number(v);
    }
}

void write_measure_header(std::ostream &out, const std::vector<MeasureId> &ids) {
    for (const auto &id : ids) {
        out << ',' << id.name();
    }
}

// A curve lambda(t) on [lo, hi]; empty when lo > hi.
struct Curve {
    std::string name;
    double lo, hi;
    std::function<std::vector<double>(double)> at;
};

std::vector<CurveRow> sample_curve(const Curve &c, int steps, const std::vector<MeasureId> &ids) {
    std::vector<CurveRow> rows;
    if (c.lo > c.hi + 1e-12) {
        return rows;
    }
    double hi = std::max(c.lo, c.hi);
    for (int i = 0; i <= steps; i++) {
        double t = steps == 0 ? c.lo : c.lo + (hi - c.lo) * i / steps;
        SchmidtVector s = new_sorted(c.at(t));
        rows.push_back({c.name, t, s, evaluate_all(s, ids)});
    }
    return rows;
}

// Ordered simplex point for arbitrary p with sum 1: negative entries from
// finite-difference probes are clipped before sorting.
SchmidtVector state_from_p_relaxed(const std::vector<double> &p) {
    int d = static_cast<int>(p.size());
    std::vector<double> lambda(static_cast<std::size_t>(d), 0.0);
    double acc = 0;
    for (int j = d - 1; j >= 0; j--) {
        acc += p[static_cast<std::size_t>(j)] / (j + 1);
        lambda[static_cast<std::size_t>(j)] = std::max(0.0, acc);
    }
    double total = 0;
    for (double v : lambda) {
        total += v;
    }
    for (double &v : lambda) {
        v /= total;
    }
    return new_sorted(lambda);
}

// Euclidean projection onto the probability simplex.
std::vector<double> project_simplex(std::vector<double> v) {
    std::vector<double> u = v;
    std::sort(u.begin(), u.end(), std::greater<>());
    double cumulative = 0, theta = 0;
    for (std::size_t i = 0; i < u.size(); i++) {
        cumulative += u[i];
        double candidate = (cumulative - 1) / static_cast<double>(i + 1);
        if (u[i] - candidate > 0) {
            theta = candidate;
        }
    }
    for (double &x : v) {
        x = std::max(0.0, x - theta);
    }
    return v;
}

}  // namespace

std::string label_name(RowLabel label) {
    switch (label) {
        case RowLabel::Generic:
            return "generic";
        case RowLabel::SourceOfPhi:
            return "source-of-phi";
        case RowLabel::AccessibleFromPhi:
            return "accessible-from-phi";
        case RowLabel::Incomparable:
            return "incomparable";
        case RowLabel::ProductState:
            return "product-state";
    }
    return "generic";
}

RowLabel relation_label(const SchmidtVector &psi, const SchmidtVector &phi) {
    if (can_reach(psi, phi)) {
        return RowLabel::SourceOfPhi;
    }
    if (can_reach(phi, psi)) {
        return RowLabel::AccessibleFromPhi;
    }
    return RowLabel::Incomparable;
}

std::string format_number(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

std::vector<ScanRow> scan(const ScanConfig &config) {
    if (config.phi && config.phi->dim() != config.d) {
        throw Error(ErrorCode::DimensionMismatch, "phi must have dimension " + std::to_string(config.d));
    }
    if (config.d < 1 || config.d > kMaxDim) {
        throw Error(ErrorCode::DimensionTooLarge, "scan dimension must lie in [1, " + std::to_string(kMaxDim) + "]");
    }
    ScanRowMaker maker{&config, config.products ? square_root_dim(config.d) : 0};
    return chunked_rows<ScanRow>(config.n, maker);
}

void write_scan_csv(std::ostream &out, int d, const std::vector<MeasureId> &ids, const std::vector<ScanRow> &rows) {
    write_lambda_header(out, d);
    write_measure_header(out, ids);
    out << ",label\n";
    for (const auto &row : rows) {
        write_lambda(out, row.state);
        write_values(out, row.values);
        out << ',' << label_name(row.label) << '\n';
    }
}

std::vector<std::string> family_names(int d) {
    require_3_or_4(d, "boundary families");
    if (d == 3) {
        return {"lam2=lam3", "lam3=0", "lam1=lam2", "ea-upper-red", "ea-upper-orange", "white-line"};
    }
    return {"lam-a-max", "lam-b-min", "lam-c-min", "lam-d-min", "product-pair", "product-square"};
}

std::vector<std::string> envelope_family_names(int d) {
    require_3_or_4(d, "envelope families");
    if (d == 3) {
        return {"lam2=lam3", "lam3=0", "lam1=lam2"};
    }
    return {"lam-a-max", "lam-b-min", "lam-c-min", "lam-d-min"};
}

BoundaryFamily boundary_family(int d, const std::string &name, const std::optional<SchmidtVector> &phi) {
    require_3_or_4(d, "boundary families");
    auto make = [&](std::string parameter, double lo, double hi, std::function<std::vector<double>(double)> f) {
        return BoundaryFamily{name, d, std::move(parameter), lo, hi,
                              [f = std::move(f)](double t) { return new_sorted(f(t)); }};
    };
    if (d == 3) {
        if (name == "lam2=lam3") {
            return make("lambda_1", 1.0 / 3, 1, [](double t) { return std::vector{t, (1 - t) / 2, (1 - t) / 2}; });
        }
        if (name == "lam3=0") {
            return make("lambda_1", 0.5, 1, [](double t) { return std::vector{t, 1 - t, 0.0}; });
        }
        if (name == "lam1=lam2") {
            return make("lambda_1", 1.0 / 3, 0.5, [](double t) { return std::vector{t, t, 1 - 2 * t}; });
        }
        if (name == "ea-upper-red") {
            return make("lambda_3", 1.0 / 6, 1.0 / 3, [](double t) { return std::vector{2.0 / 3 - t, 1.0 / 3, t}; });
        }
        if (name == "ea-upper-orange") {
            return make("lambda_3", 0, 1.0 / 6, [](double t) {
                double l2 = std::sqrt(std::max(0.0, t * (1 - 2 * t)));
                return std::vector{1 - l2 - t, l2, t};
            });
        }
        if (name == "white-line") {
            if (!phi || phi->dim() != 3 || !((*phi)[2] > 0)) {
                throw Error(ErrorCode::DimensionMismatch, "white-line needs a 3x3 phi with lambda_3 > 0");
            }
            double r = (*phi)[1] / (*phi)[2];
            double knee = (*phi)[2] / (2 * (*phi)[1] + (*phi)[2]);
            return make("lambda_3", 0, 1.0 / 3, [r, knee](double t) {
                if (t <= knee) {
                    return std::vector{1 - r * t - t, r * t, t};
                }
                return std::vector{(1 - t) / 2, (1 - t) / 2, t};
            });
        }
    } else {
        if (name == "lam-a-max") {
            return make("lambda_1", 0.25, 1, [](double t) {
                double r = (1 - t) / 3;
                return std::vector{t, r, r, r};
            });
        }
        if (name == "lam-b-min") {
            return make("lambda_1", 0.5, 1, [](double t) { return std::vector{t, 1 - t, 0.0, 0.0}; });
        }
        if (name == "lam-c-min") {
            return make("lambda_1", 1.0 / 3, 0.5, [](double t) { return std::vector{t, t, 1 - 2 * t, 0.0}; });
        }
        if (name == "lam-d-min") {
            return make("lambda_1", 0.25, 1.0 / 3, [](double t) { return std::vector{t, t, t, 1 - 3 * t}; });
        }
        if (name == "product-square") {
            return make("lambda_1 of the 2x2 factor", 0.5, 1, [](double t) {
                return std::vector{t * t, t * (1 - t), t * (1 - t), (1 - t) * (1 - t)};
            });
        }
        if (name == "product-pair") {
            SchmidtVector partner = phi ? *phi : maximally_entangled(2);
            if (partner.dim() != 2) {
                throw Error(ErrorCode::DimensionMismatch, "product-pair takes a 2x2 partner state");
            }
            double a = partner[0], b = partner[1];
            return make("lambda_1 of the first 2x2 factor", 0.5, 1, [a, b](double t) {
                return std::vector{t * a, t * b, (1 - t) * a, (1 - t) * b};
            });
        }
    }
    throw Error(ErrorCode::UnknownFamily, "no family '" + name + "' for d = " + std::to_string(d));
}

std::vector<CurveRow> boundary(int d, const std::string &name, int steps, const std::vector<MeasureId> &ids,
                               const std::optional<SchmidtVector> &phi) {
    BoundaryFamily family = boundary_family(d, name, phi);
    std::vector<CurveRow> rows;
    for (int i = 0; i <= steps; i++) {
        double t = steps == 0 ? family.t_min : family.t_min + (family.t_max - family.t_min) * i / steps;
        SchmidtVector s = family.at(t);
        rows.push_back({name, t, s, evaluate_all(s, ids)});
    }
    return rows;
}

std::vector<CurveRow> image_boundaries(const SchmidtVector &phi, const std::vector<MeasureId> &ids, int steps) {
    int d = phi.dim();
    require_3_or_4(d, "image boundaries");
    std::vector<Curve> curves;
    if (d == 3) {
        double l1 = phi[0], e2 = 1 - phi[0], l3 = phi[2];
        curves.push_back({"e2-fixed", e2 / 2, std::min(l1, e2), [=](double t) { return std::vector{l1, t, e2 - t}; }});
        curves.push_back(
            {"e3-fixed", l3, (1 - l3) / 2, [=](double t) { return std::vector{1 - l3 - t, t, l3}; }});
    } else {
        double l1 = phi[0], l2 = phi[1], l3 = phi[2], l4 = phi[3];
        double e2 = 1 - l1, e3 = l3 + l4;
        curves.push_back({"e4-fixed-lam2=lam3", l4, (1 - l4) / 3,
                          [=](double t) { return std::vector{1 - l4 - 2 * t, t, t, l4}; }});
        curves.push_back({"e3-e4-fixed", l3, (1 - l3 - l4) / 2,
                          [=](double t) { return std::vector{1 - l3 - l4 - t, t, l3, l4}; }});
        curves.push_back({"e4-fixed-lam3=lam4", l4, (1 - 2 * l4) / 2,
                          [=](double t) { return std::vector{1 - 2 * l4 - t, t, l4, l4}; }});
        curves.push_back({"e2-e3-fixed", e3 / 2, std::min(l2, e3),
                          [=](double t) { return std::vector{l1, l2, t, e3 - t}; }});
        curves.push_back({"e2-fixed-lam4=0", e2 / 2, std::min(l1, e2),
                          [=](double t) { return std::vector{l1, t, e2 - t, 0.0}; }});
        curves.push_back({"e2-fixed-lam3=lam4", std::max(0.0, (e2 - l1) / 2), e2 / 3,
                          [=](double t) { return std::vector{l1, e2 - 2 * t, t, t}; }});
        curves.push_back({"e4-fixed-lam1=lam2", (1 - l4) / 3, (1 - 2 * l4) / 2,
                          [=](double t) { return std::vector{t, t, 1 - l4 - 2 * t, l4}; }});
    }
    std::vector<CurveRow> rows;
    for (const auto &c : curves) {
        auto part = sample_curve(c, steps, ids);
        std::move(part.begin(), part.end(), std::back_inserter(rows));
    }
    return rows;
}

void write_curve_csv(std::ostream &out, int d, const std::vector<MeasureId> &ids, const std::vector<CurveRow> &rows) {
    out << "curve,t,";
    write_lambda_header(out, d);
    write_measure_header(out, ids);
    out << '\n';
    for (const auto &row : rows) {
        out << row.curve << ',' << format_number(row.t) << ',';
        write_lambda(out, row.state);
        write_values(out, row.values);
        out << '\n';
    }
}

std::vector<PsuccRow> psucc_field(const SchmidtVector &phi, Direction direction, std::uint64_t n, std::uint64_t seed,
                                  const std::vector<MeasureId> &ids) {
    PsuccRowMaker maker{&phi, direction, seed, &ids};
    return chunked_rows<PsuccRow>(n, maker);
}

void write_psucc_csv(std::ostream &out, int d, const std::vector<MeasureId> &ids, const std::vector<PsuccRow> &rows) {
    write_lambda_header(out, d);
    write_measure_header(out, ids);
    out << ",p,k0\n";
    for (const auto &row : rows) {
        write_lambda(out, row.state);
        write_values(out, row.values);
        out << ',' << format_number(row.p) << ',' << row.k0 << '\n';
    }
}

EnvelopeReport envelope_check(int d, const std::vector<MeasureId> &ids, const std::vector<ScanRow> &rows, int bins,
                              int family_steps) {
    if (ids.size() < 2) {
        throw Error(ErrorCode::UnknownMeasure, "envelope check needs a binning measure and at least one more");
    }
    std::size_t m = ids.size();
    std::size_t others = m - 1;

    // Dense family samples, sorted by the binning measure.
    std::vector<std::vector<double>> family_points;
    for (const auto &name : envelope_family_names(d)) {
        BoundaryFamily family = boundary_family(d, name);
        std::vector<std::vector<double>> part(static_cast<std::size_t>(family_steps) + 1);
        for_each_chunk(part.size(), 4096, [&](std::size_t, std::size_t begin, std::size_t end) {
            for (std::size_t i = begin; i < end; i++) {
                double t = family.t_min + (family.t_max - family.t_min) * static_cast<double>(i) / family_steps;
                part[i] = evaluate_all(family.at(t), ids);
            }
        });
        std::move(part.begin(), part.end(), std::back_inserter(family_points));
    }
    std::sort(family_points.begin(), family_points.end());

    auto bin_of = [bins](double v) { return std::clamp(static_cast<int>(v * bins), 0, bins - 1); };
    EnvelopeReport report;
    report.bins.resize(static_cast<std::size_t>(bins));
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<std::vector<std::size_t>> argmin(static_cast<std::size_t>(bins), std::vector<std::size_t>(others)),
        argmax = argmin;
    for (int b = 0; b < bins; b++) {
        auto &bin = report.bins[static_cast<std::size_t>(b)];
        bin.lo = static_cast<double>(b) / bins;
        bin.hi = static_cast<double>(b + 1) / bins;
        bin.scan_min.assign(others, inf);
        bin.scan_max.assign(others, -inf);
        bin.family_min.assign(others, inf);
        bin.family_max.assign(others, -inf);
    }
    for (std::size_t r = 0; r < rows.size(); r++) {
        const auto &v = rows[r].values;
        auto b = static_cast<std::size_t>(bin_of(v[0]));
        auto &bin = report.bins[b];
        bin.count++;
        for (std::size_t j = 0; j < others; j++) {
            if (v[j + 1] < bin.scan_min[j]) {
                bin.scan_min[j] = v[j + 1];
                argmin[b][j] = r;
            }
            if (v[j + 1] > bin.scan_max[j]) {
                bin.scan_max[j] = v[j + 1];
                argmax[b][j] = r;
            }
        }
    }
    for (const auto &v : family_points) {
        auto &bin = report.bins[static_cast<std::size_t>(bin_of(v[0]))];
        for (std::size_t j = 0; j < others; j++) {
            bin.family_min[j] = std::min(bin.family_min[j], v[j + 1]);
            bin.family_max[j] = std::max(bin.family_max[j], v[j + 1]);
        }
    }
    auto nearest_family = [&](const std::vector<double> &v) {
        double best = inf;
        auto it = std::lower_bound(family_points.begin(), family_points.end(), v);
        auto dist = [&](const std::vector<double> &f) {
            double dmax = 0;
            for (std::size_t k = 0; k < m; k++) {
                dmax = std::max(dmax, std::abs(f[k] - v[k]));
            }
            return dmax;
        };
        for (auto up = it; up != family_points.end() && (*up)[0] - v[0] < best; ++up) {
            best = std::min(best, dist(*up));
        }
        for (auto down = it; down != family_points.begin();) {
            --down;
            if (v[0] - (*down)[0] >= best) {
                break;
            }
            best = std::min(best, dist(*down));
        }
        return best;
    };
    for (std::size_t b = 0; b < report.bins.size(); b++) {
        auto &bin = report.bins[b];
        if (bin.count == 0) {
            continue;
        }
        for (std::size_t j = 0; j < others; j++) {
            bin.attainment = std::max({bin.attainment, nearest_family(rows[argmin[b][j]].values),
                                       nearest_family(rows[argmax[b][j]].values)});
            if (std::isfinite(bin.family_max[j])) {
                bin.excess = std::max({bin.excess, bin.scan_max[j] - bin.family_max[j],
                                       bin.family_min[j] - bin.scan_min[j]});
            }
        }
        report.worst_attainment = std::max(report.worst_attainment, bin.attainment);
        report.worst_excess = std::max(report.worst_excess, bin.excess);
    }
    return report;
}

std::optional<OptimizedPoint> optimize_at_level(int d, MeasureId target, MeasureId fixed, double level, bool maximize,
                                                int restarts, std::uint64_t seed) {
    double sign = maximize ? 1 : -1;
    auto objective = [&](const std::vector<double> &p) { return sign * evaluate(state_from_p_relaxed(p), target); };
    auto constraint = [&](const std::vector<double> &p) { return evaluate(state_from_p_relaxed(p), fixed) - level; };
    std::vector<double> separable(static_cast<std::size_t>(d), 0.0), maximal(static_cast<std::size_t>(d), 0.0);
    separable.front() = 1;
    maximal.back() = 1;
    double g_sep = constraint(separable), g_max = constraint(maximal);

    // Moves p onto the level set along the segment toward whichever extreme
    // point lies on the other side (regula falsi, Illinois variant).
    auto restore = [&](const std::vector<double> &p) -> std::optional<std::vector<double>> {
        double gp = constraint(p);
        if (std::abs(gp) <= 1e-13) {
            return p;
        }
        const auto &anchor = gp < 0 ? maximal : separable;
        double ga = gp < 0 ? g_max : g_sep;
        if (gp * ga > 0) {
            return std::nullopt;
        }
        auto point = [&](double t) {
            std::vector<double> x(p.size());
            for (std::size_t i = 0; i < p.size(); i++) {
                x[i] = (1 - t) * p[i] + t * anchor[i];
            }
            return x;
        };
        double lo = 0, hi = 1, glo = gp, ghi = ga;
        int side = 0;
        std::vector<double> best = p;
        double gbest = gp;
        for (int it = 0; it < 200 && hi - lo > 1e-16; it++) {
            double t = (lo * ghi - hi * glo) / (ghi - glo);
            if (!(t > lo && t < hi)) {
                t = 0.5 * (lo + hi);
            }
            auto x = point(t);
            double gx = constraint(x);
            if (std::abs(gx) < std::abs(gbest)) {
                best = x;
                gbest = gx;
            }
            if (std::abs(gx) <= 1e-13) {
                break;
            }
            if ((gx < 0) == (glo < 0)) {
                lo = t;
                glo = gx;
                if (side == -1) {
                    ghi *= 0.5;
                }
                side = -1;
            } else {
                hi = t;
                ghi = gx;
                if (side == 1) {
                    glo *= 0.5;
                }
                side = 1;
            }
        }
        if (std::abs(gbest) > 1e-10) {
            return std::nullopt;
        }
        return best;
    };

    // Central differences, one-sided at the simplex boundary, projected onto
    // the plane sum(p) = 1.
    auto gradient = [&](const std::function<double(const std::vector<double> &)> &f, const std::vector<double> &p) {
        const double h = 1e-7;
        std::vector<double> grad(p.size());
        double f0 = f(p);
        for (std::size_t i = 0; i < p.size(); i++) {
            std::vector<double> up = p, down = p;
            up[i] += h;
            if (p[i] >= h) {
                down[i] -= h;
                grad[i] = (f(up) - f(down)) / (2 * h);
            } else {
                grad[i] = (f(up) - f0) / h;
            }
        }
        double mean = 0;
        for (double g : grad) {
            mean += g;
        }
        mean /= static_cast<double>(grad.size());
        for (double &g : grad) {
            g -= mean;
        }
        return grad;
    };

    std::vector<std::vector<double>> compass;
    for (int i = 0; i < d; i++) {
        for (int j = 0; j < d; j++) {
            if (i != j) {
                std::vector<double> u(static_cast<std::size_t>(d), 0.0);
                u[static_cast<std::size_t>(i)] = 1 / std::sqrt(2.0);
                u[static_cast<std::size_t>(j)] = -1 / std::sqrt(2.0);
                compass.push_back(std::move(u));
            }
        }
    }

    RandomStream stream = derive_stream(seed, static_cast<std::uint64_t>(std::llround(level * 1e9)));
    std::optional<OptimizedPoint> best;
    for (int r = 0; r < restarts; r++) {
        auto start = restore(to_p(sample_uniform(d, stream)).p);
        if (!start) {
            continue;
        }
        std::vector<double> p = *start;
        double value = objective(p);
        auto try_move = [&](const std::vector<double> &u, double step) {
            std::vector<double> trial = p;
            for (std::size_t i = 0; i < trial.size(); i++) {
                trial[i] += step * u[i];
            }
            auto moved = restore(project_simplex(trial));
            if (!moved) {
                return false;
            }
            double tv = objective(*moved);
            if (tv > value + 1e-15) {
                p = std::move(*moved);
                value = tv;
                return true;
            }
            return false;
        };
        double step = 0.05;
        for (int it = 0; it < 5000 && step > 1e-10; it++) {
            auto gf = gradient(objective, p);
            auto gg = gradient(constraint, p);
            double dot = 0, norm_g = 0;
            for (std::size_t i = 0; i < gf.size(); i++) {
                dot += gf[i] * gg[i];
                norm_g += gg[i] * gg[i];
            }
            double norm_u = 0;
            for (std::size_t i = 0; i < gf.size(); i++) {
                if (norm_g > 0) {
                    gf[i] -= dot / norm_g * gg[i];
                }
                norm_u += gf[i] * gf[i];
            }
            bool improved = false;
            if (norm_u > 0) {
                for (double &x : gf) {
                    x /= std::sqrt(norm_u);
                }
                improved = try_move(gf, step);
            }
            for (std::size_t k = 0; !improved && k < compass.size(); k++) {
                improved = try_move(compass[k], step);
            }
            step = improved ? std::min(0.2, step * 1.5) : step * 0.5;
        }
        double residual = std::abs(constraint(p));
        if (residual > 1e-6) {
            continue;
        }
        if (!best || value > sign * best->objective) {
            best = OptimizedPoint{level, state_from_p_relaxed(p), {}, sign * value, residual};
        }
    }
    if (best) {
        best->values = {best->objective, evaluate(best->state, fixed)};
    }
    return best;
}

std::vector<OptimizedPoint> numerical_boundary(int d, MeasureId target, MeasureId fixed, bool maximize, int steps,
                                               int restarts, std::uint64_t seed) {
    std::vector<std::optional<OptimizedPoint>> found(static_cast<std::size_t>(steps) + 1);
    for_each_chunk(found.size(), 1, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; i++) {
            double level = steps == 0 ? 0 : static_cast<double>(i) / steps;
            found[i] = optimize_at_level(d, target, fixed, level, maximize, restarts, seed);
        }
    });
    std::vector<OptimizedPoint> out;
    for (auto &f : found) {
        if (f) {
            out.push_back(std::move(*f));
        }
    }
    return out;
}

}  // namespace bent
