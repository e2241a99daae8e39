#include "bent/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <optional>
#include <sstream>

#include "bent/certify.hpp"
#include "bent/error.hpp"
#include "bent/geometry.hpp"
#include "bent/measures.hpp"
#include "bent/monotones.hpp"
#include "bent/region.hpp"
#include "bent/splittings.hpp"

namespace bent {

namespace {

using nlohmann::json;

struct CommonOptions {
    std::string out_path;
    std::uint64_t seed = 0;
};

// Writes to --out when given, otherwise to the fallback stream.
class Sink {
   public:
    Sink(const std::string &path, std::ostream &fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) {
                throw Error(ErrorCode::ParseError, "cannot open output file '" + path + "'");
            }
            stream_ = &file_;
        }
    }
    std::ostream &operator*() {
        return *stream_;
    }

   private:
    std::ofstream file_;
    std::ostream *stream_;
};

std::vector<MeasureId> default_measures(int d) {
    return {MeasureId::es(), MeasureId::es_gen(d + 1)};
}

std::vector<MeasureId> measures_or_default(const std::string &text, int d) {
    return text.empty() ? default_measures(d) : parse_measure_ids(text);
}

json values_json(const SchmidtVector &s, const std::vector<MeasureId> &ids) {
    json values = json::object();
    for (const auto &id : ids) {
        values[id.name()] = evaluate(s, id);
    }
    return values;
}

json estimate_json(const VolumeEstimate &v) {
    return {{"estimate", v.fraction}, {"std_error", v.std_error}, {"samples", v.samples}, {"seed", v.seed}};
}

std::vector<std::pair<MeasureId, mpq_class>> parse_targets(const std::string &text) {
    std::vector<std::pair<MeasureId, mpq_class>> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::ParseError, "target '" + item + "' is not of the form measure=value");
        }
        out.emplace_back(parse_measure_id(item.substr(0, eq)), parse_rational(item.substr(eq + 1)));
    }
    if (out.empty()) {
        throw Error(ErrorCode::ParseError, "no targets given");
    }
    return out;
}

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::NumericalBreakdown:
        case ErrorCode::SolverDidNotConverge:
            return kExitFailure;
        default:
            return kExitUsage;
    }
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Entanglement measures, LOCC regions and Positivstellensatz certificates", "bent"};
    app.require_subcommand(1);
    CommonOptions common;
    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--out", common.out_path, "Output path (default stdout)");
        sub->add_option("--seed", common.seed, "Random seed")->default_val(0);
    };
    int exit_code = kExitOk;

    // scan
    auto *scan_cmd = app.add_subcommand("scan", "Sample states and emit measure values as CSV");
    int scan_dim = 3;
    std::uint64_t scan_n = 10000;
    std::string scan_measures, scan_phi;
    bool scan_products = false;
    scan_cmd->add_option("--dim", scan_dim, "Schmidt rank d")->required();
    scan_cmd->add_option("--measures", scan_measures, "Comma-separated measures (default es,esgen<d+1>)");
    scan_cmd->add_option("--n", scan_n, "Number of samples")->default_val(10000);
    scan_cmd->add_option("--phi", scan_phi, "Reference state for source/accessible labels");
    scan_cmd->add_flag("--products", scan_products, "Sample products of two independent states");
    add_common(scan_cmd);
    scan_cmd->callback([&] {
        ScanConfig config;
        config.d = scan_dim;
        config.ids = measures_or_default(scan_measures, scan_dim);
        config.n = scan_n;
        config.seed = common.seed;
        config.products = scan_products;
        if (!scan_phi.empty()) {
            config.phi = parse_schmidt(scan_phi);
        }
        auto rows = scan(config);
        Sink sink(common.out_path, out);
        write_scan_csv(*sink, scan_dim, config.ids, rows);
    });

    // boundary
    auto *boundary_cmd = app.add_subcommand("boundary", "Emit a boundary family or a numerically optimized boundary");
    int boundary_dim = 3, boundary_steps = 100, restarts = 20;
    std::string family, boundary_measures, boundary_phi, maximize_id, minimize_id, fix_id;
    bool optimize = false;
    boundary_cmd->add_option("--dim", boundary_dim, "Schmidt rank d")->required();
    boundary_cmd->add_option("--family", family, "Family name");
    boundary_cmd->add_option("--steps", boundary_steps, "Parameter steps")->default_val(100);
    boundary_cmd->add_option("--measures", boundary_measures, "Comma-separated measures");
    boundary_cmd->add_option("--phi", boundary_phi, "Reference state (white-line, product-pair)");
    boundary_cmd->add_flag("--optimize", optimize, "Numerically optimize one measure at fixed values of another");
    boundary_cmd->add_option("--maximize", maximize_id, "Measure to maximize (with --optimize)");
    boundary_cmd->add_option("--minimize", minimize_id, "Measure to minimize (with --optimize)");
    boundary_cmd->add_option("--fix", fix_id, "Measure held at each level (with --optimize)");
    boundary_cmd->add_option("--restarts", restarts, "Random restarts per level")->default_val(20);
    add_common(boundary_cmd);
    boundary_cmd->callback([&] {
        if (optimize) {
            if (fix_id.empty() || maximize_id.empty() == minimize_id.empty()) {
                throw CLI::ValidationError("--optimize", "needs --fix and exactly one of --maximize / --minimize");
            }
            bool maximize = !maximize_id.empty();
            MeasureId target = parse_measure_id(maximize ? maximize_id : minimize_id);
            MeasureId fixed = parse_measure_id(fix_id);
            auto points =
                numerical_boundary(boundary_dim, target, fixed, maximize, boundary_steps, restarts, common.seed);
            Sink sink(common.out_path, out);
            *sink << "level";
            for (int i = 1; i <= boundary_dim; i++) {
                *sink << ",lambda_" << i;
            }
            *sink << ',' << target.name() << ',' << fixed.name() << ",label\n";
            for (const auto &p : points) {
                *sink << format_number(p.level);
                for (double v : p.state.values()) {
                    *sink << ',' << format_number(v);
                }
                *sink << ',' << format_number(p.values[0]) << ',' << format_number(p.values[1]) << ",numerical\n";
            }
            return;
        }
        if (family.empty()) {
            throw CLI::ValidationError("--family", "required unless --optimize is given");
        }
        std::optional<SchmidtVector> phi;
        if (!boundary_phi.empty()) {
            phi = parse_schmidt(boundary_phi);
        }
        auto ids = measures_or_default(boundary_measures, boundary_dim);
        auto rows = boundary(boundary_dim, family, boundary_steps, ids, phi);
        Sink sink(common.out_path, out);
        write_curve_csv(*sink, boundary_dim, ids, rows);
    });

    // image
    auto *image_cmd = app.add_subcommand("image", "Emit the curves bounding the source and accessible images of phi");
    std::string image_phi, image_measures;
    int image_steps = 100;
    image_cmd->add_option("--phi", image_phi, "Reference state")->required();
    image_cmd->add_option("--measures", image_measures, "Comma-separated measures");
    image_cmd->add_option("--steps", image_steps, "Steps per curve")->default_val(100);
    add_common(image_cmd);
    image_cmd->callback([&] {
        SchmidtVector phi = parse_schmidt(image_phi);
        auto ids = measures_or_default(image_measures, phi.dim());
        auto rows = image_boundaries(phi, ids, image_steps);
        Sink sink(common.out_path, out);
        write_curve_csv(*sink, phi.dim(), ids, rows);
    });

    // psucc
    auto *psucc_cmd = app.add_subcommand("psucc", "Conversion probability of one pair, or a sampled field around phi");
    std::string psucc_phi, psucc_direction = "from", psucc_measures, psucc_from, psucc_to;
    std::uint64_t psucc_n = 10000;
    psucc_cmd->add_option("--phi", psucc_phi, "Reference state of the sampled field");
    psucc_cmd->add_option("--from", psucc_from, "Initial state of a single conversion");
    psucc_cmd->add_option("--to", psucc_to, "Target state of a single conversion");
    psucc_cmd->add_option("--direction", psucc_direction, "from: P(phi->psi), to: P(psi->phi)")
        ->check(CLI::IsMember({"from", "to"}))
        ->default_val("from");
    psucc_cmd->add_option("--n", psucc_n, "Number of samples")->default_val(10000);
    psucc_cmd->add_option("--measures", psucc_measures, "Extra measure columns");
    add_common(psucc_cmd);
    psucc_cmd->callback([&] {
        Sink sink(common.out_path, out);
        if (!psucc_from.empty() || !psucc_to.empty()) {
            if (psucc_from.empty() || psucc_to.empty() || !psucc_phi.empty()) {
                throw CLI::ValidationError("--from/--to", "give both --from and --to, without --phi");
            }
            ConversionProbability cp = success_probability(parse_schmidt(psucc_from), parse_schmidt(psucc_to));
            *sink << json{{"p", cp.p}, {"k0", cp.k0}}.dump(2) << '\n';
            return;
        }
        if (psucc_phi.empty()) {
            throw CLI::ValidationError("--phi", "required unless --from and --to are given");
        }
        SchmidtVector phi = parse_schmidt(psucc_phi);
        auto ids = psucc_measures.empty() ? std::vector<MeasureId>{} : parse_measure_ids(psucc_measures);
        auto rows = psucc_field(phi, psucc_direction == "from" ? Direction::From : Direction::To, psucc_n,
                                common.seed, ids);
        write_psucc_csv(*sink, phi.dim(), ids, rows);
    });

    // volume
    auto *volume_cmd = app.add_subcommand("volume", "Monte Carlo and exact source/accessible volumes");
    std::string volume_lambda, which = "both";
    std::uint64_t volume_n = 1000000;
    bool exact = false;
    volume_cmd->add_option("--lambda,--phi", volume_lambda, "Schmidt coefficients")->required();
    volume_cmd->add_option("--n,--samples", volume_n, "Number of samples")->default_val(1000000);
    volume_cmd->add_option("--which", which, "source, accessible or both")
        ->check(CLI::IsMember({"source", "accessible", "both"}))
        ->default_val("both");
    volume_cmd->add_flag("--exact", exact, "Add exact polygons (d = 3)");
    add_common(volume_cmd);
    volume_cmd->callback([&] {
        SchmidtVector phi = parse_schmidt(volume_lambda);
        json j = {{"lambda", std::vector<double>(phi.values().begin(), phi.values().end())}};
        std::vector<std::pair<std::string, SetKind>> kinds;
        if (which != "accessible") {
            kinds.emplace_back("source", SetKind::Source);
        }
        if (which != "source") {
            kinds.emplace_back("accessible", SetKind::Accessible);
        }
        for (const auto &[key, kind] : kinds) {
            VolumeEstimate v = kind == SetKind::Source ? mc_source_entanglement(phi, volume_n, common.seed)
                                                       : mc_accessible_entanglement(phi, volume_n, common.seed);
            j[key] = estimate_json(v);
            if (phi.dim() <= 4) {
                j[key]["closed_form"] =
                    evaluate_closed(phi, kind == SetKind::Source ? MeasureId::es() : MeasureId::ea());
            }
            if (exact) {
                ExactRegion region = exact_polygon_3(phi, kind);
                j[key]["exact"] = {{"area_ratio", region.area_ratio},
                                   {"degenerate", region.degenerate},
                                   {"vertices", region.polygon.vertices}};
            }
        }
        Sink sink(common.out_path, out);
        *sink << j.dump(2) << '\n';
    });

    // measure
    auto *measure_cmd = app.add_subcommand("measure", "Evaluate measures for one state");
    std::string measure_lambda, measure_list;
    measure_cmd->add_option("--lambda,--schmidt", measure_lambda, "Schmidt coefficients")->required();
    measure_cmd->add_option("--measures,--ids", measure_list, "Comma-separated measures (default: all that apply)");
    add_common(measure_cmd);
    measure_cmd->callback([&] {
        SchmidtVector s = parse_schmidt(measure_lambda);
        std::vector<MeasureId> ids;
        if (measure_list.empty()) {
            ids = {MeasureId::es(), MeasureId::ef(), MeasureId::neg(), MeasureId::geo()};
            if (s.dim() <= 4) {
                ids.insert(ids.begin() + 1, MeasureId::ea());
            }
            if (s.dim() < kMaxDim) {
                ids.push_back(MeasureId::es_gen(s.dim() + 1));
            }
        } else {
            ids = parse_measure_ids(measure_list);
        }
        json j = {{"lambda", std::vector<double>(s.values().begin(), s.values().end())},
                  {"values", values_json(s, ids)}};
        Sink sink(common.out_path, out);
        *sink << j.dump(2) << '\n';
    });

    // certify
    auto *certify_cmd = app.add_subcommand("certify", "Search for an infeasibility certificate of target values");
    int certify_dim = 3, degree = 6;
    std::string targets;
    certify_cmd->add_option("--dim", certify_dim, "Schmidt rank d")->required();
    certify_cmd->add_option("--targets", targets, "e.g. es=0.2,esgen4=0.9")->required();
    certify_cmd->add_option("--degree", degree, "Certificate degree d0")->default_val(6);
    add_common(certify_cmd);
    certify_cmd->callback([&] {
        PolynomialSystem system = target_system(certify_dim, parse_targets(targets));
        GramProblem problem = build_certificate_problem(system, degree);
        FeasibilityOutcome outcome = solve_feasibility(problem);
        Sink sink(common.out_path, out);
        if (const auto *nf = std::get_if<NotFoundAtDegree>(&outcome)) {
            json j = {{"found", false},
                      {"degree", nf->degree},
                      {"margin", nf->margin},
                      {"reason", nf->reason},
                      {"note", "inconclusive: absence of a certificate at this degree proves nothing"}};
            *sink << j.dump(2) << '\n';
            exit_code = kExitNotFound;
            return;
        }
        const auto &c = std::get<Certificate>(outcome);
        VerificationReport report = verify_certificate(c);
        json j = certificate_to_json(c, report);
        j["found"] = true;
        *sink << j.dump(2) << '\n';
        exit_code = report.ok ? kExitOk : kExitVerificationFailed;
    });

    // split
    auto *split_cmd = app.add_subcommand("split", "Geometric measure of every qubit splitting");
    std::string split_lambda;
    split_cmd->add_option("--lambda", split_lambda, "Schmidt coefficients")->required();
    add_common(split_cmd);
    split_cmd->callback([&] {
        QubitEmbedding q = make_embedding(parse_schmidt(split_lambda));
        SplittingTable table = all_splittings(q);
        json splittings = json::object();
        for (const auto &[mask, value] : table.geometric) {
            splittings[mask_to_key(mask, table.n)] = value;
        }
        json j = {{"n", table.n}, {"embedding", q.lam}, {"splittings", splittings}};
        Sink sink(common.out_path, out);
        *sink << j.dump(2) << '\n';
    });

    // reconstruct
    auto *reconstruct_cmd = app.add_subcommand("reconstruct", "Recover Schmidt coefficients from a splitting table");
    std::string table_path;
    reconstruct_cmd->add_option("--table", table_path, "JSON table as written by split")->required();
    add_common(reconstruct_cmd);
    reconstruct_cmd->callback([&] {
        std::ifstream in(table_path);
        if (!in) {
            throw Error(ErrorCode::ParseError, "cannot read '" + table_path + "'");
        }
        SplittingTable table;
        try {
            json j = json::parse(in);
            table.n = j.at("n").get<int>();
            for (const auto &[key, value] : j.at("splittings").items()) {
                table.geometric[key_to_mask(key)] = value.get<double>();
            }
        } catch (const json::exception &e) {
            throw Error(ErrorCode::ParseError, std::string("splitting table: ") + e.what());
        }
        QubitEmbedding q = reconstruct(table.n, table);
        std::vector<double> lambda(q.lam.rbegin(), q.lam.rend());
        json j = {{"n", q.n}, {"embedding", q.lam}, {"lambda", lambda}};
        Sink sink(common.out_path, out);
        *sink << j.dump(2) << '\n';
    });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &e) {
        app.exit(e, out, err);
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const Error &e) {
        err << "error: " << e.what() << '\n';
        return exit_code_for(e.code());
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return exit_code;
}

}  // namespace bent
