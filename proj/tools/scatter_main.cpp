#include "scatter/io.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <iostream>

using namespace scatter;

namespace {

// exit codes: 0 ok, 1 property-check failed, 2 input error, 3 assumption
// failure, 4 algorithm precondition failure
constexpr int kOk = 0;
constexpr int kPropertyFailed = 1;
constexpr int kInputError = 2;
constexpr int kAssumptionError = 3;
constexpr int kPreconditionError = 4;

void emit_error(const std::string& what, int code) {
    Json e;
    e["error"] = what;
    e["code"] = code;
    std::cerr << canonical_dump(e);
}

void emit(const Json& j, const std::string& out_path) {
    std::string text = canonical_dump(j);
    if (out_path.empty())
        std::cout << text;
    else
        write_file(out_path, text);
}

IVec parse_vector(const std::string& s, int rank) {
    IVec v;
    std::string cur;
    std::string body = s;
    if (!body.empty() && body.front() == '(') body = body.substr(1, body.size() - 2);
    for (char c : body + ",") {
        if (c == ',') {
            if (cur.empty()) throw InputError("malformed vector: " + s);
            v.push_back(Int(cur));
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            cur.push_back(c);
        }
    }
    if (rank >= 0 && static_cast<int>(v.size()) != rank)
        throw InputError("vector rank mismatch: " + s);
    return v;
}

std::string cache_dir_from(const std::string& flag) {
    if (!flag.empty()) return flag;
    const char* env = std::getenv("SCATTER_CACHE_DIR");
    return env ? env : "";
}

int run(int argc, char** argv) {
    CLI::App app{"scattering diagram engine"};
    app.require_subcommand(1);

    std::string seed_path, kind_str = "hdtv_x", out_path;
    int order = 6;
    auto* seed_init = app.add_subcommand("seed-init", "initial diagram from a seed");
    seed_init->add_option("seed", seed_path, "seed JSON file")->required();
    seed_init->add_option("--kind", kind_str,
                          "cluster|aprin|xprin|hdtv_x|hdtv_a|hdtv_a_restricted");
    seed_init->add_option("--order", order, "truncation order");
    seed_init->add_option("--out", out_path, "output file (default stdout)");

    std::string diagram_path, cache_flag, report_path;
    int complete_order = -1;
    bool perturb = false;
    auto* complete_cmd = app.add_subcommand("complete", "consistent completion");
    complete_cmd->add_option("diagram", diagram_path, "diagram JSON file")->required();
    complete_cmd->add_option("--order", complete_order, "target order (default: input order)");
    complete_cmd->add_option("--cache", cache_flag, "cache directory");
    complete_cmd->add_option("--out", out_path, "output file (default stdout)");
    complete_cmd->add_option("--report", report_path, "write the full completion report here");
    complete_cmd->add_flag("--perturb", perturb, "merge coplanar initial walls instead of rejecting");

    std::string check_path;
    auto* check_cmd = app.add_subcommand("check", "consistency check");
    check_cmd->add_option("diagram", check_path, "diagram JSON file")->required();
    check_cmd->add_option("--out", out_path, "output file (default stdout)");

    std::string equiv_a, equiv_b;
    auto* equiv_cmd = app.add_subcommand("equiv", "diagram equivalence");
    equiv_cmd->add_option("first", equiv_a, "diagram JSON file")->required();
    equiv_cmd->add_option("second", equiv_b, "diagram JSON file")->required();
    equiv_cmd->add_option("--out", out_path, "output file (default stdout)");

    std::string psi_path, psi_seed_path;
    auto* psi_cmd = app.add_subcommand("psi", "quotient a C_prin diagram by N_R");
    psi_cmd->add_option("diagram", psi_path, "diagram JSON file over M+N")->required();
    psi_cmd->add_option("--seed", psi_seed_path, "base seed JSON file")->required();
    psi_cmd->add_option("--out", out_path, "output file (default stdout)");

    std::string theta_path, theta_m, theta_p;
    uint64_t stream = 0;
    auto* theta_cmd = app.add_subcommand("theta", "theta expansion at a generic point");
    theta_cmd->add_option("diagram", theta_path, "diagram JSON file")->required();
    theta_cmd->add_option("--m", theta_m, "lattice direction, e.g. 1,0")->required();
    theta_cmd->add_option("--p", theta_p, "endpoint (rationals p/q comma separated)");
    theta_cmd->add_option("--seed-stream", stream, "generic point stream offset");
    theta_cmd->add_option("--out", out_path, "output file (default stdout)");

    std::string mul_path, mul_m1, mul_m2, strategy = "decomposition";
    auto* mul_cmd = app.add_subcommand("multiply", "structure constant row");
    mul_cmd->add_option("diagram", mul_path, "diagram JSON file")->required();
    mul_cmd->add_option("--m1", mul_m1, "first index")->required();
    mul_cmd->add_option("--m2", mul_m2, "second index")->required();
    mul_cmd->add_option("--strategy", strategy, "decomposition|broken-pairs");
    mul_cmd->add_option("--seed-stream", stream, "generic point stream offset");
    mul_cmd->add_option("--out", out_path, "output file (default stdout)");

    std::string plot_path, bbox = "3";
    auto* plot_cmd = app.add_subcommand("plot", "rank-2 SVG rendering");
    plot_cmd->add_option("diagram", plot_path, "diagram JSON file")->required();
    plot_cmd->add_option("--bbox", bbox, "half-width of the plotted box");
    plot_cmd->add_option("--out", out_path, "output SVG file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (seed_init->parsed()) {
            Seed s = seed_from_json(Json::parse(read_file(seed_path)));
            DiagramKind kind = diagram_kind_from_string(kind_str);
            ScatteringDiagram d = initial_diagram(s, kind, order);
            emit(diagram_to_json(normalize(d)), out_path);
            return kOk;
        }
        if (complete_cmd->parsed()) {
            ScatteringDiagram d = diagram_from_json(Json::parse(read_file(diagram_path)));
            int target = complete_order > 0 ? complete_order : d.order;
            std::string cache_dir = cache_dir_from(cache_flag);
            std::string key;
            if (!cache_dir.empty()) {
                key = completion_cache_key(truncate_diagram(d, target), target);
                DiagramCache cache{cache_dir};
                if (auto hit = cache.lookup(key)) {
                    Json cached = Json::parse(*hit);
                    emit(cached.at("output"), out_path);
                    if (!report_path.empty()) write_file(report_path, *hit);
                    std::cerr << "cache hit " << key << "\n";
                    return kOk;
                }
            }
            CompletionOptions opts;
            opts.perturb = perturb;
            CompletionReport rep = complete(d, target, opts);
            std::string rep_text = canonical_dump(completion_report_to_json(rep));
            if (!cache_dir.empty()) DiagramCache{cache_dir}.store(key, rep_text);
            emit(diagram_to_json(rep.output), out_path);
            if (!report_path.empty()) write_file(report_path, rep_text);
            return kOk;
        }
        if (check_cmd->parsed()) {
            ScatteringDiagram d = diagram_from_json(Json::parse(read_file(check_path)));
            ConsistencyReport rep = is_consistent(d);
            emit(consistency_report_to_json(d, rep), out_path);
            return rep.consistent ? kOk : kPropertyFailed;
        }
        if (equiv_cmd->parsed()) {
            ScatteringDiagram a = diagram_from_json(Json::parse(read_file(equiv_a)));
            ScatteringDiagram b = diagram_from_json(Json::parse(read_file(equiv_b)));
            bool eq = equivalent(a, b);
            Json j;
            j["equivalent"] = eq;
            emit(j, out_path);
            return eq ? kOk : kPropertyFailed;
        }
        if (psi_cmd->parsed()) {
            ScatteringDiagram d = diagram_from_json(Json::parse(read_file(psi_path)));
            Seed s = seed_from_json(Json::parse(read_file(psi_seed_path)));
            emit(diagram_to_json(normalize(psi(d, s))), out_path);
            return kOk;
        }
        if (theta_cmd->parsed()) {
            ScatteringDiagram d = diagram_from_json(Json::parse(read_file(theta_path)));
            IVec m = parse_vector(theta_m, d.ambient_rank);
            QVec p;
            if (!theta_p.empty()) {
                std::string cur;
                for (char c : theta_p + ",") {
                    if (c == ',') {
                        p.push_back(rat_from_string(cur));
                        cur.clear();
                    } else if (!std::isspace(static_cast<unsigned char>(c))) {
                        cur.push_back(c);
                    }
                }
                if (static_cast<int>(p.size()) != d.ambient_rank)
                    throw InputError("endpoint rank mismatch");
                emit(theta_to_json(theta(d, m, p, d.order)), out_path);
                return kOk;
            }
            for (int attempt = 0; attempt < 32; ++attempt) {
                p = generic_point(d, m, stream, attempt);
                try {
                    emit(theta_to_json(theta(d, m, p, d.order)), out_path);
                    return kOk;
                } catch (const GenericityError&) {
                    continue;
                }
            }
            throw GenericityError("no generic endpoint found in 32 attempts");
        }
        if (mul_cmd->parsed()) {
            ScatteringDiagram d = diagram_from_json(Json::parse(read_file(mul_path)));
            IVec m1 = parse_vector(mul_m1, d.ambient_rank);
            IVec m2 = parse_vector(mul_m2, d.ambient_rank);
            MultiplyStrategy strat = MultiplyStrategy::Decomposition;
            if (strategy == "broken-pairs")
                strat = MultiplyStrategy::BrokenPairs;
            else if (strategy != "decomposition")
                throw InputError("unknown strategy: " + strategy);
            StructureRow row = multiply(d, m1, m2, d.order, strat, stream);
            emit(structure_row_to_json(d, m1, m2, row), out_path);
            return kOk;
        }
        if (plot_cmd->parsed()) {
            ScatteringDiagram d = diagram_from_json(Json::parse(read_file(plot_path)));
            write_file(out_path, render_svg(d, rat_from_string(bbox)));
            return kOk;
        }
    } catch (const AssumptionError& e) {
        emit_error(e.what(), kAssumptionError);
        return kAssumptionError;
    } catch (const CompletionPreconditionError& e) {
        emit_error(e.what(), kPreconditionError);
        return kPreconditionError;
    } catch (const InputError& e) {
        emit_error(e.what(), kInputError);
        return kInputError;
    } catch (const Json::exception& e) {
        emit_error(std::string("malformed JSON: ") + e.what(), kInputError);
        return kInputError;
    } catch (const DimensionError& e) {
        emit_error(e.what(), kInputError);
        return kInputError;
    } catch (const std::exception& e) {
        emit_error(e.what(), kPreconditionError);
        return kPreconditionError;
    }
    return kOk;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
