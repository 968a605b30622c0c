#include "scatter/io.hpp"

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace scatter {

namespace {

int64_t to_i64(const Int& x) {
    if (x > Int(INT64_MAX) || x < Int(INT64_MIN)) throw InputError("integer out of JSON range");
    return static_cast<int64_t>(x);
}

Json ivec_to_json(const IVec& v) {
    Json a = Json::array();
    for (const Int& x : v) a.push_back(to_i64(x));
    return a;
}

IVec ivec_from_json(const Json& j) {
    if (!j.is_array()) throw InputError("expected an integer array");
    IVec v;
    for (const auto& x : j) {
        if (!x.is_number_integer()) throw InputError("expected an integer array");
        v.push_back(Int(x.get<int64_t>()));
    }
    return v;
}

}  // namespace

std::string rat_to_string(const Rat& r) {
    Int num = numerator(r), den = denominator(r);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
}

Rat rat_from_string(const std::string& s) {
    size_t slash = s.find('/');
    try {
        if (slash == std::string::npos) return Rat(Int(s));
        Int num(s.substr(0, slash));
        Int den(s.substr(slash + 1));
        if (den <= 0) throw InputError("rational with non-positive denominator: " + s);
        return Rat(num, den);
    } catch (const std::exception&) {
        throw InputError("malformed rational: " + s);
    }
}

Json series_to_json(const TruncatedSeries& f) {
    Json terms = Json::array();
    for (const auto& [k, c] : f.terms()) {
        Json t;
        t["coeff"] = rat_to_string(c);
        t["m"] = ivec_to_json(k.m_exp);
        t["q"] = Json::array();
        for (int64_t q : k.q_exp) t["q"].push_back(q);
        terms.push_back(t);
    }
    return terms;
}

namespace {

TruncatedSeries series_from_json(const Json& j, const MonoidContext& ctx, int rank, int order) {
    TruncatedSeries f(ctx, rank, order);
    if (!j.is_array()) throw InputError("series: expected an array of terms");
    for (const auto& t : j) {
        Rat c = rat_from_string(t.at("coeff").get<std::string>());
        IVec m = ivec_from_json(t.at("m"));
        QExp q;
        for (const auto& x : t.at("q")) q.push_back(x.get<int64_t>());
        if (static_cast<int>(m.size()) != rank) throw InputError("series: term rank mismatch");
        if (static_cast<int>(q.size()) != ctx.q_rank)
            throw InputError("series: term monoid rank mismatch");
        for (int64_t x : q)
            if (x < 0) throw InputError("series: negative monoid exponent");
        if (ctx.q_degree(q) > order) throw InputError("series: term beyond the truncation order");
        f.add_term(c, m, q);
    }
    return f;
}

}  // namespace

Json diagram_to_json(const ScatteringDiagram& d) {
    Json j;
    j["schema"] = kSchemaVersion;
    j["ambient_rank"] = d.ambient_rank;
    j["order"] = d.order;
    j["q_generators"] = Json::array();
    for (int i = 0; i < d.context.q_rank; ++i) {
        Json g;
        g["name"] = d.context.generator_names[i];
        g["weight"] = d.context.q_degree_weights[i];
        j["q_generators"].push_back(g);
    }
    j["walls"] = Json::array();
    for (const Wall& w : d.walls) {
        Json wj;
        wj["normal"] = ivec_to_json(w.normal);
        Json ineqs = Json::array();
        for (const IVec& b : w.support.ineqs) ineqs.push_back(ivec_to_json(b));
        wj["inequalities"] = ineqs;
        wj["direction"] = ivec_to_json(w.direction);
        wj["function"] = series_to_json(*w.function);
        j["walls"].push_back(wj);
    }
    return j;
}

ScatteringDiagram diagram_from_json(const Json& j) {
    if (!j.is_object()) throw InputError("diagram: expected an object");
    if (j.value("schema", "") != kSchemaVersion)
        throw InputError("diagram: unsupported schema version");
    ScatteringDiagram d;
    d.ambient_rank = j.at("ambient_rank").get<int>();
    if (d.ambient_rank <= 0) throw InputError("diagram: ambient_rank must be positive");
    d.order = j.at("order").get<int>();
    if (d.order < 0) throw InputError("diagram: negative order");
    std::vector<std::string> names;
    std::vector<int> weights;
    for (const auto& g : j.at("q_generators")) {
        names.push_back(g.at("name").get<std::string>());
        int w = g.value("weight", 1);
        if (w <= 0) throw InputError("diagram: generator weight must be positive");
        weights.push_back(w);
    }
    d.context = MonoidContext::free_monoid(names);
    d.context.q_degree_weights = weights;
    for (const auto& wj : j.at("walls")) {
        IVec normal = ivec_from_json(wj.at("normal"));
        if (static_cast<int>(normal.size()) != d.ambient_rank)
            throw InputError("diagram: wall normal rank mismatch");
        std::vector<IVec> ineqs;
        for (const auto& b : wj.at("inequalities")) {
            IVec bb = ivec_from_json(b);
            if (static_cast<int>(bb.size()) != d.ambient_rank)
                throw InputError("diagram: wall inequality rank mismatch");
            ineqs.push_back(bb);
        }
        TruncatedSeries f =
            series_from_json(wj.at("function"), d.context, d.ambient_rank, d.order);
        RationalCone supp = RationalCone::from_constraints(d.ambient_rank, {normal}, ineqs);
        std::optional<IVec> dir;
        if (wj.contains("direction")) dir = ivec_from_json(wj.at("direction"));
        try {
            d.walls.push_back(make_wall(supp, std::move(f), dir));
        } catch (const DomainError& e) {
            throw InputError(std::string("diagram: invalid wall: ") + e.what());
        }
    }
    validate_diagram(d);
    return d;
}

Json seed_to_json(const Seed& s) {
    Json j;
    j["rank"] = s.rank;
    Json m = Json::array();
    for (int i = 0; i < s.rank; ++i) m.push_back(ivec_to_json(s.skew.m.row(i)));
    j["skew"] = m;
    j["unfrozen"] = s.unfrozen;
    return j;
}

Seed seed_from_json(const Json& j) {
    if (!j.is_object()) throw InputError("seed: expected an object");
    int rank = j.at("rank").get<int>();
    if (rank <= 0) throw InputError("seed: rank must be positive");
    const Json& sk = j.at("skew");
    if (!sk.is_array() || static_cast<int>(sk.size()) != rank)
        throw InputError("seed: skew matrix must be rank x rank");
    IMat m(rank, rank);
    for (int i = 0; i < rank; ++i) {
        IVec row = ivec_from_json(sk.at(i));
        if (static_cast<int>(row.size()) != rank)
            throw InputError("seed: skew matrix must be rank x rank");
        for (int c = 0; c < rank; ++c) m(i, c) = row[c];
    }
    std::vector<int> unfrozen = j.at("unfrozen").get<std::vector<int>>();
    try {
        return make_seed(SkewForm(std::move(m)), std::move(unfrozen));
    } catch (const DomainError& e) {
        throw InputError(std::string("seed: ") + e.what());
    }
}

Json completion_report_to_json(const CompletionReport& r) {
    Json j;
    j["input"] = diagram_to_json(r.input);
    j["output"] = diagram_to_json(r.output);
    j["added"] = Json::array();
    for (const AddedWall& a : r.added) {
        Json aj;
        aj["order"] = a.order;
        Json joint;
        joint["eqs"] = Json::array();
        for (const IVec& e : a.source_joint.eqs) joint["eqs"].push_back(ivec_to_json(e));
        joint["ineqs"] = Json::array();
        for (const IVec& b : a.source_joint.ineqs) joint["ineqs"].push_back(ivec_to_json(b));
        aj["joint"] = joint;
        Json wj;
        wj["normal"] = ivec_to_json(a.wall.normal);
        Json ineqs = Json::array();
        for (const IVec& b : a.wall.support.ineqs) ineqs.push_back(ivec_to_json(b));
        wj["inequalities"] = ineqs;
        wj["direction"] = ivec_to_json(a.wall.direction);
        wj["function"] = series_to_json(*a.wall.function);
        aj["wall"] = wj;
        j["added"].push_back(aj);
    }
    return j;
}

Json structure_row_to_json(const ScatteringDiagram& d, const IVec& m1, const IVec& m2,
                           const StructureRow& row) {
    Json j;
    std::string key;
    {
        std::ostringstream os;
        os << ivec_str(m1) << ";" << ivec_str(m2);
        key = os.str();
    }
    j["m1"] = ivec_to_json(m1);
    j["m2"] = ivec_to_json(m2);
    j["key"] = key;
    Json entries = Json::object();
    for (const auto& [m, coeff] : row) entries[ivec_str(m)] = series_to_json(coeff);
    j["entries"] = entries;
    (void)d;
    return j;
}

Json theta_to_json(const ThetaExpansion& t) {
    Json j;
    j["m"] = ivec_to_json(t.m);
    Json p = Json::array();
    for (const Rat& x : t.p) p.push_back(rat_to_string(x));
    j["p"] = p;
    j["series"] = series_to_json(t.series);
    return j;
}

Json consistency_report_to_json(const ScatteringDiagram& d, const ConsistencyReport& r) {
    Json j;
    j["consistent"] = r.consistent;
    j["failures"] = Json::array();
    for (const JointDefect& f : r.failures) {
        Json fj;
        Json joint;
        joint["eqs"] = Json::array();
        for (const IVec& e : f.joint.eqs) joint["eqs"].push_back(ivec_to_json(e));
        joint["ineqs"] = Json::array();
        for (const IVec& b : f.joint.ineqs) joint["ineqs"].push_back(ivec_to_json(b));
        fj["joint"] = joint;
        fj["defect"] = Json::array();
        for (size_t i = 0; i < f.defect.size(); ++i) fj["defect"].push_back(series_to_json(f.defect[i]));
        j["failures"].push_back(fj);
    }
    (void)d;
    return j;
}

std::string canonical_dump(const Json& j) { return j.dump(2) + "\n"; }

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    EVP_DigestUpdate(ctx, data.data(), data.size());
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

std::optional<std::string> DiagramCache::lookup(const std::string& key) const {
    std::filesystem::path p = std::filesystem::path(dir) / (key + ".json");
    std::ifstream in(p, std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void DiagramCache::store(const std::string& key, const std::string& value) const {
    std::filesystem::create_directories(dir);
    std::filesystem::path target = std::filesystem::path(dir) / (key + ".json");
    std::filesystem::path tmp = target;
    tmp += ".tmp." + std::to_string(static_cast<long>(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary);
        out << value;
    }
    std::filesystem::rename(tmp, target);
}

std::string completion_cache_key(const ScatteringDiagram& input, int order) {
    std::string payload = canonical_dump(diagram_to_json(normalize(input))) + "|" +
                          std::to_string(order) + "|" + kEngineVersion;
    return sha256_hex(payload);
}

namespace {

double rat_to_double(const Rat& r) {
    return static_cast<double>(numerator(r)) / static_cast<double>(denominator(r));
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4f", x);
    return buf;
}

}  // namespace

std::string render_svg(const ScatteringDiagram& d, const Rat& bbox) {
    if (d.ambient_rank != 2) throw InputError("render_svg: rank-2 diagrams only");
    double r = rat_to_double(bbox);
    double scale = 200.0 / r;
    auto tx = [&](double x) { return 220.0 + scale * x; };
    auto ty = [&](double y) { return 220.0 - scale * y; };
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"440\" height=\"440\" "
          "viewBox=\"0 0 440 440\">\n";
    os << "  <rect x=\"0\" y=\"0\" width=\"440\" height=\"440\" fill=\"white\"/>\n";
    os << "  <line x1=\"" << fmt(tx(-r)) << "\" y1=\"" << fmt(ty(0)) << "\" x2=\"" << fmt(tx(r))
       << "\" y2=\"" << fmt(ty(0)) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    os << "  <line x1=\"" << fmt(tx(0)) << "\" y1=\"" << fmt(ty(-r)) << "\" x2=\"" << fmt(tx(0))
       << "\" y2=\"" << fmt(ty(r)) << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    ScatteringDiagram nd = normalize(d);
    for (const Wall& w : nd.walls) {
        ConeGens g = cone_generators(w.support);
        std::vector<std::pair<double, double>> dirs;
        for (const IVec& l : g.lin) {
            dirs.emplace_back(static_cast<double>(l[0]), static_cast<double>(l[1]));
            dirs.emplace_back(-static_cast<double>(l[0]), -static_cast<double>(l[1]));
        }
        for (const IVec& ray : g.rays)
            dirs.emplace_back(static_cast<double>(ray[0]), static_cast<double>(ray[1]));
        std::string label = series_str(*w.function);
        // truncate the label to three terms
        {
            size_t pos = 0;
            int terms = 0;
            while (pos != std::string::npos && terms < 3) {
                pos = label.find(" + ", pos);
                if (pos != std::string::npos) {
                    ++terms;
                    pos += 3;
                }
            }
            if (pos != std::string::npos) label = label.substr(0, pos - 3) + " + ...";
        }
        bool first_dir = true;
        for (auto& [dx, dy] : dirs) {
            double norm = std::max(std::abs(dx), std::abs(dy));
            if (norm == 0) continue;
            double ex = dx / norm * r, ey = dy / norm * r;
            os << "  <line x1=\"" << fmt(tx(0)) << "\" y1=\"" << fmt(ty(0)) << "\" x2=\""
               << fmt(tx(ex)) << "\" y2=\"" << fmt(ty(ey))
               << "\" stroke=\"black\" stroke-width=\"1.5\"/>\n";
            if (first_dir) {
                os << "  <text x=\"" << fmt(tx(ex * 0.55)) << "\" y=\"" << fmt(ty(ey * 0.55))
                   << "\" font-size=\"9\" fill=\"#333333\">" << label << "</text>\n";
                first_dir = false;
            }
        }
    }
    os << "</svg>\n";
    return os.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read file: " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_file(const std::string& path, const std::string& data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write file: " + path);
    out << data;
}

}  // namespace scatter
