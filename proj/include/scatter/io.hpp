#pragma once

#include "scatter/cluster.hpp"
#include "scatter/completion.hpp"
#include "scatter/theta.hpp"

#include "json.hpp"

#include <optional>
#include <string>

namespace scatter {

using Json = nlohmann::json;

inline constexpr const char* kSchemaVersion = "scatter/v1";
inline constexpr const char* kEngineVersion = "scatter-engine/1.0.0";

struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string rat_to_string(const Rat& r);
Rat rat_from_string(const std::string& s);

Json diagram_to_json(const ScatteringDiagram& d);
ScatteringDiagram diagram_from_json(const Json& j);

Json seed_to_json(const Seed& s);
Seed seed_from_json(const Json& j);

Json completion_report_to_json(const CompletionReport& r);

Json structure_row_to_json(const ScatteringDiagram& d, const IVec& m1, const IVec& m2,
                           const StructureRow& row);
Json theta_to_json(const ThetaExpansion& t);
Json series_to_json(const TruncatedSeries& f);

Json consistency_report_to_json(const ScatteringDiagram& d, const ConsistencyReport& r);

// canonical rendering: sorted keys, 2-space indent, trailing newline
std::string canonical_dump(const Json& j);

std::string sha256_hex(const std::string& data);

// on-disk completion cache; hits are byte-identical to recomputation
struct DiagramCache {
    std::string dir;
    std::optional<std::string> lookup(const std::string& key) const;
    void store(const std::string& key, const std::string& value) const;
};
std::string completion_cache_key(const ScatteringDiagram& input, int order);

std::string render_svg(const ScatteringDiagram& d, const Rat& bbox);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& data);

}  // namespace scatter
