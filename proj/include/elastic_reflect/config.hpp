#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "elastic_reflect/liquidation.hpp"
#include "elastic_reflect/model.hpp"
#include "elastic_reflect/simulator.hpp"

namespace elastic_reflect {

struct QueryConfig {
    double lambda = 1.0;
    double ell = 1.0;
    std::optional<double> eps;
    double delta = 0.5;  // liquidation discount
    double theta = 1.0;  // liquidation position
};

struct McConfig {
    long n_paths = 1000;
    std::uint64_t seed = 42;
};

struct OutputConfig {
    std::string format = "csv";  // "csv" or "json"
    std::string path;            // empty = stdout
};

struct PhiGridConfig {
    double lo = -2.0;
    double hi = 2.0;
    long n = 81;
};

/// One experiment manifest. Sections are optional in the JSON document;
/// each subcommand validates the pieces it needs and reports the offending
/// field path on failure.
struct RunConfig {
    DiffusionModel model;
    BoundarySpec boundary;
    QueryConfig query;
    SchemeConfig scheme;
    McConfig mc;
    OutputConfig output;
    PhiGridConfig phi_grid;
    std::vector<double> ladder;
    ImpactFn impact;
    bool has_impact = false;
};

/// Reads and parses a JSON config file. Unreadable file -> IoError; invalid
/// JSON or schema violation -> ValidationError naming the field path.
nlohmann::json load_config_file(const std::string& path);

RunConfig parse_config(const nlohmann::json& doc);

/// Applies one `--set a.b.c=value` override to the raw document. The value
/// is parsed as JSON when possible, otherwise taken as a string.
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace elastic_reflect
