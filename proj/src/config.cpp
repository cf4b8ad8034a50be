#include "elastic_reflect/config.hpp"

#include <fstream>
#include <sstream>

namespace elastic_reflect {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw ValidationError("config field " + path + ": " + what);
}

const json* find(const json& j, const std::string& key) {
    auto it = j.find(key);
    return it == j.end() ? nullptr : &*it;
}

double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) fail(path, "expected a number");
    return j.get<double>();
}

double number_or(const json& obj, const std::string& key, const std::string& path,
                 double fallback) {
    const json* f = find(obj, key);
    return f ? get_number(*f, path + "." + key) : fallback;
}

long integer_or(const json& obj, const std::string& key, const std::string& path,
                long fallback) {
    const json* f = find(obj, key);
    if (!f) return fallback;
    if (!f->is_number_integer() && !f->is_number_unsigned()) {
        fail(path + "." + key, "expected an integer");
    }
    return f->get<long>();
}

bool bool_or(const json& obj, const std::string& key, const std::string& path,
             bool fallback) {
    const json* f = find(obj, key);
    if (!f) return fallback;
    if (!f->is_boolean()) fail(path + "." + key, "expected a boolean");
    return f->get<bool>();
}

std::string string_field(const json& j, const std::string& path) {
    if (!j.is_string()) fail(path, "expected a string");
    return j.get<std::string>();
}

DiffusionModel parse_model(const json& m) {
    DiffusionModel model;
    if (const json* drift = find(m, "drift")) {
        const std::string fam =
            string_field((*drift).contains("family") ? (*drift)["family"] : json(),
                         "model.drift.family");
        if (fam == "constant") {
            model.drift_family = DriftFamily::constant;
            model.mu = number_or(*drift, "mu", "model.drift", 0.0);
        } else if (fam == "affine") {
            model.drift_family = DriftFamily::affine;
            model.alpha = number_or(*drift, "alpha", "model.drift", 0.0);
            model.beta = number_or(*drift, "beta", "model.drift", 0.0);
        } else {
            fail("model.drift.family", "must be \"constant\" or \"affine\"");
        }
    }
    if (const json* vol = find(m, "vol")) {
        if (const json* fam = find(*vol, "family")) {
            if (string_field(*fam, "model.vol.family") != "constant") {
                fail("model.vol.family", "only \"constant\" is supported");
            }
        }
        model.sigma0 = number_or(*vol, "sigma0", "model.vol", 1.0);
    }
    if (const json* dom = find(m, "domain")) {
        model.domain_lo = number_or(*dom, "lo", "model.domain", model.domain_lo);
        model.domain_hi = number_or(*dom, "hi", "model.domain", model.domain_hi);
    }
    return model;
}

BoundarySpec parse_boundary(const json& b) {
    const json* fam = find(b, "family");
    if (!fam) fail("boundary.family", "missing");
    const std::string name = string_field(*fam, "boundary.family");
    const double c0 = number_or(b, "c0", "boundary", 0.0);
    const double c1 = number_or(b, "c1", "boundary", 0.0);
    if (name == "constant") return BoundarySpec::constant(c0);
    if (name == "linear") return BoundarySpec::linear(c0, c1);
    if (name == "sqrt") return BoundarySpec::sqrt(c0, c1);
    if (name == "power") {
        return BoundarySpec::power(c0, c1, number_or(b, "p", "boundary", 1.0));
    }
    fail("boundary.family", "unknown family \"" + name + "\"");
}

ImpactFn parse_impact(const json& f) {
    const json* fam = find(f, "family");
    if (!fam) fail("impact.family", "missing");
    const std::string name = string_field(*fam, "impact.family");
    if (name == "constant") {
        return ImpactFn::constant(number_or(f, "c", "impact", 1.0));
    }
    if (name == "exponential") {
        return ImpactFn::exponential(number_or(f, "eta", "impact", 0.0));
    }
    if (name == "linear") {
        return ImpactFn::linear(number_or(f, "p", "impact", 1.0),
                                number_or(f, "q", "impact", 0.0));
    }
    fail("impact.family", "unknown family \"" + name + "\"");
}

}  // namespace

nlohmann::json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config file: " + path);
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    try {
        return json::parse(buffer.str());
    } catch (const json::parse_error& e) {
        throw ValidationError("config is not valid JSON: " + std::string(e.what()));
    }
}

RunConfig parse_config(const nlohmann::json& doc) {
    if (!doc.is_object()) {
        throw ValidationError("config root must be a JSON object");
    }
    RunConfig cfg;
    if (const json* m = find(doc, "model")) cfg.model = parse_model(*m);
    if (const json* b = find(doc, "boundary")) cfg.boundary = parse_boundary(*b);
    if (const json* q = find(doc, "query")) {
        cfg.query.lambda = number_or(*q, "lambda", "query", cfg.query.lambda);
        cfg.query.ell = number_or(*q, "ell", "query", cfg.query.ell);
        if (const json* e = find(*q, "eps")) {
            cfg.query.eps = get_number(*e, "query.eps");
        }
        cfg.query.delta = number_or(*q, "delta", "query", cfg.query.delta);
        cfg.query.theta = number_or(*q, "theta", "query", cfg.query.theta);
    }
    if (const json* s = find(doc, "scheme")) {
        cfg.scheme.eps = number_or(*s, "eps", "scheme", cfg.scheme.eps);
        cfg.scheme.h = number_or(*s, "h", "scheme", cfg.scheme.h);
        cfg.scheme.T = number_or(*s, "T", "scheme", cfg.scheme.T);
        cfg.scheme.bridge_correction = bool_or(*s, "bridge_correction", "scheme",
                                               cfg.scheme.bridge_correction);
        cfg.scheme.seed = static_cast<std::uint64_t>(
            integer_or(*s, "seed", "scheme", static_cast<long>(cfg.scheme.seed)));
        cfg.scheme.path_index = static_cast<std::uint64_t>(integer_or(
            *s, "path_index", "scheme", static_cast<long>(cfg.scheme.path_index)));
        cfg.scheme.jump_cap = integer_or(*s, "jump_cap", "scheme", cfg.scheme.jump_cap);
    }
    if (const json* m = find(doc, "mc")) {
        cfg.mc.n_paths = integer_or(*m, "n_paths", "mc", cfg.mc.n_paths);
        cfg.mc.seed = static_cast<std::uint64_t>(
            integer_or(*m, "seed", "mc", static_cast<long>(cfg.mc.seed)));
    }
    if (const json* o = find(doc, "output")) {
        if (const json* f = find(*o, "format")) {
            cfg.output.format = string_field(*f, "output.format");
            if (cfg.output.format != "csv" && cfg.output.format != "json") {
                fail("output.format", "must be \"csv\" or \"json\"");
            }
        }
        if (const json* p = find(*o, "path")) {
            cfg.output.path = string_field(*p, "output.path");
        }
    }
    if (const json* p = find(doc, "phi_grid")) {
        cfg.phi_grid.lo = number_or(*p, "lo", "phi_grid", cfg.phi_grid.lo);
        cfg.phi_grid.hi = number_or(*p, "hi", "phi_grid", cfg.phi_grid.hi);
        cfg.phi_grid.n = integer_or(*p, "n", "phi_grid", cfg.phi_grid.n);
        if (cfg.phi_grid.n < 2) fail("phi_grid.n", "must be >= 2");
    }
    if (const json* l = find(doc, "ladder")) {
        if (!l->is_array()) fail("ladder", "expected an array of numbers");
        for (std::size_t i = 0; i < l->size(); ++i) {
            cfg.ladder.push_back(
                get_number((*l)[i], "ladder[" + std::to_string(i) + "]"));
        }
    }
    if (const json* f = find(doc, "impact")) {
        cfg.impact = parse_impact(*f);
        cfg.has_impact = true;
    }
    return cfg;
}

void apply_override(nlohmann::json& doc, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) {
        throw ValidationError("--set expects a.b.c=value, got: " + assignment);
    }
    const std::string key_path = assignment.substr(0, eq);
    const std::string raw_value = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(raw_value);
    } catch (const json::parse_error&) {
        value = raw_value;  // plain string
    }

    json* node = &doc;
    std::size_t pos = 0;
    while (true) {
        const auto dot = key_path.find('.', pos);
        const std::string key = key_path.substr(
            pos, dot == std::string::npos ? std::string::npos : dot - pos);
        if (key.empty()) {
            throw ValidationError("--set: empty key segment in " + key_path);
        }
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        pos = dot + 1;
    }
}

}  // namespace elastic_reflect
