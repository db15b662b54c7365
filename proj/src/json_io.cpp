#include "nlsa/json_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "nlsa/errors.hpp"

namespace nlsa::io {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);
}

namespace {

json numbers_json(const std::vector<double>& v) {
    json out = json::array();
    for (double x : v) out.push_back(number(x));
    return out;
}

json complex_json(std::complex<double> z) { return json::array({number(z.real()), number(z.imag())}); }

}  // namespace

void CsvTable::write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    auto line = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
        out << '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("$", "cannot open config file " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("$", std::string("malformed JSON: ") + e.what());
    }
}

json to_json(const NormReport& r) {
    json j;
    j["mu1"] = number(r.mu1);
    j["mu2"] = number(r.mu2);
    j["mu3"] = number(r.mu3);
    j["mu4"] = number(r.mu4);
    j["mu5"] = number(r.mu5);
    j["y_norm"] = number(r.y_norm);
    j["weighted_sup"] = number(r.weighted_sup);
    j["x_norm"] = number(r.x_norm);
    j["h_quarter_history"] = numbers_json(r.h_quarter_history);
    j["weighted_history"] = numbers_json(r.weighted_history);
    return j;
}

json to_json(const ContractionReport& r) {
    json j;
    j["distances"] = numbers_json(r.distances);
    j["ratio"] = number(r.ratio);
    j["rho"] = number(r.rho);
    j["T"] = number(r.T);
    j["converged"] = r.converged;
    j["iterations"] = r.iterations;
    j["theta_fit"] = number(r.theta_fit);
    j["theta_fitted"] = r.theta_fitted;
    j["warnings"] = r.warnings;
    return j;
}

json to_json(const EquationParams& p) {
    json j;
    j["a"] = number(p.a);
    j["b"] = number(p.b);
    j["c"] = complex_json(p.c);
    j["d"] = complex_json(p.d);
    j["e"] = complex_json(p.e);
    j["m"] = number(p.m);
    j["s"] = number(p.s);
    return j;
}

json to_json(const Grid& g) { return json{{"num_points", g.num_points}, {"length", number(g.length)}}; }

json to_json(const ProbeParams& p) {
    return json{{"a", number(p.a)},         {"b", number(p.b)}, {"t", number(p.t)},
                {"omega", number(p.omega)}, {"m", number(p.m)}, {"xi", number(p.xi)}};
}

json to_json(const ExponentTuple& e) {
    return json{{"p", number(e.p)},   {"q", number(e.q)},   {"p1", number(e.p1)},
                {"q1", number(e.q1)}, {"p2", number(e.p2)}, {"q2", number(e.q2)}};
}

json to_json(const EstimateRun& r) {
    json j;
    j["grid"] = to_json(r.grid);
    j["samples"] = r.samples;
    j["discarded"] = r.discarded;
    j["max_ratio"] = number(r.max_ratio);
    if (!r.horizons.empty()) {
        j["theta"] = number(r.theta);
        j["horizons"] = numbers_json(r.horizons);
        j["max_ratio_by_horizon"] = numbers_json(r.max_ratio_by_horizon);
    }
    j["warnings"] = r.warnings;
    return j;
}

json to_json(const EstimateSweepResult& r) {
    json j;
    j["estimate"] = r.name;
    j["seed"] = r.seed;
    j["base"] = to_json(r.base);
    j["refined"] = to_json(r.refined);
    j["drift"] = number(r.drift);
    j["theta_positive"] = r.theta_positive;
    j["stable"] = r.stable;
    return j;
}

// ---- config access ------------------------------------------------------

ConfigNode::ConfigNode(const json& j, std::string path) : j_(&j), path_(std::move(path)) {
    if (!j.is_object()) throw ConfigError(path_, "expected an object");
}

std::string ConfigNode::at(const std::string& key) const { return path_ + "." + key; }

const json* ConfigNode::find(const std::string& key) const {
    auto it = j_->find(key);
    return it == j_->end() ? nullptr : &*it;
}

bool ConfigNode::has(const std::string& key) const { return find(key) != nullptr; }

void ConfigNode::allow_only(std::initializer_list<const char*> keys) const {
    for (auto it = j_->begin(); it != j_->end(); ++it) {
        bool known = false;
        for (const char* k : keys) known = known || it.key() == k;
        if (!known) throw ConfigError(at(it.key()), "unknown field");
    }
}

ConfigNode ConfigNode::child(const std::string& key) const {
    const json* v = find(key);
    if (!v) throw ConfigError(at(key), "missing required object");
    return ConfigNode(*v, at(key));
}

std::vector<ConfigNode> ConfigNode::items(const std::string& key) const {
    const json* v = find(key);
    if (!v) throw ConfigError(at(key), "missing required array");
    if (!v->is_array()) throw ConfigError(at(key), "expected an array");
    std::vector<ConfigNode> out;
    for (std::size_t i = 0; i < v->size(); ++i)
        out.emplace_back((*v)[i], at(key) + "[" + std::to_string(i) + "]");
    return out;
}

double ConfigNode::number(const std::string& key) const {
    const json* v = find(key);
    if (!v) throw ConfigError(at(key), "missing required number");
    if (!v->is_number()) throw ConfigError(at(key), "expected a number");
    const double x = v->get<double>();
    if (!std::isfinite(x)) throw ConfigError(at(key), "expected a finite number");
    return x;
}

double ConfigNode::number(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

double ConfigNode::exponent(const std::string& key, double fallback) const {
    const json* v = find(key);
    if (!v) return fallback;
    if (v->is_string() && v->get<std::string>() == "inf") return std::numeric_limits<double>::infinity();
    if (!v->is_number()) throw ConfigError(at(key), "expected a number or \"inf\"");
    return v->get<double>();
}

double ConfigNode::positive(const std::string& key, double fallback) const {
    const double x = number(key, fallback);
    if (!(x > 0.0)) throw ConfigError(at(key), "must be positive");
    return x;
}

int ConfigNode::integer(const std::string& key, int fallback, int min_value) const {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_number_integer()) throw ConfigError(at(key), "expected an integer");
    const long long x = v->get<long long>();
    if (x < min_value) throw ConfigError(at(key), "must be at least " + std::to_string(min_value));
    if (x > std::numeric_limits<int>::max()) throw ConfigError(at(key), "too large");
    return static_cast<int>(x);
}

bool ConfigNode::boolean(const std::string& key, bool fallback) const {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_boolean()) throw ConfigError(at(key), "expected true or false");
    return v->get<bool>();
}

std::string ConfigNode::string(const std::string& key, const std::string& fallback) const {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_string()) throw ConfigError(at(key), "expected a string");
    return v->get<std::string>();
}

std::vector<double> ConfigNode::numbers(const std::string& key, const std::vector<double>& fallback) const {
    const json* v = find(key);
    if (!v) return fallback;
    if (!v->is_array()) throw ConfigError(at(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
        const json& x = (*v)[i];
        if (!x.is_number()) throw ConfigError(at(key) + "[" + std::to_string(i) + "]", "expected a number");
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<std::string> ConfigNode::strings(const std::string& key, const std::vector<std::string>& fallback) const {
    const json* v = find(key);
    if (!v) return fallback;
    if (v->is_string()) return {v->get<std::string>()};
    if (!v->is_array()) throw ConfigError(at(key), "expected a string or an array of strings");
    std::vector<std::string> out;
    for (std::size_t i = 0; i < v->size(); ++i) {
        const json& x = (*v)[i];
        if (!x.is_string()) throw ConfigError(at(key) + "[" + std::to_string(i) + "]", "expected a string");
        out.push_back(x.get<std::string>());
    }
    return out;
}

std::complex<double> ConfigNode::complex(const std::string& key, std::complex<double> fallback) const {
    const json* v = find(key);
    if (!v) return fallback;
    if (v->is_number()) return {v->get<double>(), 0.0};
    if (v->is_array() && v->size() == 2 && (*v)[0].is_number() && (*v)[1].is_number())
        return {(*v)[0].get<double>(), (*v)[1].get<double>()};
    throw ConfigError(at(key), "expected a number or [re, im]");
}

}  // namespace nlsa::io
