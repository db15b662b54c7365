#pragma once

#include <complex>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "nlsa/estimates.hpp"
#include "nlsa/norms.hpp"
#include "nlsa/oscillatory.hpp"
#include "nlsa/params.hpp"
#include "nlsa/picard.hpp"

namespace nlsa::io {

using json = nlohmann::ordered_json;

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

/// Non-finite doubles become the strings above so they survive a round trip.
json number(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void write(const std::filesystem::path& path) const;
};

void write_json(const std::filesystem::path& path, const json& j);
/// Throws ConfigError with path "$" on a missing file or a parse error.
json read_json(const std::filesystem::path& path);

json to_json(const NormReport& r);
json to_json(const ContractionReport& r);
json to_json(const EquationParams& p);
json to_json(const Grid& g);
json to_json(const ProbeParams& p);
json to_json(const ExponentTuple& e);
json to_json(const EstimateRun& r);
json to_json(const EstimateSweepResult& r);

/// Read-only view of one JSON node that knows where it sits in the document.
/// Every accessor throws ConfigError carrying the dotted field path.
class ConfigNode {
public:
    ConfigNode(const json& j, std::string path);

    const std::string& path() const { return path_; }
    const json& raw() const { return *j_; }
    bool has(const std::string& key) const;

    /// Rejects keys outside the list.
    void allow_only(std::initializer_list<const char*> keys) const;

    ConfigNode child(const std::string& key) const;
    std::vector<ConfigNode> items(const std::string& key) const;

    double number(const std::string& key, double fallback) const;
    double number(const std::string& key) const;
    /// Accepts a number or the string "inf".
    double exponent(const std::string& key, double fallback) const;
    double positive(const std::string& key, double fallback) const;
    int integer(const std::string& key, int fallback, int min_value) const;
    bool boolean(const std::string& key, bool fallback) const;
    std::string string(const std::string& key, const std::string& fallback) const;
    std::vector<double> numbers(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::string> strings(const std::string& key, const std::vector<std::string>& fallback) const;
    /// A number or a two-element [re, im] array.
    std::complex<double> complex(const std::string& key, std::complex<double> fallback) const;

private:
    const json* j_;
    std::string path_;

    std::string at(const std::string& key) const;
    const json* find(const std::string& key) const;
};

}  // namespace nlsa::io
