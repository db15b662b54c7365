#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "nlsa/errors.hpp"
#include "nlsa/json_io.hpp"

using namespace nlsa;
using io::ConfigNode;
using io::json;

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "nlsa_json_io_test";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string config_error_path(const auto& fn) {
    try {
        fn();
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "<no error>";
}

}  // namespace

TEST_CASE("float formatting") {
    CHECK(io::format_double(0.1) == "0.10000000000000001");
    CHECK(io::format_double(1.0) == "1");
    CHECK(io::format_double(std::numeric_limits<double>::quiet_NaN()) == "nan");
    CHECK(io::format_double(-std::numeric_limits<double>::infinity()) == "-inf");
    for (double v : {kPi, 1e-300, -2.5e17, 6.02214076e23}) CHECK(std::strtod(io::format_double(v).c_str(), nullptr) == v);
    CHECK(io::number(kInf) == json("inf"));
    CHECK(io::number(2.5) == json(2.5));
}

TEST_CASE("csv and json writers") {
    io::CsvTable t;
    t.header = {"a", "b"};
    t.rows = {{"1", "x"}, {"2", "y"}};
    const fs::path csv = scratch("t.csv");
    t.write(csv);
    CHECK(slurp(csv) == "a,b\n1,x\n2,y\n");

    json j;
    j["z"] = 1;
    j["a"] = io::number(0.1);
    const fs::path jp = scratch("t.json");
    io::write_json(jp, j);
    const std::string text = slurp(jp);
    CHECK(text.find("\"z\"") < text.find("\"a\""));
    CHECK(io::read_json(jp) == j);

    std::ofstream(scratch("bad.json")) << "{ not json";
    CHECK(config_error_path([] { io::read_json(scratch("bad.json")); }) == "$");
    CHECK(config_error_path([] { io::read_json(scratch("missing.json")); }) == "$");
}

TEST_CASE("config node diagnostics carry field paths") {
    const json doc = json::parse(R"({
        "grid": {"num_points": 1000.5, "length": -3},
        "probes": [{"omega": 10}, {"omega": "big"}],
        "c": [1, 2],
        "q": "inf",
        "names": "all",
        "flag": 3
    })");
    const ConfigNode root(doc, "$");
    CHECK(root.has("grid"));
    CHECK_FALSE(root.has("time"));
    const ConfigNode grid = root.child("grid");
    CHECK(grid.path() == "$.grid");
    CHECK(config_error_path([&] { grid.integer("num_points", 8, 8); }) == "$.grid.num_points");
    CHECK(config_error_path([&] { grid.positive("length", 1.0); }) == "$.grid.length");
    CHECK(config_error_path([&] { grid.allow_only({"num_points"}); }) == "$.grid.length");
    CHECK(config_error_path([&] { root.number("missing"); }) == "$.missing");

    const auto probes = root.items("probes");
    REQUIRE(probes.size() == 2);
    CHECK(probes[0].number("omega") == 10.0);
    CHECK(config_error_path([&] { probes[1].number("omega"); }) == "$.probes[1].omega");

    CHECK(root.complex("c", 0.0) == std::complex<double>(1, 2));
    CHECK(root.complex("absent", 3.0) == std::complex<double>(3, 0));
    CHECK(std::isinf(root.exponent("q", 2.0)));
    CHECK(root.strings("names", {}) == std::vector<std::string>{"all"});
    CHECK(config_error_path([&] { root.boolean("flag", false); }) == "$.flag");
    CHECK(root.number("absent", 4.5) == 4.5);

    try {
        grid.positive("length", 1.0);
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).rfind("$.grid.length: ", 0) == 0);
    }
}

TEST_CASE("report serializers use fixed fields") {
    NormReport r;
    r.mu1 = 1;
    r.h_quarter_history = {1.0, 2.0};
    const json j = io::to_json(r);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    CHECK(keys == std::vector<std::string>{"mu1", "mu2", "mu3", "mu4", "mu5", "y_norm", "weighted_sup", "x_norm",
                                           "h_quarter_history", "weighted_history"});
    const json e = io::to_json(ExponentTuple{2, 2, 4, kInf, 4, 2});
    CHECK(e["q1"] == json("inf"));
    const json p = io::to_json(reduction_preset("NLSA-default"));
    CHECK(p["c"] == json::array({1.0, 0.0}));
}
