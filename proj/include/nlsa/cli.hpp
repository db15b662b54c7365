#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

namespace nlsa::cli {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode : int {
    kOk = 0,
    kConfigError = 1,
    kNonContraction = 2,
    kVerificationFailed = 3,
};

struct Options {
    std::string command;
    std::filesystem::path config;
    std::filesystem::path out;
    std::optional<std::uint64_t> seed;
    int threads = 0;  // 0: NLSA_LAB_THREADS, else 1
};

int cmd_solve(const Options& opt);
int cmd_verify_oscillatory(const Options& opt);
int cmd_verify_estimates(const Options& opt);
/// Collects every manifest below opt.out into report.json and report.csv.
int cmd_report(const Options& opt);

int dispatch(const Options& opt);

/// Parses argv and runs the chosen subcommand.
int run(int argc, char** argv);

}  // namespace nlsa::cli
