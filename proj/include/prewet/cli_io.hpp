#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace prewet {

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolVersion = "0.1.0";

/// Every knob of every subcommand. Zero or negative values of burnin,
/// sweeps and chi mean "derive the default".
struct RunConfig {
    std::string command;
    int format_version = kFormatVersion;
    std::uint64_t seed = 1;
    int replicas = 1;
    std::string out = "out";
    std::string in;  // analyze/report input directory; defaults to out
    long samples = 100;

    double beta = 1.0;
    double lambda = 1.0;
    int n = 64;
    double chi = 0.0;

    long burnin = -1;  // default 20 n
    long thin = 10;
    long sweeps = 0;   // production sweeps; when set, thin = sweeps / samples

    std::string law;   // step-law CSV; empty means the default law

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Flat `key = value` text with [run], [model], [ising] and [walk] sections.
/// Unknown sections or keys and malformed values throw ValidationError.
RunConfig parse_config(const std::string& text, RunConfig base = {});
std::string format_config(const RunConfig& cfg);
/// Reads a config file, or the config snapshot inside a manifest.json.
RunConfig load_config(const std::string& path, RunConfig base = {});

/// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

struct RunManifest {
    RunConfig config;
    std::string tool_version = kToolVersion;
    std::string started;
    std::string finished;
    std::vector<std::uint64_t> replica_seeds;
    std::map<std::string, std::string> outputs;  // file name -> sha256
    // Run-specific annotations, e.g. the contour convention and
    // equilibration diagnostics of Ising runs.
    std::map<std::string, std::string> notes;
};

void write_manifest(const RunManifest& m, const std::string& path);
RunManifest read_manifest(const std::string& path);
/// Throws DigestMismatch when a listed output is missing or differs.
void verify_manifest(const RunManifest& m, const std::string& dir);

/// Subcommand drivers. Each writes its outputs plus a manifest into
/// cfg.out and returns the manifest.
RunManifest run_simulate_ising(const RunConfig& cfg);
RunManifest run_simulate_walk(const RunConfig& cfg);
RunManifest run_fs_reference(const RunConfig& cfg);
RunManifest run_analyze(const RunConfig& cfg);
/// Verifies every manifest in the directory and returns a printable summary.
std::string run_report(const RunConfig& cfg);

/// Manifest file name written by each subcommand.
std::string manifest_name(const std::string& command);

}  // namespace prewet
