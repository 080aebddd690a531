#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pame/harness.hpp"

namespace pame::cli {

/// Raised for an invalid configuration; `field` names the offending key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string field, const std::string& message)
        : std::runtime_error(field + ": " + message), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const { return field_; }

private:
    std::string field_;
};

/// Everything a `run` needs. Defaults reproduce the reference setup.
struct RunSpec {
    mapper::SimParams sim;
    std::vector<sampling::Strategy> strategies{
        sampling::Strategy::uncertainty, sampling::Strategy::random,
        sampling::Strategy::platform_only, sampling::Strategy::take_all};
    int n_tests = 10;
    bool time_varying = false;
    std::uint64_t seed = 1;
    std::string out = "pame_out";

    /// Throws ConfigError naming the first invalid field.
    void validate() const;

    [[nodiscard]] harness::McOptions mc_options() const;
};

/// Command-line values that take precedence over the spec file.
struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> n_tests;
    std::optional<std::vector<std::string>> strategies;
    std::optional<bool> time_varying;
    std::optional<double> grid_step;
    std::optional<std::string> out;
};

nlohmann::ordered_json to_json(const RunSpec& spec);

/// Unknown keys and wrong types are ConfigErrors; missing keys keep defaults.
RunSpec spec_from_json(const nlohmann::json& j);

/// Reads and parses a spec file; nullopt yields the defaults.
RunSpec load_spec(const std::optional<std::filesystem::path>& file);

void apply_overrides(RunSpec& spec, const RunOverrides& overrides);

/// Hash of every spec field.
std::string config_hash(const RunSpec& spec);

/// Hash of the fields that define the experiment, i.e. without seed, test
/// count and output location. Runs with equal experiment hashes can be pooled.
std::string experiment_hash(const RunSpec& spec);

} // namespace pame::cli
