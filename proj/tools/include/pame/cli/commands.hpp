#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <vector>

#include "pame/cli/csv.hpp"
#include "pame/cli/run_spec.hpp"

namespace pame::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;

/// Files written by `run` into the output directory.
inline constexpr const char* kMetricsCsv = "metrics.csv";
inline constexpr const char* kLearningCurveCsv = "learning_curve.csv";
inline constexpr const char* kTimeRatioCsv = "time_ratio.csv";
inline constexpr const char* kSummaryJson = "summary.json";
inline constexpr const char* kManifestJson = "manifest.json";
inline constexpr const char* kSnapshotCsv = "snapshot.csv";

/// Monte-Carlo experiment; writes per-iteration metrics, aggregates and a manifest.
int cmd_run(const std::optional<std::filesystem::path>& spec_file, const RunOverrides& overrides,
            std::ostream& out, std::ostream& err);

/// Pools several run directories of the same experiment.
int cmd_compare(const std::vector<std::filesystem::path>& run_dirs,
                const std::optional<std::filesystem::path>& merged_csv, std::ostream& out,
                std::ostream& err);

/// Map profile of every strategy once the platform has reached `at_position`.
int cmd_snapshot(const std::optional<std::filesystem::path>& spec_file,
                 const RunOverrides& overrides, double at_position, std::ostream& out,
                 std::ostream& err);

/// Rebuilds harness runs from a metrics CSV written by cmd_run.
std::vector<harness::Run> runs_from_metrics(const CsvTable& table);

/// Identifies the binary in manifests.
std::string build_identifier();

} // namespace pame::cli
