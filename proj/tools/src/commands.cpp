#include "pame/cli/commands.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <cmath>
#include <map>
#include <sstream>

#include "pame/cli/csv.hpp"
#include "pame/errors.hpp"

#ifndef PAME_VERSION
#define PAME_VERSION "unknown"
#endif

namespace pame::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using sampling::Strategy;

namespace {

std::string str(double v) { return format_double(v); }
std::string str(std::size_t v) { return std::to_string(v); }

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
    if (!f) throw std::runtime_error("write failed for " + path.string());
}

void write_metrics(const fs::path& path, std::span<const harness::Run> runs) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    write_csv_row(f, {"test_id", "strategy", "iteration", "clock_t", "rmse", "learning_ratio",
                      "fit_predict_seconds", "dataset_size"});
    for (const auto& run : runs) {
        for (const auto& r : run.episode.records) {
            write_csv_row(f, {std::to_string(run.test_id), std::string(sampling::to_string(run.strategy)),
                              str(r.iteration), str(r.clock), str(r.rmse), str(r.learning_ratio),
                              str(r.fit_predict_seconds), str(r.dataset_size)});
        }
    }
}

void write_curves(const fs::path& path, const harness::McSummary& summary) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    write_csv_row(f, {"strategy", "iteration", "count", "mean", "p16", "median", "p84"});
    for (const auto& curve : summary.learning) {
        for (const auto& p : curve.points) {
            write_csv_row(f, {std::string(sampling::to_string(curve.strategy)), str(p.iteration),
                              str(p.count), str(p.mean), str(p.p16), str(p.median), str(p.p84)});
        }
    }
}

void write_time_ratio(const fs::path& path, std::span<const harness::TimeRatioSample> samples) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    write_csv_row(f, {"test_id", "iteration", "tau", "proposed_size", "nosel_size"});
    for (const auto& s : samples) {
        write_csv_row(f, {std::to_string(s.test_id), str(s.iteration), s.ratio ? str(*s.ratio) : "nan",
                          str(s.proposed_size), str(s.nosel_size)});
    }
}

ordered_json win_json(const harness::WinRate& w) {
    ordered_json j;
    j["strategy"] = sampling::to_string(w.strategy);
    j["baseline"] = sampling::to_string(w.baseline);
    j["pooled"] = w.pooled;
    j["per_run_median"] = w.per_run_median;
    j["comparisons"] = w.comparisons;
    return j;
}

bool has_pair(std::span<const Strategy> s) {
    return std::find(s.begin(), s.end(), Strategy::uncertainty) != s.end() &&
           std::find(s.begin(), s.end(), Strategy::take_all) != s.end();
}

double final_ratio(const harness::Run& r) {
    return r.episode.records.empty() ? 1.0 : r.episode.records.back().learning_ratio;
}

void print_summary(std::ostream& out, std::span<const harness::Run> runs,
                   const harness::McSummary& summary, std::span<const Strategy> strategies) {
    out << std::left << std::setw(15) << "strategy" << std::setw(8) << "runs" << std::setw(14)
        << "final_ratio";
    for (const auto b : strategies) out << std::setw(15) << ("vs_" + std::string(sampling::to_string(b)));
    out << '\n';
    for (const auto s : strategies) {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& r : runs) {
            if (r.strategy == s) {
                sum += final_ratio(r);
                ++n;
            }
        }
        out << std::setw(15) << sampling::to_string(s) << std::setw(8) << n << std::setw(14)
            << std::setprecision(4) << (n ? sum / static_cast<double>(n) : 0.0);
        for (const auto b : strategies) {
            std::string cell = "-";
            for (const auto& w : summary.wins) {
                if (w.strategy == s && w.baseline == b && s != b) {
                    std::ostringstream c;
                    c << std::fixed << std::setprecision(3) << w.pooled;
                    cell = c.str();
                }
            }
            out << std::setw(15) << cell;
        }
        out << '\n';
    }
    if (has_pair(strategies)) {
        out << "processing time ratio: median " << std::setprecision(4) << summary.time_ratio_median
            << ", below 1 in " << std::setprecision(3) << 100.0 * summary.time_ratio_below_one
            << "% of iterations, Spearman trend " << summary.time_ratio_trend << '\n';
    }
}

json read_manifest(const fs::path& dir) {
    const fs::path p = dir / kManifestJson;
    if (!fs::exists(p)) throw ConfigError(dir.string(), "missing manifest.json");
    std::ifstream in(p);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError(dir.string(), std::string("unreadable manifest: ") + e.what());
    }
}

std::vector<Strategy> manifest_strategies(const json& manifest) {
    std::vector<Strategy> out;
    for (const auto& name : manifest.at("spec").at("strategies")) {
        const auto s = sampling::parse_strategy(name.get<std::string>());
        if (!s) throw ConfigError("strategies", "unknown strategy in manifest");
        out.push_back(*s);
    }
    return out;
}

RunSpec resolve_spec(const std::optional<fs::path>& spec_file, const RunOverrides& overrides) {
    RunSpec spec = load_spec(spec_file);
    apply_overrides(spec, overrides);
    spec.validate();
    return spec;
}

} // namespace

std::string build_identifier() {
    std::string id = std::string("pame ") + PAME_VERSION;
#if defined(__clang__)
    id += " clang " __clang_version__;
#elif defined(__GNUC__)
    id += " gcc " __VERSION__;
#endif
#ifdef NDEBUG
    id += " release";
#else
    id += " debug";
#endif
    return id;
}

std::vector<harness::Run> runs_from_metrics(const CsvTable& table) {
    const std::size_t c_test = table.column("test_id");
    const std::size_t c_strategy = table.column("strategy");
    const std::size_t c_it = table.column("iteration");
    const std::size_t c_clock = table.column("clock_t");
    const std::size_t c_rmse = table.column("rmse");
    const std::size_t c_ratio = table.column("learning_ratio");
    const std::size_t c_time = table.column("fit_predict_seconds");
    const std::size_t c_size = table.column("dataset_size");

    std::vector<harness::Run> runs;
    std::map<std::pair<int, Strategy>, std::size_t> index;
    for (const auto& row : table.rows) {
        const int test = std::stoi(row[c_test]);
        const auto strategy = sampling::parse_strategy(row[c_strategy]);
        if (!strategy) throw std::runtime_error("unknown strategy '" + row[c_strategy] + "'");
        auto [it, inserted] = index.try_emplace({test, *strategy}, runs.size());
        if (inserted) runs.push_back({test, 0, *strategy, {}});
        metrics::MetricsRecord rec;
        rec.iteration = std::stoull(row[c_it]);
        rec.clock = parse_double(row[c_clock]);
        rec.rmse = parse_double(row[c_rmse]);
        rec.learning_ratio = parse_double(row[c_ratio]);
        rec.fit_predict_seconds = parse_double(row[c_time]);
        rec.dataset_size = std::stoull(row[c_size]);
        runs[it->second].episode.records.push_back(rec);
    }
    for (auto& r : runs) {
        if (!r.episode.records.empty() && r.episode.records.front().learning_ratio > 0.0) {
            r.episode.rmse0 = r.episode.records.front().rmse / r.episode.records.front().learning_ratio;
        }
    }
    return runs;
}

int cmd_run(const std::optional<fs::path>& spec_file, const RunOverrides& overrides,
            std::ostream& out, std::ostream& err) {
    RunSpec spec;
    try {
        spec = resolve_spec(spec_file, overrides);
    } catch (const ConfigError& e) {
        err << "pame run: invalid config: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const fs::path dir(spec.out);
        fs::create_directories(dir);

        const harness::McResult result = harness::monte_carlo(spec.mc_options());

        write_metrics(dir / kMetricsCsv, result.runs);
        write_curves(dir / kLearningCurveCsv, result.summary);
        std::vector<std::string> files{kMetricsCsv, kLearningCurveCsv};
        if (has_pair(spec.strategies)) {
            write_time_ratio(dir / kTimeRatioCsv,
                             harness::paired_time_ratios(result.runs, Strategy::uncertainty,
                                                         Strategy::take_all));
            files.emplace_back(kTimeRatioCsv);
        }

        ordered_json summary;
        summary["n_tests"] = spec.n_tests;
        summary["time_varying"] = spec.time_varying;
        ordered_json rmse0 = ordered_json::array();
        ordered_json finals = ordered_json::object();
        for (const auto& r : result.runs) {
            if (r.strategy == spec.strategies.front()) rmse0.push_back(r.episode.rmse0);
            finals[std::string(sampling::to_string(r.strategy))].push_back(final_ratio(r));
        }
        summary["rmse0"] = rmse0;
        summary["final_learning_ratio"] = finals;
        ordered_json wins = ordered_json::array();
        for (const auto& w : result.summary.wins) wins.push_back(win_json(w));
        summary["win_rates"] = wins;
        if (has_pair(spec.strategies)) {
            summary["time_ratio"] = {{"median", result.summary.time_ratio_median},
                                     {"below_one", result.summary.time_ratio_below_one},
                                     {"spearman_vs_iteration", result.summary.time_ratio_trend}};
        }
        write_text(dir / kSummaryJson, summary.dump(2) + "\n");
        files.emplace_back(kSummaryJson);
        files.emplace_back(kManifestJson);

        ordered_json manifest;
        manifest["tool"] = "pame";
        manifest["build"] = build_identifier();
        manifest["seed"] = spec.seed;
        manifest["config_hash"] = config_hash(spec);
        manifest["experiment_hash"] = experiment_hash(spec);
        manifest["spec"] = to_json(spec);
        manifest["files"] = files;
        write_text(dir / kManifestJson, manifest.dump(2) + "\n");

        print_summary(out, result.runs, result.summary, spec.strategies);
        out << "wrote " << files.size() << " files to " << dir.string() << '\n';
    } catch (const std::exception& e) {
        err << "pame run: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_compare(const std::vector<fs::path>& run_dirs, const std::optional<fs::path>& merged_csv,
                std::ostream& out, std::ostream& err) {
    if (run_dirs.empty()) {
        err << "pame compare: no run directories given\n";
        return kExitConfig;
    }

    std::vector<std::vector<harness::Run>> per_dir;
    std::vector<Strategy> strategies;
    try {
        std::string reference;
        for (const auto& dir : run_dirs) {
            const json manifest = read_manifest(dir);
            const auto hash = manifest.at("experiment_hash").get<std::string>();
            if (reference.empty()) {
                reference = hash;
                strategies = manifest_strategies(manifest);
            } else if (hash != reference) {
                throw ConfigError(dir.string(), "experiment configuration differs from " +
                                                    run_dirs.front().string());
            }
            if (!fs::exists(dir / kMetricsCsv)) throw ConfigError(dir.string(), "missing metrics.csv");
            per_dir.push_back(runs_from_metrics(read_csv(dir / kMetricsCsv)));
        }
    } catch (const ConfigError& e) {
        err << "pame compare: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "pame compare: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        // Distinct test ids so pooled statistics pair arms within one run only.
        constexpr int kStride = 1'000'000;
        std::vector<harness::Run> pooled;
        for (std::size_t d = 0; d < per_dir.size(); ++d) {
            for (auto r : per_dir[d]) {
                r.test_id += static_cast<int>(d) * kStride;
                pooled.push_back(std::move(r));
            }
        }
        const harness::McSummary summary = harness::summarize(pooled, strategies);
        out << "pooled over " << run_dirs.size() << " run(s)\n";
        print_summary(out, pooled, summary, strategies);

        // Each later run against the first, same strategy, paired by test order.
        out << '\n' << std::left << std::setw(28) << "run" << std::setw(15) << "strategy"
            << std::setw(14) << "final_ratio" << "win_vs_first\n";
        for (std::size_t d = 0; d < per_dir.size(); ++d) {
            for (const auto s : strategies) {
                std::vector<harness::Run> pair;
                int pos = 0;
                double final_sum = 0.0;
                std::size_t n = 0;
                for (const auto& r : per_dir[d]) {
                    if (r.strategy != s) continue;
                    harness::Run a = r;
                    a.test_id = pos++;
                    a.strategy = Strategy::uncertainty;
                    final_sum += final_ratio(r);
                    ++n;
                    pair.push_back(std::move(a));
                }
                pos = 0;
                for (const auto& r : per_dir.front()) {
                    if (r.strategy != s) continue;
                    harness::Run b = r;
                    b.test_id = pos++;
                    b.strategy = Strategy::random;
                    pair.push_back(std::move(b));
                }
                const auto w = harness::win_rate(pair, Strategy::uncertainty, Strategy::random);
                out << std::setw(28) << run_dirs[d].string() << std::setw(15)
                    << sampling::to_string(s) << std::setw(14) << std::setprecision(4)
                    << (n ? final_sum / static_cast<double>(n) : 0.0) << std::fixed
                    << std::setprecision(3) << w.pooled << std::defaultfloat << '\n';
            }
        }

        const fs::path merged = merged_csv.value_or("merged.csv");
        std::ofstream f(merged, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + merged.string());
        write_csv_row(f, {"run", "test_id", "strategy", "iteration", "clock_t", "rmse",
                          "learning_ratio", "fit_predict_seconds", "dataset_size"});
        for (std::size_t d = 0; d < per_dir.size(); ++d) {
            for (const auto& run : per_dir[d]) {
                for (const auto& r : run.episode.records) {
                    write_csv_row(f, {std::to_string(d), std::to_string(run.test_id),
                                      std::string(sampling::to_string(run.strategy)),
                                      str(r.iteration), str(r.clock), str(r.rmse),
                                      str(r.learning_ratio), str(r.fit_predict_seconds),
                                      str(r.dataset_size)});
                }
            }
        }
        out << "wrote " << merged.string() << '\n';
    } catch (const std::exception& e) {
        err << "pame compare: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

int cmd_snapshot(const std::optional<fs::path>& spec_file, const RunOverrides& overrides,
                 double at_position, std::ostream& out, std::ostream& err) {
    RunSpec spec;
    try {
        spec = resolve_spec(spec_file, overrides);
        if (!(at_position >= 0.0 && at_position <= spec.sim.road.length)) {
            throw ConfigError("at_position", "must lie in [0, L]");
        }
    } catch (const ConfigError& e) {
        err << "pame snapshot: invalid config: " << e.what() << '\n';
        return kExitConfig;
    }

    try {
        const fs::path dir(spec.out);
        fs::create_directories(dir);
        const auto& params = spec.sim;
        const std::vector<double> grid = metrics::make_grid(params.road.length, params.grid_step);
        const RngStreams streams(spec.seed);

        std::ofstream f(dir / kSnapshotCsv, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (dir / kSnapshotCsv).string());
        write_csv_row(f, {"strategy", "x", "pi", "f_true", "f_hat", "std"});
        for (const auto s : spec.strategies) {
            mapper::SimState state = mapper::initial_state(params, s, streams, spec.time_varying);
            // First iteration whose measurement point s_t reaches at_position;
            // at the road start that is the untrained prior.
            double measured_at = 0.0;
            bool stepped = false;
            while (at_position > 0.0 && (!stepped || measured_at < at_position) &&
                   state.position <= params.road.length) {
                measured_at = state.position;
                state = mapper::step(state, streams, params).state;
                stepped = true;
            }
            const gp::PosteriorSummary post = gp::posterior(state.model, grid);
            const env::WorldView world = state.world(params.road);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                write_csv_row(f, {std::string(sampling::to_string(s)), str(grid[i]),
                                  str(world.prior(grid[i])), str(world.pam(grid[i])),
                                  str(post.mean[i]), str(std::sqrt(post.variance[i]))});
            }
            out << sampling::to_string(s) << ": iteration " << state.iteration << ", s_t = "
                << measured_at << " m, " << state.dataset.size() << " points\n";
        }
        out << "wrote " << (dir / kSnapshotCsv).string() << '\n';
    } catch (const std::exception& e) {
        err << "pame snapshot: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitOk;
}

} // namespace pame::cli
