#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "decern/config.hpp"
#include "decern/harness.hpp"

namespace decern {

inline constexpr std::string_view kReportSchema = "decern-report";
inline constexpr int kReportSchemaVersion = 1;
inline constexpr std::string_view kArtifactVersion = "1.0.0";

struct Report {
    ConfigMap config;  // resolved config echo
    ExperimentResult result;
};

/**
 * report.json layout (schema_version 1):
 *
 *   { "schema": "decern-report", "schema_version": 1, "artifact_version": "...",
 *     "config": { "<key>": "<value>", ... },
 *     "runs": [ { "strategy": "decern", "seed": 0,
 *                 "cycles": [ { "cycle", "accuracy", "imbalance", "labeled",
 *                               "oracle_reveals", "pool_hash" (16 hex digits),
 *                               "selected": [...],
 *                               "scores": null | { "mean", "std", "skewness", "lambda",
 *                                                  "zeta", "candidates", "fallback" },
 *                               "wall_ms": { "select", "train", "eval" } } ] } ] }
 */
std::string report_to_json(const Report& report);

// Throws SchemaError on malformed JSON, a foreign schema or a version mismatch.
Report report_from_json(std::string_view text);

// Columns: cycle,strategy,seed,accuracy,imbalance,candidates,lambda,zeta,wall_ms,pool_hash.
// Score columns are empty for strategies without a score table.
std::string curves_csv(const ExperimentResult& result);

// Per strategy, per cycle mean +- std of accuracy and imbalance.
std::string summary_table(const ExperimentResult& result);

// Final-cycle accuracy mean +- std per strategy.
std::string comparison_table(const ExperimentResult& result);

// index,S,selected for one DECERN cycle.
std::string score_dump_csv(const CycleReport& cycle);

std::string hex64(std::uint64_t v);

// Writes to a sibling temp file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

std::string read_file(const std::filesystem::path& path);

}  // namespace decern
