#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spc/config.hpp"
#include "spc/metrics.hpp"

namespace spc {

/// One finished stage: which files it wrote (relative to the output root)
/// and how long it took. Everything except the timing is deterministic for
/// a fixed config and seed.
struct StageResult {
  std::string stage;
  std::vector<std::filesystem::path> outputs;  // relative to the output root
  std::vector<std::filesystem::path> inputs;   // as consumed (absolute or relative)
  double elapsed_ms = 0.0;
};

/// FNV-1a (64-bit) over the file bytes, as 16 hex digits.
std::string hash_file(const std::filesystem::path& path);

/// Records the stage's outputs and their hashes under "stages.<name>" in
/// <output_root>/run_manifest.json, keeping other stages' entries.
void update_manifest(const PipelineConfig& config, const StageResult& result);

// The stages, in pipeline order. Each writes under <output_root>/<stage>/
// and refuses to run before its inputs exist ("run <stage> first").
StageResult run_plan(const PipelineConfig& config);      // plan/stations.json
StageResult run_scan(const PipelineConfig& config);      // scan/<room>.txt
StageResult run_annotate(const PipelineConfig& config);  // annotate/<room>.txt
StageResult run_colorize(const PipelineConfig& config);  // colorize/<room>.txt
StageResult run_mix(const PipelineConfig& config);       // mix/plans/*.json
StageResult run_blocks(const PipelineConfig& config);    // blocks/<room>/*.txt
StageResult run_eval(const PipelineConfig& config);      // eval/report.{txt,json}

/// Runs every stage in order, updating the manifest after each.
std::vector<StageResult> run_all(const PipelineConfig& config);

/// Reads per-proportion evaluation reports (JSON, stamped with their
/// proportion) from two directories — mixed-training results and their
/// real-only benchmarks — and writes the deviation table as text and JSON.
DeviationTable run_deviate(const std::filesystem::path& mix_dir,
                           const std::filesystem::path& bench_dir, int range_lo, int range_hi,
                           const std::filesystem::path& out_text,
                           const std::filesystem::path& out_json);

}  // namespace spc
