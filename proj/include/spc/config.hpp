#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spc/annotator.hpp"
#include "spc/planner.hpp"
#include "spc/scanner.hpp"

namespace spc {

/// A config file (or CLI argument) that fails validation. The launcher maps
/// this to exit code 1; operational failures exit with 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ColorizeConfig {
  std::filesystem::path reference_dir;  // empty → keep the synthetic colors
};

struct MixingConfig {
  int total = 44;
  std::vector<int> proportions;          // empty → 0, 5, ..., 100
  int replicates = 1;                    // 1..3
  std::optional<std::uint64_t> seed;     // absent → the pipeline seed
  std::filesystem::path real_pool;       // empty → the annotate stage output
  std::filesystem::path synthetic_pool;  // empty → the colorize stage output
  bool export_datasets = false;
};

struct BlocksConfig {
  double block_size_m = 1.0;
  int points_per_block = 4096;
};

struct EvalConfig {
  std::filesystem::path gt_dir;    // empty → the annotate stage output
  std::filesystem::path pred_dir;  // empty → self-check against ground truth
  std::optional<int> proportion;   // stamps the report for deviation tables
};

struct PipelineConfig {
  std::filesystem::path scene;        // scene manifest
  std::filesystem::path output_root;  // stage outputs land under here
  std::uint64_t seed = 0;
  int threads = 0;  // 0 → library default
  bool debug = false;
  PlannerConfig planner;
  ScannerConfig scanner;
  AnnotationConfig annotation;
  RigidTransform color_transform;  // registers the color reference into the scan frame
  ColorizeConfig colorize;
  MixingConfig mixing;
  BlocksConfig blocks;
  EvalConfig eval;
};

/// Parses a JSON config. Unknown keys are rejected; every complaint names
/// the offending field by dotted path. An empty object is a valid config
/// (all defaults).
PipelineConfig parse_config(const std::string& json_text, const std::string& origin = "config");

PipelineConfig load_config(const std::filesystem::path& path);

/// The fully resolved config as canonical JSON — what a run actually used,
/// defaults included. parse_config(dump_config(c)) reproduces c.
std::string dump_config(const PipelineConfig& config);

}  // namespace spc
