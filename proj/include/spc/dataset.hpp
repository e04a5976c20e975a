#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "spc/point_cloud.hpp"

namespace spc {

enum class SceneSource { real, synthetic };

const char* scene_source_name(SceneSource source);

struct SceneEntry {
  std::string id;
  SceneSource source = SceneSource::real;
  std::filesystem::path path;
  std::uint64_t point_count = 0;  // 0 until a stage that reads the cloud fills it

  bool operator==(const SceneEntry&) const = default;
};

struct ScenePool {
  std::string name;
  std::vector<SceneEntry> entries;
};

/// Collects every .txt point cloud directly inside `dir`, sorted by file
/// stem. Throws when the directory is missing or holds no point clouds.
ScenePool load_pool(const std::string& name, const std::filesystem::path& dir, SceneSource source);

/// Scenes selected for one training run.
struct TrainingPlan {
  int proportion = 0;  // percentage of synthetic scenes requested
  int replicate = 0;
  bool benchmark = false;  // true → the real-only twin of a mixed plan
  int total = 0;           // scene budget of the mixed plan
  int n_real = 0;
  int n_synthetic = 0;
  std::uint64_t seed = 0;  // the stream the selection was drawn from
  std::vector<SceneEntry> scenes;  // real selection first, then synthetic
};

/// Number of synthetic scenes for a mix: proportion% of total, rounding
/// half up. Proportion must lie in [0, 100].
int synthetic_count(int proportion, int total);

/// Draws n_synthetic scenes from the synthetic pool and the remainder from
/// the real pool, both by seeded partial shuffle keyed on (seed, proportion,
/// replicate). Throws "pool exhausted" naming the pool that ran short.
TrainingPlan build_mix(const ScenePool& real_pool, const ScenePool& synthetic_pool, int proportion,
                       int total, int replicate, std::uint64_t seed);

/// The real-only twin: the same real scenes the mix drew, nothing else.
/// Throws "no benchmark defined" for all-real (0%) and all-synthetic (100%)
/// mixes, where the twin would be the mix itself or empty.
TrainingPlan build_benchmark(const TrainingPlan& mix);

struct MixingSpec {
  int total = 44;
  std::vector<int> proportions;  // defaults to 0, 5, ..., 100 when empty
  int replicates = 1;            // at most 3
  std::uint64_t seed = 0;
};

/// All mixed plans for every (replicate, proportion) pair, followed by the
/// benchmark twins that exist. Validates the spec (replicates 1..3,
/// proportions in [0, 100], distinct).
std::vector<TrainingPlan> enumerate_experiments(const ScenePool& real_pool,
                                                const ScenePool& synthetic_pool,
                                                const MixingSpec& spec);

void write_plan_json(const std::filesystem::path& path, const TrainingPlan& plan);
TrainingPlan read_plan_json(const std::filesystem::path& path);

/// One vertical column of the xy block grid; `indices` point into the source
/// cloud in selection order and always hold exactly points_per_block entries.
struct Block {
  int ix = 0;
  int iy = 0;
  std::vector<std::size_t> indices;
};

/// Splits the cloud into block_size_m columns anchored at the cloud's xy
/// minimum and resamples every occupied cell to points_per_block points:
/// without replacement when the cell is rich enough, with replacement
/// otherwise. Cells come back sorted by (ix, iy); a cell's draw depends only
/// on (seed, ix, iy) and its contents.
std::vector<Block> partition_blocks(const PointCloud& cloud, double block_size_m,
                                    int points_per_block, std::uint64_t seed);

/// Percentage of points per class code. Throws on an empty or unlabeled cloud.
std::array<double, 8> class_proportions(const PointCloud& cloud);

/// Writes `cloud` under root/<id>/ in the per-object annotation layout:
/// <id>.txt with all points ("x y z r g b"), and Annotations/<class>_<k>.txt
/// for every contiguous run of one class, numbered per class from 1.
/// Throws when a point is unlabeled.
void export_dataset(const std::filesystem::path& root, const std::string& id,
                    const PointCloud& cloud);

}  // namespace spc
