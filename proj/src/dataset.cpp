#include "spc/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>

#include "json.hpp"
#include "spc/classes.hpp"
#include "spc/rng.hpp"

namespace spc {

const char* scene_source_name(SceneSource source) {
  return source == SceneSource::real ? "real" : "synthetic";
}

ScenePool load_pool(const std::string& name, const std::filesystem::path& dir,
                    SceneSource source) {
  if (!std::filesystem::is_directory(dir))
    throw std::runtime_error("no such directory: " + dir.string());
  ScenePool pool;
  pool.name = name;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".txt") continue;
    pool.entries.push_back({entry.path().stem().string(), source, entry.path(), 0});
  }
  std::sort(pool.entries.begin(), pool.entries.end(),
            [](const SceneEntry& a, const SceneEntry& b) { return a.id < b.id; });
  if (pool.entries.empty())
    throw std::runtime_error("empty pool: no point clouds in " + dir.string());
  return pool;
}

int synthetic_count(int proportion, int total) {
  if (proportion < 0 || proportion > 100)
    throw std::invalid_argument("proportion out of range (0..100): " + std::to_string(proportion));
  if (total <= 0) throw std::invalid_argument("total must be positive");
  return (proportion * total + 50) / 100;
}

namespace {

/// First n entries of a seeded partial shuffle; selection order is kept.
std::vector<SceneEntry> draw(const ScenePool& pool, int n, std::mt19937_64& rng) {
  if (n > static_cast<int>(pool.entries.size()))
    throw std::invalid_argument("pool exhausted: need " + std::to_string(n) +
                                " scenes, pool \"" + pool.name + "\" holds " +
                                std::to_string(pool.entries.size()));
  std::vector<std::size_t> order(pool.entries.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::vector<SceneEntry> picked;
  picked.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> pick(static_cast<std::size_t>(i),
                                                    order.size() - 1);
    std::swap(order[static_cast<std::size_t>(i)], order[pick(rng)]);
    picked.push_back(pool.entries[order[static_cast<std::size_t>(i)]]);
  }
  return picked;
}

}  // namespace

TrainingPlan build_mix(const ScenePool& real_pool, const ScenePool& synthetic_pool, int proportion,
                       int total, int replicate, std::uint64_t seed) {
  TrainingPlan plan;
  plan.proportion = proportion;
  plan.replicate = replicate;
  plan.total = total;
  plan.seed = seed;
  plan.n_synthetic = synthetic_count(proportion, total);
  plan.n_real = total - plan.n_synthetic;

  auto real_rng = rng::make_stream(
      seed, {rng::fnv1a("mix"), rng::fnv1a("real"), static_cast<std::uint64_t>(proportion),
             static_cast<std::uint64_t>(replicate)});
  auto syn_rng = rng::make_stream(
      seed, {rng::fnv1a("mix"), rng::fnv1a("synthetic"), static_cast<std::uint64_t>(proportion),
             static_cast<std::uint64_t>(replicate)});
  plan.scenes = draw(real_pool, plan.n_real, real_rng);
  auto synthetic = draw(synthetic_pool, plan.n_synthetic, syn_rng);
  plan.scenes.insert(plan.scenes.end(), synthetic.begin(), synthetic.end());
  return plan;
}

TrainingPlan build_benchmark(const TrainingPlan& mix) {
  if (mix.n_synthetic == 0)
    throw std::invalid_argument(
        "no benchmark defined for an all-real mix (0% synthetic): the twin would equal the mix");
  if (mix.n_real == 0)
    throw std::invalid_argument(
        "no benchmark defined for an all-synthetic mix (100% synthetic): no real scenes to keep");
  TrainingPlan twin;
  twin.proportion = mix.proportion;
  twin.replicate = mix.replicate;
  twin.benchmark = true;
  twin.total = mix.total;
  twin.n_real = mix.n_real;
  twin.seed = mix.seed;
  twin.n_synthetic = 0;
  twin.scenes.assign(mix.scenes.begin(), mix.scenes.begin() + mix.n_real);
  return twin;
}

std::vector<TrainingPlan> enumerate_experiments(const ScenePool& real_pool,
                                                const ScenePool& synthetic_pool,
                                                const MixingSpec& spec) {
  if (spec.replicates < 1 || spec.replicates > 3)
    throw std::invalid_argument("replicates out of range (1..3): " +
                                std::to_string(spec.replicates));
  std::vector<int> proportions = spec.proportions;
  if (proportions.empty())
    for (int p = 0; p <= 100; p += 5) proportions.push_back(p);
  for (std::size_t i = 0; i < proportions.size(); ++i) {
    if (proportions[i] < 0 || proportions[i] > 100)
      throw std::invalid_argument("proportion out of range (0..100): " +
                                  std::to_string(proportions[i]));
    for (std::size_t j = i + 1; j < proportions.size(); ++j)
      if (proportions[i] == proportions[j])
        throw std::invalid_argument("duplicate proportion: " + std::to_string(proportions[i]));
  }

  std::vector<TrainingPlan> plans;
  for (int rep = 0; rep < spec.replicates; ++rep) {
    std::vector<TrainingPlan> mixes;
    for (int p : proportions)
      mixes.push_back(build_mix(real_pool, synthetic_pool, p, spec.total, rep, spec.seed));
    for (const TrainingPlan& mix : mixes) plans.push_back(mix);
    for (const TrainingPlan& mix : mixes)
      if (mix.n_synthetic > 0 && mix.n_real > 0) plans.push_back(build_benchmark(mix));
  }
  return plans;
}

void write_plan_json(const std::filesystem::path& path, const TrainingPlan& plan) {
  nlohmann::json j;
  j["proportion"] = plan.proportion;
  j["replicate"] = plan.replicate;
  j["benchmark"] = plan.benchmark;
  j["total"] = plan.total;
  j["seed"] = plan.seed;
  j["n_real"] = plan.n_real;
  j["n_synthetic"] = plan.n_synthetic;
  nlohmann::json scenes = nlohmann::json::array();
  for (const SceneEntry& s : plan.scenes) {
    nlohmann::json e;
    e["id"] = s.id;
    e["source"] = scene_source_name(s.source);
    e["path"] = s.path.string();
    e["point_count"] = s.point_count;
    scenes.push_back(e);
  }
  j["scenes"] = scenes;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

TrainingPlan read_plan_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  nlohmann::json j = nlohmann::json::parse(in);
  TrainingPlan plan;
  plan.proportion = j.at("proportion").get<int>();
  plan.replicate = j.at("replicate").get<int>();
  plan.benchmark = j.at("benchmark").get<bool>();
  plan.total = j.at("total").get<int>();
  plan.seed = j.at("seed").get<std::uint64_t>();
  plan.n_real = j.at("n_real").get<int>();
  plan.n_synthetic = j.at("n_synthetic").get<int>();
  for (const auto& e : j.at("scenes")) {
    SceneEntry s;
    s.id = e.at("id").get<std::string>();
    const std::string source = e.at("source").get<std::string>();
    if (source == "real")
      s.source = SceneSource::real;
    else if (source == "synthetic")
      s.source = SceneSource::synthetic;
    else
      throw std::runtime_error(path.string() + ": unknown scene source \"" + source + "\"");
    s.path = e.at("path").get<std::string>();
    s.point_count = e.at("point_count").get<std::uint64_t>();
    plan.scenes.push_back(s);
  }
  return plan;
}

std::vector<Block> partition_blocks(const PointCloud& cloud, double block_size_m,
                                    int points_per_block, std::uint64_t seed) {
  if (cloud.points.empty()) throw std::invalid_argument("empty cloud: nothing to partition");
  if (!(block_size_m > 0.0)) throw std::invalid_argument("block size must be positive");
  if (points_per_block <= 0) throw std::invalid_argument("points per block must be positive");

  double min_x = cloud.points[0].position.x, min_y = cloud.points[0].position.y;
  for (const PointRecord& p : cloud.points) {
    min_x = std::min(min_x, p.position.x);
    min_y = std::min(min_y, p.position.y);
  }

  std::map<std::pair<int, int>, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const int ix = static_cast<int>(std::floor((cloud.points[i].position.x - min_x) / block_size_m));
    const int iy = static_cast<int>(std::floor((cloud.points[i].position.y - min_y) / block_size_m));
    cells[{ix, iy}].push_back(i);
  }

  std::vector<Block> blocks;
  blocks.reserve(cells.size());
  for (auto& [key, members] : cells) {
    Block block;
    block.ix = key.first;
    block.iy = key.second;
    auto rng = rng::make_stream(seed, {rng::fnv1a("blocks"),
                                       static_cast<std::uint64_t>(static_cast<std::int64_t>(key.first)),
                                       static_cast<std::uint64_t>(static_cast<std::int64_t>(key.second))});
    const std::size_t want = static_cast<std::size_t>(points_per_block);
    if (members.size() >= want) {
      for (std::size_t i = 0; i < want; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, members.size() - 1);
        std::swap(members[i], members[pick(rng)]);
        block.indices.push_back(members[i]);
      }
    } else {
      std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
      for (std::size_t i = 0; i < want; ++i) block.indices.push_back(members[pick(rng)]);
    }
    blocks.push_back(std::move(block));
  }
  return blocks;
}

std::array<double, 8> class_proportions(const PointCloud& cloud) {
  if (cloud.points.empty()) throw std::invalid_argument("empty cloud");
  std::array<std::uint64_t, 8> counts{};
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const int label = cloud.points[i].label;
    if (label < 0)
      throw std::invalid_argument("unlabeled point at index " + std::to_string(i));
    if (label >= kNumClasses)
      throw std::invalid_argument("label out of range at index " + std::to_string(i));
    counts[static_cast<std::size_t>(label)] += 1;
  }
  std::array<double, 8> pct{};
  for (int c = 0; c < kNumClasses; ++c)
    pct[static_cast<std::size_t>(c)] =
        100.0 * static_cast<double>(counts[static_cast<std::size_t>(c)]) /
        static_cast<double>(cloud.points.size());
  return pct;
}

void export_dataset(const std::filesystem::path& root, const std::string& id,
                    const PointCloud& cloud) {
  if (cloud.points.empty()) throw std::invalid_argument("empty cloud");
  for (std::size_t i = 0; i < cloud.points.size(); ++i)
    if (cloud.points[i].label < 0)
      throw std::invalid_argument("unlabeled point at index " + std::to_string(i));

  const std::filesystem::path scene_dir = root / id;
  const std::filesystem::path ann_dir = scene_dir / "Annotations";
  std::filesystem::create_directories(ann_dir);
  write_xyzrgb(scene_dir / (id + ".txt"), cloud);

  std::array<int, kNumClasses> run_counter{};
  std::size_t begin = 0;
  while (begin < cloud.points.size()) {
    std::size_t end = begin + 1;
    while (end < cloud.points.size() && cloud.points[end].label == cloud.points[begin].label)
      ++end;
    const int label = cloud.points[begin].label;
    PointCloud run;
    run.frame = cloud.frame;
    run.points.assign(cloud.points.begin() + static_cast<std::ptrdiff_t>(begin),
                      cloud.points.begin() + static_cast<std::ptrdiff_t>(end));
    const int n = ++run_counter[static_cast<std::size_t>(label)];
    const std::string name = std::string(class_name(static_cast<SemanticClass>(label))) + "_" +
                             std::to_string(n) + ".txt";
    write_xyzrgb(ann_dir / name, run);
    begin = end;
  }
}

}  // namespace spc
