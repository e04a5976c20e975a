#include "spc/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "spc/annotator.hpp"
#include "spc/dataset.hpp"
#include "spc/rng.hpp"
#include "spc/scanner.hpp"
#include "spc/scene.hpp"
#include "spc/version.hpp"

namespace spc {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string sanitize(const std::string& name) {
  std::string out;
  for (char c : name)
    out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-')
               ? c
               : '_';
  return out.empty() ? std::string("unnamed") : out;
}

void require_output_root(const PipelineConfig& config) {
  if (config.output_root.empty()) throw ValidationError("output_root: required");
}

void require_scene(const PipelineConfig& config) {
  if (config.scene.empty()) throw ValidationError("scene: required");
}

/// Upstream-stage gate: missing input file means the producing stage has
/// not run yet.
void require_upstream(const fs::path& path, const std::string& stage) {
  if (!fs::exists(path))
    throw std::runtime_error("run " + stage + " first: " + path.string() + " is missing");
}

/// Column count of the first data line; 0 for a file with no data lines.
int sniff_columns(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string token;
    int n = 0;
    while (row >> token) {
      if (n == 0 && token[0] == '#') break;
      ++n;
    }
    if (n > 0) return n;
  }
  return 0;
}

/// Reads a point cloud in either interchange layout, sniffing the column
/// count of the first data line (8 = labeled, 6 = color-only).
PointCloud read_cloud_any(const fs::path& path) {
  const int columns = sniff_columns(path);
  if (columns == 0) return read_point_cloud(path);  // empty file -> empty cloud
  if (columns == 8) return read_point_cloud(path);
  if (columns == 6) return read_xyzrgb(path);
  throw std::runtime_error(path.string() + ": unsupported column count (" +
                           std::to_string(columns) + ")");
}

/// One or two integer labels per line ('#' comments allowed). Every line
/// must carry the same number of columns.
std::vector<std::array<int, 2>> read_label_lines(const fs::path& path, int columns) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<std::array<int, 2>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream row(line);
    std::string token;
    std::array<int, 2> values{0, 0};
    int n = 0;
    while (row >> token) {
      if (n == 0 && token[0] == '#') break;
      if (n >= columns)
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": trailing characters");
      try {
        values[static_cast<std::size_t>(n)] = std::stoi(token);
      } catch (const std::exception&) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": malformed label");
      }
      ++n;
    }
    if (n == 0) continue;  // blank or comment line
    if (n != columns)
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected " + std::to_string(columns) + " labels");
    rows.push_back(values);
  }
  return rows;
}

/// Labels of an evaluation-side file: a full labeled cloud (8 columns), a
/// bare label stream (1 column), or a `gt pred` pair file (2 columns, the
/// requested column is taken).
std::vector<int> read_eval_labels(const fs::path& path, int column_of_pair) {
  const int columns = sniff_columns(path);
  if (columns == 8) {
    const PointCloud cloud = read_point_cloud(path);
    std::vector<int> labels;
    labels.reserve(cloud.size());
    for (const PointRecord& p : cloud.points) labels.push_back(p.label);
    return labels;
  }
  if (columns == 1 || columns == 2) {
    const auto rows = read_label_lines(path, columns);
    std::vector<int> labels;
    labels.reserve(rows.size());
    const int pick = columns == 1 ? 0 : column_of_pair;
    for (const auto& row : rows) labels.push_back(row[static_cast<std::size_t>(pick)]);
    return labels;
  }
  if (columns == 0) return {};
  throw std::runtime_error(path.string() + ": unsupported column count (" +
                           std::to_string(columns) + ") for labels");
}

std::string plan_label(const TrainingPlan& plan) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%s_p%03d_r%d", plan.benchmark ? "bench" : "mix",
                plan.proportion, plan.replicate);
  return buf;
}

/// Room names in plan-file order; the canonical iteration order for every
/// stage downstream of the planner.
std::vector<std::string> planned_rooms(const PipelineConfig& config) {
  const fs::path plan_path = config.output_root / "plan" / "stations.json";
  require_upstream(plan_path, "plan");
  std::vector<std::string> rooms;
  for (const StationPlan& plan : read_station_plans(plan_path)) rooms.push_back(plan.room_name);
  return rooms;
}

}  // namespace

std::string hash_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::uint64_t h = 14695981039346656037ull;
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    const std::streamsize n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 1099511628211ull;
    }
    if (n < static_cast<std::streamsize>(sizeof(buf))) break;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
  return hex;
}

void update_manifest(const PipelineConfig& config, const StageResult& result) {
  const fs::path path = config.output_root / "run_manifest.json";
  nlohmann::json manifest;
  if (fs::exists(path)) {
    std::ifstream in(path);
    try {
      manifest = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error&) {
      manifest = nlohmann::json::object();
    }
    if (!manifest.is_object()) manifest = nlohmann::json::object();
  }
  manifest["version"] = kVersion;
  manifest["config"] = nlohmann::json::parse(dump_config(config));
  nlohmann::json files = nlohmann::json::object();
  for (const fs::path& rel : result.outputs)
    files[rel.generic_string()] = hash_file(config.output_root / rel);
  nlohmann::json inputs = nlohmann::json::object();
  for (const fs::path& in_path : result.inputs)
    inputs[in_path.generic_string()] =
        hash_file(in_path.is_absolute() ? in_path : config.output_root / in_path);
  nlohmann::json entry;
  entry["files"] = files;
  entry["inputs"] = inputs;
  entry["seed"] = config.seed;
  entry["elapsed_ms"] = result.elapsed_ms;
  manifest["stages"][result.stage] = entry;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << manifest.dump(2) << "\n";
}

StageResult run_plan(const PipelineConfig& config) {
  const auto start = Clock::now();
  require_output_root(config);
  require_scene(config);
  StageResult result{"plan", {}, {}, 0.0};

  result.inputs.push_back(config.scene);
  const Scene scene = load_scene(config.scene);
  if (scene.rooms.empty()) throw std::runtime_error("scene has no rooms to plan");
  std::vector<StationPlan> plans;
  plans.reserve(scene.rooms.size());
  for (const RoomFootprint& room : scene.rooms)
    plans.push_back(plan_stations(room, config.planner, config.seed));

  fs::create_directories(config.output_root / "plan");
  write_station_plans(config.output_root / "plan" / "stations.json", plans);
  result.outputs.push_back(fs::path("plan") / "stations.json");
  result.elapsed_ms = ms_since(start);
  return result;
}

StageResult run_scan(const PipelineConfig& config) {
  const auto start = Clock::now();
  require_output_root(config);
  require_scene(config);
  StageResult result{"scan", {}, {}, 0.0};

  const fs::path plan_path = config.output_root / "plan" / "stations.json";
  require_upstream(plan_path, "plan");
  result.inputs.push_back(config.scene);
  result.inputs.push_back(fs::path("plan") / "stations.json");
  const Scene scene = load_scene(config.scene);
  const TriangleIndex index = TriangleIndex::build(scene);
  const std::vector<StationPlan> plans = read_station_plans(plan_path);

  fs::create_directories(config.output_root / "scan");
  int first_station = 0;
  for (const StationPlan& plan : plans) {
    const ScanOutput output =
        scan_scene(scene, index, {&plan, 1}, config.scanner, config.seed, first_station);
    first_station += static_cast<int>(plan.stations.size());
    const std::string base = sanitize(plan.room_name);
    const fs::path rel = fs::path("scan") / (base + ".txt");
    write_point_cloud(config.output_root / rel, output.cloud);
    result.outputs.push_back(rel);
    if (config.debug) {
      const fs::path debug_rel = fs::path("scan") / (base + ".components.txt");
      write_debug_components(config.output_root / debug_rel, scene, output.component_index);
      result.outputs.push_back(debug_rel);
    }
  }
  result.elapsed_ms = ms_since(start);
  return result;
}

StageResult run_annotate(const PipelineConfig& config) {
  const auto start = Clock::now();
  require_output_root(config);
  require_scene(config);
  StageResult result{"annotate", {}, {}, 0.0};

  const std::vector<std::string> rooms = planned_rooms(config);
  result.inputs.push_back(config.scene);
  const Scene scene = load_scene(config.scene);
  const std::vector<ComponentCloud> components =
      sample_component_clouds(scene, config.annotation.sample_density_per_m2, config.seed);

  // One flat reference carrying each sample's component color, so labels and
  // colors come from the same nearest sample under the same threshold.
  PointCloud palette;
  for (const ComponentCloud& c : components)
    palette.points.insert(palette.points.end(), c.cloud.points.begin(), c.cloud.points.end());

  fs::create_directories(config.output_root / "annotate");
  for (const std::string& room : rooms) {
    const std::string base = sanitize(room);
    const fs::path scan_rel = fs::path("scan") / (base + ".txt");
    require_upstream(config.output_root / scan_rel, "scan");
    result.inputs.push_back(scan_rel);
    const PointCloud scanned = read_point_cloud(config.output_root / scan_rel);
    PointCloud labeled = transfer_labels(scanned, components, config.annotation.label_threshold_m);
    labeled = transfer_colors(labeled, palette, config.annotation.label_threshold_m);
    const fs::path rel = fs::path("annotate") / (base + ".txt");
    write_point_cloud(config.output_root / rel, labeled);
    result.outputs.push_back(rel);
  }
  result.elapsed_ms = ms_since(start);
  return result;
}

StageResult run_colorize(const PipelineConfig& config) {
  const auto start = Clock::now();
  require_output_root(config);
  StageResult result{"colorize", {}, {}, 0.0};

  const std::vector<std::string> rooms = planned_rooms(config);
  fs::create_directories(config.output_root / "colorize");
  for (const std::string& room : rooms) {
    const std::string base = sanitize(room);
    const fs::path in_rel = fs::path("annotate") / (base + ".txt");
    require_upstream(config.output_root / in_rel, "annotate");
    result.inputs.push_back(in_rel);
    const fs::path out_rel = fs::path("colorize") / (base + ".txt");
    if (config.colorize.reference_dir.empty()) {
      // No real-color reference: the synthetic palette colors stand.
      fs::copy_file(config.output_root / in_rel, config.output_root / out_rel,
                    fs::copy_options::overwrite_existing);
    } else {
      const fs::path ref_path = config.colorize.reference_dir / (base + ".txt");
      if (!fs::exists(ref_path))
        throw std::runtime_error("no color reference for room " + room + ": " +
                                 ref_path.string() + " is missing");
      result.inputs.push_back(ref_path);
      const PointCloud annotated = read_point_cloud(config.output_root / in_rel);
      const PointCloud reference = read_cloud_any(ref_path);
      const PointCloud colored = transfer_colors(
          annotated, reference, config.annotation.color_threshold_m, config.color_transform);
      write_point_cloud(config.output_root / out_rel, colored);
    }
    result.outputs.push_back(out_rel);
  }
  result.elapsed_ms = ms_since(start);
  return result;
}

StageResult run_mix(const PipelineConfig& config) {
  const auto start = Clock::now();
  require_output_root(config);
  StageResult result{"mix", {}, {}, 0.0};

  fs::path real_dir = config.mixing.real_pool;
  if (real_dir.empty()) {
    real_dir = config.output_root / "annotate";
    require_upstream(real_dir, "annotate");
  }
  fs::path synthetic_dir = config.mixing.synthetic_pool;
  if (synthetic_dir.empty()) {
    synthetic_dir = config.output_root / "colorize";
    require_upstream(synthetic_dir, "colorize");
  }
  const ScenePool real_pool = load_pool("real", real_dir, SceneSource::real);
  const ScenePool synthetic_pool =
      load_pool("synthetic", synthetic_dir, SceneSource::synthetic);
  for (const SceneEntry& entry : real_pool.entries) result.inputs.push_back(entry.path);
  for (const SceneEntry& entry : synthetic_pool.entries) result.inputs.push_back(entry.path);

  MixingSpec spec;
  spec.total = config.mixing.total;
  spec.proportions = config.mixing.proportions;
  spec.replicates = config.mixing.replicates;
  spec.seed = config.mixing.seed.value_or(config.seed);
  const std::vector<TrainingPlan> plans = enumerate_experiments(real_pool, synthetic_pool, spec);

  fs::create_directories(config.output_root / "mix" / "plans");
  for (const TrainingPlan& plan : plans) {
    const fs::path rel = fs::path("mix") / "plans" / (plan_label(plan) + ".json");
    write_plan_json(config.output_root / rel, plan);
    result.outputs.push_back(rel);
  }

  if (config.mixing.export_datasets) {
    for (const TrainingPlan& plan : plans) {
      const fs::path dataset_rel = fs::path("mix") / "datasets" / plan_label(plan);
      const fs::path dataset_dir = config.output_root / dataset_rel;
      fs::create_directories(dataset_dir);
      nlohmann::json manifest;
      manifest["plan"] = plan_label(plan);
      manifest["proportion"] = plan.proportion;
      manifest["replicate"] = plan.replicate;
      manifest["benchmark"] = plan.benchmark;
      manifest["total"] = plan.total;
      manifest["seed"] = plan.seed;
      nlohmann::json scenes = nlohmann::json::array();
      for (const SceneEntry& entry : plan.scenes) {
        const std::string export_id =
            std::string(scene_source_name(entry.source)) + "_" + sanitize(entry.id);
        const PointCloud cloud = read_cloud_any(entry.path);
        export_dataset(dataset_dir, export_id, cloud);
        const std::array<double, 8> pct = class_proportions(cloud);
        nlohmann::json scene_entry;
        scene_entry["id"] = entry.id;
        scene_entry["source"] = scene_source_name(entry.source);
        scene_entry["export_id"] = export_id;
        scene_entry["point_count"] = cloud.size();
        scene_entry["class_pct"] = pct;
        scenes.push_back(scene_entry);

        const fs::path scene_dir = dataset_dir / export_id;
        result.outputs.push_back(dataset_rel / export_id / (export_id + ".txt"));
        for (const auto& file : fs::directory_iterator(scene_dir / "Annotations")) {
          if (!file.is_regular_file()) continue;
          result.outputs.push_back(dataset_rel / export_id / "Annotations" /
                                   file.path().filename());
        }
      }
      manifest["scenes"] = scenes;
      const fs::path manifest_rel = dataset_rel / "plan.json";
      std::ofstream out(config.output_root / manifest_rel);
      if (!out)
        throw std::runtime_error("cannot write " + (config.output_root / manifest_rel).string());
      out << manifest.dump(2) << "\n";
      out.close();
      result.outputs.push_back(manifest_rel);
    }
  }
  std::sort(result.outputs.begin(), result.outputs.end());
  result.elapsed_ms = ms_since(start);
  return result;
}

StageResult run_blocks(const PipelineConfig& config) {
  const auto start = Clock::now();
  require_output_root(config);
  StageResult result{"blocks", {}, {}, 0.0};

  const std::vector<std::string> rooms = planned_rooms(config);
  for (const std::string& room : rooms) {
    const std::string base = sanitize(room);
    const fs::path in_rel = fs::path("colorize") / (base + ".txt");
    require_upstream(config.output_root / in_rel, "colorize");
    result.inputs.push_back(in_rel);
    const PointCloud cloud = read_point_cloud(config.output_root / in_rel);
    const std::vector<Block> blocks = partition_blocks(
        cloud, config.blocks.block_size_m, config.blocks.points_per_block, config.seed);
    fs::create_directories(config.output_root / "blocks" / base);
    for (const Block& block : blocks) {
      PointCloud sampled;
      sampled.frame = cloud.frame;
      sampled.points.reserve(block.indices.size());
      for (std::size_t i : block.indices) sampled.points.push_back(cloud.points[i]);
      char name[64];
      std::snprintf(name, sizeof(name), "block_%03d_%03d.txt", block.ix, block.iy);
      const fs::path rel = fs::path("blocks") / base / name;
      write_point_cloud(config.output_root / rel, sampled);
      result.outputs.push_back(rel);
    }
  }
  result.elapsed_ms = ms_since(start);
  return result;
}

StageResult run_eval(const PipelineConfig& config) {
  const auto start = Clock::now();
  require_output_root(config);
  StageResult result{"eval", {}, {}, 0.0};

  fs::path gt_dir = config.eval.gt_dir;
  if (gt_dir.empty()) {
    gt_dir = config.output_root / "annotate";
    require_upstream(gt_dir, "annotate");
  }
  if (!fs::is_directory(gt_dir))
    throw std::runtime_error("no such directory: " + gt_dir.string());
  // Without predictions the stage scores the ground truth against itself —
  // a pipeline self-check that must come out perfect.
  const fs::path pred_dir = config.eval.pred_dir.empty() ? gt_dir : config.eval.pred_dir;

  std::vector<fs::path> gt_files;
  for (const auto& entry : fs::directory_iterator(gt_dir))
    if (entry.is_regular_file() && entry.path().extension() == ".txt")
      gt_files.push_back(entry.path());
  std::sort(gt_files.begin(), gt_files.end());
  if (gt_files.empty())
    throw std::runtime_error("no ground-truth point clouds in " + gt_dir.string());

  ConfusionMatrix cm;
  for (const fs::path& gt_path : gt_files) {
    const fs::path pred_path = pred_dir / gt_path.filename();
    if (!fs::exists(pred_path))
      throw std::runtime_error("no prediction for " + gt_path.filename().string() + ": " +
                               pred_path.string() + " is missing");
    // Ground truth takes the first column of a pair file, predictions the
    // second; a pair file on the prediction side must agree with the ground
    // truth it claims to score against.
    const std::vector<int> gt_labels = read_eval_labels(gt_path, 0);
    const std::vector<int> pred_labels = read_eval_labels(pred_path, 1);
    if (sniff_columns(pred_path) == 2) {
      const std::vector<int> pred_gt = read_eval_labels(pred_path, 0);
      if (pred_gt != gt_labels)
        throw std::runtime_error(gt_path.filename().string() +
                                 ": ground-truth column of the prediction file does not "
                                 "match the ground truth");
    }
    try {
      accumulate(cm, gt_labels, pred_labels);
    } catch (const std::invalid_argument& e) {
      throw std::runtime_error(gt_path.filename().string() + ": " + e.what());
    }
  }

  const EvalReport report = make_report(cm);
  fs::create_directories(config.output_root / "eval");
  {
    std::ofstream out(config.output_root / "eval" / "report.txt");
    if (!out)
      throw std::runtime_error("cannot write " +
                               (config.output_root / "eval" / "report.txt").string());
    out << format_report(report);
  }
  write_report_json(config.output_root / "eval" / "report.json", report,
                    config.eval.proportion);
  result.outputs.push_back(fs::path("eval") / "report.txt");
  result.outputs.push_back(fs::path("eval") / "report.json");
  result.elapsed_ms = ms_since(start);
  return result;
}

std::vector<StageResult> run_all(const PipelineConfig& config) {
  std::vector<StageResult> results;
  for (StageResult (*stage)(const PipelineConfig&) :
       {run_plan, run_scan, run_annotate, run_colorize, run_mix, run_blocks, run_eval}) {
    results.push_back(stage(config));
    update_manifest(config, results.back());
  }
  return results;
}

namespace {

std::map<int, EvalReport> load_report_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error("no such directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json")
      files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  std::map<int, EvalReport> reports;
  for (const fs::path& file : files) {
    auto [report, proportion] = read_report_json(file);
    if (!proportion)
      throw std::runtime_error(file.string() + ": missing proportion stamp");
    if (!reports.emplace(*proportion, report).second)
      throw std::runtime_error("duplicate proportion " + std::to_string(*proportion) + " in " +
                               dir.string());
  }
  if (reports.empty()) throw std::runtime_error("no reports in " + dir.string());
  return reports;
}

}  // namespace

DeviationTable run_deviate(const fs::path& mix_dir, const fs::path& bench_dir, int range_lo,
                           int range_hi, const fs::path& out_text, const fs::path& out_json) {
  const std::map<int, EvalReport> mix = load_report_dir(mix_dir);
  const std::map<int, EvalReport> bench = load_report_dir(bench_dir);
  const DeviationTable table = deviation_table(mix, bench, range_lo, range_hi);
  if (!out_text.empty()) {
    if (out_text.has_parent_path()) fs::create_directories(out_text.parent_path());
    std::ofstream out(out_text);
    if (!out) throw std::runtime_error("cannot write " + out_text.string());
    out << format_deviation_table(table);
  }
  if (!out_json.empty()) {
    if (out_json.has_parent_path()) fs::create_directories(out_json.parent_path());
    write_deviation_json(out_json, table);
  }
  return table;
}

}  // namespace spc
