#include "spc/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace spc {

namespace {

using nlohmann::json;

/// Strict reader for one JSON object: every key must be claimed by a get_*
/// call (or listed as an alias) before finish(), which rejects leftovers.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_ + ": expected an object");
  }

  const json* find(const std::string& key) {
    auto it = j_.find(key);
    if (it == j_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  /// Looks the key up under its primary name, then the aliases, in order.
  const json* find_any(std::initializer_list<const char*> names, std::string* used = nullptr) {
    for (const char* name : names)
      if (const json* v = find(name)) {
        if (used) *used = name;
        return v;
      }
    return nullptr;
  }

  std::string field(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void get_double(std::initializer_list<const char*> names, double& out, bool positive,
                  bool non_negative = false) {
    std::string used;
    const json* v = find_any(names, &used);
    if (!v) return;
    if (!v->is_number()) throw ValidationError(field(used) + ": expected a number");
    out = v->get<double>();
    if (positive && !(out > 0.0)) throw ValidationError(field(used) + ": must be positive");
    if (non_negative && out < 0.0) throw ValidationError(field(used) + ": must not be negative");
  }

  void get_int(std::initializer_list<const char*> names, int& out, int min_value) {
    std::string used;
    const json* v = find_any(names, &used);
    if (!v) return;
    if (!v->is_number_integer()) throw ValidationError(field(used) + ": expected an integer");
    out = v->get<int>();
    if (out < min_value)
      throw ValidationError(field(used) + ": must be at least " + std::to_string(min_value));
  }

  void get_uint64(const std::string& key, std::uint64_t& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0))
      throw ValidationError(field(key) + ": expected a non-negative integer");
    out = v->get<std::uint64_t>();
  }

  void get_bool(const std::string& key, bool& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_boolean()) throw ValidationError(field(key) + ": expected true or false");
    out = v->get<bool>();
  }

  void get_path(const std::string& key, std::filesystem::path& out) {
    const json* v = find(key);
    if (!v) return;
    if (!v->is_string()) throw ValidationError(field(key) + ": expected a string");
    out = v->get<std::string>();
  }

  void finish() const {
    for (const auto& item : j_.items())
      if (!seen_.contains(item.key()))
        throw ValidationError("unknown key: " + field(item.key()));
  }

  const json& raw() const { return j_; }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void parse_planner(const json& j, const std::string& path, PlannerConfig& out) {
  ObjectReader r(j, path);
  r.get_double({"coverage_area_m2"}, out.coverage_area_m2, /*positive=*/true);
  r.get_double({"sensor_height_m"}, out.sensor_height_m, /*positive=*/false,
               /*non_negative=*/true);
  r.get_double({"grid_resolution_m"}, out.grid_resolution_m, /*positive=*/true);
  r.get_double({"movement_tol_m"}, out.movement_tol_m, /*positive=*/true);
  r.get_int({"max_iterations"}, out.max_iterations, 1);
  r.finish();
}

void parse_scanner(const json& j, const std::string& path, ScannerConfig& out) {
  ObjectReader r(j, path);
  r.get_double({"scan_step_w"}, out.scan_step_w, /*positive=*/true);
  r.get_double({"scan_step_h"}, out.scan_step_h, /*positive=*/true);
  r.get_int({"scan_num_w"}, out.scan_num_w, 1);
  r.get_int({"scan_num_h"}, out.scan_num_h, 1);
  r.get_int({"tof_xres"}, out.tof_xres, 1);
  r.get_int({"tof_yres"}, out.tof_yres, 1);
  r.get_double({"lens_angle_w"}, out.lens_angle_w, /*positive=*/true);
  r.get_double({"lens_angle_h"}, out.lens_angle_h, /*positive=*/true);
  r.get_double({"max_dist", "tof_max_dist"}, out.max_dist, /*positive=*/true);
  r.get_double({"focal_length", "tof_focal_length"}, out.focal_length, /*positive=*/true);
  r.get_double({"range_noise_sigma", "noise_sigma"}, out.range_noise_sigma,
               /*positive=*/false, /*non_negative=*/true);
  r.finish();
  if (out.lens_angle_w >= 180.0)
    throw ValidationError(path + ".lens_angle_w: must be below 180 degrees");
  if (out.lens_angle_h >= 180.0)
    throw ValidationError(path + ".lens_angle_h: must be below 180 degrees");
}

void parse_annotation(const json& j, const std::string& path, AnnotationConfig& out,
                      RigidTransform& transform) {
  ObjectReader r(j, path);
  r.get_double({"label_threshold_m"}, out.label_threshold_m, /*positive=*/true);
  r.get_double({"color_threshold_m"}, out.color_threshold_m, /*positive=*/true);
  r.get_double({"sample_density_per_m2"}, out.sample_density_per_m2, /*positive=*/true);
  if (const json* v = r.find("rigid_transform")) {
    if (!v->is_array() || v->size() != 16)
      throw ValidationError(path + ".rigid_transform: expected 16 numbers (row-major 4x4)");
    for (std::size_t i = 0; i < 16; ++i) {
      if (!(*v)[i].is_number())
        throw ValidationError(path + ".rigid_transform: expected 16 numbers (row-major 4x4)");
      transform.m[i] = (*v)[i].get<double>();
    }
    if (transform.orthonormal_error() > 1e-6)
      throw ValidationError(path + ".rigid_transform: rotation block is not orthonormal");
  }
  r.finish();
}

void parse_colorize(const json& j, const std::string& path, ColorizeConfig& out) {
  ObjectReader r(j, path);
  r.get_path("reference_dir", out.reference_dir);
  r.finish();
}

void parse_mixing(const json& j, const std::string& path, MixingConfig& out) {
  ObjectReader r(j, path);
  r.get_int({"total"}, out.total, 1);
  if (const json* v = r.find("proportions")) {
    if (!v->is_array()) throw ValidationError(path + ".proportions: expected an array");
    out.proportions.clear();
    for (const json& e : *v) {
      if (!e.is_number_integer())
        throw ValidationError(path + ".proportions: expected integers");
      const int p = e.get<int>();
      if (p < 0 || p > 100)
        throw ValidationError(path + ".proportions: " + std::to_string(p) +
                              " is outside 0..100");
      out.proportions.push_back(p);
    }
  }
  r.get_int({"replicates"}, out.replicates, 1);
  if (out.replicates > 3)
    throw ValidationError(path + ".replicates: must be at most 3");
  if (const json* v = r.find("seed")) {
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<std::int64_t>() >= 0))
      throw ValidationError(path + ".seed: expected a non-negative integer");
    out.seed = v->get<std::uint64_t>();
  }
  r.get_path("real_pool", out.real_pool);
  r.get_path("synthetic_pool", out.synthetic_pool);
  r.get_bool("export_datasets", out.export_datasets);
  r.finish();
}

void parse_blocks(const json& j, const std::string& path, BlocksConfig& out) {
  ObjectReader r(j, path);
  r.get_double({"block_size_m"}, out.block_size_m, /*positive=*/true);
  r.get_int({"points_per_block"}, out.points_per_block, 1);
  r.finish();
}

void parse_eval(const json& j, const std::string& path, EvalConfig& out) {
  ObjectReader r(j, path);
  r.get_path("gt_dir", out.gt_dir);
  r.get_path("pred_dir", out.pred_dir);
  if (const json* v = r.find("proportion")) {
    if (!v->is_number_integer())
      throw ValidationError(path + ".proportion: expected an integer");
    const int p = v->get<int>();
    if (p < 0 || p > 100)
      throw ValidationError(path + ".proportion: must lie in 0..100");
    out.proportion = p;
  }
  r.finish();
}

}  // namespace

PipelineConfig parse_config(const std::string& json_text, const std::string& origin) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(origin + ": invalid JSON: " + e.what());
  }
  PipelineConfig config;
  ObjectReader r(j, "");
  r.get_path("scene", config.scene);
  r.get_path("output_root", config.output_root);
  r.get_uint64("seed", config.seed);
  r.get_int({"threads"}, config.threads, 0);
  r.get_bool("debug", config.debug);
  if (const json* v = r.find("planner")) parse_planner(*v, "planner", config.planner);
  if (const json* v = r.find("scanner")) parse_scanner(*v, "scanner", config.scanner);
  if (const json* v = r.find("annotation"))
    parse_annotation(*v, "annotation", config.annotation, config.color_transform);
  if (const json* v = r.find("colorize")) parse_colorize(*v, "colorize", config.colorize);
  if (const json* v = r.find("mixing")) parse_mixing(*v, "mixing", config.mixing);
  if (const json* v = r.find("blocks")) parse_blocks(*v, "blocks", config.blocks);
  if (const json* v = r.find("eval")) parse_eval(*v, "eval", config.eval);
  r.finish();
  return config;
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.string());
}

std::string dump_config(const PipelineConfig& c) {
  json j;
  j["scene"] = c.scene.string();
  j["output_root"] = c.output_root.string();
  j["seed"] = c.seed;
  j["threads"] = c.threads;
  j["debug"] = c.debug;
  j["planner"] = {{"coverage_area_m2", c.planner.coverage_area_m2},
                  {"sensor_height_m", c.planner.sensor_height_m},
                  {"grid_resolution_m", c.planner.grid_resolution_m},
                  {"movement_tol_m", c.planner.movement_tol_m},
                  {"max_iterations", c.planner.max_iterations}};
  j["scanner"] = {{"scan_step_w", c.scanner.scan_step_w},
                  {"scan_step_h", c.scanner.scan_step_h},
                  {"scan_num_w", c.scanner.scan_num_w},
                  {"scan_num_h", c.scanner.scan_num_h},
                  {"tof_xres", c.scanner.tof_xres},
                  {"tof_yres", c.scanner.tof_yres},
                  {"lens_angle_w", c.scanner.lens_angle_w},
                  {"lens_angle_h", c.scanner.lens_angle_h},
                  {"max_dist", c.scanner.max_dist},
                  {"focal_length", c.scanner.focal_length},
                  {"range_noise_sigma", c.scanner.range_noise_sigma}};
  j["annotation"] = {{"label_threshold_m", c.annotation.label_threshold_m},
                     {"color_threshold_m", c.annotation.color_threshold_m},
                     {"sample_density_per_m2", c.annotation.sample_density_per_m2},
                     {"rigid_transform", c.color_transform.m}};
  j["colorize"] = {{"reference_dir", c.colorize.reference_dir.string()}};
  json mixing = {{"total", c.mixing.total},
                 {"replicates", c.mixing.replicates},
                 {"real_pool", c.mixing.real_pool.string()},
                 {"synthetic_pool", c.mixing.synthetic_pool.string()},
                 {"export_datasets", c.mixing.export_datasets},
                 {"proportions", c.mixing.proportions}};
  if (c.mixing.seed) mixing["seed"] = *c.mixing.seed;
  j["mixing"] = mixing;
  j["blocks"] = {{"block_size_m", c.blocks.block_size_m},
                 {"points_per_block", c.blocks.points_per_block}};
  json eval = {{"gt_dir", c.eval.gt_dir.string()}, {"pred_dir", c.eval.pred_dir.string()}};
  if (c.eval.proportion) eval["proportion"] = *c.eval.proportion;
  j["eval"] = eval;
  return j.dump(2);
}

}  // namespace spc
