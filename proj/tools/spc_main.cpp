#include <omp.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spc/dataset.hpp"
#include "spc/pipeline.hpp"
#include "spc/version.hpp"

namespace {

void print_stage(const spc::StageResult& result) {
  std::cerr << result.stage << ": wrote " << result.outputs.size() << " file"
            << (result.outputs.size() == 1 ? "" : "s") << " ("
            << static_cast<long long>(result.elapsed_ms + 0.5) << " ms)\n";
}

void dump_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::cout << in.rdbuf();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"synthetic point cloud generation, mixing, and evaluation"};
  app.set_version_flag("--version", std::string(spc::kVersion));
  app.require_subcommand(1);
  app.fallthrough(true);

  std::string config_path, out_dir, scene_path;
  std::uint64_t seed = 0;
  int threads = 0;
  bool debug = false;
  app.add_option("-c,--config", config_path, "JSON config file");
  app.add_option("-o,--out", out_dir, "output root (overrides the config)");
  app.add_option("--scene", scene_path, "scene manifest (overrides the config)");
  app.add_option("--seed", seed, "RNG seed (overrides the config)");
  app.add_option("--threads", threads, "worker threads, 0 = all cores");
  app.add_flag("--debug", debug, "write debug sidecar files");

  auto build_config = [&]() {
    spc::PipelineConfig config;
    if (!config_path.empty()) config = spc::load_config(config_path);
    if (!out_dir.empty()) config.output_root = out_dir;
    if (!scene_path.empty()) config.scene = scene_path;
    if (app.count("--seed") > 0) config.seed = seed;
    if (app.count("--threads") > 0) config.threads = threads;
    if (debug) config.debug = true;
    if (config.threads > 0) omp_set_num_threads(config.threads);
    return config;
  };

  auto run_stage = [](const spc::PipelineConfig& config,
                      spc::StageResult (*stage)(const spc::PipelineConfig&)) {
    const spc::StageResult result = stage(config);
    spc::update_manifest(config, result);
    print_stage(result);
  };
  auto run_one = [&](spc::StageResult (*stage)(const spc::PipelineConfig&)) {
    const spc::PipelineConfig config = build_config();
    run_stage(config, stage);
    return config;
  };

  app.add_subcommand("plan", "choose scan stations per room")->callback([&] {
    run_one(spc::run_plan);
  });
  app.add_subcommand("scan", "simulate the range scanner at every station")->callback([&] {
    run_one(spc::run_scan);
  });
  app.add_subcommand("annotate", "label scan points from the scene components")->callback([&] {
    run_one(spc::run_annotate);
  });
  app.add_subcommand("colorize", "transfer colors from a registered reference")->callback([&] {
    run_one(spc::run_colorize);
  });

  int mix_proportion = 0, mix_total = 0, mix_replicates = 0;
  CLI::App* mix = app.add_subcommand("mix", "build mixed and benchmark training plans");
  mix->add_option("--proportion", mix_proportion,
                  "plan only this synthetic share, 0-100 (default: 0-100 step 5)")
      ->check(CLI::Range(0, 100));
  mix->add_option("--total", mix_total, "scenes per training set");
  mix->add_option("--replicates", mix_replicates, "independent draws per proportion");
  mix->callback([&] {
    spc::PipelineConfig config = build_config();
    if (mix->count("--proportion") > 0) config.mixing.proportions = {mix_proportion};
    if (mix->count("--total") > 0) config.mixing.total = mix_total;
    if (mix->count("--replicates") > 0) config.mixing.replicates = mix_replicates;
    run_stage(config, spc::run_mix);
  });

  double block_size = 0.0;
  int block_points = 0;
  CLI::App* blocks = app.add_subcommand("blocks", "split clouds into fixed-size training blocks");
  blocks->add_option("--size", block_size, "block edge length in meters");
  blocks->add_option("--points", block_points, "points sampled per block");
  blocks->callback([&] {
    spc::PipelineConfig config = build_config();
    if (blocks->count("--size") > 0) config.blocks.block_size_m = block_size;
    if (blocks->count("--points") > 0) config.blocks.points_per_block = block_points;
    run_stage(config, spc::run_blocks);
  });

  std::string gt_dir, pred_dir, report_file;
  CLI::App* eval = app.add_subcommand("eval", "score predictions against ground truth");
  eval->add_option("--gt", gt_dir, "ground-truth directory (default: <out>/annotate)");
  eval->add_option("--pred", pred_dir, "prediction directory (default: the ground truth)");
  eval->add_option("--report", report_file, "also write the text report here");
  eval->callback([&] {
    spc::PipelineConfig config = build_config();
    if (!gt_dir.empty()) config.eval.gt_dir = gt_dir;
    if (!pred_dir.empty()) config.eval.pred_dir = pred_dir;
    run_stage(config, spc::run_eval);
    if (!report_file.empty())
      std::filesystem::copy_file(config.output_root / "eval" / "report.txt", report_file,
                                 std::filesystem::copy_options::overwrite_existing);
    dump_file(config.output_root / "eval" / "report.txt");
  });
  app.add_subcommand("all", "run every stage in order")->callback([&] {
    const spc::PipelineConfig config = build_config();
    for (const spc::StageResult& result : spc::run_all(config)) print_stage(result);
    dump_file(config.output_root / "eval" / "report.txt");
  });

  std::string from_plan, out_file;
  CLI::App* benchmark = app.add_subcommand(
      "benchmark", "derive the real-only benchmark twin of a mixed plan");
  benchmark->add_option("--from", from_plan, "mixed plan JSON")->required();
  benchmark->add_option("--out-file", out_file,
                        "where to write the twin plan (default: bench_* next to the input)");
  benchmark->callback([&] {
    const spc::TrainingPlan twin = spc::build_benchmark(spc::read_plan_json(from_plan));
    std::filesystem::path target = out_file;
    if (target.empty()) {
      std::filesystem::path source = from_plan;
      std::string stem = source.stem().string();
      if (stem.rfind("mix_", 0) == 0) stem.replace(0, 4, "bench_");
      else stem += "_bench";
      target = source.parent_path() / (stem + source.extension().string());
    }
    spc::write_plan_json(target, twin);
    std::cerr << "benchmark: wrote " << target.string() << "\n";
  });

  std::string mix_dir, bench_dir, dev_text, dev_json;
  std::vector<int> range{5, 95};
  CLI::App* deviate = app.add_subcommand(
      "deviate", "tabulate mixed-minus-benchmark metric deviations");
  deviate->add_option("--mix", mix_dir, "directory of mixed-training reports")->required();
  deviate->add_option("--bench", bench_dir, "directory of benchmark reports")->required();
  deviate->add_option("--range", range, "proportion range LO HI averaged in the summary row")
      ->expected(2);
  deviate->add_option("--out-text", dev_text, "write the table here as text");
  deviate->add_option("--out-json", dev_json, "write the table here as JSON");
  deviate->callback([&] {
    const spc::DeviationTable table =
        spc::run_deviate(mix_dir, bench_dir, range[0], range[1], dev_text, dev_json);
    std::cout << spc::format_deviation_table(table);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const spc::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
