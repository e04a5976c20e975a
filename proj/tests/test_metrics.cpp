#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <numeric>
#include <random>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "spc/metrics.hpp"
#include "spc/rng.hpp"
#include "support/fixture.hpp"

using namespace spc;

namespace {

/// Independent oracle: metrics recomputed straight from the count grid with
/// longhand loops, sharing nothing with the implementation under test.
struct OracleMetrics {
  double oa = 0.0;
  std::optional<double> oa7;
  std::array<std::optional<double>, 8> iou;
  std::array<std::optional<double>, 8> acc;
  double miou = 0.0;
};

OracleMetrics oracle(const std::array<std::array<std::uint64_t, 8>, 8>& m) {
  OracleMetrics r;
  double total = 0.0, diag = 0.0;
  for (int g = 0; g < 8; ++g)
    for (int p = 0; p < 8; ++p) {
      total += static_cast<double>(m[g][p]);
      if (g == p) diag += static_cast<double>(m[g][p]);
    }
  r.oa = diag / total;

  double nc_rows = 0.0, nc_diag = 0.0;
  for (int g = 0; g < 7; ++g) {
    nc_diag += static_cast<double>(m[g][g]);
    for (int p = 0; p < 8; ++p) nc_rows += static_cast<double>(m[g][p]);
  }
  if (nc_rows > 0.0) r.oa7 = nc_diag / nc_rows;

  double iou_sum = 0.0;
  int iou_n = 0;
  for (int c = 0; c < 8; ++c) {
    double row = 0.0, col = 0.0;
    for (int o = 0; o < 8; ++o) {
      row += static_cast<double>(m[c][o]);
      col += static_cast<double>(m[o][c]);
    }
    const double tp = static_cast<double>(m[c][c]);
    const double denom = row + col - tp;
    if (denom > 0.0) {
      r.iou[c] = tp / denom;
      iou_sum += tp / denom;
      ++iou_n;
    }
    if (row > 0.0) r.acc[c] = tp / row;
  }
  r.miou = iou_sum / iou_n;
  return r;
}

ConfusionMatrix random_matrix(std::mt19937_64& stream) {
  std::uniform_int_distribution<int> count(0, 40);
  std::uniform_int_distribution<int> coin(0, 3);
  ConfusionMatrix cm;
  // Knock out entire rows/columns now and then so undefined metrics occur.
  std::array<bool, 8> live_row{}, live_col{};
  for (int c = 0; c < 8; ++c) {
    live_row[c] = coin(stream) != 0;
    live_col[c] = coin(stream) != 0;
  }
  for (int g = 0; g < 8; ++g)
    for (int p = 0; p < 8; ++p)
      if (live_row[g] && live_col[p]) cm.counts[g][p] = static_cast<std::uint64_t>(count(stream));
  if (cm.total() == 0) cm.counts[2][2] = 5;  // keep the matrix scoreable
  return cm;
}

EvalReport report_with(double oa, double miou) {
  EvalReport r;
  r.oa = oa;
  r.miou = miou;
  r.oa_non_clutter = oa;  // convenient default; tests override as needed
  return r;
}

}  // namespace

TEST_CASE("two-class worked example: the frozen reference numbers") {
  // gt\pred     class0  class1
  //   class0       3      1
  //   class1       2      4
  ConfusionMatrix cm;
  cm.add(0, 0, 3);
  cm.add(0, 1, 1);
  cm.add(1, 0, 2);
  cm.add(1, 1, 4);

  CHECK(std::fabs(overall_accuracy(cm) - 0.7) < 1e-12);
  REQUIRE(iou(cm, SemanticClass::ceiling).has_value());
  CHECK(std::fabs(*iou(cm, SemanticClass::ceiling) - 0.5) < 1e-12);
  REQUIRE(iou(cm, SemanticClass::floor).has_value());
  CHECK(std::fabs(*iou(cm, SemanticClass::floor) - 4.0 / 7.0) < 1e-12);
  CHECK(std::fabs(mean_iou(cm) - 15.0 / 28.0) < 1e-12);
  CHECK(std::fabs(*per_class_accuracy(cm, SemanticClass::ceiling) - 0.75) < 1e-12);
  CHECK(std::fabs(*per_class_accuracy(cm, SemanticClass::floor) - 4.0 / 6.0) < 1e-12);
  CHECK_FALSE(iou(cm, SemanticClass::wall).has_value());
  CHECK_FALSE(per_class_accuracy(cm, SemanticClass::wall).has_value());
}

TEST_CASE("clutter ground truth hurts overall accuracy but not the non-clutter score") {
  std::vector<int> gt(100, kClutterCode), pred(100, static_cast<int>(SemanticClass::wall));
  std::fill_n(gt.begin(), 50, static_cast<int>(SemanticClass::wall));
  const ConfusionMatrix cm = accumulate(gt, pred);

  CHECK(std::fabs(overall_accuracy(cm) - 0.5) < 1e-12);
  CHECK(std::fabs(oa7(cm) - 1.0) < 1e-12);
  // Wall: 50 TP, 50 FP; clutter: 0 TP, 50 FN -> defined, zero.
  CHECK(std::fabs(*iou(cm, SemanticClass::wall) - 0.5) < 1e-12);
  REQUIRE(iou(cm, SemanticClass::clutter).has_value());
  CHECK(*iou(cm, SemanticClass::clutter) == 0.0);
  CHECK(std::fabs(mean_iou(cm) - 0.25) < 1e-12);

  SUBCASE("and the reverse: predicting clutter on real structure is an error") {
    const ConfusionMatrix reversed = accumulate(pred, gt);
    CHECK(std::fabs(oa7(reversed) - 0.5) < 1e-12);
  }
}

TEST_CASE("degenerate matrices raise instead of dividing by zero") {
  ConfusionMatrix cm;
  CHECK_THROWS_WITH_AS(overall_accuracy(cm), "empty matrix", std::invalid_argument);
  CHECK_THROWS_WITH_AS(mean_iou(cm), "empty matrix", std::invalid_argument);

  cm.add(kClutterCode, kClutterCode, 10);
  CHECK_THROWS_WITH_AS(oa7(cm), "no non-clutter ground truth", std::invalid_argument);
  const EvalReport report = make_report(cm);
  CHECK_FALSE(report.oa_non_clutter.has_value());
  CHECK(report.oa == 1.0);
}

TEST_CASE("accumulate validates both streams") {
  const std::vector<int> gt{0, 1, 2};
  const std::vector<int> pred{0, 1};
  ConfusionMatrix cm;
  CHECK_THROWS_WITH_AS(accumulate(cm, gt, pred),
                       "length mismatch (3 ground-truth labels vs 2 predictions)",
                       std::invalid_argument);
  const std::vector<int> bad_pred{0, 1, 8};
  CHECK_THROWS_WITH_AS(accumulate(cm, gt, bad_pred), "label out of range at position 2",
                       std::invalid_argument);
  const std::vector<int> bad_gt{0, -1, 2};
  CHECK_THROWS_WITH_AS(accumulate(cm, bad_gt, gt), "label out of range at position 1",
                       std::invalid_argument);
  CHECK(cm.total() == 0);  // nothing committed before the error... or after
}

TEST_CASE("metrics agree with a longhand oracle on random matrices") {
  std::mt19937_64 stream = rng::make_stream(13, {rng::fnv1a("metric_fuzz")});
  for (int instance = 0; instance < 300; ++instance) {
    const ConfusionMatrix cm = random_matrix(stream);
    const OracleMetrics expect = oracle(cm.counts);

    CHECK(std::fabs(overall_accuracy(cm) - expect.oa) < 1e-12);
    if (expect.oa7) {
      CHECK(std::fabs(oa7(cm) - *expect.oa7) < 1e-12);
    } else {
      CHECK_THROWS(oa7(cm));
    }
    CHECK(std::fabs(mean_iou(cm) - expect.miou) < 1e-12);
    for (int c = 0; c < kNumClasses; ++c) {
      const auto got = iou(cm, static_cast<SemanticClass>(c));
      REQUIRE(got.has_value() == expect.iou[c].has_value());
      if (got) CHECK(std::fabs(*got - *expect.iou[c]) < 1e-12);
      const auto acc = per_class_accuracy(cm, static_cast<SemanticClass>(c));
      REQUIRE(acc.has_value() == expect.acc[c].has_value());
      if (acc) CHECK(std::fabs(*acc - *expect.acc[c]) < 1e-12);
      if (got) {
        CHECK(*got >= 0.0);
        CHECK(*got <= 1.0);
      }
    }
    CHECK(overall_accuracy(cm) >= 0.0);
    CHECK(overall_accuracy(cm) <= 1.0);
    CHECK(mean_iou(cm) >= 0.0);
    CHECK(mean_iou(cm) <= 1.0);
  }
}

TEST_CASE("relabeling classes permutes the metrics without changing them") {
  std::mt19937_64 stream = rng::make_stream(14, {rng::fnv1a("perm")});
  std::array<int, 8> perm{};
  std::iota(perm.begin(), perm.end(), 0);

  for (int instance = 0; instance < 100; ++instance) {
    const ConfusionMatrix cm = random_matrix(stream);
    std::shuffle(perm.begin(), perm.end(), stream);

    ConfusionMatrix permuted;
    for (int g = 0; g < 8; ++g)
      for (int p = 0; p < 8; ++p)
        permuted.counts[static_cast<std::size_t>(perm[g])][static_cast<std::size_t>(perm[p])] =
            cm.counts[static_cast<std::size_t>(g)][static_cast<std::size_t>(p)];

    CHECK(overall_accuracy(permuted) == overall_accuracy(cm));
    CHECK(std::fabs(mean_iou(permuted) - mean_iou(cm)) < 1e-12);
    for (int c = 0; c < 8; ++c) {
      const auto direct = iou(cm, static_cast<SemanticClass>(c));
      const auto relabeled = iou(permuted, static_cast<SemanticClass>(perm[c]));
      REQUIRE(direct.has_value() == relabeled.has_value());
      if (direct) CHECK(*direct == *relabeled);
    }
  }
}

TEST_CASE("accumulation is additive: merging matrices equals concatenating streams") {
  std::mt19937_64 stream = rng::make_stream(15, {rng::fnv1a("additive")});
  std::uniform_int_distribution<int> label(0, 7);
  std::uniform_int_distribution<std::size_t> length(1, 400);

  for (int instance = 0; instance < 100; ++instance) {
    std::vector<int> gt_a(length(stream)), pred_a(gt_a.size());
    std::vector<int> gt_b(length(stream)), pred_b(gt_b.size());
    for (auto& v : gt_a) v = label(stream);
    for (auto& v : pred_a) v = label(stream);
    for (auto& v : gt_b) v = label(stream);
    for (auto& v : pred_b) v = label(stream);

    ConfusionMatrix merged = accumulate(gt_a, pred_a);
    merged += accumulate(gt_b, pred_b);

    std::vector<int> gt_all = gt_a, pred_all = pred_a;
    gt_all.insert(gt_all.end(), gt_b.begin(), gt_b.end());
    pred_all.insert(pred_all.end(), pred_b.begin(), pred_b.end());
    const ConfusionMatrix straight = accumulate(gt_all, pred_all);

    CHECK(merged.counts == straight.counts);
  }
}

TEST_CASE("reports format to four decimals with n/a for undefined entries") {
  ConfusionMatrix cm;
  cm.add(0, 0, 3);
  cm.add(0, 1, 1);
  cm.add(1, 0, 2);
  cm.add(1, 1, 4);
  const std::string text = format_report(make_report(cm));
  CHECK(text.find("overall accuracy    0.7000") != std::string::npos);
  CHECK(text.find("mean iou            0.5357") != std::string::npos);
  CHECK(text.find("n/a") != std::string::npos);  // six classes unseen
  CHECK(text.find("ceiling") != std::string::npos);
  CHECK(text.find("clutter") != std::string::npos);
  CHECK(text.find("points              10") != std::string::npos);
}

TEST_CASE("report JSON round-trips every field and the optional proportion stamp") {
  std::mt19937_64 stream = rng::make_stream(16, {rng::fnv1a("report_io")});
  const auto dir = spc::testing::scratch_dir("metrics_io");
  const EvalReport report = make_report(random_matrix(stream));

  write_report_json(dir / "stamped.json", report, 35);
  const auto [loaded, proportion] = read_report_json(dir / "stamped.json");
  CHECK(loaded.oa == report.oa);
  CHECK(loaded.oa_non_clutter == report.oa_non_clutter);
  CHECK(loaded.miou == report.miou);
  CHECK(loaded.total_points == report.total_points);
  CHECK(loaded.class_accuracy == report.class_accuracy);
  CHECK(loaded.class_iou == report.class_iou);
  REQUIRE(proportion.has_value());
  CHECK(*proportion == 35);

  write_report_json(dir / "plain.json", report);
  CHECK_FALSE(read_report_json(dir / "plain.json").second.has_value());
}

TEST_CASE("select_best maximizes mean IoU and keeps the earliest tie") {
  std::vector<std::pair<int, EvalReport>> epochs{
      {1, report_with(0.9, 0.30)},
      {2, report_with(0.5, 0.55)},
      {3, report_with(0.6, 0.55)},  // same miou, later: must lose
      {4, report_with(0.99, 0.20)},
  };
  const auto [epoch, best] = select_best(epochs);
  CHECK(epoch == 2);
  CHECK(best.miou == 0.55);

  const std::vector<std::pair<int, EvalReport>> none;
  CHECK_THROWS_WITH_AS(select_best(none), "empty list", std::invalid_argument);
}

TEST_CASE("deviation tables pair every mixed proportion with its benchmark") {
  std::map<int, EvalReport> mix{
      {75, report_with(0.82, 0.60)}, {80, report_with(0.84, 0.62)}, {85, report_with(0.80, 0.58)}};
  std::map<int, EvalReport> bench{
      {75, report_with(0.80, 0.61)}, {80, report_with(0.80, 0.61)}, {85, report_with(0.80, 0.61)}};

  const DeviationTable table = deviation_table(mix, bench, 75, 85);
  REQUIRE(table.rows.size() == 3);
  CHECK(table.rows[0].proportion == 75);
  CHECK(std::fabs(*table.rows[0].d_oa - 0.02) < 1e-12);
  CHECK(std::fabs(*table.rows[0].d_miou - -0.01) < 1e-12);
  CHECK(std::fabs(*table.rows[1].d_oa - 0.04) < 1e-12);
  CHECK(std::fabs(*table.average.d_oa - 0.02) < 1e-12);  // (0.02+0.04+0.00)/3
  CHECK(std::fabs(*table.average.d_miou - -0.01) < 1e-12);  // (-0.01+0.01-0.03)/3
  CHECK(table.range_lo == 75);
  CHECK(table.range_hi == 85);

  const std::string text = format_deviation_table(table);
  CHECK(text.find("75%") != std::string::npos);
  CHECK(text.find("avg 75-85") != std::string::npos);
  CHECK(text.find("0.0200") != std::string::npos);

  const auto dir = spc::testing::scratch_dir("deviation_io");
  write_deviation_json(dir / "dev.json", table);
  std::ifstream in(dir / "dev.json");
  const nlohmann::json j = nlohmann::json::parse(in);
  CHECK(j.at("rows").size() == 3);
  CHECK(j.at("average").at("d_oa").get<double>() == doctest::Approx(0.02));
  CHECK(j.at("range_lo").get<int>() == 75);

  SUBCASE("a mixed proportion without a benchmark twin is an error") {
    mix[90] = report_with(0.8, 0.6);
    CHECK_THROWS_WITH_AS(deviation_table(mix, bench, 75, 85),
                         "missing proportion 90 in benchmark results", std::invalid_argument);
  }

  SUBCASE("the averaging range must be fully populated") {
    CHECK_THROWS_WITH_AS(deviation_table(mix, bench, 75, 95),
                         "missing proportion 90 in mixed results", std::invalid_argument);
  }

  SUBCASE("metrics undefined on either side drop out of the average") {
    mix[75].oa_non_clutter.reset();
    const DeviationTable partial = deviation_table(mix, bench, 75, 85);
    CHECK_FALSE(partial.rows[0].d_oa_non_clutter.has_value());
    REQUIRE(partial.average.d_oa_non_clutter.has_value());
    // Only 80 and 85 contribute; both deltas are 0.04 and 0.00.
    CHECK(std::fabs(*partial.average.d_oa_non_clutter - 0.02) < 1e-12);
  }
}
