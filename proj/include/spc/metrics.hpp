#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spc/classes.hpp"

namespace spc {

/// 8x8 confusion counts; rows are ground truth, columns are predictions.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> counts{};

  void add(int gt, int pred, std::uint64_t n = 1);
  std::uint64_t total() const;
  std::uint64_t row_total(int gt) const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
};

/// Streams (gt, pred) label pairs into the matrix. Errors: "length mismatch"
/// when the spans differ in size, "label out of range" (with the position)
/// for codes outside [0, 7].
void accumulate(ConfusionMatrix& cm, std::span<const int> gt, std::span<const int> pred);
ConfusionMatrix accumulate(std::span<const int> gt, std::span<const int> pred);

/// Trace over total. Throws "empty matrix" on zero total.
double overall_accuracy(const ConfusionMatrix& cm);

/// Accuracy restricted to non-clutter ground truth rows: clutter predictions
/// on those rows count as errors, and clutter ground truth is ignored
/// entirely. Throws "no non-clutter ground truth" when rows 0..6 are empty.
double oa7(const ConfusionMatrix& cm);

/// Intersection over union TP / (TP + FP + FN) for one class; nullopt when
/// the class appears in neither ground truth nor predictions.
std::optional<double> iou(const ConfusionMatrix& cm, SemanticClass c);

/// Mean IoU over the classes where IoU is defined.
double mean_iou(const ConfusionMatrix& cm);

/// Diagonal over row total; nullopt for an empty ground-truth row.
std::optional<double> per_class_accuracy(const ConfusionMatrix& cm, SemanticClass c);

struct EvalReport {
  double oa = 0.0;
  std::optional<double> oa_non_clutter;  // absent when no non-clutter ground truth
  double miou = 0.0;
  std::array<std::optional<double>, kNumClasses> class_accuracy{};
  std::array<std::optional<double>, kNumClasses> class_iou{};
  std::uint64_t total_points = 0;
};

EvalReport make_report(const ConfusionMatrix& cm);

/// Metrics formatted to 4 decimal places; undefined entries print "n/a".
std::string format_report(const EvalReport& report);

void write_report_json(const std::filesystem::path& path, const EvalReport& report,
                       std::optional<int> proportion = std::nullopt);
/// Returns the report and, when stamped, the mixing proportion it belongs to.
std::pair<EvalReport, std::optional<int>> read_report_json(const std::filesystem::path& path);

/// Highest mean IoU wins; ties keep the earliest epoch. Throws on empty input.
std::pair<int, EvalReport> select_best(std::span<const std::pair<int, EvalReport>> epochs);

/// Per-proportion metric deltas, mixed-training minus benchmark. Positive
/// means the mixed run beat its benchmark twin.
struct DeviationRow {
  int proportion = 0;
  std::optional<double> d_oa, d_oa_non_clutter, d_miou;
  std::array<std::optional<double>, kNumClasses> d_class_accuracy{};
};

struct DeviationTable {
  std::vector<DeviationRow> rows;          // sorted by proportion
  DeviationRow average;                    // over [range_lo, range_hi] step 5
  int range_lo = 0, range_hi = 0;
};

/// Rows for every proportion present in `mix`; each must also exist in
/// `bench` ("missing proportion" otherwise), as must every proportion of the
/// averaging range. Deltas and averages skip entries undefined on either side.
DeviationTable deviation_table(const std::map<int, EvalReport>& mix,
                               const std::map<int, EvalReport>& bench, int range_lo, int range_hi);

std::string format_deviation_table(const DeviationTable& table);
void write_deviation_json(const std::filesystem::path& path, const DeviationTable& table);

}  // namespace spc
