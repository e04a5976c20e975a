#include "spc/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace spc {

namespace {

std::string fmt4(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string fmt4(const std::optional<double>& v) { return v ? fmt4(*v) : std::string("n/a"); }

nlohmann::json opt_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

std::optional<double> opt_from_json(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

void ConfusionMatrix::add(int gt, int pred, std::uint64_t n) {
  if (gt < 0 || gt >= kNumClasses || pred < 0 || pred >= kNumClasses)
    throw std::invalid_argument("label out of range");
  counts[static_cast<std::size_t>(gt)][static_cast<std::size_t>(pred)] += n;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t sum = 0;
  for (const auto& row : counts)
    for (std::uint64_t v : row) sum += v;
  return sum;
}

std::uint64_t ConfusionMatrix::row_total(int gt) const {
  std::uint64_t sum = 0;
  for (std::uint64_t v : counts[static_cast<std::size_t>(gt)]) sum += v;
  return sum;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  for (int g = 0; g < kNumClasses; ++g)
    for (int p = 0; p < kNumClasses; ++p) counts[g][p] += other.counts[g][p];
  return *this;
}

void accumulate(ConfusionMatrix& cm, std::span<const int> gt, std::span<const int> pred) {
  if (gt.size() != pred.size())
    throw std::invalid_argument("length mismatch (" + std::to_string(gt.size()) +
                                " ground-truth labels vs " + std::to_string(pred.size()) +
                                " predictions)");
  // Validate everything first so a rejected stream leaves the matrix untouched.
  for (std::size_t i = 0; i < gt.size(); ++i)
    if (gt[i] < 0 || gt[i] >= kNumClasses || pred[i] < 0 || pred[i] >= kNumClasses)
      throw std::invalid_argument("label out of range at position " + std::to_string(i));
  for (std::size_t i = 0; i < gt.size(); ++i)
    cm.counts[static_cast<std::size_t>(gt[i])][static_cast<std::size_t>(pred[i])] += 1;
}

ConfusionMatrix accumulate(std::span<const int> gt, std::span<const int> pred) {
  ConfusionMatrix cm;
  accumulate(cm, gt, pred);
  return cm;
}

double overall_accuracy(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.total();
  if (total == 0) throw std::invalid_argument("empty matrix");
  std::uint64_t diag = 0;
  for (int c = 0; c < kNumClasses; ++c) diag += cm.counts[c][c];
  return static_cast<double>(diag) / static_cast<double>(total);
}

double oa7(const ConfusionMatrix& cm) {
  std::uint64_t diag = 0, rows = 0;
  for (int c = 0; c < kClutterCode; ++c) {
    diag += cm.counts[c][c];
    rows += cm.row_total(c);
  }
  if (rows == 0) throw std::invalid_argument("no non-clutter ground truth");
  return static_cast<double>(diag) / static_cast<double>(rows);
}

std::optional<double> iou(const ConfusionMatrix& cm, SemanticClass c) {
  const auto ci = static_cast<std::size_t>(c);
  std::uint64_t tp = cm.counts[ci][ci];
  std::uint64_t fp = 0, fn = 0;
  for (std::size_t o = 0; o < kNumClasses; ++o) {
    if (o == ci) continue;
    fp += cm.counts[o][ci];
    fn += cm.counts[ci][o];
  }
  const std::uint64_t denom = tp + fp + fn;
  if (denom == 0) return std::nullopt;
  return static_cast<double>(tp) / static_cast<double>(denom);
}

double mean_iou(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw std::invalid_argument("empty matrix");
  double sum = 0.0;
  int defined = 0;
  for (int c = 0; c < kNumClasses; ++c) {
    if (auto v = iou(cm, static_cast<SemanticClass>(c))) {
      sum += *v;
      ++defined;
    }
  }
  return sum / defined;  // total() > 0 guarantees at least one defined class
}

std::optional<double> per_class_accuracy(const ConfusionMatrix& cm, SemanticClass c) {
  const auto ci = static_cast<std::size_t>(c);
  const std::uint64_t row = cm.row_total(static_cast<int>(ci));
  if (row == 0) return std::nullopt;
  return static_cast<double>(cm.counts[ci][ci]) / static_cast<double>(row);
}

EvalReport make_report(const ConfusionMatrix& cm) {
  EvalReport r;
  r.total_points = cm.total();
  r.oa = overall_accuracy(cm);
  std::uint64_t non_clutter = 0;
  for (int c = 0; c < kClutterCode; ++c) non_clutter += cm.row_total(c);
  if (non_clutter > 0) r.oa_non_clutter = oa7(cm);
  r.miou = mean_iou(cm);
  for (int c = 0; c < kNumClasses; ++c) {
    r.class_accuracy[c] = per_class_accuracy(cm, static_cast<SemanticClass>(c));
    r.class_iou[c] = iou(cm, static_cast<SemanticClass>(c));
  }
  return r;
}

std::string format_report(const EvalReport& report) {
  std::ostringstream out;
  out << "points              " << report.total_points << "\n";
  out << "overall accuracy    " << fmt4(report.oa) << "\n";
  out << "oa (non-clutter)    " << fmt4(report.oa_non_clutter) << "\n";
  out << "mean iou            " << fmt4(report.miou) << "\n";
  out << "class               accuracy  iou\n";
  for (int c = 0; c < kNumClasses; ++c) {
    char line[128];
    std::snprintf(line, sizeof(line), "%-20s%-10s%s\n", class_name(static_cast<SemanticClass>(c)),
                  fmt4(report.class_accuracy[c]).c_str(), fmt4(report.class_iou[c]).c_str());
    out << line;
  }
  return out.str();
}

void write_report_json(const std::filesystem::path& path, const EvalReport& report,
                       std::optional<int> proportion) {
  nlohmann::json j;
  j["oa"] = report.oa;
  j["oa_non_clutter"] = opt_json(report.oa_non_clutter);
  j["miou"] = report.miou;
  j["total_points"] = report.total_points;
  nlohmann::json acc = nlohmann::json::array(), ious = nlohmann::json::array();
  for (int c = 0; c < kNumClasses; ++c) {
    acc.push_back(opt_json(report.class_accuracy[c]));
    ious.push_back(opt_json(report.class_iou[c]));
  }
  j["class_accuracy"] = acc;
  j["class_iou"] = ious;
  if (proportion) j["proportion"] = *proportion;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

std::pair<EvalReport, std::optional<int>> read_report_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  nlohmann::json j = nlohmann::json::parse(in);
  EvalReport r;
  r.oa = j.at("oa").get<double>();
  r.oa_non_clutter = opt_from_json(j.at("oa_non_clutter"));
  r.miou = j.at("miou").get<double>();
  r.total_points = j.at("total_points").get<std::uint64_t>();
  for (int c = 0; c < kNumClasses; ++c) {
    r.class_accuracy[c] = opt_from_json(j.at("class_accuracy").at(c));
    r.class_iou[c] = opt_from_json(j.at("class_iou").at(c));
  }
  std::optional<int> proportion;
  if (j.contains("proportion")) proportion = j.at("proportion").get<int>();
  return {r, proportion};
}

std::pair<int, EvalReport> select_best(std::span<const std::pair<int, EvalReport>> epochs) {
  if (epochs.empty()) throw std::invalid_argument("empty list");
  const std::pair<int, EvalReport>* best = &epochs[0];
  for (const auto& e : epochs)
    if (e.second.miou > best->second.miou) best = &e;
  return *best;
}

namespace {

std::optional<double> delta(const std::optional<double>& a, const std::optional<double>& b) {
  if (!a || !b) return std::nullopt;
  return *a - *b;
}

DeviationRow make_row(int proportion, const EvalReport& mix, const EvalReport& bench) {
  DeviationRow row;
  row.proportion = proportion;
  row.d_oa = mix.oa - bench.oa;
  row.d_oa_non_clutter = delta(mix.oa_non_clutter, bench.oa_non_clutter);
  row.d_miou = mix.miou - bench.miou;
  for (int c = 0; c < kNumClasses; ++c)
    row.d_class_accuracy[c] = delta(mix.class_accuracy[c], bench.class_accuracy[c]);
  return row;
}

}  // namespace

DeviationTable deviation_table(const std::map<int, EvalReport>& mix,
                               const std::map<int, EvalReport>& bench, int range_lo, int range_hi) {
  DeviationTable table;
  table.range_lo = range_lo;
  table.range_hi = range_hi;
  for (const auto& [p, report] : mix) {
    auto it = bench.find(p);
    if (it == bench.end())
      throw std::invalid_argument("missing proportion " + std::to_string(p) +
                                  " in benchmark results");
    table.rows.push_back(make_row(p, report, it->second));
  }

  // Average over the requested proportion range; every step must be present.
  table.average.proportion = -1;
  double sum_oa = 0.0, sum_oa7 = 0.0, sum_miou = 0.0;
  std::array<double, kNumClasses> sum_acc{};
  std::array<int, kNumClasses> n_acc{};
  int n = 0, n_oa7 = 0;
  for (int p = range_lo; p <= range_hi; p += 5) {
    auto mi = mix.find(p);
    auto bi = bench.find(p);
    if (mi == mix.end())
      throw std::invalid_argument("missing proportion " + std::to_string(p) + " in mixed results");
    if (bi == bench.end())
      throw std::invalid_argument("missing proportion " + std::to_string(p) +
                                  " in benchmark results");
    DeviationRow row = make_row(p, mi->second, bi->second);
    sum_oa += *row.d_oa;
    sum_miou += *row.d_miou;
    ++n;
    if (row.d_oa_non_clutter) {
      sum_oa7 += *row.d_oa_non_clutter;
      ++n_oa7;
    }
    for (int c = 0; c < kNumClasses; ++c)
      if (row.d_class_accuracy[c]) {
        sum_acc[c] += *row.d_class_accuracy[c];
        ++n_acc[c];
      }
  }
  if (n == 0) throw std::invalid_argument("empty averaging range");
  table.average.d_oa = sum_oa / n;
  table.average.d_miou = sum_miou / n;
  if (n_oa7 > 0) table.average.d_oa_non_clutter = sum_oa7 / n_oa7;
  for (int c = 0; c < kNumClasses; ++c)
    if (n_acc[c] > 0) table.average.d_class_accuracy[c] = sum_acc[c] / n_acc[c];
  return table;
}

std::string format_deviation_table(const DeviationTable& table) {
  std::ostringstream out;
  out << "proportion  d_oa      d_oa7     d_miou\n";
  auto line = [&](const std::string& head, const DeviationRow& row) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-12s%-10s%-10s%s\n", head.c_str(), fmt4(row.d_oa).c_str(),
                  fmt4(row.d_oa_non_clutter).c_str(), fmt4(row.d_miou).c_str());
    out << buf;
  };
  for (const auto& row : table.rows) line(std::to_string(row.proportion) + "%", row);
  line("avg " + std::to_string(table.range_lo) + "-" + std::to_string(table.range_hi), table.average);
  return out.str();
}

void write_deviation_json(const std::filesystem::path& path, const DeviationTable& table) {
  auto row_json = [](const DeviationRow& row) {
    nlohmann::json j;
    j["proportion"] = row.proportion;
    j["d_oa"] = opt_json(row.d_oa);
    j["d_oa_non_clutter"] = opt_json(row.d_oa_non_clutter);
    j["d_miou"] = opt_json(row.d_miou);
    nlohmann::json acc = nlohmann::json::array();
    for (int c = 0; c < kNumClasses; ++c) acc.push_back(opt_json(row.d_class_accuracy[c]));
    j["d_class_accuracy"] = acc;
    return j;
  };
  nlohmann::json j;
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : table.rows) rows.push_back(row_json(row));
  j["rows"] = rows;
  j["average"] = row_json(table.average);
  j["range_lo"] = table.range_lo;
  j["range_hi"] = table.range_hi;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

}  // namespace spc
