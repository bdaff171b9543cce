#include "firesig/evaluation.hpp"

#include "firesig/error.hpp"
#include "firesig/features.hpp"

#include <algorithm>
#include <fmt/format.h>
#include <numeric>

namespace firesig {

namespace {

std::string fixed4(double v) { return fmt::format("{:.4f}", v); }

}  // namespace

MetricsReport compute_metrics(std::span<const int> truth, std::span<const int> predicted,
                              const std::vector<std::string>& class_names) {
  if (truth.size() != predicted.size()) throw Error(ErrorKind::DimensionMismatch, "truth/prediction length mismatch");
  const auto n = class_names.size();
  MetricsReport r;
  r.total = static_cast<int>(truth.size());
  r.confusion.assign(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const auto t = static_cast<std::size_t>(truth[i]);
    const auto p = static_cast<std::size_t>(predicted[i]);
    if (t >= n || p >= n) throw Error(ErrorKind::Config, "label out of range");
    ++r.confusion[t][p];
  }
  int correct = 0;
  for (std::size_t c = 0; c < n; ++c) {
    const int tp = r.confusion[c][c];
    int predicted_c = 0;
    int actual_c = 0;
    for (std::size_t k = 0; k < n; ++k) {
      predicted_c += r.confusion[k][c];
      actual_c += r.confusion[c][k];
    }
    ClassMetrics m;
    m.name = class_names[c];
    m.support = actual_c;
    m.precision = predicted_c ? static_cast<double>(tp) / predicted_c : 0.0;
    m.recall = actual_c ? static_cast<double>(tp) / actual_c : 0.0;
    m.f1 = (m.precision + m.recall) > 0.0 ? 2.0 * m.precision * m.recall / (m.precision + m.recall) : 0.0;
    correct += tp;
    r.classes.push_back(m);
  }
  if (n > 0) {
    for (const auto& m : r.classes) {
      r.macro_precision += m.precision;
      r.macro_recall += m.recall;
      r.macro_f1 += m.f1;
    }
    r.macro_precision /= static_cast<double>(n);
    r.macro_recall /= static_cast<double>(n);
    r.macro_f1 /= static_cast<double>(n);
  }
  r.accuracy = r.total ? static_cast<double>(correct) / r.total : 0.0;
  return r;
}

MetricsReport evaluate(const ForestModel& model, const std::vector<std::vector<double>>& rows,
                       std::span<const int> labels) {
  if (rows.size() != labels.size()) throw Error(ErrorKind::DimensionMismatch, "rows/labels length mismatch");
  std::vector<int> predicted(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) predicted[i] = predict(model, rows[i]).label;
  return compute_metrics(labels, predicted, model.class_names);
}

std::string metrics_csv(const MetricsReport& report) {
  std::string out = "class,precision,recall,f1\n";
  for (const auto& m : report.classes)
    out += fmt::format("{},{},{},{}\n", m.name, fixed4(m.precision), fixed4(m.recall), fixed4(m.f1));
  out += fmt::format("average,{},{},{}\n", fixed4(report.macro_precision), fixed4(report.macro_recall),
                     fixed4(report.macro_f1));
  out += fmt::format("accuracy,,,{}\n", fixed4(report.accuracy));
  return out;
}

std::string confusion_csv(const MetricsReport& report) {
  std::string out = "truth";
  for (const auto& m : report.classes) out += "," + m.name;
  out += "\n";
  for (std::size_t r = 0; r < report.classes.size(); ++r) {
    out += report.classes[r].name;
    for (int v : report.confusion[r]) out += fmt::format(",{}", v);
    out += "\n";
  }
  return out;
}

ExplanationPath explain(const ForestModel& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.feature_dim)
    throw Error(ErrorKind::DimensionMismatch, "input dimension does not match the model");
  ExplanationPath path;
  const auto& tree = model.trees.front();
  int i = 0;
  while (!tree.nodes[static_cast<std::size_t>(i)].is_leaf()) {
    const auto& n = tree.nodes[static_cast<std::size_t>(i)];
    ExplanationStep s;
    s.node = i;
    s.feature = n.feature;
    s.description = describe_feature(n.feature);
    s.threshold = n.threshold;
    s.observed = x[static_cast<std::size_t>(n.feature)];
    s.went_left = s.observed <= n.threshold;
    path.steps.push_back(s);
    i = s.went_left ? n.left : n.right;
  }
  path.leaf = i;
  path.leaf_histogram = tree.nodes[static_cast<std::size_t>(i)].histogram;
  const auto& h = path.leaf_histogram;
  path.leaf_class = model.class_names[static_cast<std::size_t>(std::max_element(h.begin(), h.end()) - h.begin())];

  const auto usage = feature_usage(model);
  for (std::size_t f = 0; f < usage.size(); ++f)
    if (usage[f] > 0) path.usage.emplace_back(static_cast<int>(f), usage[f]);
  std::stable_sort(path.usage.begin(), path.usage.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  return path;
}

int replay(const ForestModel& model, const ExplanationPath& path, std::span<const double> x) {
  const auto& tree = model.trees.front();
  int i = 0;
  for (const auto& s : path.steps) {
    const auto& n = tree.nodes[static_cast<std::size_t>(i)];
    if (n.is_leaf() || n.feature != s.feature || n.threshold != s.threshold) return -1;
    const bool left = x[static_cast<std::size_t>(s.feature)] <= s.threshold;
    if (left != s.went_left) return -1;
    i = left ? n.left : n.right;
  }
  return tree.nodes[static_cast<std::size_t>(i)].is_leaf() ? i : -1;
}

std::string ExplanationPath::text(std::size_t top_usage) const {
  std::string out = "decision path (tree 0):\n";
  for (std::size_t k = 0; k < steps.size(); ++k) {
    const auto& s = steps[k];
    out += fmt::format("  {}. {} = {:.4f} {} {:.4f} -> {}\n", k + 1, s.description, s.observed,
                       s.went_left ? "<=" : ">", s.threshold, s.went_left ? "left" : "right");
  }
  out += fmt::format("  leaf {}: {} (", leaf, leaf_class);
  for (std::size_t c = 0; c < leaf_histogram.size(); ++c) out += fmt::format("{}{}", c ? " " : "", leaf_histogram[c]);
  out += ")\n";
  out += "most used split features (all trees):\n";
  for (std::size_t k = 0; k < usage.size() && k < top_usage; ++k)
    out += fmt::format("  {:>3}  {}\n", usage[k].second, describe_feature(usage[k].first));
  return out;
}

}  // namespace firesig
