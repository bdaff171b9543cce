#pragma once

#include "firesig/forest.hpp"

#include <span>
#include <string>
#include <vector>

namespace firesig {

struct ClassMetrics {
  std::string name;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  int support = 0;
};

struct MetricsReport {
  std::vector<ClassMetrics> classes;
  double macro_precision = 0.0;
  double macro_recall = 0.0;
  double macro_f1 = 0.0;
  double accuracy = 0.0;
  int total = 0;
  /// confusion[truth][prediction]
  std::vector<std::vector<int>> confusion;
};

/// Precision/recall/F1 from label pairs. A class with no predictions has
/// precision 0; F1 is 0 when precision + recall is 0.
MetricsReport compute_metrics(std::span<const int> truth, std::span<const int> predicted,
                              const std::vector<std::string>& class_names);

MetricsReport evaluate(const ForestModel& model, const std::vector<std::vector<double>>& rows,
                       std::span<const int> labels);

/// `class,precision,recall,f1` rows, then `average`, then `accuracy,,,<acc>`.
std::string metrics_csv(const MetricsReport& report);
/// Header `truth,<pred class...>`, one row per true class.
std::string confusion_csv(const MetricsReport& report);

struct ExplanationStep {
  int feature = 0;
  std::string description;
  double threshold = 0.0;
  double observed = 0.0;
  bool went_left = false;
  int node = 0;
};

struct ExplanationPath {
  std::vector<ExplanationStep> steps;  ///< tree 0, root to leaf
  int leaf = 0;
  std::vector<int> leaf_histogram;
  std::string leaf_class;
  std::vector<std::pair<int, int>> usage;  ///< (feature, internal-node count), most used first

  /// Root-to-leaf lines such as "aspect ratio at 182° = 0.41 <= 0.5132 -> left".
  std::string text(std::size_t top_usage = 20) const;
};

ExplanationPath explain(const ForestModel& model, std::span<const double> x);

/// Follows the steps on tree 0 and returns the node index reached; used to
/// check that a path is faithful.
int replay(const ForestModel& model, const ExplanationPath& path, std::span<const double> x);

}  // namespace firesig
