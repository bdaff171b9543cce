#pragma once

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace firesig {

struct ForestParams {
  int n_trees = 100;
  int max_depth = 12;
  int min_samples_leaf = 2;
  int features_per_split = 20;  ///< ceil(sqrt(372))
  bool bootstrap = true;

  void validate(int feature_dim) const;
};

/// Internal nodes test `x[feature] <= threshold` (true goes left). Leaves have
/// feature == -1 and carry the weighted class histogram of their training rows.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<int> histogram;

  bool is_leaf() const noexcept { return feature < 0; }
  bool operator==(const TreeNode&) const = default;
};

class DecisionTree {
 public:
  std::vector<TreeNode> nodes;  ///< nodes[0] is the root

  int leaf_for(std::span<const double> x) const;
  /// Majority class of the leaf reached by x (ties: lowest class index).
  int vote(std::span<const double> x) const;
  int depth() const;
  bool operator==(const DecisionTree&) const = default;
};

/// Dense training table. Rows are re-ordered by `keys` (when given) before
/// bootstrapping, so the model does not depend on the input row order.
struct TrainingSet {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  std::vector<std::string> keys;
  std::vector<std::string> class_names;
};

struct ForestModel {
  static constexpr int kFormatVersion = 1;

  std::vector<DecisionTree> trees;
  std::vector<std::string> class_names;
  int feature_dim = 0;
  std::uint64_t train_seed = 0;
  ForestParams params;
  /// Free-form provenance (feature config, split) carried through serialization.
  nlohmann::json metadata = nlohmann::json::object();

  int n_classes() const noexcept { return static_cast<int>(class_names.size()); }
};

struct Prediction {
  int label = 0;
  std::vector<double> probabilities;
  std::vector<int> votes;
};

/// Split threshold between adjacent distinct sorted values: their midpoint, or
/// `lo` when the midpoint rounds onto `hi`.
double split_threshold(double lo, double hi);

ForestModel train(const TrainingSet& data, const ForestParams& params, std::uint64_t seed);

/// Throws DimensionMismatch when x has the wrong length.
Prediction predict(const ForestModel& model, std::span<const double> x);

/// Internal-node count per feature over all trees.
std::vector<int> feature_usage(const ForestModel& model);

nlohmann::json to_json(const ForestModel& model);
ForestModel model_from_json(const nlohmann::json& j);
std::string serialize(const ForestModel& model);
ForestModel deserialize(const std::string& text);

namespace serial {
/// Trees built one after another on the calling thread; identical output.
ForestModel train(const TrainingSet& data, const ForestParams& params, std::uint64_t seed);
}  // namespace serial

/// Randomness shared by the tree builder and any reference implementation.
/// Every draw is keyed by (seed, tree, node) so construction order is free.
namespace forest_sampling {

/// Multiplicity of each canonical row in tree `tree`'s bootstrap sample.
std::vector<int> bootstrap_counts(std::uint64_t seed, int tree, int n_rows, bool bootstrap);

/// `k` distinct feature indices (ascending) for the node with heap key
/// `node_key` (root 1, children 2k and 2k+1).
std::vector<int> split_features(std::uint64_t seed, int tree, std::uint64_t node_key, int dim, int k);

/// Canonical row order: ascending key, ties by original position.
std::vector<std::size_t> canonical_order(const TrainingSet& data);

}  // namespace forest_sampling

}  // namespace firesig
