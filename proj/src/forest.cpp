#include "firesig/forest.hpp"

#include "firesig/error.hpp"
#include "firesig/parallel.hpp"
#include "firesig/rng.hpp"

#include <algorithm>
#include <numeric>

namespace firesig {

namespace forest_sampling {

std::vector<int> bootstrap_counts(std::uint64_t seed, int tree, int n_rows, bool bootstrap) {
  std::vector<int> counts(static_cast<std::size_t>(n_rows), bootstrap ? 0 : 1);
  if (!bootstrap) return counts;
  Rng rng(derive_seed(seed, {0x626f6f74ULL, static_cast<std::uint64_t>(tree)}));
  for (int i = 0; i < n_rows; ++i) ++counts[rng.below(static_cast<std::uint64_t>(n_rows))];
  return counts;
}

std::vector<int> split_features(std::uint64_t seed, int tree, std::uint64_t node_key, int dim, int k) {
  std::vector<int> pool(static_cast<std::size_t>(dim));
  std::iota(pool.begin(), pool.end(), 0);
  k = std::min(k, dim);
  Rng rng(derive_seed(seed, {0x66656174ULL, static_cast<std::uint64_t>(tree), node_key}));
  for (int i = 0; i < k; ++i) {
    const auto j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(dim - i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(k));
  std::sort(pool.begin(), pool.end());
  return pool;
}

std::vector<std::size_t> canonical_order(const TrainingSet& data) {
  std::vector<std::size_t> order(data.rows.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (data.keys.size() == data.rows.size())
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return data.keys[a] < data.keys[b]; });
  return order;
}

}  // namespace forest_sampling

namespace {

using i128 = __int128;

// Weighted Gini comparisons stay in integers: for a partition with class
// counts c_k, sum(c_k^2)/n is maximized. A split scores
// S_L/n_L + S_R/n_R = (S_L n_R + S_R n_L) / (n_L n_R).
struct Score {
  i128 num = 0;
  i128 den = 1;
  bool operator>(const Score& o) const { return num * o.den > o.num * den; }
};

struct Item {
  int row;
  int weight;
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<const std::vector<double>*>& rows, const std::vector<int>& labels, int n_classes,
              const ForestParams& params, std::uint64_t seed, int tree)
      : rows_(rows), labels_(labels), n_classes_(n_classes), params_(params), seed_(seed), tree_(tree) {}

  DecisionTree build(std::vector<Item> items) {
    DecisionTree t;
    grow(t, std::move(items), 1, 0);
    return t;
  }

 private:
  double value(int row, int f) const { return (*rows_[static_cast<std::size_t>(row)])[static_cast<std::size_t>(f)]; }

  int grow(DecisionTree& t, std::vector<Item> items, std::uint64_t key, int depth) {
    const int self = static_cast<int>(t.nodes.size());
    t.nodes.emplace_back();

    std::vector<long long> hist(static_cast<std::size_t>(n_classes_), 0);
    long long total = 0;
    for (const auto& it : items) {
      hist[static_cast<std::size_t>(labels_[static_cast<std::size_t>(it.row)])] += it.weight;
      total += it.weight;
    }
    const int nonzero = static_cast<int>(std::count_if(hist.begin(), hist.end(), [](long long c) { return c > 0; }));

    int best_feature = -1;
    double best_threshold = 0.0;
    if (depth < params_.max_depth && nonzero > 1 && total >= 2LL * params_.min_samples_leaf)
      find_split(items, hist, total, key, best_feature, best_threshold);

    if (best_feature < 0) {
      auto& node = t.nodes[static_cast<std::size_t>(self)];
      node.histogram.assign(hist.begin(), hist.end());
      return self;
    }

    std::vector<Item> left;
    std::vector<Item> right;
    for (const auto& it : items) (value(it.row, best_feature) <= best_threshold ? left : right).push_back(it);
    items.clear();
    items.shrink_to_fit();
    const int l = grow(t, std::move(left), 2 * key, depth + 1);
    const int r = grow(t, std::move(right), 2 * key + 1, depth + 1);
    auto& node = t.nodes[static_cast<std::size_t>(self)];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = l;
    node.right = r;
    return self;
  }

  void find_split(std::vector<Item>& items, const std::vector<long long>& hist, long long total, std::uint64_t key,
                  int& best_feature, double& best_threshold) const {
    i128 parent_sq = 0;
    for (auto c : hist) parent_sq += static_cast<i128>(c) * c;
    Score best;
    bool have = false;
    const auto features =
        forest_sampling::split_features(seed_, tree_, key, static_cast<int>(rows_[0]->size()), params_.features_per_split);
    std::vector<long long> lc(hist.size());
    for (int f : features) {
      std::sort(items.begin(), items.end(), [&](const Item& a, const Item& b) {
        const double va = value(a.row, f);
        const double vb = value(b.row, f);
        return va != vb ? va < vb : a.row < b.row;
      });
      std::fill(lc.begin(), lc.end(), 0);
      i128 sl = 0;
      i128 sr = parent_sq;
      long long nl = 0;
      for (std::size_t i = 0; i + 1 < items.size(); ++i) {
        const auto c = static_cast<std::size_t>(labels_[static_cast<std::size_t>(items[i].row)]);
        const long long w = items[i].weight;
        const long long rc = hist[c] - lc[c];
        sl += static_cast<i128>(2 * lc[c] + w) * w;
        sr -= static_cast<i128>(2 * rc - w) * w;
        lc[c] += w;
        nl += w;
        const double a = value(items[i].row, f);
        const double b = value(items[i + 1].row, f);
        if (a == b) continue;
        const long long nr = total - nl;
        if (nl < params_.min_samples_leaf || nr < params_.min_samples_leaf) continue;
        Score s{sl * nr + sr * nl, static_cast<i128>(nl) * nr};
        // Must strictly beat the unsplit node: s > parent_sq / total.
        if (!(s.num * total > parent_sq * s.den)) continue;
        if (!have || s > best) {
          have = true;
          best = s;
          best_feature = f;
          best_threshold = split_threshold(a, b);
        }
      }
    }
  }

  const std::vector<const std::vector<double>*>& rows_;
  const std::vector<int>& labels_;
  int n_classes_;
  const ForestParams& params_;
  std::uint64_t seed_;
  int tree_;
};

struct Prepared {
  std::vector<const std::vector<double>*> rows;
  std::vector<int> labels;
  int n_classes = 0;
  int dim = 0;
};

Prepared prepare(const TrainingSet& data, const ForestParams& params) {
  if (data.rows.empty() || data.rows.size() != data.labels.size())
    throw Error(ErrorKind::InsufficientData, "training set is empty or labels are missing");
  if (!data.keys.empty() && data.keys.size() != data.rows.size())
    throw Error(ErrorKind::Config, "training keys must match rows");
  Prepared p;
  p.n_classes = static_cast<int>(data.class_names.size());
  p.dim = static_cast<int>(data.rows[0].size());
  params.validate(p.dim);
  std::vector<int> per_class(static_cast<std::size_t>(p.n_classes), 0);
  for (std::size_t i = 0; i < data.rows.size(); ++i) {
    if (static_cast<int>(data.rows[i].size()) != p.dim)
      throw Error(ErrorKind::DimensionMismatch, "training rows have inconsistent dimensions");
    const int l = data.labels[i];
    if (l < 0 || l >= p.n_classes) throw Error(ErrorKind::Config, "label out of range");
    ++per_class[static_cast<std::size_t>(l)];
  }
  const int present = static_cast<int>(std::count_if(per_class.begin(), per_class.end(), [](int c) { return c > 0; }));
  if (present < 2) throw Error(ErrorKind::InsufficientData, "at least two classes are required");
  for (std::size_t c = 0; c < per_class.size(); ++c)
    if (per_class[c] < params.min_samples_leaf)
      throw Error(ErrorKind::InsufficientData,
                  "class '" + data.class_names[c] + "' has fewer than min_samples_leaf samples");
  for (auto i : forest_sampling::canonical_order(data)) {
    p.rows.push_back(&data.rows[i]);
    p.labels.push_back(data.labels[i]);
  }
  return p;
}

DecisionTree build_tree(const Prepared& p, const ForestParams& params, std::uint64_t seed, int tree) {
  const int n = static_cast<int>(p.rows.size());
  const auto counts = forest_sampling::bootstrap_counts(seed, tree, n, params.bootstrap);
  std::vector<Item> items;
  for (int i = 0; i < n; ++i)
    if (counts[static_cast<std::size_t>(i)] > 0) items.push_back({i, counts[static_cast<std::size_t>(i)]});
  return TreeBuilder(p.rows, p.labels, p.n_classes, params, seed, tree).build(std::move(items));
}

ForestModel shell(const TrainingSet& data, const ForestParams& params, std::uint64_t seed, int dim) {
  ForestModel m;
  m.class_names = data.class_names;
  m.feature_dim = dim;
  m.train_seed = seed;
  m.params = params;
  m.trees.resize(static_cast<std::size_t>(params.n_trees));
  return m;
}

}  // namespace

double split_threshold(double lo, double hi) {
  const double mid = 0.5 * (lo + hi);
  return (mid >= lo && mid < hi) ? mid : lo;
}

void ForestParams::validate(int feature_dim) const {
  if (n_trees < 1) throw Error(ErrorKind::Config, "n_trees must be >= 1");
  if (max_depth < 0 || max_depth > 60) throw Error(ErrorKind::Config, "max_depth must lie in [0, 60]");
  if (min_samples_leaf < 1) throw Error(ErrorKind::Config, "min_samples_leaf must be >= 1");
  if (features_per_split < 1 || features_per_split > feature_dim)
    throw Error(ErrorKind::Config, "features_per_split must lie in [1, feature_dim]");
}

int DecisionTree::leaf_for(std::span<const double> x) const {
  int i = 0;
  while (!nodes[static_cast<std::size_t>(i)].is_leaf()) {
    const auto& n = nodes[static_cast<std::size_t>(i)];
    i = x[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
  }
  return i;
}

int DecisionTree::vote(std::span<const double> x) const {
  const auto& h = nodes[static_cast<std::size_t>(leaf_for(x))].histogram;
  return static_cast<int>(std::max_element(h.begin(), h.end()) - h.begin());
}

int DecisionTree::depth() const {
  std::vector<int> d(nodes.size(), 0);
  int deepest = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    deepest = std::max(deepest, d[i]);
    if (nodes[i].is_leaf()) continue;
    d[static_cast<std::size_t>(nodes[i].left)] = d[i] + 1;
    d[static_cast<std::size_t>(nodes[i].right)] = d[i] + 1;
  }
  return deepest;
}

ForestModel train(const TrainingSet& data, const ForestParams& params, std::uint64_t seed) {
  const Prepared p = prepare(data, params);
  ForestModel m = shell(data, params, seed, p.dim);
#pragma omp parallel for schedule(dynamic, 1) num_threads(max_threads())
  for (int t = 0; t < params.n_trees; ++t) m.trees[static_cast<std::size_t>(t)] = build_tree(p, params, seed, t);
  return m;
}

namespace serial {

ForestModel train(const TrainingSet& data, const ForestParams& params, std::uint64_t seed) {
  const Prepared p = prepare(data, params);
  ForestModel m = shell(data, params, seed, p.dim);
  for (int t = 0; t < params.n_trees; ++t) m.trees[static_cast<std::size_t>(t)] = build_tree(p, params, seed, t);
  return m;
}

}  // namespace serial

Prediction predict(const ForestModel& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.feature_dim)
    throw Error(ErrorKind::DimensionMismatch, "input has " + std::to_string(x.size()) + " features, model expects " +
                                                  std::to_string(model.feature_dim));
  Prediction p;
  p.votes.assign(static_cast<std::size_t>(model.n_classes()), 0);
  for (const auto& t : model.trees) ++p.votes[static_cast<std::size_t>(t.vote(x))];
  const double n = static_cast<double>(model.trees.size());
  p.probabilities.resize(p.votes.size());
  for (std::size_t c = 0; c < p.votes.size(); ++c) p.probabilities[c] = p.votes[c] / n;
  p.label = static_cast<int>(std::max_element(p.votes.begin(), p.votes.end()) - p.votes.begin());
  return p;
}

std::vector<int> feature_usage(const ForestModel& model) {
  std::vector<int> usage(static_cast<std::size_t>(model.feature_dim), 0);
  for (const auto& t : model.trees)
    for (const auto& n : t.nodes)
      if (!n.is_leaf()) ++usage[static_cast<std::size_t>(n.feature)];
  return usage;
}

nlohmann::json to_json(const ForestModel& model) {
  using nlohmann::json;
  json j;
  j["format"] = "firesig-forest";
  j["version"] = ForestModel::kFormatVersion;
  j["feature_dim"] = model.feature_dim;
  j["train_seed"] = model.train_seed;
  j["class_names"] = model.class_names;
  j["hyperparams"] = {{"n_trees", model.params.n_trees},
                      {"max_depth", model.params.max_depth},
                      {"min_samples_leaf", model.params.min_samples_leaf},
                      {"features_per_split", model.params.features_per_split},
                      {"bootstrap", model.params.bootstrap}};
  j["metadata"] = model.metadata;
  json trees = json::array();
  for (const auto& t : model.trees) {
    json feature = json::array(), threshold = json::array(), left = json::array(), right = json::array(),
         hist = json::array();
    for (const auto& n : t.nodes) {
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      left.push_back(n.left);
      right.push_back(n.right);
      hist.push_back(n.histogram);
    }
    trees.push_back({{"feature", feature}, {"threshold", threshold}, {"left", left}, {"right", right}, {"histogram", hist}});
  }
  j["trees"] = std::move(trees);
  return j;
}

ForestModel model_from_json(const nlohmann::json& j) {
  try {
    if (j.at("format").get<std::string>() != "firesig-forest") throw Error(ErrorKind::Schema, "not a forest model");
    if (j.at("version").get<int>() != ForestModel::kFormatVersion)
      throw Error(ErrorKind::Schema, "unsupported model version");
    ForestModel m;
    m.feature_dim = j.at("feature_dim").get<int>();
    m.train_seed = j.at("train_seed").get<std::uint64_t>();
    m.class_names = j.at("class_names").get<std::vector<std::string>>();
    const auto& h = j.at("hyperparams");
    m.params.n_trees = h.at("n_trees").get<int>();
    m.params.max_depth = h.at("max_depth").get<int>();
    m.params.min_samples_leaf = h.at("min_samples_leaf").get<int>();
    m.params.features_per_split = h.at("features_per_split").get<int>();
    m.params.bootstrap = h.at("bootstrap").get<bool>();
    if (j.contains("metadata")) m.metadata = j.at("metadata");
    for (const auto& jt : j.at("trees")) {
      DecisionTree t;
      const auto feature = jt.at("feature").get<std::vector<int>>();
      const auto threshold = jt.at("threshold").get<std::vector<double>>();
      const auto left = jt.at("left").get<std::vector<int>>();
      const auto right = jt.at("right").get<std::vector<int>>();
      const auto hist = jt.at("histogram").get<std::vector<std::vector<int>>>();
      const auto n = feature.size();
      if (threshold.size() != n || left.size() != n || right.size() != n || hist.size() != n || n == 0)
        throw Error(ErrorKind::Schema, "tree node arrays have inconsistent lengths");
      for (std::size_t i = 0; i < n; ++i) {
        TreeNode node{feature[i], threshold[i], left[i], right[i], hist[i]};
        const int ni = static_cast<int>(n);
        if (node.is_leaf()) {
          if (static_cast<int>(node.histogram.size()) != m.n_classes())
            throw Error(ErrorKind::Schema, "leaf histogram size does not match class count");
        } else if (node.feature >= m.feature_dim || node.left <= static_cast<int>(i) || node.right <= static_cast<int>(i) ||
                   node.left >= ni || node.right >= ni) {
          throw Error(ErrorKind::Schema, "tree node references are out of range");
        }
        t.nodes.push_back(std::move(node));
      }
      m.trees.push_back(std::move(t));
    }
    if (static_cast<int>(m.trees.size()) != m.params.n_trees)
      throw Error(ErrorKind::Schema, "tree count does not match hyperparams");
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("model JSON: ") + e.what());
  }
}

std::string serialize(const ForestModel& model) { return to_json(model).dump(1) + "\n"; }

ForestModel deserialize(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("model JSON: ") + e.what());
  }
  return model_from_json(j);
}

}  // namespace firesig
