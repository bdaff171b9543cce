#include "firesig/pipeline.hpp"

#include "firesig/error.hpp"
#include "firesig/parallel.hpp"
#include "firesig/rng.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace firesig {

nlohmann::json to_json(const FeatureConfig& cfg) {
  return {{"mode", std::string(to_string(cfg.mode))},
          {"smoothing_window", cfg.extrema.smoothing_window},
          {"min_prominence", cfg.extrema.min_prominence},
          {"min_separation", cfg.extrema.min_separation},
          {"reference_window", cfg.extrema.reference_window}};
}

FeatureConfig feature_config_from_json(const nlohmann::json& j) {
  FeatureConfig cfg;
  try {
    cfg.mode = parse_chord_mode(j.at("mode").get<std::string>());
    cfg.extrema.smoothing_window = j.at("smoothing_window").get<int>();
    cfg.extrema.min_prominence = j.at("min_prominence").get<double>();
    cfg.extrema.min_separation = j.at("min_separation").get<int>();
    cfg.extrema.reference_window = j.at("reference_window").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Schema, std::string("feature config: ") + e.what());
  }
  cfg.extrema.validate();
  return cfg;
}

std::vector<double> feature_row(const ShapeMask& mask, const FeatureConfig& cfg) {
  return build_features(aspect_signature(mask, cfg.mode), cfg.extrema).to_row();
}

std::vector<std::vector<double>> feature_rows(const std::vector<ShapeMask>& masks, const FeatureConfig& cfg) {
  cfg.extrema.validate();
  std::vector<std::vector<double>> rows(masks.size());
  std::vector<std::string> errors(masks.size());
  const int n = static_cast<int>(masks.size());
  // Outer loop is parallel; aspect_signature's inner region then runs on one thread.
#pragma omp parallel for schedule(dynamic, 8) num_threads(max_threads())
  for (int i = 0; i < n; ++i) {
    try {
      rows[static_cast<std::size_t>(i)] = feature_row(masks[static_cast<std::size_t>(i)], cfg);
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (const auto& e : errors)
    if (!e.empty()) throw Error(ErrorKind::DegenerateShape, e);
  return rows;
}

std::vector<int> group_indices(const std::vector<SampleRecord>& records, Grouping grouping) {
  const auto labels = group_labels(grouping);
  std::vector<int> out;
  out.reserve(records.size());
  for (const auto& r : records) {
    const auto l = group_label(r.cls, grouping);
    out.push_back(static_cast<int>(std::find(labels.begin(), labels.end(), l) - labels.begin()));
  }
  return out;
}

Split stratified_split(const std::vector<SampleRecord>& records, Grouping grouping, double fraction,
                       std::uint64_t seed) {
  if (!(fraction > 0.0 && fraction < 1.0)) throw Error(ErrorKind::Config, "split fraction must lie in (0, 1)");
  const auto groups = group_indices(records, grouping);
  std::map<int, std::vector<std::size_t>> by_group;
  for (std::size_t i = 0; i < records.size(); ++i) by_group[groups[i]].push_back(i);
  Split split;
  for (auto& [g, idx] : by_group) {
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return records[a].filename < records[b].filename; });
    Rng rng(derive_seed(seed, {0x73706c6974ULL, static_cast<std::uint64_t>(g)}));
    for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
    const auto n_train = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(idx.size())));
    split.train.insert(split.train.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_train));
    split.test.insert(split.test.end(), idx.begin() + static_cast<std::ptrdiff_t>(n_train), idx.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

TrainingSet make_training_set(const std::vector<SampleRecord>& records, const std::vector<std::vector<double>>& rows,
                              const std::vector<std::size_t>& subset, Grouping grouping) {
  const auto groups = group_indices(records, grouping);
  TrainingSet ts;
  ts.class_names = group_labels(grouping);
  for (auto i : subset) {
    ts.rows.push_back(rows[i]);
    ts.labels.push_back(groups[i]);
    ts.keys.push_back(records[i].filename);
  }
  return ts;
}

}  // namespace firesig
