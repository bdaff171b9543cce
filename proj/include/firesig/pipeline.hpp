#pragma once

#include "firesig/features.hpp"
#include "firesig/forest.hpp"
#include "firesig/synth.hpp"

#include <json.hpp>

#include <cstdint>
#include <vector>

namespace firesig {

struct FeatureConfig {
  ChordMode mode = ChordMode::Ray;
  ExtremaConfig extrema;
};

nlohmann::json to_json(const FeatureConfig& cfg);
FeatureConfig feature_config_from_json(const nlohmann::json& j);

/// 372-column classifier rows for a mask; throws DegenerateShape like
/// aspect_signature.
std::vector<double> feature_row(const ShapeMask& mask, const FeatureConfig& cfg);

/// Rows for many masks, computed in parallel over masks.
std::vector<std::vector<double>> feature_rows(const std::vector<ShapeMask>& masks, const FeatureConfig& cfg);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// Stratified by grouped label: within each group the rows are ordered by
/// filename, shuffled with `seed`, and the first round(fraction * n) go to train.
/// Both index lists are returned in ascending order.
Split stratified_split(const std::vector<SampleRecord>& records, Grouping grouping, double fraction,
                       std::uint64_t seed);

std::vector<int> group_indices(const std::vector<SampleRecord>& records, Grouping grouping);

TrainingSet make_training_set(const std::vector<SampleRecord>& records, const std::vector<std::vector<double>>& rows,
                              const std::vector<std::size_t>& subset, Grouping grouping);

}  // namespace firesig
