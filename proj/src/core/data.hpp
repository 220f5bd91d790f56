#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/common.hpp"
#include "core/graph.hpp"
#include "core/metrics.hpp"

namespace advdrop {

// Loaded dataset with contiguous node indices. user_ids/item_ids map an
// index back to the original id; indices cover every id seen in any
// split, so embeddings exist even for test-only nodes.
struct Dataset {
  std::int32_t n_users = 0;
  std::int32_t n_items = 0;
  std::vector<Edge> train;
  std::vector<Edge> validation;
  std::vector<Edge> test;
  std::vector<std::int64_t> user_ids;
  std::vector<std::int64_t> item_ids;
  std::vector<AttributeTable> attributes;
  // ground-truth positives, present for generated data only
  std::vector<Edge> ground_truth;

  bool has_ground_truth() const { return !ground_truth.empty(); }
  const AttributeTable* find_attribute(const std::string& name) const;
};

using RawPair = std::pair<std::int64_t, std::int64_t>;

// `user<TAB>item<TAB>rating` rows; keeps rows with rating >= threshold.
// Malformed rows raise parse_error with the line number.
std::vector<RawPair> load_tsv(const std::string& path,
                              double rating_threshold = 4.0);

// Dense rating-matrix text (one row per user, one column per item,
// whitespace-separated; 0 = unobserved). Returns positives.
std::vector<RawPair> load_matrix(const std::string& path,
                                 double rating_threshold = 4.0);

// Remaps raw ids (union over splits) to contiguous indices and dedups
// each split. Pairs present in train are dropped from validation/test.
Dataset assemble_dataset(const std::vector<RawPair>& train,
                         const std::vector<RawPair>& validation,
                         const std::vector<RawPair>& test);

// Coat-style directory: train.ascii + test.ascii rating matrices and,
// when present, user_item_features/{user_features.ascii,
// item_features.ascii} one-hot tables (layout documented in README).
Dataset load_coat(const std::string& dir);

// `index<TAB>label` attribute file over contiguous node indices.
AttributeTable load_attribute_tsv(const std::string& path,
                                  const std::string& name,
                                  AttributeTable::Side side,
                                  std::int32_t n_nodes);

// Per-user stratified holdout; a user with c interactions contributes
// round(c * fraction) (never all) of them to the validation split.
std::pair<std::vector<Edge>, std::vector<Edge>> split_holdout(
    const std::vector<Edge>& train, double fraction, std::uint64_t seed);

// Latent-factor generator with popularity-skewed exposure for the
// training split and missing-at-random test sampling.
struct SyntheticSpec {
  std::int32_t n_users = 290;
  std::int32_t n_items = 295;
  std::int32_t latent_dim = 8;
  double gamma = 1.0;       // exposure weight = (true item degree)^gamma
  double noise_rate = 0.02; // chance a train draw is a uniform false positive
  std::int32_t train_interactions = 2800;
  std::int32_t test_interactions = 4000;
  double positive_rate = 0.1;   // ground-truth positive density
  double item_bias_scale = 1.2; // spread of per-item propensity
  std::int32_t n_item_categories = 3;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  Dataset dataset;
  Mat true_scores;  // n_users x n_items ground-truth utility
};

SyntheticData generate_synthetic(const SyntheticSpec& spec);

// Canonical on-disk bundle: split TSVs, id maps, attributes, manifest
// with counts and a content hash.
void save_bundle(const Dataset& data, const std::string& dir);
Dataset load_bundle(const std::string& dir);
std::uint64_t dataset_hash(const Dataset& data);

}  // namespace advdrop
