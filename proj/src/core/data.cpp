#include "core/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace advdrop {

const AttributeTable* Dataset::find_attribute(const std::string& name) const {
  for (const auto& a : attributes) {
    if (a.name == name) return &a;
  }
  return nullptr;
}

namespace {

std::int64_t parse_i64(const std::string& tok, const std::string& path,
                       int lineno) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) {
    throw parse_error(path + ":" + std::to_string(lineno) +
                      ": expected integer, got '" + tok + "'");
  }
  return v;
}

double parse_f64(const std::string& tok, const std::string& path,
                 int lineno) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw parse_error(path + ":" + std::to_string(lineno) +
                      ": expected number, got '" + tok + "'");
  }
}

}  // namespace

std::vector<RawPair> load_tsv(const std::string& path,
                              double rating_threshold) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open file: " + path);
  std::vector<RawPair> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string u_tok, i_tok, r_tok;
    if (!std::getline(row, u_tok, '\t') || !std::getline(row, i_tok, '\t') ||
        !std::getline(row, r_tok, '\t')) {
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": expected user<TAB>item<TAB>rating");
    }
    const std::int64_t u = parse_i64(u_tok, path, lineno);
    const std::int64_t i = parse_i64(i_tok, path, lineno);
    const double r = parse_f64(r_tok, path, lineno);
    if (u < 0 || i < 0) {
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": negative id");
    }
    if (r >= rating_threshold) out.emplace_back(u, i);
  }
  return out;
}

std::vector<RawPair> load_matrix(const std::string& path,
                                 double rating_threshold) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open file: " + path);
  std::vector<RawPair> out;
  std::string line;
  int lineno = 0;
  std::int64_t n_cols = -1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string tok;
    std::int64_t col = 0;
    while (row >> tok) {
      const double r = parse_f64(tok, path, lineno);
      if (r > 0 && r >= rating_threshold) {
        out.emplace_back(lineno - 1, col);
      }
      ++col;
    }
    if (n_cols < 0) {
      n_cols = col;
    } else if (col != n_cols) {
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": ragged matrix row (" + std::to_string(col) +
                        " vs " + std::to_string(n_cols) + " columns)");
    }
  }
  return out;
}

Dataset assemble_dataset(const std::vector<RawPair>& train,
                         const std::vector<RawPair>& validation,
                         const std::vector<RawPair>& test) {
  std::set<std::int64_t> users, items;
  for (const auto* split : {&train, &validation, &test}) {
    for (const auto& [u, i] : *split) {
      users.insert(u);
      items.insert(i);
    }
  }
  Dataset d;
  d.user_ids.assign(users.begin(), users.end());
  d.item_ids.assign(items.begin(), items.end());
  d.n_users = static_cast<std::int32_t>(d.user_ids.size());
  d.n_items = static_cast<std::int32_t>(d.item_ids.size());
  std::map<std::int64_t, std::int32_t> umap, imap;
  for (std::int32_t k = 0; k < d.n_users; ++k) umap[d.user_ids[k]] = k;
  for (std::int32_t k = 0; k < d.n_items; ++k) imap[d.item_ids[k]] = k;

  auto remap = [&](const std::vector<RawPair>& raw) {
    std::vector<Edge> mapped;
    mapped.reserve(raw.size());
    for (const auto& [u, i] : raw) {
      mapped.emplace_back(umap.at(u), imap.at(i));
    }
    std::sort(mapped.begin(), mapped.end());
    mapped.erase(std::unique(mapped.begin(), mapped.end()), mapped.end());
    return mapped;
  };
  d.train = remap(train);
  d.validation = remap(validation);
  d.test = remap(test);
  // keep splits disjoint: train wins, then validation
  auto subtract = [](std::vector<Edge>& a, const std::vector<Edge>& b) {
    std::vector<Edge> kept;
    kept.reserve(a.size());
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(kept));
    a = std::move(kept);
  };
  subtract(d.validation, d.train);
  subtract(d.test, d.train);
  subtract(d.test, d.validation);
  return d;
}

namespace {

struct OneHotRange {
  std::string name;
  std::int32_t begin;
  std::int32_t count;
};

std::vector<std::vector<std::int32_t>> read_onehot(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open file: " + path);
  std::vector<std::vector<std::int32_t>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::vector<std::int32_t> bits;
    std::string tok;
    while (row >> tok) {
      bits.push_back(
          static_cast<std::int32_t>(parse_i64(tok, path, lineno)));
    }
    rows.push_back(std::move(bits));
  }
  return rows;
}

// Converts one-hot blocks into categorical tables; rows are raw node
// ids, remapped through id_of (returns -1 for nodes absent from the
// dataset).
std::vector<AttributeTable> onehot_attributes(
    const std::vector<std::vector<std::int32_t>>& rows,
    const std::vector<OneHotRange>& ranges, AttributeTable::Side side,
    std::int32_t n_nodes,
    const std::function<std::int32_t(std::int64_t)>& id_of) {
  std::vector<AttributeTable> out;
  for (const auto& range : ranges) {
    AttributeTable t;
    t.name = range.name;
    t.side = side;
    t.labels.assign(n_nodes, -1);
    for (std::int32_t c = 0; c < range.count; ++c) {
      t.label_names.push_back(std::to_string(c));
    }
    for (std::size_t raw = 0; raw < rows.size(); ++raw) {
      const std::int32_t node = id_of(static_cast<std::int64_t>(raw));
      if (node < 0) continue;
      const auto& bits = rows[raw];
      for (std::int32_t c = 0; c < range.count; ++c) {
        const std::size_t col = static_cast<std::size_t>(range.begin + c);
        if (col < bits.size() && bits[col] == 1) {
          t.labels[node] = c;
          break;
        }
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

Dataset load_coat(const std::string& dir) {
  const auto train_path = (fs::path(dir) / "train.ascii").string();
  const auto test_path = (fs::path(dir) / "test.ascii").string();
  Dataset d = assemble_dataset(load_matrix(train_path), {},
                               load_matrix(test_path));

  auto id_lookup = [](const std::vector<std::int64_t>& ids,
                      std::int64_t raw) -> std::int32_t {
    const auto it = std::lower_bound(ids.begin(), ids.end(), raw);
    if (it == ids.end() || *it != raw) return -1;
    return static_cast<std::int32_t>(it - ids.begin());
  };

  // Public Coat feature layout: users are gender(2), age(6),
  // location(3), fashion interest(3); items are gender(2), jacket
  // type(16), colour(13), front page(2).
  const auto feat_dir = fs::path(dir) / "user_item_features";
  const auto user_feat = feat_dir / "user_features.ascii";
  const auto item_feat = feat_dir / "item_features.ascii";
  if (fs::exists(user_feat)) {
    const auto rows = read_onehot(user_feat.string());
    if (!rows.empty() && rows[0].size() == 14) {
      auto tables = onehot_attributes(
          rows,
          {{"user_gender", 0, 2}, {"user_age", 2, 6}},
          AttributeTable::Side::user, d.n_users,
          [&](std::int64_t raw) { return id_lookup(d.user_ids, raw); });
      for (auto& t : tables) d.attributes.push_back(std::move(t));
    } else {
      std::fprintf(stderr,
                   "notice: %s has unexpected column count; "
                   "user attributes skipped\n",
                   user_feat.string().c_str());
    }
  }
  if (fs::exists(item_feat)) {
    const auto rows = read_onehot(item_feat.string());
    if (!rows.empty() && rows[0].size() == 33) {
      auto tables = onehot_attributes(
          rows,
          {{"item_gender", 0, 2}, {"item_colour", 18, 13}},
          AttributeTable::Side::item, d.n_items,
          [&](std::int64_t raw) { return id_lookup(d.item_ids, raw); });
      for (auto& t : tables) d.attributes.push_back(std::move(t));
    } else {
      std::fprintf(stderr,
                   "notice: %s has unexpected column count; "
                   "item attributes skipped\n",
                   item_feat.string().c_str());
    }
  }
  return d;
}

AttributeTable load_attribute_tsv(const std::string& path,
                                  const std::string& name,
                                  AttributeTable::Side side,
                                  std::int32_t n_nodes) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open file: " + path);
  AttributeTable t;
  t.name = name;
  t.side = side;
  t.labels.assign(n_nodes, -1);
  std::map<std::string, std::int32_t> name_to_label;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string idx_tok, label;
    if (!std::getline(row, idx_tok, '\t') || !std::getline(row, label)) {
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": expected index<TAB>label");
    }
    const std::int64_t idx = parse_i64(idx_tok, path, lineno);
    if (idx < 0 || idx >= n_nodes) {
      throw parse_error(path + ":" + std::to_string(lineno) +
                        ": node index out of range");
    }
    auto [it, fresh] = name_to_label.try_emplace(
        label, static_cast<std::int32_t>(t.label_names.size()));
    if (fresh) t.label_names.push_back(label);
    t.labels[idx] = it->second;
  }
  return t;
}

std::pair<std::vector<Edge>, std::vector<Edge>> split_holdout(
    const std::vector<Edge>& train, double fraction, std::uint64_t seed) {
  if (fraction <= 0.0 || fraction >= 1.0) {
    throw std::invalid_argument("holdout fraction must be in (0, 1)");
  }
  std::map<std::int32_t, std::vector<std::int32_t>> by_user;
  for (const auto& [u, i] : train) by_user[u].push_back(i);
  Rng rng(seed);
  std::vector<Edge> kept, held;
  for (auto& [u, items] : by_user) {
    const auto c = static_cast<std::int64_t>(items.size());
    auto h = std::llround(static_cast<double>(c) * fraction);
    h = std::min<std::int64_t>(h, c - 1);  // never orphan a user
    std::shuffle(items.begin(), items.end(), rng);
    for (std::int64_t k = 0; k < c; ++k) {
      (k < h ? held : kept).emplace_back(u, items[k]);
    }
  }
  std::sort(kept.begin(), kept.end());
  std::sort(held.begin(), held.end());
  return {std::move(kept), std::move(held)};
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
  if (spec.n_users <= 0 || spec.n_items <= 0 || spec.latent_dim <= 0) {
    throw std::invalid_argument("synthetic spec sizes must be positive");
  }
  if (spec.positive_rate <= 0.0 || spec.positive_rate >= 1.0) {
    throw std::invalid_argument("positive_rate must be in (0, 1)");
  }
  if (spec.noise_rate < 0.0 || spec.noise_rate >= 1.0) {
    throw std::invalid_argument("noise_rate must be in [0, 1)");
  }
  Rng rng(spec.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const double scale = 1.0 / std::sqrt(static_cast<double>(spec.latent_dim));
  Mat user_latent(spec.n_users, spec.latent_dim);
  Mat item_latent(spec.n_items, spec.latent_dim);
  for (auto* m : {&user_latent, &item_latent}) {
    for (Eigen::Index r = 0; r < m->rows(); ++r)
      for (Eigen::Index c = 0; c < m->cols(); ++c) (*m)(r, c) = gauss(rng);
  }
  Vec item_bias(spec.n_items);
  for (Eigen::Index i = 0; i < item_bias.size(); ++i) {
    item_bias[i] = spec.item_bias_scale * gauss(rng);
  }

  SyntheticData out;
  out.true_scores = user_latent * item_latent.transpose() * scale;
  out.true_scores.rowwise() += item_bias.transpose();

  // ground truth = scores above the global (1 - positive_rate) quantile
  std::vector<double> flat(out.true_scores.data(),
                           out.true_scores.data() + out.true_scores.size());
  const auto q_idx = static_cast<std::size_t>(
      (1.0 - spec.positive_rate) * static_cast<double>(flat.size()));
  std::nth_element(flat.begin(), flat.begin() + q_idx, flat.end());
  const double threshold = flat[q_idx];

  std::vector<Edge> positives;
  std::vector<std::int64_t> item_degree(spec.n_items, 0);
  for (std::int32_t u = 0; u < spec.n_users; ++u) {
    for (std::int32_t i = 0; i < spec.n_items; ++i) {
      if (out.true_scores(u, i) > threshold) {
        positives.emplace_back(u, i);
        ++item_degree[i];
      }
    }
  }
  if (positives.empty()) throw numeric_error("synthetic ground truth empty");

  // cumulative exposure weights over positives
  std::vector<double> cum(positives.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < positives.size(); ++k) {
    const auto deg = std::max<std::int64_t>(item_degree[positives[k].second], 1);
    acc += std::pow(static_cast<double>(deg), spec.gamma);
    cum[k] = acc;
  }

  std::set<Edge> taken;
  std::vector<Edge> train;
  const auto want_train = std::min<std::int64_t>(
      spec.train_interactions, static_cast<std::int64_t>(positives.size()));
  std::int64_t guard = 0;
  const std::int64_t guard_max =
      1000 * (want_train + 1) + 1000000;  // rejection-sampling safety
  while (static_cast<std::int64_t>(train.size()) < want_train &&
         ++guard < guard_max) {
    Edge e;
    if (spec.noise_rate > 0.0 && uniform01(rng) < spec.noise_rate) {
      e = {static_cast<std::int32_t>(rng() % spec.n_users),
           static_cast<std::int32_t>(rng() % spec.n_items)};
      if (out.true_scores(e.first, e.second) > threshold) continue;
    } else {
      const double r = uniform01(rng) * acc;
      const auto it = std::lower_bound(cum.begin(), cum.end(), r);
      e = positives[it == cum.end() ? positives.size() - 1
                                    : static_cast<std::size_t>(
                                          it - cum.begin())];
    }
    if (taken.insert(e).second) train.push_back(e);
  }

  // MAR test: uniform over remaining ground-truth positives
  std::vector<Edge> pool;
  for (const auto& e : positives) {
    if (!taken.count(e)) pool.push_back(e);
  }
  std::shuffle(pool.begin(), pool.end(), rng);
  const auto want_test = std::min<std::size_t>(
      static_cast<std::size_t>(spec.test_interactions), pool.size());
  std::vector<Edge> test(pool.begin(), pool.begin() + want_test);

  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());

  Dataset& d = out.dataset;
  d.n_users = spec.n_users;
  d.n_items = spec.n_items;
  d.train = std::move(train);
  d.test = std::move(test);
  d.ground_truth = std::move(positives);
  d.user_ids.resize(spec.n_users);
  std::iota(d.user_ids.begin(), d.user_ids.end(), 0);
  d.item_ids.resize(spec.n_items);
  std::iota(d.item_ids.begin(), d.item_ids.end(), 0);

  if (spec.n_item_categories >= 2 && spec.n_items >= spec.n_item_categories) {
    // categorical item attribute tracking (noisy) propensity, a stand-in
    // for a sensitive label that bias amplification would leak
    std::vector<std::int32_t> order(spec.n_items);
    std::iota(order.begin(), order.end(), 0);
    Vec noisy = item_bias;
    for (Eigen::Index i = 0; i < noisy.size(); ++i) {
      noisy[i] += 0.5 * spec.item_bias_scale * gauss(rng);
    }
    std::sort(order.begin(), order.end(),
              [&noisy](std::int32_t a, std::int32_t b) {
                if (noisy[a] != noisy[b]) return noisy[a] < noisy[b];
                return a < b;
              });
    AttributeTable t;
    t.name = "item_category";
    t.side = AttributeTable::Side::item;
    t.labels.assign(spec.n_items, 0);
    for (std::int32_t rank = 0; rank < spec.n_items; ++rank) {
      t.labels[order[rank]] = static_cast<std::int32_t>(
          (static_cast<std::int64_t>(rank) * spec.n_item_categories) /
          spec.n_items);
    }
    for (std::int32_t k = 0; k < spec.n_item_categories; ++k) {
      t.label_names.push_back("c" + std::to_string(k));
    }
    d.attributes.push_back(std::move(t));
  }
  return out;
}

namespace {

void write_pairs(const fs::path& path, const std::vector<Edge>& pairs) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write file: " + path.string());
  for (const auto& [u, i] : pairs) {
    out << u << '\t' << i << '\n';
  }
}

std::vector<Edge> read_pairs(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open file: " + path.string());
  std::vector<Edge> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string u_tok, i_tok;
    if (!std::getline(row, u_tok, '\t') || !std::getline(row, i_tok)) {
      throw parse_error(path.string() + ":" + std::to_string(lineno) +
                        ": expected user<TAB>item");
    }
    out.emplace_back(
        static_cast<std::int32_t>(parse_i64(u_tok, path.string(), lineno)),
        static_cast<std::int32_t>(parse_i64(i_tok, path.string(), lineno)));
  }
  return out;
}

void write_ids(const fs::path& path, const std::vector<std::int64_t>& ids) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write file: " + path.string());
  for (std::size_t k = 0; k < ids.size(); ++k) {
    out << k << '\t' << ids[k] << '\n';
  }
}

std::vector<std::int64_t> read_ids(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open file: " + path.string());
  std::vector<std::int64_t> ids;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string idx_tok, id_tok;
    if (!std::getline(row, idx_tok, '\t') || !std::getline(row, id_tok)) {
      throw parse_error(path.string() + ":" + std::to_string(lineno) +
                        ": expected index<TAB>id");
    }
    ids.push_back(parse_i64(id_tok, path.string(), lineno));
  }
  return ids;
}

std::string attr_side_name(AttributeTable::Side s) {
  return s == AttributeTable::Side::user ? "user" : "item";
}

}  // namespace

std::uint64_t dataset_hash(const Dataset& data) {
  std::string blob = "U:" + std::to_string(data.n_users) +
                     "|I:" + std::to_string(data.n_items);
  auto add = [&blob](const char* tag, const std::vector<Edge>& pairs) {
    blob += tag;
    for (const auto& [u, i] : pairs) {
      blob += std::to_string(u) + "," + std::to_string(i) + ";";
    }
  };
  add("|T:", data.train);
  add("|V:", data.validation);
  add("|E:", data.test);
  return fnv1a64_str(blob);
}

void save_bundle(const Dataset& data, const std::string& dir) {
  fs::create_directories(dir);
  const fs::path root(dir);
  write_pairs(root / "train.tsv", data.train);
  write_pairs(root / "validation.tsv", data.validation);
  write_pairs(root / "test.tsv", data.test);
  write_ids(root / "user_ids.tsv", data.user_ids);
  write_ids(root / "item_ids.tsv", data.item_ids);
  if (data.has_ground_truth()) {
    write_pairs(root / "truth.tsv", data.ground_truth);
  }
  json attrs = json::array();
  for (const auto& a : data.attributes) {
    const std::string fname =
        "attr_" + attr_side_name(a.side) + "_" + a.name + ".tsv";
    std::ofstream out(root / fname);
    if (!out) throw io_error("cannot write attribute file: " + fname);
    for (std::size_t k = 0; k < a.labels.size(); ++k) {
      if (a.labels[k] >= 0) {
        out << k << '\t' << a.label_names[a.labels[k]] << '\n';
      }
    }
    attrs.push_back({{"name", a.name},
                     {"side", attr_side_name(a.side)},
                     {"file", fname}});
  }
  json manifest = {
      {"format", "advdrop-bundle"},
      {"version", 1},
      {"n_users", data.n_users},
      {"n_items", data.n_items},
      {"n_train", data.train.size()},
      {"n_validation", data.validation.size()},
      {"n_test", data.test.size()},
      {"has_ground_truth", data.has_ground_truth()},
      {"content_hash", dataset_hash(data)},
      {"attributes", attrs},
  };
  std::ofstream mf(root / "manifest.json");
  if (!mf) throw io_error("cannot write bundle manifest");
  mf << manifest.dump(2) << '\n';
}

Dataset load_bundle(const std::string& dir) {
  const fs::path root(dir);
  std::ifstream mf(root / "manifest.json");
  if (!mf) throw io_error("cannot open bundle manifest in " + dir);
  json manifest;
  try {
    mf >> manifest;
  } catch (const json::exception& e) {
    throw parse_error("bad bundle manifest: " + std::string(e.what()));
  }
  Dataset d;
  d.n_users = manifest.at("n_users").get<std::int32_t>();
  d.n_items = manifest.at("n_items").get<std::int32_t>();
  d.train = read_pairs(root / "train.tsv");
  d.validation = read_pairs(root / "validation.tsv");
  d.test = read_pairs(root / "test.tsv");
  d.user_ids = read_ids(root / "user_ids.tsv");
  d.item_ids = read_ids(root / "item_ids.tsv");
  if (fs::exists(root / "truth.tsv")) {
    d.ground_truth = read_pairs(root / "truth.tsv");
  }
  for (const auto& a : manifest.value("attributes", json::array())) {
    const auto side = a.at("side").get<std::string>() == "user"
                          ? AttributeTable::Side::user
                          : AttributeTable::Side::item;
    const auto n_nodes =
        side == AttributeTable::Side::user ? d.n_users : d.n_items;
    d.attributes.push_back(
        load_attribute_tsv((root / a.at("file").get<std::string>()).string(),
                           a.at("name").get<std::string>(), side, n_nodes));
  }
  const auto expect = manifest.at("content_hash").get<std::uint64_t>();
  if (dataset_hash(d) != expect) {
    throw parse_error("bundle content hash mismatch in " + dir);
  }
  return d;
}

}  // namespace advdrop
