#include "core/run.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "core/svg_plot.hpp"
#include "core/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace advdrop {

namespace {

std::string cell(double v) { return std::isnan(v) ? "" : fmt_double(v); }

std::string sanitize(const std::string& name) {
  std::string out = name;
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return out;
}

void atomic_write(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw io_error("cannot write " + tmp.string());
    out << content;
  }
  fs::rename(tmp, path);
}

// exclusion/relevance lists for ranking evaluation on the test split
struct EvalLists {
  std::vector<std::vector<std::int32_t>> excluded;
  std::vector<std::vector<std::int32_t>> relevant;
};

EvalLists eval_lists(const Dataset& data) {
  EvalLists out;
  out.excluded.resize(data.n_users);
  out.relevant.resize(data.n_users);
  for (const auto& [u, i] : data.train) out.excluded[u].push_back(i);
  for (const auto& [u, i] : data.validation) out.excluded[u].push_back(i);
  for (const auto& [u, i] : data.test) out.relevant[u].push_back(i);
  for (auto& v : out.excluded) std::sort(v.begin(), v.end());
  for (auto& v : out.relevant) std::sort(v.begin(), v.end());
  return out;
}

Mat inference_readout(const Checkpoint& ckpt, const Dataset& data) {
  if (ckpt.model.n_users() != data.n_users ||
      ckpt.model.n_items() != data.n_items) {
    throw std::invalid_argument(
        "checkpoint node counts do not match the dataset");
  }
  const auto [train_main, validation] =
      training_split(ckpt.config, data);
  const InteractionGraph graph =
      build_graph(data.n_users, data.n_items, train_main);
  return readout(propagate(ckpt.model, normalize(graph)));
}

}  // namespace

void write_history_csv(const std::string& path,
                       const std::vector<HistoryRow>& rows,
                       std::int32_t val_k,
                       const std::vector<std::string>& bias_attrs) {
  std::ostringstream out;
  out << "round,stage,epoch,loss_rec,loss_inv,val_ndcg@" << val_k;
  for (const auto& a : bias_attrs) out << ",pred_bias_" << sanitize(a);
  out << "\n";
  for (const auto& r : rows) {
    out << r.round << ',' << r.stage << ',' << r.epoch << ','
        << cell(r.loss_rec) << ',' << cell(r.loss_inv) << ','
        << cell(r.val_ndcg);
    for (std::size_t k = 0; k < bias_attrs.size(); ++k) {
      out << ',' << (k < r.pred_bias.size() ? cell(r.pred_bias[k]) : "");
    }
    out << "\n";
  }
  atomic_write(path, out.str());
}

HistoryTrajectory read_history_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open history file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw parse_error("empty history file");
  std::vector<std::string> header;
  {
    std::istringstream h(line);
    std::string tok;
    while (std::getline(h, tok, ',')) header.push_back(tok);
  }
  HistoryTrajectory t;
  std::vector<std::size_t> bias_cols;
  std::size_t val_col = std::string::npos;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c].rfind("val_ndcg", 0) == 0) val_col = c;
    if (header[c].rfind("pred_bias_", 0) == 0) {
      bias_cols.push_back(c);
      t.bias_attrs.push_back(header[c].substr(10));
    }
  }
  t.pred_bias.resize(bias_cols.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::istringstream row(line);
    std::string tok;
    while (std::getline(row, tok, ',')) cells.push_back(tok);
    cells.resize(header.size());
    const bool has_val =
        val_col != std::string::npos && !cells[val_col].empty();
    bool has_bias = false;
    for (auto c : bias_cols) has_bias = has_bias || !cells[c].empty();
    if (!has_val && !has_bias) continue;
    t.val_ndcg.push_back(has_val ? std::stod(cells[val_col]) : kBlank);
    for (std::size_t k = 0; k < bias_cols.size(); ++k) {
      t.pred_bias[k].push_back(
          cells[bias_cols[k]].empty() ? kBlank : std::stod(cells[bias_cols[k]]));
    }
  }
  return t;
}

RunArtifacts run_train(const TrainConfig& cfg, const Dataset& data,
                       const std::string& run_dir) {
  fs::create_directories(run_dir);
  const auto t0 = std::chrono::steady_clock::now();
  RunArtifacts art;
  art.result = train(cfg, data);
  const double train_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  art.dir = run_dir;
  art.history_csv = (fs::path(run_dir) / "history.csv").string();
  art.checkpoint_path = (fs::path(run_dir) / "checkpoint.bin").string();
  art.manifest_path = (fs::path(run_dir) / "manifest.json").string();

  write_history_csv(art.history_csv, art.result.history, cfg.val_k,
                    art.result.bias_attrs);
  save_checkpoint({art.result.model, art.result.head, cfg,
                   art.result.rng_state},
                  art.checkpoint_path);

  json config_snapshot = json::object();
  for (const auto& key : TrainConfig::keys()) {
    config_snapshot[key] = cfg.get(key);
  }
  json manifest = {
      {"engine_version", kVersion},
      {"seed", cfg.seed},
      {"config", config_snapshot},
      {"dataset",
       {{"hash", dataset_hash(data)},
        {"n_users", data.n_users},
        {"n_items", data.n_items},
        {"n_train", data.train.size()},
        {"n_validation", data.validation.size()},
        {"n_test", data.test.size()}}},
      {"rounds_run", art.result.rounds},
      {"best_val_ndcg", std::isnan(art.result.best_val_ndcg)
                            ? json(nullptr)
                            : json(art.result.best_val_ndcg)},
      {"outputs", {art.history_csv, art.checkpoint_path}},
      {"timings", {{"train_seconds", train_s}}},
  };
  atomic_write(art.manifest_path, manifest.dump(2) + "\n");
  return art;
}

EvalResult run_evaluate(const Checkpoint& ckpt, const Dataset& data,
                        const std::vector<std::int32_t>& ks,
                        const std::string& metrics_csv,
                        const std::string& bias_csv) {
  const Mat rep = inference_readout(ckpt, data);
  const Mat user_reps = rep.topRows(data.n_users);
  const Mat item_reps = rep.bottomRows(data.n_items);
  const EvalLists lists = eval_lists(data);

  std::vector<AttributeTable> usable;
  for (const auto& attr : data.attributes) {
    std::vector<std::int64_t> counts(attr.n_labels(), 0);
    for (auto lab : attr.labels)
      if (lab >= 0) ++counts[lab];
    if (std::count_if(counts.begin(), counts.end(),
                      [](std::int64_t c) { return c > 0; }) >= 2) {
      usable.push_back(attr);
    }
  }

  const EvalResult res = evaluate_ranking(user_reps, item_reps,
                                          lists.excluded, lists.relevant, ks,
                                          usable);
  if (!metrics_csv.empty()) {
    std::ostringstream out;
    out << "metric,K,value\n";
    for (const auto& [k, v] : res.ndcg) {
      out << "ndcg," << k << ',' << fmt_double(v) << "\n";
    }
    for (const auto& [k, v] : res.recall) {
      out << "recall," << k << ',' << fmt_double(v) << "\n";
    }
    out << "users_counted,," << res.users_counted << "\n";
    atomic_write(metrics_csv, out.str());
  }
  if (!bias_csv.empty()) {
    if (res.pred_bias.empty()) {
      std::fprintf(stderr,
                   "notice: no usable attribute tables; "
                   "prediction-bias report skipped\n");
    } else {
      std::ostringstream out;
      out << "attribute,prediction_bias\n";
      for (const auto& [name, v] : res.pred_bias) {
        out << name << ',' << fmt_double(v) << "\n";
      }
      atomic_write(bias_csv, out.str());
    }
  }
  return res;
}

void write_embeddings_csv(const std::string& path, const Mat& user_reps,
                          const Mat& item_reps) {
  std::ostringstream out;
  out << "node_type,index";
  for (Eigen::Index c = 0; c < user_reps.cols(); ++c) out << ",dim_" << c;
  out << "\n";
  auto dump = [&out](const char* type, const Mat& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      out << type << ',' << r;
      for (Eigen::Index c = 0; c < m.cols(); ++c) {
        out << ',' << fmt_double(m(r, c));
      }
      out << "\n";
    }
  };
  dump("user", user_reps);
  dump("item", item_reps);
  atomic_write(path, out.str());
}

void run_analyze(const Checkpoint& ckpt, const Dataset& data,
                 const std::string& out_dir,
                 const std::string& history_csv) {
  fs::create_directories(out_dir);
  const auto [train_main, validation] = training_split(ckpt.config, data);
  const InteractionGraph graph =
      build_graph(data.n_users, data.n_items, train_main);

  const Vec logits = bias_logits(ckpt.head, ckpt.model, graph);
  const Vec p_b = bias_probabilities(logits);
  const AttributeTable groups = popularity_groups(graph, 4);

  // per-edge report
  {
    std::ostringstream out;
    out << "edge_index,user,item,p_b,item_popularity_group\n";
    for (std::int64_t e = 0; e < graph.num_edges(); ++e) {
      const auto& [u, i] = graph.edges[e];
      out << e << ',' << u << ',' << i << ',' << fmt_double(p_b[e]) << ','
          << groups.labels[i] << "\n";
    }
    atomic_write(fs::path(out_dir) / "pb_report.csv", out.str());
  }

  // quartile summary + bar plot
  std::vector<double> mean_pb(4, 0.0);
  {
    std::vector<std::int64_t> n_edges(4, 0);
    for (std::int64_t e = 0; e < graph.num_edges(); ++e) {
      const auto g = groups.labels[graph.edges[e].second];
      mean_pb[g] += p_b[e];
      ++n_edges[g];
    }
    std::ostringstream out;
    out << "group,n_edges,mean_p_b\n";
    std::vector<std::string> labels;
    for (int g = 0; g < 4; ++g) {
      mean_pb[g] = n_edges[g] ? mean_pb[g] / n_edges[g] : 0.0;
      out << g << ',' << n_edges[g] << ',' << fmt_double(mean_pb[g]) << "\n";
      labels.push_back("group " + std::to_string(g));
    }
    atomic_write(fs::path(out_dir) / "pb_quartiles.csv", out.str());
    svg_bar_chart((fs::path(out_dir) / "pb_quartiles.svg").string(),
                  "Mean bias probability by item popularity quartile",
                  labels, mean_pb, "mean P_B");
  }

  // embedding export (inference path)
  const Mat rep = readout(propagate(ckpt.model, normalize(graph)));
  write_embeddings_csv((fs::path(out_dir) / "embeddings.csv").string(),
                       rep.topRows(data.n_users),
                       rep.bottomRows(data.n_items));

  // performance-vs-bias trajectories
  if (!history_csv.empty() && fs::exists(history_csv)) {
    const HistoryTrajectory t = read_history_trajectory(history_csv);
    for (std::size_t a = 0; a < t.bias_attrs.size(); ++a) {
      std::vector<double> xs, ys;
      for (std::size_t r = 0; r < t.val_ndcg.size(); ++r) {
        if (!std::isnan(t.val_ndcg[r]) && !std::isnan(t.pred_bias[a][r])) {
          xs.push_back(t.pred_bias[a][r]);
          ys.push_back(t.val_ndcg[r]);
        }
      }
      if (xs.size() >= 2) {
        svg_trajectory(
            (fs::path(out_dir) / ("perf_vs_bias_" + t.bias_attrs[a] + ".svg"))
                .string(),
            "Ranking quality vs prediction bias (" + t.bias_attrs[a] + ")",
            xs, ys, "prediction bias", "validation NDCG");
      }
    }
  } else if (!history_csv.empty()) {
    std::fprintf(stderr,
                 "notice: history file %s not found; trajectory plots "
                 "skipped\n",
                 history_csv.c_str());
  }
}

}  // namespace advdrop
