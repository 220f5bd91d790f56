#pragma once

#include <string>
#include <vector>

#include "core/checkpoint.hpp"
#include "core/data.hpp"
#include "core/metrics.hpp"
#include "core/trainer.hpp"

namespace advdrop {

// A completed training run on disk: history.csv, checkpoint.bin and
// manifest.json under one directory.
struct RunArtifacts {
  TrainResult result;
  std::string dir;
  std::string history_csv;
  std::string checkpoint_path;
  std::string manifest_path;
};

RunArtifacts run_train(const TrainConfig& cfg, const Dataset& data,
                       const std::string& run_dir);

void write_history_csv(const std::string& path,
                       const std::vector<HistoryRow>& rows,
                       std::int32_t val_k,
                       const std::vector<std::string>& bias_attrs);

// Rows of (val_ndcg, pred_bias per attribute) parsed back from a history
// file; used by the trajectory plots.
struct HistoryTrajectory {
  std::vector<double> val_ndcg;
  std::vector<std::string> bias_attrs;
  std::vector<std::vector<double>> pred_bias;  // per attr, aligned rows
};

HistoryTrajectory read_history_trajectory(const std::string& path);

// Inference-path ranking evaluation of a checkpoint; writes
// `metric,K,value` and, when attributes exist, `attribute,prediction_bias`.
EvalResult run_evaluate(const Checkpoint& ckpt, const Dataset& data,
                        const std::vector<std::int32_t>& ks,
                        const std::string& metrics_csv,
                        const std::string& bias_csv);

// Analysis bundle: per-edge bias-probability report, popularity-quartile
// summary (CSV + bar plot), embedding export, and performance-vs-bias
// trajectory plots when a history file is supplied.
void run_analyze(const Checkpoint& ckpt, const Dataset& data,
                 const std::string& out_dir,
                 const std::string& history_csv = "");

void write_embeddings_csv(const std::string& path, const Mat& user_reps,
                          const Mat& item_reps);

}  // namespace advdrop
