// Command-line front end over the advdrop C API.

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "advdrop/advdrop.h"

namespace {

struct ConfigHandle {
  advdrop_config* ptr = nullptr;
  ~ConfigHandle() { advdrop_config_destroy(ptr); }
};

struct DatasetHandle {
  advdrop_dataset* ptr = nullptr;
  ~DatasetHandle() { advdrop_dataset_destroy(ptr); }
};

struct RunHandle {
  advdrop_run* ptr = nullptr;
  ~RunHandle() { advdrop_run_destroy(ptr); }
};

[[noreturn]] void die(advdrop_status s) {
  std::fprintf(stderr, "error: %s: %s\n", advdrop_status_name(s),
               advdrop_last_error());
  std::exit(static_cast<int>(s));
}

void check(advdrop_status s) {
  if (s != ADVDROP_OK) die(s);
}

// Dataset source options shared by train/eval/analyze.
struct DatasetOpts {
  std::string bundle;
  std::string coat;
  std::string train_tsv, val_tsv, test_tsv;
  double threshold = 4.0;

  void add_to(CLI::App* cmd) {
    auto* b = cmd->add_option("--bundle", bundle, "dataset bundle directory");
    auto* c = cmd->add_option("--coat", coat,
                              "directory with train.ascii/test.ascii");
    auto* t = cmd->add_option("--train-tsv", train_tsv,
                              "training triples (user<TAB>item<TAB>rating)");
    cmd->add_option("--val-tsv", val_tsv, "validation triples");
    cmd->add_option("--test-tsv", test_tsv, "test triples");
    cmd->add_option("--threshold", threshold,
                    "positive-rating threshold for TSV/matrix input");
    b->excludes(c);
    b->excludes(t);
    c->excludes(t);
  }

  advdrop_dataset* load() const {
    advdrop_dataset* d = nullptr;
    if (!bundle.empty()) {
      check(advdrop_dataset_load_bundle(bundle.c_str(), &d));
    } else if (!coat.empty()) {
      check(advdrop_dataset_load_coat(coat.c_str(), &d));
    } else if (!train_tsv.empty() && !test_tsv.empty()) {
      check(advdrop_dataset_load_tsv(
          train_tsv.c_str(), val_tsv.empty() ? nullptr : val_tsv.c_str(),
          test_tsv.c_str(), threshold, &d));
    } else {
      std::fprintf(stderr,
                   "error: invalid_argument: no dataset given "
                   "(use --bundle, --coat, or --train-tsv/--test-tsv)\n");
      std::exit(ADVDROP_ERR_INVALID_ARGUMENT);
    }
    return d;
  }
};

std::string default_run_dir(const std::string& seed) {
  const char* root = std::getenv("ADVDROP_RUN_ROOT");
  std::string base = root && *root ? root : "runs";
  return base + "/run_seed" + seed + "_" + std::to_string(std::time(nullptr));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"training and evaluation engine for debiased graph "
               "collaborative filtering"};
  app.require_subcommand(1);
  app.set_version_flag("--version", advdrop_version());

  // ---- train ----
  auto* train = app.add_subcommand("train", "train a model");
  DatasetOpts train_data;
  train_data.add_to(train);
  std::string preset = "default", config_file, out_dir, ablation;
  std::vector<std::string> overrides;
  train->add_option("--preset", preset,
                    "config preset: default, coat, yahoo, synthetic");
  train->add_option("--config", config_file, "config file (key = value)");
  train->add_option("--set", overrides, "override, e.g. --set seed=1")
      ->take_all();
  train->add_option("--ablation", ablation,
                    "full, no_pb, no_pb_no_inv, pop_drop or backbone");
  train->add_option("--out", out_dir, "run output directory");

  // ---- eval ----
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint");
  DatasetOpts eval_data;
  eval_data.add_to(eval);
  std::string eval_ckpt, eval_out = ".";
  std::vector<int> ks{3, 5};
  eval->add_option("--checkpoint", eval_ckpt, "checkpoint.bin path")
      ->required();
  eval->add_option("--k", ks, "ranking cutoffs")->take_all();
  eval->add_option("--out", eval_out, "report directory");

  // ---- analyze ----
  auto* analyze = app.add_subcommand("analyze", "bias analysis bundle");
  DatasetOpts an_data;
  an_data.add_to(analyze);
  std::string an_ckpt, an_out, an_history;
  analyze->add_option("--checkpoint", an_ckpt, "checkpoint.bin path")
      ->required();
  analyze->add_option("--history", an_history,
                      "history.csv for trajectory plots");
  analyze->add_option("--out", an_out, "output directory")->required();

  // ---- gen-synthetic ----
  auto* gen = app.add_subcommand("gen-synthetic",
                                 "generate a biased synthetic dataset");
  std::string gen_out;
  std::vector<std::string> gen_set;
  gen->add_option("--out", gen_out, "bundle output directory")->required();
  gen->add_option("--set", gen_set,
                  "generator key, e.g. --set gamma=1 --set seed=7")
      ->take_all();

  CLI11_PARSE(app, argc, argv);

  if (*train) {
    ConfigHandle cfg;
    check(advdrop_config_create(preset.c_str(), &cfg.ptr));
    if (!config_file.empty()) {
      check(advdrop_config_load_file(cfg.ptr, config_file.c_str()));
    }
    if (!ablation.empty()) {
      check(advdrop_config_set(cfg.ptr, "ablation", ablation.c_str()));
    }
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr,
                     "error: invalid_argument: --set expects key=value, "
                     "got '%s'\n",
                     kv.c_str());
        return ADVDROP_ERR_INVALID_ARGUMENT;
      }
      check(advdrop_config_set(cfg.ptr, kv.substr(0, eq).c_str(),
                               kv.substr(eq + 1).c_str()));
    }
    DatasetHandle data;
    data.ptr = train_data.load();
    if (out_dir.empty()) {
      char seed_buf[32] = "0";
      advdrop_config_get(cfg.ptr, "seed", seed_buf, sizeof(seed_buf));
      out_dir = default_run_dir(seed_buf);
    }
    RunHandle run;
    check(advdrop_train(cfg.ptr, data.ptr, out_dir.c_str(), &run.ptr));
    double rounds = 0, best = 0;
    advdrop_run_metric(run.ptr, "rounds", &rounds);
    advdrop_run_metric(run.ptr, "best_val_ndcg", &best);
    std::printf("run directory: %s\n", out_dir.c_str());
    std::printf("rounds: %d\n", static_cast<int>(rounds));
    if (best == best) std::printf("best validation NDCG: %.4f\n", best);
    return 0;
  }

  if (*eval) {
    RunHandle run;
    check(advdrop_run_open(eval_ckpt.c_str(), &run.ptr));
    DatasetHandle data;
    data.ptr = eval_data.load();
    std::vector<int32_t> ks32(ks.begin(), ks.end());
    const std::string metrics_csv = eval_out + "/metrics.csv";
    const std::string bias_csv = eval_out + "/bias.csv";
    check(advdrop_run_evaluate(run.ptr, data.ptr, ks32.data(), ks32.size(),
                               metrics_csv.c_str(), bias_csv.c_str()));
    std::printf("wrote %s\n", metrics_csv.c_str());
    // echo the report for convenience
    if (FILE* f = std::fopen(metrics_csv.c_str(), "r")) {
      char buf[256];
      while (std::fgets(buf, sizeof(buf), f)) std::fputs(buf, stdout);
      std::fclose(f);
    }
    return 0;
  }

  if (*analyze) {
    RunHandle run;
    check(advdrop_run_open(an_ckpt.c_str(), &run.ptr));
    DatasetHandle data;
    data.ptr = an_data.load();
    check(advdrop_run_analyze(run.ptr, data.ptr, an_out.c_str(),
                              an_history.empty() ? nullptr
                                                 : an_history.c_str()));
    std::printf("analysis bundle in %s\n", an_out.c_str());
    return 0;
  }

  if (*gen) {
    std::string spec;
    for (const auto& kv : gen_set) spec += kv + "\n";
    DatasetHandle data;
    check(advdrop_dataset_generate(spec.empty() ? nullptr : spec.c_str(),
                                   &data.ptr));
    check(advdrop_dataset_save_bundle(data.ptr, gen_out.c_str()));
    int64_t nu = 0, ni = 0, nt = 0, nv = 0, ne = 0;
    advdrop_dataset_counts(data.ptr, &nu, &ni, &nt, &nv, &ne);
    std::printf("bundle in %s: %lld users, %lld items, %lld train / %lld "
                "validation / %lld test interactions\n",
                gen_out.c_str(), static_cast<long long>(nu),
                static_cast<long long>(ni), static_cast<long long>(nt),
                static_cast<long long>(nv), static_cast<long long>(ne));
    return 0;
  }

  return 0;
}
