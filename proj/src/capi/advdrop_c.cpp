#include "advdrop/advdrop.h"

#include <cmath>
#include <cstring>
#include <string>

#include "core/checkpoint.hpp"
#include "core/config.hpp"
#include "core/data.hpp"
#include "core/run.hpp"
#include "core/version.hpp"

namespace {

thread_local std::string g_last_error;

advdrop_status fail(advdrop_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Maps core exceptions onto status codes.
template <typename Fn>
advdrop_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const advdrop::io_error& e) {
    return fail(ADVDROP_ERR_IO, e.what());
  } catch (const advdrop::parse_error& e) {
    return fail(ADVDROP_ERR_PARSE, e.what());
  } catch (const advdrop::numeric_error& e) {
    return fail(ADVDROP_ERR_NUMERIC, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(ADVDROP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(ADVDROP_ERR_INTERNAL, e.what());
  }
}

advdrop_status require(bool ok, const char* what) {
  if (!ok) return fail(ADVDROP_ERR_INVALID_ARGUMENT, what);
  return ADVDROP_OK;
}

}  // namespace

struct advdrop_config {
  advdrop::TrainConfig cfg;
};

struct advdrop_dataset {
  advdrop::Dataset data;
};

struct advdrop_run {
  advdrop::Checkpoint ckpt;
  std::int32_t rounds = -1;
  double best_val_ndcg = std::nan("");
};

extern "C" {

const char* advdrop_version(void) { return advdrop::kVersion; }

const char* advdrop_status_name(advdrop_status status) {
  switch (status) {
    case ADVDROP_OK:
      return "ok";
    case ADVDROP_ERR_INVALID_ARGUMENT:
      return "invalid_argument";
    case ADVDROP_ERR_IO:
      return "io_error";
    case ADVDROP_ERR_PARSE:
      return "parse_error";
    case ADVDROP_ERR_NUMERIC:
      return "numeric_error";
    case ADVDROP_ERR_INTERNAL:
      return "internal_error";
  }
  return "unknown";
}

const char* advdrop_last_error(void) { return g_last_error.c_str(); }

advdrop_status advdrop_config_create(const char* preset,
                                     advdrop_config** out) {
  if (auto s = require(out != nullptr, "out must not be NULL")) return s;
  *out = nullptr;
  return guarded([&] {
    auto cfg = std::make_unique<advdrop_config>();
    cfg->cfg = advdrop::TrainConfig::preset(preset ? preset : "default");
    *out = cfg.release();
    return ADVDROP_OK;
  });
}

advdrop_status advdrop_config_load_file(advdrop_config* cfg,
                                        const char* path) {
  if (auto s = require(cfg && path, "cfg and path must not be NULL")) return s;
  return guarded([&] {
    cfg->cfg.load_file(path);
    return ADVDROP_OK;
  });
}

advdrop_status advdrop_config_set(advdrop_config* cfg, const char* key,
                                  const char* value) {
  if (auto s = require(cfg && key && value, "NULL argument")) return s;
  return guarded([&] {
    cfg->cfg.set(key, value);
    return ADVDROP_OK;
  });
}

advdrop_status advdrop_config_get(const advdrop_config* cfg, const char* key,
                                  char* buf, size_t buf_size) {
  if (auto s = require(cfg && key && buf && buf_size > 0, "NULL argument")) {
    return s;
  }
  return guarded([&] {
    const std::string v = cfg->cfg.get(key);
    if (v.size() + 1 > buf_size) {
      return fail(ADVDROP_ERR_INVALID_ARGUMENT, "buffer too small");
    }
    std::memcpy(buf, v.c_str(), v.size() + 1);
    return ADVDROP_OK;
  });
}

void advdrop_config_destroy(advdrop_config* cfg) { delete cfg; }

advdrop_status advdrop_dataset_load_bundle(const char* dir,
                                           advdrop_dataset** out) {
  if (auto s = require(dir && out, "NULL argument")) return s;
  *out = nullptr;
  return guarded([&] {
    auto d = std::make_unique<advdrop_dataset>();
    d->data = advdrop::load_bundle(dir);
    *out = d.release();
    return ADVDROP_OK;
  });
}

advdrop_status advdrop_dataset_load_tsv(const char* train_path,
                                        const char* validation_path_or_null,
                                        const char* test_path,
                                        double rating_threshold,
                                        advdrop_dataset** out) {
  if (auto s = require(train_path && test_path && out, "NULL argument")) {
    return s;
  }
  *out = nullptr;
  return guarded([&] {
    auto d = std::make_unique<advdrop_dataset>();
    const auto train = advdrop::load_tsv(train_path, rating_threshold);
    const auto val = validation_path_or_null
                         ? advdrop::load_tsv(validation_path_or_null,
                                             rating_threshold)
                         : std::vector<advdrop::RawPair>{};
    const auto test = advdrop::load_tsv(test_path, rating_threshold);
    d->data = advdrop::assemble_dataset(train, val, test);
    *out = d.release();
    return ADVDROP_OK;
  });
}

advdrop_status advdrop_dataset_load_coat(const char* dir,
                                         advdrop_dataset** out) {
  if (auto s = require(dir && out, "NULL argument")) return s;
  *out = nullptr;
  return guarded([&] {
    auto d = std::make_unique<advdrop_dataset>();
    d->data = advdrop::load_coat(dir);
    *out = d.release();
    return ADVDROP_OK;
  });
}

advdrop_status advdrop_dataset_generate(const char* key_values,
                                        advdrop_dataset** out) {
  if (auto s = require(out != nullptr, "out must not be NULL")) return s;
  *out = nullptr;
  return guarded([&] {
    advdrop::SyntheticSpec spec;
    if (key_values != nullptr) {
      std::string text(key_values);
      std::size_t pos = 0;
      int lineno = 0;
      while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string line = text.substr(
            pos, nl == std::string::npos ? std::string::npos : nl - pos);
        pos = nl == std::string::npos ? text.size() + 1 : nl + 1;
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto trim = [](std::string s) {
          const auto b = s.find_first_not_of(" \t\r");
          const auto e = s.find_last_not_of(" \t\r");
          return b == std::string::npos ? std::string()
                                        : s.substr(b, e - b + 1);
        };
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
          throw advdrop::parse_error("synthetic spec line " +
                                     std::to_string(lineno) +
                                     ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        auto to_i = [&] { return static_cast<std::int32_t>(std::stoll(value)); };
        auto to_d = [&] { return std::stod(value); };
        try {
          if (key == "n_users") spec.n_users = to_i();
          else if (key == "n_items") spec.n_items = to_i();
          else if (key == "latent_dim") spec.latent_dim = to_i();
          else if (key == "gamma") spec.gamma = to_d();
          else if (key == "noise_rate") spec.noise_rate = to_d();
          else if (key == "train_interactions") spec.train_interactions = to_i();
          else if (key == "test_interactions") spec.test_interactions = to_i();
          else if (key == "positive_rate") spec.positive_rate = to_d();
          else if (key == "item_bias_scale") spec.item_bias_scale = to_d();
          else if (key == "n_item_categories") spec.n_item_categories = to_i();
          else if (key == "seed") spec.seed = std::stoull(value);
          else {
            throw advdrop::parse_error(
                "unknown synthetic spec key '" + key +
                "' (valid: n_users, n_items, latent_dim, gamma, noise_rate, "
                "train_interactions, test_interactions, positive_rate, "
                "item_bias_scale, n_item_categories, seed)");
          }
        } catch (const std::invalid_argument&) {
          throw advdrop::parse_error("invalid value '" + value +
                                     "' for synthetic spec key '" + key + "'");
        }
      }
    }
    auto d = std::make_unique<advdrop_dataset>();
    d->data = advdrop::generate_synthetic(spec).dataset;
    *out = d.release();
    return ADVDROP_OK;
  });
}

advdrop_status advdrop_dataset_save_bundle(const advdrop_dataset* data,
                                           const char* dir) {
  if (auto s = require(data && dir, "NULL argument")) return s;
  return guarded([&] {
    advdrop::save_bundle(data->data, dir);
    return ADVDROP_OK;
  });
}

advdrop_status advdrop_dataset_counts(const advdrop_dataset* data,
                                      int64_t* n_users, int64_t* n_items,
                                      int64_t* n_train, int64_t* n_validation,
                                      int64_t* n_test) {
  if (auto s = require(data != nullptr, "data must not be NULL")) return s;
  if (n_users) *n_users = data->data.n_users;
  if (n_items) *n_items = data->data.n_items;
  if (n_train) *n_train = static_cast<int64_t>(data->data.train.size());
  if (n_validation) {
    *n_validation = static_cast<int64_t>(data->data.validation.size());
  }
  if (n_test) *n_test = static_cast<int64_t>(data->data.test.size());
  return ADVDROP_OK;
}

void advdrop_dataset_destroy(advdrop_dataset* data) { delete data; }

advdrop_status advdrop_train(const advdrop_config* cfg,
                             const advdrop_dataset* data, const char* run_dir,
                             advdrop_run** out) {
  if (auto s = require(cfg && data && run_dir, "NULL argument")) return s;
  if (out) *out = nullptr;
  return guarded([&] {
    advdrop::RunArtifacts art =
        advdrop::run_train(cfg->cfg, data->data, run_dir);
    if (out) {
      auto run = std::make_unique<advdrop_run>();
      run->ckpt = advdrop::Checkpoint{art.result.model, art.result.head,
                                      cfg->cfg, art.result.rng_state};
      run->rounds = art.result.rounds;
      run->best_val_ndcg = art.result.best_val_ndcg;
      *out = run.release();
    }
    return ADVDROP_OK;
  });
}

advdrop_status advdrop_run_open(const char* checkpoint_path,
                                advdrop_run** out) {
  if (auto s = require(checkpoint_path && out, "NULL argument")) return s;
  *out = nullptr;
  return guarded([&] {
    auto run = std::make_unique<advdrop_run>();
    run->ckpt = advdrop::load_checkpoint(checkpoint_path);
    *out = run.release();
    return ADVDROP_OK;
  });
}

advdrop_status advdrop_run_evaluate(const advdrop_run* run,
                                    const advdrop_dataset* data,
                                    const int32_t* ks, size_t n_ks,
                                    const char* metrics_csv,
                                    const char* bias_csv) {
  if (auto s = require(run && data && ks && n_ks > 0, "NULL argument")) {
    return s;
  }
  return guarded([&] {
    advdrop::run_evaluate(run->ckpt, data->data,
                          std::vector<std::int32_t>(ks, ks + n_ks),
                          metrics_csv ? metrics_csv : "",
                          bias_csv ? bias_csv : "");
    return ADVDROP_OK;
  });
}

advdrop_status advdrop_run_analyze(const advdrop_run* run,
                                   const advdrop_dataset* data,
                                   const char* out_dir,
                                   const char* history_csv) {
  if (auto s = require(run && data && out_dir, "NULL argument")) return s;
  return guarded([&] {
    advdrop::run_analyze(run->ckpt, data->data, out_dir,
                         history_csv ? history_csv : "");
    return ADVDROP_OK;
  });
}

advdrop_status advdrop_run_metric(const advdrop_run* run, const char* name,
                                  double* out) {
  if (auto s = require(run && name && out, "NULL argument")) return s;
  const std::string key(name);
  if (key == "rounds") {
    *out = run->rounds;
    return ADVDROP_OK;
  }
  if (key == "best_val_ndcg") {
    *out = run->best_val_ndcg;
    return ADVDROP_OK;
  }
  return fail(ADVDROP_ERR_INVALID_ARGUMENT,
              "unknown metric '" + key + "' (valid: rounds, best_val_ndcg)");
}

void advdrop_run_destroy(advdrop_run* run) { delete run; }

}  // extern "C"
