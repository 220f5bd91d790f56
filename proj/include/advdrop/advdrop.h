/*
 * advdrop — general debiasing engine for graph collaborative filtering
 * via adversarial graph dropout.
 *
 * C API over the shared library. All entry points return an
 * advdrop_status; on failure advdrop_last_error() carries a
 * human-readable message for the calling thread. Handles are opaque and
 * owned by the caller through the matching *_destroy function.
 */
#ifndef ADVDROP_H
#define ADVDROP_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ADVDROP_API __declspec(dllexport)
#else
#define ADVDROP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum advdrop_status {
  ADVDROP_OK = 0,
  ADVDROP_ERR_INVALID_ARGUMENT = 1,
  ADVDROP_ERR_IO = 2,
  ADVDROP_ERR_PARSE = 3,
  ADVDROP_ERR_NUMERIC = 4, /* training diverged / non-finite values */
  ADVDROP_ERR_INTERNAL = 5,
} advdrop_status;

typedef struct advdrop_config advdrop_config;
typedef struct advdrop_dataset advdrop_dataset;
typedef struct advdrop_run advdrop_run;

ADVDROP_API const char* advdrop_version(void);
ADVDROP_API const char* advdrop_status_name(advdrop_status status);
/* Message from the most recent failing call on this thread. */
ADVDROP_API const char* advdrop_last_error(void);

/* ---- configuration -------------------------------------------------- */

/* preset: "default", "coat", "yahoo" or "synthetic". */
ADVDROP_API advdrop_status advdrop_config_create(const char* preset,
                                                 advdrop_config** out);
/* Flat key = value file; '#' starts a comment. */
ADVDROP_API advdrop_status advdrop_config_load_file(advdrop_config* cfg,
                                                    const char* path);
ADVDROP_API advdrop_status advdrop_config_set(advdrop_config* cfg,
                                              const char* key,
                                              const char* value);
ADVDROP_API advdrop_status advdrop_config_get(const advdrop_config* cfg,
                                              const char* key, char* buf,
                                              size_t buf_size);
ADVDROP_API void advdrop_config_destroy(advdrop_config* cfg);

/* ---- datasets -------------------------------------------------------- */

ADVDROP_API advdrop_status advdrop_dataset_load_bundle(const char* dir,
                                                       advdrop_dataset** out);
/* user<TAB>item<TAB>rating files; rows with rating >= threshold kept. */
ADVDROP_API advdrop_status advdrop_dataset_load_tsv(
    const char* train_path, const char* validation_path_or_null,
    const char* test_path, double rating_threshold, advdrop_dataset** out);
/* Directory with train.ascii/test.ascii rating matrices (+ optional
 * user_item_features/). */
ADVDROP_API advdrop_status advdrop_dataset_load_coat(const char* dir,
                                                     advdrop_dataset** out);
/* Synthetic biased data; spec is newline-separated key = value pairs:
 * n_users, n_items, latent_dim, gamma, noise_rate, train_interactions,
 * test_interactions, positive_rate, item_bias_scale, n_item_categories,
 * seed. Unspecified keys keep their defaults. */
ADVDROP_API advdrop_status advdrop_dataset_generate(const char* key_values,
                                                    advdrop_dataset** out);
ADVDROP_API advdrop_status advdrop_dataset_save_bundle(
    const advdrop_dataset* data, const char* dir);
ADVDROP_API advdrop_status advdrop_dataset_counts(
    const advdrop_dataset* data, int64_t* n_users, int64_t* n_items,
    int64_t* n_train, int64_t* n_validation, int64_t* n_test);
ADVDROP_API void advdrop_dataset_destroy(advdrop_dataset* data);

/* ---- training and trained runs --------------------------------------- */

/* Trains per the config and writes history.csv, checkpoint.bin and
 * manifest.json into run_dir. out may be NULL if the handle is not
 * needed. */
ADVDROP_API advdrop_status advdrop_train(const advdrop_config* cfg,
                                         const advdrop_dataset* data,
                                         const char* run_dir,
                                         advdrop_run** out);
ADVDROP_API advdrop_status advdrop_run_open(const char* checkpoint_path,
                                            advdrop_run** out);
/* Full-graph (no dropout) inference, ranking metrics at each cutoff in
 * ks, prediction bias per available attribute. Either output path may be
 * NULL to skip that report. */
ADVDROP_API advdrop_status advdrop_run_evaluate(const advdrop_run* run,
                                                const advdrop_dataset* data,
                                                const int32_t* ks,
                                                size_t n_ks,
                                                const char* metrics_csv,
                                                const char* bias_csv);
/* Bias-probability reports, popularity-quartile summary + plot,
 * embedding export, and trajectory plots when a history.csv is given. */
ADVDROP_API advdrop_status advdrop_run_analyze(const advdrop_run* run,
                                               const advdrop_dataset* data,
                                               const char* out_dir,
                                               const char* history_csv);
/* name: "rounds" or "best_val_ndcg" (NaN when no validation ran). */
ADVDROP_API advdrop_status advdrop_run_metric(const advdrop_run* run,
                                              const char* name, double* out);
ADVDROP_API void advdrop_run_destroy(advdrop_run* run);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ADVDROP_H */
