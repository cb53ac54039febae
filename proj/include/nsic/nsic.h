/* C interface to the nsic inventory-learning library. */
#ifndef NSIC_NSIC_H
#define NSIC_NSIC_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define NSIC_API __declspec(dllexport)
#else
#define NSIC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum nsic_status {
    NSIC_OK = 0,
    NSIC_ERR_INVALID_ARGUMENT = 1,
    NSIC_ERR_CONFIG = 2,
    NSIC_ERR_IO = 3,
    NSIC_ERR_INTERNAL = 4
} nsic_status;

typedef struct nsic_config nsic_config;
typedef struct nsic_results nsic_results;
typedef struct nsic_learner nsic_learner;

/* Message for the most recent failure on the calling thread ("" if none). */
NSIC_API const char* nsic_last_error(void);
NSIC_API const char* nsic_version(void);

/* Experiment configuration */
NSIC_API nsic_status nsic_config_parse(const char* text, nsic_config** out);
NSIC_API nsic_status nsic_config_load(const char* path, nsic_config** out);
NSIC_API void nsic_config_free(nsic_config* cfg);
NSIC_API nsic_status nsic_config_set_replications(nsic_config* cfg, int replications);
NSIC_API nsic_status nsic_config_set_seed(nsic_config* cfg, uint64_t seed);
NSIC_API nsic_status nsic_config_set_workers(nsic_config* cfg, int workers);
NSIC_API nsic_status nsic_config_set_traj_stride(nsic_config* cfg, int stride);
NSIC_API nsic_status nsic_config_set_timing(nsic_config* cfg, int enabled);
NSIC_API int nsic_config_traj_stride(const nsic_config* cfg);

/* Experiment runs */
typedef struct nsic_run_record {
    const char* run_id;     /* valid while the results handle lives */
    const char* algorithm;
    const char* model;
    int lead_time;
    int s_requested;
    int s_realized;
    int replication;
    uint64_t seed;
    int horizon;
    double dynamic_regret;
    double relative_regret_pct;
    int restarts;
    int epochs;
    double wall_ms;
    double upper;
} nsic_run_record;

NSIC_API nsic_status nsic_experiment_run(const nsic_config* cfg, nsic_results** out);
NSIC_API size_t nsic_results_count(const nsic_results* res);
NSIC_API nsic_status nsic_results_get(const nsic_results* res, size_t index, nsic_run_record* out);
/* Writes runs.csv, summary.csv and (stride > 0) traj_<run_id>.csv into dir. */
NSIC_API nsic_status nsic_results_write(const nsic_results* res, const char* dir, int stride);
NSIC_API void nsic_results_free(nsic_results* res);

/* Oracle table of replication 0 for the first S value. */
NSIC_API nsic_status nsic_oracle_write(const nsic_config* cfg, const char* path);

/* Invariant suite; `report` receives one line per check. Returns the failure
   count through `failures`. */
typedef void (*nsic_report_fn)(const char* name, int pass, const char* detail, void* user);
NSIC_API nsic_status nsic_selftest(nsic_report_fn report, void* user, int* failures);

/* Step-driven learner */
typedef enum nsic_model { NSIC_BACKLOG = 0, NSIC_LOST_SALES = 1 } nsic_model;

typedef struct nsic_learner_params {
    nsic_model model;
    int lead_time;
    int horizon;
    double upper;
    double gamma;
    double delta;
    double sigma;  /* backlog only */
    double scale;
    double change_scale; /* 0 means `scale` */
    double h;
    double b;
    int detect_changes;
} nsic_learner_params;

/* Fills the defaults for a given model, lead time, horizon and U. */
NSIC_API void nsic_learner_params_default(nsic_learner_params* p, nsic_model model, int lead_time,
                                          int horizon, double upper);
NSIC_API nsic_status nsic_learner_create(const nsic_learner_params* p, uint64_t seed,
                                         nsic_learner** out);
NSIC_API void nsic_learner_free(nsic_learner* l);
/* State is on-hand plus `lead_time` pipeline entries, oldest first. */
NSIC_API nsic_status nsic_learner_begin(nsic_learner* l, double on_hand, const double* pipeline,
                                        double* level);
/* `observed` is the demand (backlog) or the sales (lost sales) of period t. */
NSIC_API nsic_status nsic_learner_step(nsic_learner* l, int t, double observed,
                                       double next_on_hand, const double* next_pipeline,
                                       double* level);
NSIC_API int nsic_learner_restarts(const nsic_learner* l);
NSIC_API int nsic_learner_epochs(const nsic_learner* l);

#ifdef __cplusplus
}
#endif

#endif
