#include "nsic/nsic.h"

#include "nsic/harness.hpp"
#include "nsic/verification.hpp"

#include <fstream>
#include <new>
#include <string>

struct nsic_config {
    nsic::ExperimentConfig cfg;
};

struct nsic_results {
    std::vector<nsic::RunRecord> records;
};

struct nsic_learner {
    nsic::Learner learner;
    int lead_time;
};

namespace {

thread_local std::string last_error;

nsic_status fail(nsic_status code, const std::string& msg) {
    last_error = msg;
    return code;
}

template <class F>
nsic_status guarded(nsic_status error_code, F&& body) {
    try {
        last_error.clear();
        return body();
    } catch (const nsic::Error& e) {
        return fail(error_code, e.what());
    } catch (const std::bad_alloc&) {
        return fail(NSIC_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(NSIC_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(NSIC_ERR_INTERNAL, "unknown error");
    }
}

nsic::InventoryState make_state(double on_hand, const double* pipeline, int lead_time) {
    nsic::InventoryState s;
    s.on_hand = on_hand;
    if (lead_time > 0) {
        if (!pipeline)
            throw nsic::Error("pipeline pointer required when the lead time is positive");
        s.pipeline.assign(pipeline, pipeline + lead_time);
    }
    return s;
}

}  // namespace

extern "C" {

const char* nsic_last_error(void) {
    return last_error.c_str();
}

const char* nsic_version(void) {
    return "1.0.0";
}

nsic_status nsic_config_parse(const char* text, nsic_config** out) {
    if (!text || !out)
        return fail(NSIC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded(NSIC_ERR_CONFIG, [&] {
        *out = new nsic_config{nsic::parse_config(text)};
        return NSIC_OK;
    });
}

nsic_status nsic_config_load(const char* path, nsic_config** out) {
    if (!path || !out)
        return fail(NSIC_ERR_INVALID_ARGUMENT, "null argument");
    std::ifstream probe(path);
    if (!probe)
        return fail(NSIC_ERR_IO, std::string("cannot open config file '") + path + "'");
    return guarded(NSIC_ERR_CONFIG, [&] {
        *out = new nsic_config{nsic::load_config(path)};
        return NSIC_OK;
    });
}

void nsic_config_free(nsic_config* cfg) {
    delete cfg;
}

nsic_status nsic_config_set_replications(nsic_config* cfg, int replications) {
    if (!cfg || replications < 1)
        return fail(NSIC_ERR_INVALID_ARGUMENT, "replications must be >= 1");
    cfg->cfg.replications = replications;
    return NSIC_OK;
}

nsic_status nsic_config_set_seed(nsic_config* cfg, uint64_t seed) {
    if (!cfg)
        return fail(NSIC_ERR_INVALID_ARGUMENT, "null config");
    cfg->cfg.seed = seed;
    return NSIC_OK;
}

nsic_status nsic_config_set_workers(nsic_config* cfg, int workers) {
    if (!cfg || workers < 1)
        return fail(NSIC_ERR_INVALID_ARGUMENT, "workers must be >= 1");
    cfg->cfg.workers = workers;
    return NSIC_OK;
}

nsic_status nsic_config_set_traj_stride(nsic_config* cfg, int stride) {
    if (!cfg || stride < 0)
        return fail(NSIC_ERR_INVALID_ARGUMENT, "trajectory stride must be >= 0");
    cfg->cfg.traj_stride = stride;
    return NSIC_OK;
}

nsic_status nsic_config_set_timing(nsic_config* cfg, int enabled) {
    if (!cfg)
        return fail(NSIC_ERR_INVALID_ARGUMENT, "null config");
    cfg->cfg.timing = enabled != 0;
    return NSIC_OK;
}

int nsic_config_traj_stride(const nsic_config* cfg) {
    return cfg ? cfg->cfg.traj_stride : 0;
}

nsic_status nsic_experiment_run(const nsic_config* cfg, nsic_results** out) {
    if (!cfg || !out)
        return fail(NSIC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded(NSIC_ERR_CONFIG, [&] {
        *out = new nsic_results{nsic::run_experiment(cfg->cfg)};
        return NSIC_OK;
    });
}

size_t nsic_results_count(const nsic_results* res) {
    return res ? res->records.size() : 0;
}

nsic_status nsic_results_get(const nsic_results* res, size_t index, nsic_run_record* out) {
    if (!res || !out)
        return fail(NSIC_ERR_INVALID_ARGUMENT, "null argument");
    if (index >= res->records.size())
        return fail(NSIC_ERR_INVALID_ARGUMENT, "record index out of range");
    const nsic::RunRecord& r = res->records[index];
    out->run_id = r.run_id.c_str();
    out->algorithm = r.algorithm.c_str();
    out->model = nsic::to_string(r.model);
    out->lead_time = r.lead_time;
    out->s_requested = r.s_requested;
    out->s_realized = r.s_realized;
    out->replication = r.replication;
    out->seed = r.seed;
    out->horizon = r.horizon;
    out->dynamic_regret = r.dynamic_regret;
    out->relative_regret_pct = r.relative_regret_pct;
    out->restarts = r.restarts;
    out->epochs = r.epochs;
    out->wall_ms = r.wall_ms;
    out->upper = r.upper;
    return NSIC_OK;
}

nsic_status nsic_results_write(const nsic_results* res, const char* dir, int stride) {
    if (!res || !dir)
        return fail(NSIC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded(NSIC_ERR_IO, [&] {
        nsic::write_outputs(dir, res->records, stride);
        return NSIC_OK;
    });
}

void nsic_results_free(nsic_results* res) {
    delete res;
}

nsic_status nsic_oracle_write(const nsic_config* cfg, const char* path) {
    if (!cfg || !path)
        return fail(NSIC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded(NSIC_ERR_CONFIG, [&] {
        const nsic::OracleTable table = nsic::experiment_oracle(cfg->cfg);
        std::ofstream f(path, std::ios::binary);
        if (!f)
            return fail(NSIC_ERR_IO, std::string("cannot write '") + path + "'");
        table.write(f);
        return f ? NSIC_OK : fail(NSIC_ERR_IO, std::string("write failed for '") + path + "'");
    });
}

nsic_status nsic_selftest(nsic_report_fn report, void* user, int* failures) {
    return guarded(NSIC_ERR_INTERNAL, [&] {
        int bad = 0;
        for (const auto& item : nsic::run_selftest()) {
            if (!item.pass)
                ++bad;
            if (report)
                report(item.name.c_str(), item.pass ? 1 : 0, item.detail.c_str(), user);
        }
        if (failures)
            *failures = bad;
        return NSIC_OK;
    });
}

void nsic_learner_params_default(nsic_learner_params* p, nsic_model model, int lead_time,
                                 int horizon, double upper) {
    if (!p)
        return;
    const nsic::Model m = model == NSIC_BACKLOG ? nsic::Model::Backlog : nsic::Model::LostSales;
    const nsic::Algorithm a = nsic::algorithm_for(m, lead_time);
    const double T = horizon > 0 ? horizon : 1;
    p->model = model;
    p->lead_time = lead_time;
    p->horizon = horizon;
    p->upper = upper;
    p->gamma = nsic::default_gamma(a, upper, lead_time, horizon);
    p->delta = 1.0 / (T * T);
    p->sigma = 1.0;
    p->scale = 1.0;
    p->change_scale = 0.0;
    p->h = 1.0;
    p->b = 49.0;
    p->detect_changes = 1;
}

nsic_status nsic_learner_create(const nsic_learner_params* p, uint64_t seed, nsic_learner** out) {
    if (!p || !out)
        return fail(NSIC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded(NSIC_ERR_INVALID_ARGUMENT, [&] {
        const nsic::Model m = p->model == NSIC_BACKLOG ? nsic::Model::Backlog : nsic::Model::LostSales;
        nsic::AlgoConfig cfg;
        cfg.which = nsic::algorithm_for(m, p->lead_time);
        cfg.conf.delta = p->delta;
        cfg.conf.gamma = p->gamma;
        cfg.conf.sigma = p->sigma;
        cfg.conf.scale = p->scale;
        cfg.conf.change_scale = p->change_scale;
        cfg.conf.horizon = p->horizon;
        cfg.conf.upper = p->upper;
        cfg.conf.lead_time = p->lead_time;
        cfg.conf.cost.h = p->h;
        cfg.conf.cost.b = p->b;
        cfg.detect_changes = p->detect_changes != 0;
        *out = new nsic_learner{nsic::Learner(cfg, seed), p->lead_time};
        return NSIC_OK;
    });
}

void nsic_learner_free(nsic_learner* l) {
    delete l;
}

nsic_status nsic_learner_begin(nsic_learner* l, double on_hand, const double* pipeline,
                               double* level) {
    if (!l || !level)
        return fail(NSIC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded(NSIC_ERR_INVALID_ARGUMENT, [&] {
        *level = l->learner.begin(make_state(on_hand, pipeline, l->lead_time));
        return NSIC_OK;
    });
}

nsic_status nsic_learner_step(nsic_learner* l, int t, double observed, double next_on_hand,
                              const double* next_pipeline, double* level) {
    if (!l || !level)
        return fail(NSIC_ERR_INVALID_ARGUMENT, "null argument");
    return guarded(NSIC_ERR_INVALID_ARGUMENT, [&] {
        const nsic::Observation obs =
            l->learner.config().which == nsic::Algorithm::BL
                ? nsic::Observation{nsic::DemandObservation{observed}}
                : nsic::Observation{nsic::SalesObservation{observed}};
        *level = l->learner.step(t, obs, make_state(next_on_hand, next_pipeline, l->lead_time));
        return NSIC_OK;
    });
}

int nsic_learner_restarts(const nsic_learner* l) {
    return l ? l->learner.episode().restarts : 0;
}

int nsic_learner_epochs(const nsic_learner* l) {
    return l ? l->learner.episode().epochs_total : 0;
}

}  // extern "C"
