#include "pbvi/pbvi.h"

#include <new>
#include <string>

#include "pbvi/domains.hpp"
#include "pbvi/errors.hpp"
#include "pbvi/exact_vi.hpp"
#include "pbvi/pomdp_file.hpp"
#include "pbvi/solver.hpp"

struct pbvi_model {
    pbvi::PomdpModel model;
};

struct pbvi_policy {
    pbvi::ValueFunction vf;
};

struct pbvi_solution {
    pbvi_policy policy;
    std::size_t beliefs;
    std::size_t horizon;
    std::vector<pbvi::TraceRecord> trace;
};

namespace {

thread_local std::string lastError;

pbvi_status fail(pbvi_status status, std::string message) {
    lastError = std::move(message);
    return status;
}

template <class Fn>
pbvi_status guarded(Fn&& fn) {
    try {
        fn();
        return PBVI_OK;
    } catch (const pbvi::UnknownIdentifier& e) {
        return fail(PBVI_ERR_UNKNOWN_IDENTIFIER, e.what());
    } catch (const pbvi::ParseError& e) {
        return fail(PBVI_ERR_PARSE, e.what());
    } catch (const pbvi::ModelError& e) {
        return fail(PBVI_ERR_MODEL, e.what());
    } catch (const pbvi::DimensionMismatch& e) {
        return fail(PBVI_ERR_DIMENSION, e.what());
    } catch (const pbvi::ZeroLikelihood& e) {
        return fail(PBVI_ERR_ZERO_LIKELIHOOD, e.what());
    } catch (const pbvi::SizeLimitExceeded& e) {
        return fail(PBVI_ERR_SIZE_LIMIT, e.what());
    } catch (const pbvi::InvalidArgument& e) {
        return fail(PBVI_ERR_INVALID_ARGUMENT, e.what());
    } catch (const pbvi::IoError& e) {
        return fail(PBVI_ERR_IO, e.what());
    } catch (const std::bad_alloc&) {
        return fail(PBVI_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(PBVI_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(PBVI_ERR_INTERNAL, "unknown failure");
    }
}

void require(const void* p, const char* what) {
    if (!p) throw pbvi::InvalidArgument(std::string(what) + " is null");
}

pbvi::Belief belief_from(const double* probs, std::size_t n, std::size_t nStates) {
    require(probs, "belief");
    if (n != nStates) throw pbvi::DimensionMismatch("belief has " + std::to_string(n) + " entries, expected " +
                                                    std::to_string(nStates));
    return pbvi::Belief(std::vector<double>(probs, probs + n));
}

pbvi_eval_stats to_c(const pbvi::PolicyStats& s) {
    return {s.meanDiscountedReturn, s.ci95, s.goalRate, s.meanSteps};
}

}  // namespace

extern "C" {

const char* pbvi_last_error(void) { return lastError.c_str(); }

const char* pbvi_status_name(pbvi_status status) {
    switch (status) {
        case PBVI_OK: return "ok";
        case PBVI_ERR_PARSE: return "parse error";
        case PBVI_ERR_UNKNOWN_IDENTIFIER: return "unknown identifier";
        case PBVI_ERR_MODEL: return "model error";
        case PBVI_ERR_DIMENSION: return "dimension mismatch";
        case PBVI_ERR_ZERO_LIKELIHOOD: return "zero likelihood";
        case PBVI_ERR_SIZE_LIMIT: return "size limit exceeded";
        case PBVI_ERR_INVALID_ARGUMENT: return "invalid argument";
        case PBVI_ERR_IO: return "i/o error";
        case PBVI_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

pbvi_status pbvi_model_load_file(const char* path, pbvi_model** out) {
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new pbvi_model{pbvi::load_pomdp_file(path)};
    });
}

pbvi_status pbvi_model_parse(const char* text, size_t length, pbvi_model** out) {
    return guarded([&] {
        require(text, "text");
        require(out, "out");
        *out = new pbvi_model{pbvi::parse_pomdp(std::string_view(text, length))};
    });
}

pbvi_status pbvi_model_from_domain(const char* name, pbvi_model** out) {
    return guarded([&] {
        require(name, "name");
        require(out, "out");
        const std::string_view n(name);
        if (n == "1d") *out = new pbvi_model{pbvi::make_1d()};
        else if (n == "tag") *out = new pbvi_model{pbvi::make_tag()};
        else throw pbvi::InvalidArgument("unknown domain '" + std::string(n) + "'");
    });
}

pbvi_status pbvi_model_write_file(const pbvi_model* model, const char* path) {
    return guarded([&] {
        require(model, "model");
        require(path, "path");
        pbvi::write_text_file(path, pbvi::write_pomdp(model->model));
    });
}

pbvi_status pbvi_model_get_info(const pbvi_model* model, pbvi_model_info* info) {
    return guarded([&] {
        require(model, "model");
        require(info, "info");
        const pbvi::PomdpModel& m = model->model;
        *info = {m.nStates(),    m.nActions(),    m.nObservations(),
                 m.discount(),   m.rewardMin(),   m.rewardMax(),
                 m.data().goalStates.size(), m.data().terminalStates.size()};
    });
}

pbvi_status pbvi_model_initial_belief(const pbvi_model* model, double* out, size_t n) {
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        const pbvi::Belief& b = model->model.initialBelief();
        if (n != b.size()) throw pbvi::DimensionMismatch("buffer length does not match the state count");
        std::copy(b.probs().begin(), b.probs().end(), out);
    });
}

const char* pbvi_model_action_name(const pbvi_model* model, size_t index) {
    if (!model) return nullptr;
    const auto& names = model->model.data().actionNames;
    return index < names.size() ? names[index].c_str() : nullptr;
}

void pbvi_model_free(pbvi_model* model) { delete model; }

pbvi_status pbvi_evaluate(const pbvi_model* model, const pbvi_policy* policy, const pbvi_eval_protocol* protocol,
                          pbvi_eval_stats* out) {
    return guarded([&] {
        require(model, "model");
        require(policy, "policy");
        require(protocol, "protocol");
        require(out, "out");
        if (policy->vf.nStates() != model->model.nStates())
            throw pbvi::DimensionMismatch("policy and model disagree on the state count");
        const pbvi::EvalProtocol p{protocol->n_runs, protocol->max_steps, protocol->reset_on_goal != 0,
                                   protocol->seed, protocol->threads};
        *out = to_c(pbvi::evaluate(model->model, pbvi::greedy_policy(policy->vf), p));
    });
}

pbvi_status pbvi_policy_read_file(const pbvi_model* model, const char* path, pbvi_policy** out) {
    return guarded([&] {
        require(model, "model");
        require(path, "path");
        require(out, "out");
        *out = new pbvi_policy{pbvi::read_policy(pbvi::read_text_file(path), model->model)};
    });
}

pbvi_status pbvi_policy_write_file(const pbvi_policy* policy, const pbvi_model* model, const char* path) {
    return guarded([&] {
        require(policy, "policy");
        require(model, "model");
        require(path, "path");
        pbvi::write_text_file(path, pbvi::write_policy(policy->vf, model->model));
    });
}

pbvi_status pbvi_policy_qmdp(const pbvi_model* model, pbvi_policy** out) {
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        *out = new pbvi_policy{pbvi::qmdp_value_function(model->model)};
    });
}

pbvi_status pbvi_policy_action(const pbvi_policy* policy, const double* belief, size_t n, size_t* action) {
    return guarded([&] {
        require(policy, "policy");
        require(action, "action");
        *action = pbvi::greedy_action(policy->vf, belief_from(belief, n, policy->vf.nStates()));
    });
}

pbvi_status pbvi_policy_value(const pbvi_policy* policy, const double* belief, size_t n, double* value) {
    return guarded([&] {
        require(policy, "policy");
        require(value, "value");
        *value = pbvi::value_at(policy->vf, belief_from(belief, n, policy->vf.nStates())).value;
    });
}

size_t pbvi_policy_vector_count(const pbvi_policy* policy) { return policy ? policy->vf.size() : 0; }

void pbvi_policy_free(pbvi_policy* policy) { delete policy; }

void pbvi_solve_config_default(pbvi_solve_config* config) {
    if (!config) return;
    *config = {0, 0, 0.0, "ger", 0.1, 0, 0, 1, 0, 256};
}

pbvi_status pbvi_solve(const pbvi_model* model, const pbvi_solve_config* config, pbvi_round_callback callback,
                       void* user, pbvi_solution** out) {
    return guarded([&] {
        require(model, "model");
        require(config, "config");
        require(out, "out");
        pbvi::SolveConfig c;
        c.expansions = config->expansions;
        if (config->horizon > 0) c.horizon = config->horizon;
        if (config->epsilon > 0.0) c.epsilon = config->epsilon;
        const auto strategy = pbvi::parse_strategy(config->strategy ? config->strategy : "ger");
        if (!strategy) throw pbvi::InvalidArgument("unknown strategy '" + std::string(config->strategy) + "'");
        c.strategy = *strategy;
        c.greedyEpsilon = config->greedy_epsilon;
        c.seed = config->seed;
        c.maxBeliefs = config->max_beliefs == 0 ? pbvi::kNoLimit : config->max_beliefs;
        c.threads = config->threads;
        c.diagnostics = config->diagnostics != 0;
        c.densityProbes = config->density_probes;
        if (callback) {
            c.onRound = [&](std::size_t round, const pbvi::ValueFunction& vf) -> std::optional<pbvi::PolicyStats> {
                const pbvi_policy current{vf};
                pbvi_eval_stats stats{};
                if (!callback(round, &current, &stats, user)) return std::nullopt;
                return pbvi::PolicyStats{stats.mean_return, stats.ci95, stats.goal_rate, stats.mean_steps};
            };
        }
        pbvi::SolveResult r = pbvi::pbvi_main(model->model, c);
        *out = new pbvi_solution{{std::move(r.valueFunction)}, r.beliefs.size(), r.horizon, std::move(r.trace)};
    });
}

pbvi_status pbvi_solve_exact(const pbvi_model* model, size_t steps, uint64_t cap, pbvi_policy** out) {
    return guarded([&] {
        require(model, "model");
        require(out, "out");
        pbvi::ValueFunction vf = pbvi::pessimistic_value_function(model->model);
        for (std::size_t t = 0; t < steps; ++t) vf = pbvi::exact_backup(model->model, vf, cap).valueFunction;
        *out = new pbvi_policy{std::move(vf)};
    });
}

const pbvi_policy* pbvi_solution_policy(const pbvi_solution* solution) {
    return solution ? &solution->policy : nullptr;
}

size_t pbvi_solution_belief_count(const pbvi_solution* solution) { return solution ? solution->beliefs : 0; }

size_t pbvi_solution_horizon(const pbvi_solution* solution) { return solution ? solution->horizon : 0; }

size_t pbvi_solution_trace_size(const pbvi_solution* solution) { return solution ? solution->trace.size() : 0; }

pbvi_status pbvi_solution_trace_record(const pbvi_solution* solution, size_t index, pbvi_trace_record* out) {
    return guarded([&] {
        require(solution, "solution");
        require(out, "out");
        if (index >= solution->trace.size()) throw pbvi::InvalidArgument("trace index out of range");
        const pbvi::TraceRecord& r = solution->trace[index];
        *out = {r.round,
                r.beliefs,
                r.vectors,
                r.solveSeconds,
                r.gerError.has_value(),
                r.gerError.value_or(0.0),
                r.density.has_value(),
                r.density.value_or(0.0),
                r.eval.has_value(),
                r.eval ? to_c(*r.eval) : pbvi_eval_stats{}};
    });
}

void pbvi_solution_free(pbvi_solution* solution) { delete solution; }

}  // extern "C"
