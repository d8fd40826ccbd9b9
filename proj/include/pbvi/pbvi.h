#ifndef PBVI_PBVI_H
#define PBVI_PBVI_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PBVI_API __declspec(dllimport)
#if defined(PBVI_BUILDING)
#undef PBVI_API
#define PBVI_API __declspec(dllexport)
#endif
#else
#define PBVI_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pbvi_status {
    PBVI_OK = 0,
    PBVI_ERR_PARSE = 1,
    PBVI_ERR_UNKNOWN_IDENTIFIER = 2,
    PBVI_ERR_MODEL = 3,
    PBVI_ERR_DIMENSION = 4,
    PBVI_ERR_ZERO_LIKELIHOOD = 5,
    PBVI_ERR_SIZE_LIMIT = 6,
    PBVI_ERR_INVALID_ARGUMENT = 7,
    PBVI_ERR_IO = 8,
    PBVI_ERR_INTERNAL = 9
} pbvi_status;

typedef struct pbvi_model pbvi_model;
typedef struct pbvi_policy pbvi_policy;
typedef struct pbvi_solution pbvi_solution;

/* Message for the most recent failure on the calling thread. Never NULL. */
PBVI_API const char* pbvi_last_error(void);
PBVI_API const char* pbvi_status_name(pbvi_status status);

/* Models */

typedef struct pbvi_model_info {
    size_t n_states;
    size_t n_actions;
    size_t n_observations;
    double discount;
    double reward_min;
    double reward_max;
    size_t n_goal_states;
    size_t n_terminal_states;
} pbvi_model_info;

PBVI_API pbvi_status pbvi_model_load_file(const char* path, pbvi_model** out);
PBVI_API pbvi_status pbvi_model_parse(const char* text, size_t length, pbvi_model** out);
/* name is "1d" or "tag". */
PBVI_API pbvi_status pbvi_model_from_domain(const char* name, pbvi_model** out);
PBVI_API pbvi_status pbvi_model_write_file(const pbvi_model* model, const char* path);
PBVI_API pbvi_status pbvi_model_get_info(const pbvi_model* model, pbvi_model_info* info);
/* Copies b0 into out[0..n_states). */
PBVI_API pbvi_status pbvi_model_initial_belief(const pbvi_model* model, double* out, size_t n);
/* Declared action name, or NULL when the model has none or index is out of range. */
PBVI_API const char* pbvi_model_action_name(const pbvi_model* model, size_t index);
PBVI_API void pbvi_model_free(pbvi_model* model);

/* Evaluation */

typedef struct pbvi_eval_protocol {
    size_t n_runs;
    size_t max_steps;
    int reset_on_goal;
    uint64_t seed;
    size_t threads; /* 0: one per hardware thread */
} pbvi_eval_protocol;

typedef struct pbvi_eval_stats {
    double mean_return;
    double ci95;
    double goal_rate;
    double mean_steps;
} pbvi_eval_stats;

PBVI_API pbvi_status pbvi_evaluate(const pbvi_model* model, const pbvi_policy* policy,
                                   const pbvi_eval_protocol* protocol, pbvi_eval_stats* out);

/* Policies */

PBVI_API pbvi_status pbvi_policy_read_file(const pbvi_model* model, const char* path, pbvi_policy** out);
PBVI_API pbvi_status pbvi_policy_write_file(const pbvi_policy* policy, const pbvi_model* model, const char* path);
PBVI_API pbvi_status pbvi_policy_qmdp(const pbvi_model* model, pbvi_policy** out);
PBVI_API pbvi_status pbvi_policy_action(const pbvi_policy* policy, const double* belief, size_t n, size_t* action);
PBVI_API pbvi_status pbvi_policy_value(const pbvi_policy* policy, const double* belief, size_t n, double* value);
PBVI_API size_t pbvi_policy_vector_count(const pbvi_policy* policy);
PBVI_API void pbvi_policy_free(pbvi_policy* policy);

/* Solving */

typedef struct pbvi_solve_config {
    size_t expansions;
    size_t horizon;        /* 0: derive from epsilon */
    double epsilon;        /* <= 0: 1% of the reward range */
    const char* strategy;  /* ra, ssra, ssga, ssea, ger */
    double greedy_epsilon;
    uint64_t seed;
    size_t max_beliefs; /* 0: unlimited */
    size_t threads;     /* 0: one per hardware thread */
    int diagnostics;    /* record GER error and density estimates */
    size_t density_probes;
} pbvi_solve_config;

PBVI_API void pbvi_solve_config_default(pbvi_solve_config* config);

/* Called after every round. `current` is only valid during the call. Return 1
 * after filling *eval to attach evaluation stats to the round, 0 otherwise. */
typedef int (*pbvi_round_callback)(size_t round, const pbvi_policy* current, pbvi_eval_stats* eval, void* user);

typedef struct pbvi_trace_record {
    size_t round;
    size_t beliefs;
    size_t vectors;
    double solve_seconds;
    int has_ger_error;
    double ger_error;
    int has_density;
    double density;
    int has_eval;
    pbvi_eval_stats eval;
} pbvi_trace_record;

PBVI_API pbvi_status pbvi_solve(const pbvi_model* model, const pbvi_solve_config* config,
                                pbvi_round_callback callback, void* user, pbvi_solution** out);
/* Exact value iteration for `steps` backups from the pessimistic start.
 * Fails with PBVI_ERR_SIZE_LIMIT when a backup would generate more than `cap` vectors. */
PBVI_API pbvi_status pbvi_solve_exact(const pbvi_model* model, size_t steps, uint64_t cap, pbvi_policy** out);

/* Borrowed; valid until the solution is freed. */
PBVI_API const pbvi_policy* pbvi_solution_policy(const pbvi_solution* solution);
PBVI_API size_t pbvi_solution_belief_count(const pbvi_solution* solution);
PBVI_API size_t pbvi_solution_horizon(const pbvi_solution* solution);
PBVI_API size_t pbvi_solution_trace_size(const pbvi_solution* solution);
PBVI_API pbvi_status pbvi_solution_trace_record(const pbvi_solution* solution, size_t index, pbvi_trace_record* out);
PBVI_API void pbvi_solution_free(pbvi_solution* solution);

#ifdef __cplusplus
}
#endif

#endif
