#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "gridlab/agents.hpp"
#include "gridlab/anneal.hpp"
#include "gridlab/optimizer.hpp"
#include "gridlab/reward.hpp"
#include "gridlab/rollout.hpp"

namespace gridlab {

struct TrainerConfig {
    EnvSpec env;
    InteractionMode mode = InteractionMode::MultiTurn;
    int iterations = 500;
    int prompts_per_iteration = 32;
    int group_size = 8;
    int prompt_pool = 1024;     // draws training seeds from [0, prompt_pool)
    std::uint64_t run_seed = 1; // master seed: prompt sampling and the agent

    int initial_turn_limit = 30;
    long long char_budget_total = 16000;
    long long char_budget_per_turn = 12000;
    std::string system_prompt = "You are a helpful assistant.";

    RewardConfig reward;

    bool anneal_enabled = true;
    int anneal_tau = 100;
    bool anneal_per_prompt = false;

    PolicyKind policy_kind = PolicyKind::TabularSoftmax;
    int feature_dim = 64;
    int chain_limit = 32;
    double policy_lr = 1e-6;
    double critic_lr = 5e-6;
    long long policy_warmup = 20; // iterations of linear ramp
    long long critic_warmup = 50;
    int critic_updates_per_policy_update = 12;
    double gamma = 1.0;
    double lambda = 1.0;

    void validate() const; // throws ConfigError
};

struct IterationMetrics {
    int iteration = 0;
    double success_rate = 0.0;
    double mean_turns = 0.0;
    double mean_N = 0.0;
    double mean_N_eff_ratio = 0.0;
    int L_max = 0;
    double policy_loss = 0.0;
    double value_loss = 0.0;

    std::string to_json_line() const;
};

// Strictly on-policy loop: collect a fresh group-sampled batch, compute
// advantages against the current critic, apply one policy step and several
// critic steps, then advance the turn-limit annealing.
class Trainer {
  public:
    explicit Trainer(TrainerConfig config);

    IterationMetrics run_iteration();
    // Runs the configured number of iterations; when metrics_out is non-null,
    // appends one JSON line per iteration.
    std::vector<IterationMetrics> run(std::ostream* metrics_out);

    PolicyModel& policy() { return model_; }
    const PolicyModel& policy() const { return model_; }
    ValueTable& critic() { return critic_; }
    const AnnealState& anneal() const { return anneal_; }
    PolicyAgent& agent() { return agent_; }
    long long iterations_done() const { return iteration_; }
    int current_turn_limit() const;

  private:
    TrainerConfig config_;
    PolicyModel model_;
    ValueTable critic_;
    PolicyAgent agent_;
    AnnealState anneal_;
    AdamOptimizer policy_adam_;
    AdamOptimizer critic_adam_;
    long long iteration_ = 0;
};

// Versioned flat parameter file: header lines (format tag, config hash,
// iteration, policy shape), then one parameter row per line with hex-float
// values for exact round-trips.
void save_checkpoint(const std::string& path, const PolicyModel& model,
                     const ValueTable& critic, std::uint64_t config_hash,
                     long long iteration);

struct Checkpoint {
    PolicyModel model{PolicyKind::TabularSoftmax, {"?"}};
    ValueTable critic;
    std::uint64_t config_hash = 0;
    long long iteration = 0;
};

Checkpoint load_checkpoint(const std::string& path); // throws IoError

} // namespace gridlab
