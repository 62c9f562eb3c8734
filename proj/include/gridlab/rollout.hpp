#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "gridlab/agents.hpp"
#include "gridlab/env.hpp"
#include "gridlab/reward.hpp"
#include "gridlab/trajectory.hpp"

namespace gridlab {

// Which world to build. size_override customizes the maze board (odd, >= 3)
// for small-scale studies; 0 keeps the variant's dimension.
struct EnvSpec {
    EnvKind kind = EnvKind::Maze;
    Variant variant = Variant::Standard;
    int size_override = 0;
};

// Variant dimensions: maze standard 11, hard 15; sokoban standard 7x7 with
// 2 boxes, hard1 10x10 with 2, hard2 7x7 with 3; taxi standard only.
// Throws UnsupportedVariant for combinations outside that table.
std::unique_ptr<Environment> make_env(const EnvSpec& spec, std::uint64_t seed);

// Training uses even seeds, evaluation odd; variants occupy disjoint index
// blocks so their instance pools never collide.
std::uint64_t variant_seed_offset(Variant variant);
std::uint64_t train_seed(Variant variant, std::uint64_t index);
std::uint64_t eval_seed(Variant variant, std::uint64_t index);

struct EpisodeConfig {
    InteractionMode mode = InteractionMode::MultiTurn;
    int turn_limit = 30;
    long long char_budget_total = 16000;  // ~4k tokens at 4 chars/token
    long long char_budget_per_turn = 12000;
    double budget_stop_fraction = 0.95; // stop before a turn would near the cap
    std::string system_prompt = "You are a helpful assistant.";

    void validate() const; // throws ConfigError
};

// Drive one episode: prompt, parse, execute, repeat until terminal success,
// the turn limit, budget exhaustion, or an agent transport failure. The
// single-turn mode grants the whole budget to one exchange and executes every
// parsed action. Rewards are assembled and distributed over the decision
// records so they sum exactly to R_total.
Trajectory run_episode(Environment& env, Agent& agent, const EpisodeConfig& config,
                       const RewardConfig& reward_config, std::uint64_t nonce = 0,
                       Variant variant = Variant::Standard);

struct EvalSuite {
    EnvSpec spec;
    std::vector<std::uint64_t> seeds;
    int repetitions = 8;
};

// 256 held-out instances by default, disjoint from every training pool.
EvalSuite build_eval_suite(const EnvSpec& spec, int count = 256, int repetitions = 8);

struct EvalReport {
    double mean_success = 0.0;
    double mean_turns = 0.0;
    double mean_effective_ratio = 0.0;
    std::vector<double> per_rep_success;
    long long episodes = 0;
};

// Episodes run prompt-major (all repetitions of a seed together) with
// deterministic nonces. Optionally stream every trajectory into `sink`.
EvalReport evaluate(const EvalSuite& suite, Agent& agent, const EpisodeConfig& config,
                    const RewardConfig& reward_config,
                    std::vector<Trajectory>* sink = nullptr);

// Same contract as evaluate, spread across worker threads. Each worker builds
// its own agent from the factory and owns a contiguous block of instances;
// episodes land in pre-assigned slots, so reports and trajectory order do not
// depend on scheduling.
EvalReport evaluate_parallel(const EvalSuite& suite,
                             const std::function<std::unique_ptr<Agent>()>& agent_factory,
                             const EpisodeConfig& config,
                             const RewardConfig& reward_config, int threads,
                             std::vector<Trajectory>* sink = nullptr);

} // namespace gridlab
