#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "gridlab/agents.hpp"
#include "gridlab/bridge.hpp"
#include "gridlab/rollout.hpp"
#include "gridlab/trainer.hpp"

namespace gridlab {

// How a run chooses its agent: one of the builtin names, or a remote process
// reached through a transport address ("exec:<command>" or "tcp:host:port").
struct AgentSpec {
    std::string name = "random";
    std::uint64_t seed = 7;
    std::string address;                        // non-empty selects the remote agent
    int timeout_ms = kDefaultAgentTimeoutMs;
    int chain_limit = 32;                       // policy agents only
    bool greedy = false;                        // policy agents only
};

struct EvalSpec {
    int count = 256;
    int repetitions = 8;
};

struct TrainSpec {
    int iterations = 500;
    int prompts_per_iteration = 32;
    int group_size = 8;
    int prompt_pool = 1024;
    std::uint64_t run_seed = 1;
    std::string policy_kind = "tabular_softmax";
    int feature_dim = 64;
    int chain_limit = 32;
    double policy_lr = 1e-6;
    double critic_lr = 5e-6;
    long long policy_warmup = 20;
    long long critic_warmup = 50;
    int critic_updates_per_policy_update = 12;
    double gamma = 1.0;
    double lambda = 1.0;
    bool anneal_enabled = true;
    int anneal_tau = 100;
    bool anneal_per_prompt = false;
};

// The single configuration document shared by every subcommand. Defaults are
// usable as-is; a JSON file overlays them and command-line flags overlay the
// file.
struct RunConfig {
    EnvSpec env{EnvKind::Maze, Variant::Standard, 0};
    InteractionMode mode = InteractionMode::MultiTurn;
    AgentSpec agent;
    EpisodeConfig episode;
    RewardConfig reward;
    TrainSpec train;
    EvalSpec eval;
    int parallelism = 1;
};

// Canonical JSON text for a config (stable key order), and its FNV-1a hash as
// recorded in checkpoint headers.
std::string run_config_to_json_text(const RunConfig& config);
std::uint64_t run_config_hash(const RunConfig& config);

// Strict parsing: unknown keys and wrong value types are ConfigError.
RunConfig run_config_from_json_text(const std::string& text);
RunConfig load_run_config(const std::string& path); // IoError on unreadable files

TrainerConfig make_trainer_config(const RunConfig& config);

// Instantiate the configured agent. Remote agents open their transport here.
std::unique_ptr<Agent> make_agent(const AgentSpec& spec);

} // namespace gridlab
