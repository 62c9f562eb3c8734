#pragma once

#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "gridlab/bridge.hpp"
#include "gridlab/env.hpp"
#include "gridlab/optimizer.hpp"
#include "gridlab/rng.hpp"
#include "gridlab/trajectory.hpp"

namespace gridlab {

// A policy that turns conversation transcripts into raw response text. The
// harness drives the episode lifecycle; in-process agents may use the typed
// environment handles, remote agents see only the transcript.
class Agent {
  public:
    virtual ~Agent() = default;

    virtual std::string name() const = 0;

    // Called once per episode before the first prompt. Oracles bound to a
    // different environment kind throw KindEnvMismatch here.
    virtual void begin_episode(const Environment& env, std::uint64_t nonce) {
        (void)env;
        (void)nonce;
    }

    // Called before each prompt with the live environment.
    virtual void begin_turn(const Environment& env) { (void)env; }

    // Produce the raw response text. Bridge-backed agents may throw
    // Timeout / TransportClosed / IdMismatch.
    virtual std::string respond(const AgentRequest& request) = 0;

    // Post-episode hook; learners mine finished trajectories here.
    virtual void observe_trajectory(const Trajectory& trajectory) { (void)trajectory; }
};

// Uniform draws from the environment's action vocabulary, one command per
// turn. Fully determined by (seed, environment seed, episode nonce).
class RandomAgent final : public Agent {
  public:
    explicit RandomAgent(std::uint64_t seed) : base_seed_(seed), rng_(seed) {}

    std::string name() const override { return "random"; }
    void begin_episode(const Environment& env, std::uint64_t nonce) override;
    std::string respond(const AgentRequest& request) override;

  private:
    std::uint64_t base_seed_;
    SplitMix64 rng_;
    std::vector<std::string> vocabulary_;
};

// Scripted oracles: re-plan an optimal command sequence from the live state
// at each turn and emit the whole plan in a single response (so they succeed
// in one turn in both interaction modes).
class OracleAgent final : public Agent {
  public:
    explicit OracleAgent(EnvKind kind) : kind_(kind) {}

    std::string name() const override;
    void begin_episode(const Environment& env, std::uint64_t nonce) override;
    void begin_turn(const Environment& env) override;
    std::string respond(const AgentRequest& request) override;

  private:
    EnvKind kind_;
    std::vector<std::string> plan_;
};

struct PolicyAgentOptions {
    int chain_limit = 32; // max actions emitted per turn via memorized lookahead
    bool greedy = false;  // argmax instead of sampling (evaluation aid)
};

// Softmax policy over canonical state keys with a memorized transition table:
// after sampling an action whose exact outcome was seen before, the agent
// advances its predicted state and samples again, emitting several commands
// per turn. Predictions come only from observed transitions, so behavior
// log-probabilities stay exact for strictly on-policy updates.
class PolicyAgent final : public Agent {
  public:
    // Shares an externally owned model (the trainer's).
    PolicyAgent(PolicyModel* model, std::uint64_t seed, PolicyAgentOptions options = {});
    // Self-owning: builds a tabular model from the first environment seen.
    explicit PolicyAgent(std::uint64_t seed, PolicyAgentOptions options = {});

    std::string name() const override { return "tabular_policy"; }
    void begin_episode(const Environment& env, std::uint64_t nonce) override;
    void begin_turn(const Environment& env) override;
    std::string respond(const AgentRequest& request) override;
    void observe_trajectory(const Trajectory& trajectory) override;

    PolicyModel* model() { return model_; }

    // Sampling records for the episode in progress (state key, action id,
    // behavior log-probability), in emission order. Clears the buffer.
    std::vector<DecisionPoint> drain_decisions();

    std::size_t memory_size() const { return memory_.size(); }

  private:
    void ensure_model(const Environment& env);

    PolicyModel* model_ = nullptr;
    std::unique_ptr<PolicyModel> owned_;
    SplitMix64 rng_;
    PolicyAgentOptions options_;
    std::string current_key_;
    std::vector<DecisionPoint> pending_;
    struct Transition {
        std::string next_key;
        bool terminal = false;
    };
    std::unordered_map<std::string, Transition> memory_; // key: state \x1f action id
};

// Proxy for an out-of-process agent reached through a transport.
class RemoteAgent final : public Agent {
  public:
    RemoteAgent(std::string label, std::unique_ptr<Transport> transport,
                int timeout_ms = kDefaultAgentTimeoutMs)
        : label_(std::move(label)), transport_(std::move(transport)), timeout_ms_(timeout_ms) {}

    std::string name() const override { return label_; }
    std::string respond(const AgentRequest& request) override {
        return exchange(*transport_, request, timeout_ms_);
    }

  private:
    std::string label_;
    std::unique_ptr<Transport> transport_;
    int timeout_ms_;
};

enum class AgentKind { Random, OracleMaze, OracleSokoban, OracleTaxi, TabularPolicy };

const char* agent_kind_name(AgentKind kind);
AgentKind agent_kind_from_name(const std::string& name); // throws ConfigError
std::vector<std::string> builtin_agent_names();

std::unique_ptr<Agent> make_builtin_agent(AgentKind kind, std::uint64_t seed);

} // namespace gridlab
