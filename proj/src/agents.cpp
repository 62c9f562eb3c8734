#include "gridlab/agents.hpp"

#include <sstream>

#include "gridlab/maze.hpp"
#include "gridlab/sokoban.hpp"
#include "gridlab/taxi.hpp"

namespace gridlab {

namespace {

std::string wrap_response(const std::string& thinking, const std::vector<std::string>& commands) {
    std::ostringstream out;
    out << "<think>" << thinking << "</think><action>";
    for (std::size_t i = 0; i < commands.size(); ++i) {
        if (i > 0) out << "; ";
        out << commands[i];
    }
    out << "</action>";
    return out.str();
}

} // namespace

void RandomAgent::begin_episode(const Environment& env, std::uint64_t nonce) {
    vocabulary_ = env.action_vocabulary();
    rng_ = SplitMix64(SplitMix64::derive(base_seed_, {env.seed(), nonce}));
}

std::string RandomAgent::respond(const AgentRequest& request) {
    (void)request;
    if (vocabulary_.empty()) {
        throw Error(ErrorCode::ConfigError, "random agent used before any episode");
    }
    const std::string& pick = vocabulary_[rng_.below(vocabulary_.size())];
    return wrap_response("Trying an arbitrary command.", {pick});
}

std::string OracleAgent::name() const {
    switch (kind_) {
    case EnvKind::Maze: return "oracle_maze";
    case EnvKind::Sokoban: return "oracle_sokoban";
    case EnvKind::Taxi: return "oracle_taxi";
    }
    return "oracle";
}

void OracleAgent::begin_episode(const Environment& env, std::uint64_t nonce) {
    (void)nonce;
    if (env.kind() != kind_) {
        throw Error(ErrorCode::KindEnvMismatch,
                    std::string("oracle for ") + env_kind_name(kind_) + " cannot play " +
                        env_kind_name(env.kind()));
    }
}

void OracleAgent::begin_turn(const Environment& env) {
    if (env.kind() != kind_) {
        throw Error(ErrorCode::KindEnvMismatch,
                    std::string("oracle for ") + env_kind_name(kind_) + " cannot play " +
                        env_kind_name(env.kind()));
    }
    plan_.clear();
    switch (kind_) {
    case EnvKind::Maze: {
        const auto& state = static_cast<const MazeEnv&>(env).state();
        if (const auto path = maze_shortest_path(state)) {
            for (MazeAction action : *path) plan_.push_back(maze_action_command(action));
        }
        break;
    }
    case EnvKind::Sokoban: {
        const auto& sokoban = static_cast<const SokobanEnv&>(env);
        if (const auto plan = solve_sokoban(sokoban.state())) {
            plan_ = *plan;
        } else if (sokoban.step_count() == 0) {
            plan_ = sokoban.recorded_solution();
        }
        break;
    }
    case EnvKind::Taxi: {
        plan_ = taxi_oracle_plan(static_cast<const TaxiEnv&>(env).state());
        break;
    }
    }
}

std::string OracleAgent::respond(const AgentRequest& request) {
    (void)request;
    if (plan_.empty()) {
        // Solved or unsolvable; hold position so the turn still parses.
        const char* idle = kind_ == EnvKind::Taxi ? "move up" : "no operation";
        return wrap_response("Nothing left to do.", {idle});
    }
    return wrap_response("Planned a complete action sequence to the goal.", plan_);
}

PolicyAgent::PolicyAgent(PolicyModel* model, std::uint64_t seed, PolicyAgentOptions options)
    : model_(model), rng_(seed), options_(options) {
    if (model_ == nullptr) {
        throw Error(ErrorCode::ConfigError, "policy agent needs a model");
    }
    if (options_.chain_limit < 1) {
        throw Error(ErrorCode::ConfigError, "chain limit must be >= 1");
    }
}

PolicyAgent::PolicyAgent(std::uint64_t seed, PolicyAgentOptions options)
    : rng_(seed), options_(options) {
    if (options_.chain_limit < 1) {
        throw Error(ErrorCode::ConfigError, "chain limit must be >= 1");
    }
}

void PolicyAgent::ensure_model(const Environment& env) {
    if (model_ == nullptr) {
        owned_ = std::make_unique<PolicyModel>(PolicyKind::TabularSoftmax,
                                               env.action_vocabulary());
        model_ = owned_.get();
        return;
    }
    if (model_->action_vocabulary() != env.action_vocabulary()) {
        throw Error(ErrorCode::KindEnvMismatch,
                    "policy action vocabulary does not match the environment");
    }
}

void PolicyAgent::begin_episode(const Environment& env, std::uint64_t nonce) {
    (void)nonce;
    ensure_model(env);
    pending_.clear();
}

void PolicyAgent::begin_turn(const Environment& env) {
    ensure_model(env);
    current_key_ = env.canonical_serialize();
}

std::string PolicyAgent::respond(const AgentRequest& request) {
    (void)request;
    if (model_ == nullptr || current_key_.empty()) {
        throw Error(ErrorCode::ConfigError, "policy agent used before any episode");
    }
    const std::vector<std::string>& vocabulary = model_->action_vocabulary();
    std::vector<std::string> commands;
    std::string key = current_key_;
    for (int i = 0; i < options_.chain_limit; ++i) {
        int action;
        if (options_.greedy) {
            const std::vector<double> p = model_->probs(key);
            action = 0;
            for (std::size_t a = 1; a < p.size(); ++a) {
                if (p[a] > p[static_cast<std::size_t>(action)]) action = static_cast<int>(a);
            }
        } else {
            action = model_->sample_action(key, rng_);
        }
        DecisionPoint decision;
        decision.state_key = key;
        decision.action_id = action;
        decision.logprob_behavior = model_->log_prob(key, action);
        pending_.push_back(decision);
        commands.push_back(vocabulary[static_cast<std::size_t>(action)]);

        const auto it = memory_.find(key + '\x1f' + std::to_string(action));
        if (it == memory_.end() || it->second.terminal) break;
        key = it->second.next_key;
    }
    return wrap_response("Consulting the learned action table for this state.", commands);
}

void PolicyAgent::observe_trajectory(const Trajectory& trajectory) {
    // Memorize exact transitions between consecutive decision states; the
    // final decision's outcome is known only when the episode succeeded.
    for (std::size_t i = 0; i < trajectory.decisions.size(); ++i) {
        const DecisionPoint& d = trajectory.decisions[i];
        const std::string key = d.state_key + '\x1f' + std::to_string(d.action_id);
        if (i + 1 < trajectory.decisions.size()) {
            memory_[key] = {trajectory.decisions[i + 1].state_key, false};
        } else if (trajectory.success) {
            memory_[key] = {std::string(), true};
        }
    }
}

std::vector<DecisionPoint> PolicyAgent::drain_decisions() {
    std::vector<DecisionPoint> out = std::move(pending_);
    pending_.clear();
    return out;
}

const char* agent_kind_name(AgentKind kind) {
    switch (kind) {
    case AgentKind::Random: return "random";
    case AgentKind::OracleMaze: return "oracle_maze";
    case AgentKind::OracleSokoban: return "oracle_sokoban";
    case AgentKind::OracleTaxi: return "oracle_taxi";
    case AgentKind::TabularPolicy: return "tabular_policy";
    }
    return "?";
}

AgentKind agent_kind_from_name(const std::string& name) {
    for (AgentKind kind : {AgentKind::Random, AgentKind::OracleMaze, AgentKind::OracleSokoban,
                           AgentKind::OracleTaxi, AgentKind::TabularPolicy}) {
        if (name == agent_kind_name(kind)) return kind;
    }
    throw Error(ErrorCode::ConfigError, "unknown agent: " + name);
}

std::vector<std::string> builtin_agent_names() {
    return {"random", "oracle_maze", "oracle_sokoban", "oracle_taxi", "tabular_policy"};
}

std::unique_ptr<Agent> make_builtin_agent(AgentKind kind, std::uint64_t seed) {
    switch (kind) {
    case AgentKind::Random: return std::make_unique<RandomAgent>(seed);
    case AgentKind::OracleMaze: return std::make_unique<OracleAgent>(EnvKind::Maze);
    case AgentKind::OracleSokoban: return std::make_unique<OracleAgent>(EnvKind::Sokoban);
    case AgentKind::OracleTaxi: return std::make_unique<OracleAgent>(EnvKind::Taxi);
    case AgentKind::TabularPolicy: return std::make_unique<PolicyAgent>(seed);
    }
    throw Error(ErrorCode::ConfigError, "unknown agent kind");
}

} // namespace gridlab
