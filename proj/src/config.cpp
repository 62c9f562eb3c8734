#include "gridlab/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gridlab {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void bad_config(const std::string& what) {
    throw Error(ErrorCode::ConfigError, "config: " + what);
}

// Rejects unknown keys so typos never silently fall back to defaults.
void check_keys(const json& object, const std::string& where,
                std::initializer_list<const char*> allowed) {
    if (!object.is_object()) bad_config(where + " must be a JSON object");
    for (const auto& [key, value] : object.items()) {
        (void)value;
        bool known = false;
        for (const char* name : allowed) {
            if (key == name) {
                known = true;
                break;
            }
        }
        if (!known) bad_config("unknown key '" + where + "." + key + "'");
    }
}

template <typename T>
void read_field(const json& object, const std::string& where, const char* key, T& out) {
    const auto it = object.find(key);
    if (it == object.end()) return;
    try {
        out = it->get<T>();
    } catch (const json::exception&) {
        bad_config("bad value for '" + where + "." + std::string(key) + "'");
    }
}

void read_env(const json& object, EnvSpec& env) {
    check_keys(object, "env", {"kind", "variant", "size"});
    std::string kind = env_kind_name(env.kind);
    std::string variant = variant_name(env.variant);
    read_field(object, "env", "kind", kind);
    read_field(object, "env", "variant", variant);
    read_field(object, "env", "size", env.size_override);
    env.kind = env_kind_from_name(kind);
    env.variant = variant_from_name(variant);
    if (env.size_override < 0) bad_config("env.size must be >= 0");
}

void read_agent(const json& object, AgentSpec& agent) {
    check_keys(object, "agent",
               {"name", "seed", "address", "timeout_ms", "chain_limit", "greedy"});
    read_field(object, "agent", "name", agent.name);
    read_field(object, "agent", "seed", agent.seed);
    read_field(object, "agent", "address", agent.address);
    read_field(object, "agent", "timeout_ms", agent.timeout_ms);
    read_field(object, "agent", "chain_limit", agent.chain_limit);
    read_field(object, "agent", "greedy", agent.greedy);
}

void read_episode(const json& object, EpisodeConfig& episode) {
    check_keys(object, "episode",
               {"turn_limit", "char_budget_total", "char_budget_per_turn",
                "budget_stop_fraction", "system_prompt"});
    read_field(object, "episode", "turn_limit", episode.turn_limit);
    read_field(object, "episode", "char_budget_total", episode.char_budget_total);
    read_field(object, "episode", "char_budget_per_turn", episode.char_budget_per_turn);
    read_field(object, "episode", "budget_stop_fraction", episode.budget_stop_fraction);
    read_field(object, "episode", "system_prompt", episode.system_prompt);
}

void read_reward(const json& object, RewardConfig& reward) {
    check_keys(object, "reward",
               {"outcome_success", "format_penalty", "invalid_action_penalty",
                "step_penalty", "rescaling_enabled"});
    read_field(object, "reward", "outcome_success", reward.outcome_success);
    read_field(object, "reward", "format_penalty", reward.format_penalty);
    read_field(object, "reward", "invalid_action_penalty", reward.invalid_action_penalty);
    read_field(object, "reward", "step_penalty", reward.step_penalty);
    read_field(object, "reward", "rescaling_enabled", reward.rescaling_enabled);
}

void read_train(const json& object, TrainSpec& train) {
    check_keys(object, "train",
               {"iterations", "prompts_per_iteration", "group_size", "prompt_pool",
                "run_seed", "policy_kind", "feature_dim", "chain_limit", "policy_lr",
                "critic_lr", "policy_warmup", "critic_warmup",
                "critic_updates_per_policy_update", "gamma", "lambda", "anneal_enabled",
                "anneal_tau", "anneal_per_prompt"});
    read_field(object, "train", "iterations", train.iterations);
    read_field(object, "train", "prompts_per_iteration", train.prompts_per_iteration);
    read_field(object, "train", "group_size", train.group_size);
    read_field(object, "train", "prompt_pool", train.prompt_pool);
    read_field(object, "train", "run_seed", train.run_seed);
    read_field(object, "train", "policy_kind", train.policy_kind);
    read_field(object, "train", "feature_dim", train.feature_dim);
    read_field(object, "train", "chain_limit", train.chain_limit);
    read_field(object, "train", "policy_lr", train.policy_lr);
    read_field(object, "train", "critic_lr", train.critic_lr);
    read_field(object, "train", "policy_warmup", train.policy_warmup);
    read_field(object, "train", "critic_warmup", train.critic_warmup);
    read_field(object, "train", "critic_updates_per_policy_update",
               train.critic_updates_per_policy_update);
    read_field(object, "train", "gamma", train.gamma);
    read_field(object, "train", "lambda", train.lambda);
    read_field(object, "train", "anneal_enabled", train.anneal_enabled);
    read_field(object, "train", "anneal_tau", train.anneal_tau);
    read_field(object, "train", "anneal_per_prompt", train.anneal_per_prompt);
}

void read_eval(const json& object, EvalSpec& eval) {
    check_keys(object, "eval", {"count", "repetitions"});
    read_field(object, "eval", "count", eval.count);
    read_field(object, "eval", "repetitions", eval.repetitions);
    if (eval.count < 1) bad_config("eval.count must be >= 1");
    if (eval.repetitions < 1) bad_config("eval.repetitions must be >= 1");
}

} // namespace

std::string run_config_to_json_text(const RunConfig& config) {
    ordered_json j;
    j["env"] = {{"kind", env_kind_name(config.env.kind)},
                {"variant", variant_name(config.env.variant)},
                {"size", config.env.size_override}};
    j["mode"] = interaction_mode_name(config.mode);
    j["agent"] = {{"name", config.agent.name},
                  {"seed", config.agent.seed},
                  {"address", config.agent.address},
                  {"timeout_ms", config.agent.timeout_ms},
                  {"chain_limit", config.agent.chain_limit},
                  {"greedy", config.agent.greedy}};
    j["episode"] = {{"turn_limit", config.episode.turn_limit},
                    {"char_budget_total", config.episode.char_budget_total},
                    {"char_budget_per_turn", config.episode.char_budget_per_turn},
                    {"budget_stop_fraction", config.episode.budget_stop_fraction},
                    {"system_prompt", config.episode.system_prompt}};
    j["reward"] = {{"outcome_success", config.reward.outcome_success},
                   {"format_penalty", config.reward.format_penalty},
                   {"invalid_action_penalty", config.reward.invalid_action_penalty},
                   {"step_penalty", config.reward.step_penalty},
                   {"rescaling_enabled", config.reward.rescaling_enabled}};
    j["train"] = {{"iterations", config.train.iterations},
                  {"prompts_per_iteration", config.train.prompts_per_iteration},
                  {"group_size", config.train.group_size},
                  {"prompt_pool", config.train.prompt_pool},
                  {"run_seed", config.train.run_seed},
                  {"policy_kind", config.train.policy_kind},
                  {"feature_dim", config.train.feature_dim},
                  {"chain_limit", config.train.chain_limit},
                  {"policy_lr", config.train.policy_lr},
                  {"critic_lr", config.train.critic_lr},
                  {"policy_warmup", config.train.policy_warmup},
                  {"critic_warmup", config.train.critic_warmup},
                  {"critic_updates_per_policy_update",
                   config.train.critic_updates_per_policy_update},
                  {"gamma", config.train.gamma},
                  {"lambda", config.train.lambda},
                  {"anneal_enabled", config.train.anneal_enabled},
                  {"anneal_tau", config.train.anneal_tau},
                  {"anneal_per_prompt", config.train.anneal_per_prompt}};
    j["eval"] = {{"count", config.eval.count}, {"repetitions", config.eval.repetitions}};
    j["parallelism"] = config.parallelism;
    return j.dump(2);
}

std::uint64_t run_config_hash(const RunConfig& config) {
    const std::string text = run_config_to_json_text(config);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    return h;
}

RunConfig run_config_from_json_text(const std::string& text) {
    json document;
    try {
        document = json::parse(text);
    } catch (const json::exception& e) {
        bad_config(std::string("not valid JSON: ") + e.what());
    }
    check_keys(document, "",
               {"env", "mode", "agent", "episode", "reward", "train", "eval",
                "parallelism"});

    RunConfig config;
    if (document.contains("env")) read_env(document["env"], config.env);
    if (document.contains("mode")) {
        std::string mode;
        read_field(document, "", "mode", mode);
        config.mode = interaction_mode_from_name(mode);
    }
    if (document.contains("agent")) read_agent(document["agent"], config.agent);
    if (document.contains("episode")) read_episode(document["episode"], config.episode);
    if (document.contains("reward")) read_reward(document["reward"], config.reward);
    if (document.contains("train")) read_train(document["train"], config.train);
    if (document.contains("eval")) read_eval(document["eval"], config.eval);
    read_field(document, "", "parallelism", config.parallelism);
    if (config.parallelism < 1) bad_config("parallelism must be >= 1");
    return config;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "config: cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return run_config_from_json_text(text.str());
}

TrainerConfig make_trainer_config(const RunConfig& config) {
    TrainerConfig trainer;
    trainer.env = config.env;
    trainer.mode = config.mode;
    trainer.iterations = config.train.iterations;
    trainer.prompts_per_iteration = config.train.prompts_per_iteration;
    trainer.group_size = config.train.group_size;
    trainer.prompt_pool = config.train.prompt_pool;
    trainer.run_seed = config.train.run_seed;
    trainer.initial_turn_limit = config.episode.turn_limit;
    trainer.char_budget_total = config.episode.char_budget_total;
    trainer.char_budget_per_turn = config.episode.char_budget_per_turn;
    trainer.system_prompt = config.episode.system_prompt;
    trainer.reward = config.reward;
    trainer.anneal_enabled = config.train.anneal_enabled;
    trainer.anneal_tau = config.train.anneal_tau;
    trainer.anneal_per_prompt = config.train.anneal_per_prompt;
    if (config.train.policy_kind == "tabular_softmax") {
        trainer.policy_kind = PolicyKind::TabularSoftmax;
    } else if (config.train.policy_kind == "linear_softmax") {
        trainer.policy_kind = PolicyKind::LinearSoftmax;
    } else {
        bad_config("train.policy_kind must be tabular_softmax or linear_softmax");
    }
    trainer.feature_dim = config.train.feature_dim;
    trainer.chain_limit = config.train.chain_limit;
    trainer.policy_lr = config.train.policy_lr;
    trainer.critic_lr = config.train.critic_lr;
    trainer.policy_warmup = config.train.policy_warmup;
    trainer.critic_warmup = config.train.critic_warmup;
    trainer.critic_updates_per_policy_update = config.train.critic_updates_per_policy_update;
    trainer.gamma = config.train.gamma;
    trainer.lambda = config.train.lambda;
    return trainer;
}

std::unique_ptr<Agent> make_agent(const AgentSpec& spec) {
    if (!spec.address.empty()) {
        return std::make_unique<RemoteAgent>("remote", open_transport(spec.address),
                                             spec.timeout_ms);
    }
    const AgentKind kind = agent_kind_from_name(spec.name);
    if (kind == AgentKind::TabularPolicy) {
        PolicyAgentOptions options;
        options.chain_limit = spec.chain_limit;
        options.greedy = spec.greedy;
        return std::make_unique<PolicyAgent>(spec.seed, options);
    }
    return make_builtin_agent(kind, spec.seed);
}

} // namespace gridlab
