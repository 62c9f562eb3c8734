#include "gridlab/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>
#include <utility>

#include <json.hpp>

namespace gridlab {

void TrainerConfig::validate() const {
    std::ostringstream why;
    if (iterations < 1) why << "iterations must be >= 1; ";
    if (prompts_per_iteration < 1) why << "prompts_per_iteration must be >= 1; ";
    if (group_size < 1) why << "group_size must be >= 1; ";
    if (prompt_pool < 1) why << "prompt_pool must be >= 1; ";
    if (initial_turn_limit < 1) why << "initial_turn_limit must be >= 1; ";
    if (char_budget_total < 1) why << "char_budget_total must be >= 1; ";
    if (char_budget_per_turn < 1) why << "char_budget_per_turn must be >= 1; ";
    if (anneal_tau < 1) why << "anneal_tau must be >= 1; ";
    if (feature_dim < 1) why << "feature_dim must be >= 1; ";
    if (chain_limit < 1) why << "chain_limit must be >= 1; ";
    if (!(policy_lr > 0.0)) why << "policy_lr must be positive; ";
    if (!(critic_lr > 0.0)) why << "critic_lr must be positive; ";
    if (policy_warmup < 0) why << "policy_warmup must be >= 0; ";
    if (critic_warmup < 0) why << "critic_warmup must be >= 0; ";
    if (critic_updates_per_policy_update < 0)
        why << "critic_updates_per_policy_update must be >= 0; ";
    if (!(gamma > 0.0 && gamma <= 1.0)) why << "gamma must be in (0, 1]; ";
    if (!(lambda >= 0.0 && lambda <= 1.0)) why << "lambda must be in [0, 1]; ";
    const std::string text = why.str();
    if (!text.empty()) throw Error(ErrorCode::ConfigError, "trainer config: " + text);
    reward.validate();
}

std::string IterationMetrics::to_json_line() const {
    nlohmann::ordered_json j;
    j["iteration"] = iteration;
    j["success_rate"] = success_rate;
    j["mean_turns"] = mean_turns;
    j["mean_N"] = mean_N;
    j["mean_N_eff_ratio"] = mean_N_eff_ratio;
    j["L_max"] = L_max;
    j["losses"] = nlohmann::ordered_json{{"policy", policy_loss}, {"value", value_loss}};
    return j.dump();
}

namespace {

TrainerConfig validated(TrainerConfig config) {
    config.validate();
    return config;
}

PolicyModel build_model(const TrainerConfig& config) {
    const auto probe = make_env(config.env, train_seed(config.env.variant, 0));
    return PolicyModel(config.policy_kind, probe->action_vocabulary(), config.feature_dim);
}

AnnealState build_anneal(const TrainerConfig& config) {
    AnnealConfig anneal;
    anneal.initial_L_max = config.initial_turn_limit;
    anneal.tau = config.anneal_tau;
    anneal.per_prompt_mean = config.anneal_per_prompt;
    return make_anneal_state(anneal);
}

} // namespace

Trainer::Trainer(TrainerConfig config)
    : config_(validated(std::move(config))),
      model_(build_model(config_)),
      critic_(),
      agent_(&model_,
             SplitMix64::derive(config_.run_seed, {SplitMix64::hash_tag("agent")}),
             PolicyAgentOptions{config_.chain_limit, false}),
      anneal_(build_anneal(config_)),
      policy_adam_(),
      critic_adam_() {}

int Trainer::current_turn_limit() const {
    return config_.anneal_enabled ? anneal_.L_max : config_.initial_turn_limit;
}

IterationMetrics Trainer::run_iteration() {
    iteration_ += 1;

    EpisodeConfig episode;
    episode.mode = config_.mode;
    episode.turn_limit = current_turn_limit();
    episode.char_budget_total = config_.char_budget_total;
    episode.char_budget_per_turn = config_.char_budget_per_turn;
    episode.system_prompt = config_.system_prompt;

    struct Sample {
        Trajectory trajectory;
        int pool_index = 0;
    };
    std::vector<Sample> batch;
    batch.reserve(static_cast<std::size_t>(config_.prompts_per_iteration) *
                  static_cast<std::size_t>(config_.group_size));

    for (int prompt = 0; prompt < config_.prompts_per_iteration; ++prompt) {
        SplitMix64 draw(SplitMix64::derive(
            config_.run_seed, {SplitMix64::hash_tag("batch"),
                               static_cast<std::uint64_t>(iteration_),
                               static_cast<std::uint64_t>(prompt)}));
        const int pool_index =
            static_cast<int>(draw.below(static_cast<std::uint64_t>(config_.prompt_pool)));
        const std::uint64_t seed = train_seed(config_.env.variant, pool_index);
        for (int group = 0; group < config_.group_size; ++group) {
            const auto env = make_env(config_.env, seed);
            const std::uint64_t nonce = SplitMix64::derive(
                config_.run_seed, {SplitMix64::hash_tag("episode"),
                                   static_cast<std::uint64_t>(iteration_),
                                   static_cast<std::uint64_t>(prompt),
                                   static_cast<std::uint64_t>(group)});
            Sample sample;
            sample.pool_index = pool_index;
            sample.trajectory = run_episode(*env, agent_, episode, config_.reward, nonce,
                                            config_.env.variant);
            batch.push_back(std::move(sample));
        }
    }

    // Flatten decisions; advantages come from the critic as it stood during
    // collection (updates happen strictly afterwards).
    std::vector<DecisionPoint> decisions;
    std::vector<double> advantages;
    std::vector<std::string> keys;
    std::vector<double> returns_to_go;
    for (const Sample& sample : batch) {
        const auto& ds = sample.trajectory.decisions;
        if (ds.empty()) continue;
        std::vector<double> rewards(ds.size());
        std::vector<double> values(ds.size() + 1);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            rewards[i] = ds[i].reward;
            values[i] = critic_.value(ds[i].state_key);
        }
        values.back() = 0.0; // every episode end bootstraps with zero
        const AdvantageBatch adv =
            compute_gae(rewards, values, config_.gamma, config_.lambda);
        double tail = 0.0;
        std::vector<double> rtg(ds.size());
        for (std::size_t i = ds.size(); i-- > 0;) {
            tail = rewards[i] + config_.gamma * tail;
            rtg[i] = tail;
        }
        for (std::size_t i = 0; i < ds.size(); ++i) {
            decisions.push_back(ds[i]);
            advantages.push_back(adv.advantages[i]);
            keys.push_back(ds[i].state_key);
            returns_to_go.push_back(rtg[i]);
        }
    }

    double policy_loss = 0.0;
    double value_loss = 0.0;
    if (!decisions.empty()) {
        policy_loss = -policy_surrogate(decisions, advantages, model_);
        value_loss = critic_.mse(keys, returns_to_go);

        const ParamBlock ascent = policy_gradient(decisions, advantages, model_);
        ParamBlock descent;
        descent.add_scaled(ascent, -1.0);
        policy_adam_.step(model_.parameters(), descent,
                          warmup_lr(config_.policy_lr, iteration_, config_.policy_warmup));

        const double critic_lr = warmup_lr(config_.critic_lr, iteration_, config_.critic_warmup);
        for (int k = 0; k < config_.critic_updates_per_policy_update; ++k) {
            const ParamBlock grad = critic_.mse_gradient(keys, returns_to_go);
            critic_adam_.step(critic_.parameters(), grad, critic_lr);
        }
    }

    if (config_.anneal_enabled) {
        for (const Sample& sample : batch) {
            record_episode(anneal_, std::max(1, sample.trajectory.turn_count),
                           sample.pool_index);
        }
        maybe_update(anneal_);
    }

    IterationMetrics metrics;
    metrics.iteration = static_cast<int>(iteration_);
    metrics.L_max = current_turn_limit();
    metrics.policy_loss = policy_loss;
    metrics.value_loss = value_loss;
    const double count = static_cast<double>(batch.size());
    for (const Sample& sample : batch) {
        const Trajectory& t = sample.trajectory;
        metrics.success_rate += t.success ? 1.0 : 0.0;
        metrics.mean_turns += static_cast<double>(t.turn_count);
        metrics.mean_N += static_cast<double>(t.reward.N);
        metrics.mean_N_eff_ratio +=
            t.reward.N > 0
                ? static_cast<double>(t.reward.N_eff) / static_cast<double>(t.reward.N)
                : 0.0;
    }
    if (count > 0) {
        metrics.success_rate /= count;
        metrics.mean_turns /= count;
        metrics.mean_N /= count;
        metrics.mean_N_eff_ratio /= count;
    }
    return metrics;
}

std::vector<IterationMetrics> Trainer::run(std::ostream* metrics_out) {
    std::vector<IterationMetrics> history;
    history.reserve(static_cast<std::size_t>(config_.iterations));
    for (int i = 0; i < config_.iterations; ++i) {
        history.push_back(run_iteration());
        if (metrics_out != nullptr) {
            (*metrics_out) << history.back().to_json_line() << '\n';
        }
    }
    if (metrics_out != nullptr) metrics_out->flush();
    return history;
}

namespace {

const char* policy_kind_label(PolicyKind kind) {
    return kind == PolicyKind::TabularSoftmax ? "tabular_softmax" : "linear_softmax";
}

PolicyKind policy_kind_from_label(const std::string& label) {
    if (label == "tabular_softmax") return PolicyKind::TabularSoftmax;
    if (label == "linear_softmax") return PolicyKind::LinearSoftmax;
    throw Error(ErrorCode::IoError, "checkpoint: unknown policy kind '" + label + "'");
}

void write_values(std::ostream& out, const std::vector<double>& values) {
    out << std::hexfloat;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out << ' ';
        out << values[i];
    }
    out << '\n';
}

std::vector<double> parse_values(const std::string& line, std::size_t expect) {
    std::vector<double> values;
    values.reserve(expect);
    const char* cursor = line.c_str();
    while (*cursor != '\0') {
        char* end = nullptr;
        const double v = std::strtod(cursor, &end);
        if (end == cursor) break;
        values.push_back(v);
        cursor = end;
    }
    if (values.size() != expect) {
        throw Error(ErrorCode::IoError, "checkpoint: malformed parameter row");
    }
    return values;
}

std::string next_line(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) {
        throw Error(ErrorCode::IoError, "checkpoint: unexpected end of file");
    }
    return line;
}

std::string parse_quoted(const std::string& line) {
    try {
        const nlohmann::json j = nlohmann::json::parse(line);
        if (!j.is_string()) throw Error(ErrorCode::IoError, "checkpoint: expected a string row");
        return j.get<std::string>();
    } catch (const nlohmann::json::exception&) {
        throw Error(ErrorCode::IoError, "checkpoint: malformed string row");
    }
}

} // namespace

void save_checkpoint(const std::string& path, const PolicyModel& model,
                     const ValueTable& critic, std::uint64_t config_hash,
                     long long iteration) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, "checkpoint: cannot open '" + path + "' for writing");
    out << "gridlab-checkpoint v1\n";
    {
        std::ostringstream hash;
        hash << std::hex << config_hash;
        out << "config_hash " << hash.str() << '\n';
    }
    out << "iteration " << iteration << '\n';
    out << "policy " << policy_kind_label(model.kind()) << '\n';
    out << "actions " << model.num_actions() << '\n';
    for (const std::string& action : model.action_vocabulary()) {
        out << nlohmann::json(action).dump() << '\n';
    }
    out << "feature_dim " << model.feature_dim() << '\n';
    const ParamBlock& policy = model.parameters();
    out << "policy_dense " << policy.dense.size() << '\n';
    if (!policy.dense.empty()) write_values(out, policy.dense);
    out << "policy_rows " << policy.rows.size() << '\n';
    for (const auto& [key, values] : policy.rows) {
        out << nlohmann::json(key).dump() << '\n';
        write_values(out, values);
    }
    const ParamBlock& values = critic.parameters();
    out << "critic_rows " << values.rows.size() << '\n';
    for (const auto& [key, row] : values.rows) {
        out << nlohmann::json(key).dump() << '\n';
        write_values(out, row);
    }
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, "checkpoint: write to '" + path + "' failed");
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "checkpoint: cannot open '" + path + "'");

    if (next_line(in) != "gridlab-checkpoint v1") {
        throw Error(ErrorCode::IoError, "checkpoint: unsupported format header");
    }

    auto expect_field = [&](const std::string& name) {
        const std::string line = next_line(in);
        if (line.rfind(name + " ", 0) != 0) {
            throw Error(ErrorCode::IoError, "checkpoint: expected field '" + name + "'");
        }
        return line.substr(name.size() + 1);
    };

    Checkpoint loaded;
    loaded.config_hash = std::strtoull(expect_field("config_hash").c_str(), nullptr, 16);
    loaded.iteration = std::strtoll(expect_field("iteration").c_str(), nullptr, 10);
    const PolicyKind kind = policy_kind_from_label(expect_field("policy"));
    const long action_count = std::strtol(expect_field("actions").c_str(), nullptr, 10);
    if (action_count < 1) throw Error(ErrorCode::IoError, "checkpoint: bad action count");
    std::vector<std::string> vocabulary;
    vocabulary.reserve(static_cast<std::size_t>(action_count));
    for (long i = 0; i < action_count; ++i) vocabulary.push_back(parse_quoted(next_line(in)));
    const long feature_dim = std::strtol(expect_field("feature_dim").c_str(), nullptr, 10);
    if (feature_dim < 1) throw Error(ErrorCode::IoError, "checkpoint: bad feature dimension");

    loaded.model = PolicyModel(kind, vocabulary, static_cast<int>(feature_dim));
    const long dense_count = std::strtol(expect_field("policy_dense").c_str(), nullptr, 10);
    if (dense_count < 0) throw Error(ErrorCode::IoError, "checkpoint: bad dense size");
    if (dense_count > 0) {
        loaded.model.parameters().dense =
            parse_values(next_line(in), static_cast<std::size_t>(dense_count));
    }
    const long policy_rows = std::strtol(expect_field("policy_rows").c_str(), nullptr, 10);
    if (policy_rows < 0) throw Error(ErrorCode::IoError, "checkpoint: bad policy row count");
    for (long i = 0; i < policy_rows; ++i) {
        const std::string key = parse_quoted(next_line(in));
        loaded.model.parameters().rows[key] =
            parse_values(next_line(in), vocabulary.size());
    }
    const long critic_rows = std::strtol(expect_field("critic_rows").c_str(), nullptr, 10);
    if (critic_rows < 0) throw Error(ErrorCode::IoError, "checkpoint: bad critic row count");
    for (long i = 0; i < critic_rows; ++i) {
        const std::string key = parse_quoted(next_line(in));
        loaded.critic.parameters().rows[key] = parse_values(next_line(in), 1);
    }
    return loaded;
}

} // namespace gridlab
