#include "gridlab/rollout.hpp"

#include <algorithm>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "gridlab/maze.hpp"
#include "gridlab/protocol.hpp"
#include "gridlab/sokoban.hpp"
#include "gridlab/taxi.hpp"

namespace gridlab {

std::unique_ptr<Environment> make_env(const EnvSpec& spec, std::uint64_t seed) {
    switch (spec.kind) {
    case EnvKind::Maze: {
        int size = 0;
        if (spec.variant == Variant::Standard) {
            size = 11;
        } else if (spec.variant == Variant::Hard) {
            size = 15;
        } else {
            throw Error(ErrorCode::UnsupportedVariant,
                        std::string("maze has no variant ") + variant_name(spec.variant));
        }
        if (spec.size_override > 0) size = spec.size_override;
        return std::make_unique<MazeEnv>(size, seed);
    }
    case EnvKind::Sokoban: {
        int width = 7, height = 7, boxes = 2;
        if (spec.variant == Variant::Standard) {
            // defaults above
        } else if (spec.variant == Variant::Hard1) {
            width = 10;
            height = 10;
        } else if (spec.variant == Variant::Hard2) {
            boxes = 3;
        } else {
            throw Error(ErrorCode::UnsupportedVariant,
                        std::string("sokoban has no variant ") + variant_name(spec.variant));
        }
        const int reverse_steps = sokoban_default_reverse_steps(width, height, boxes);
        return std::make_unique<SokobanEnv>(width, height, boxes, reverse_steps, seed);
    }
    case EnvKind::Taxi: {
        if (spec.variant != Variant::Standard) {
            throw Error(ErrorCode::UnsupportedVariant,
                        std::string("taxi has no variant ") + variant_name(spec.variant));
        }
        return std::make_unique<TaxiEnv>(seed);
    }
    }
    throw Error(ErrorCode::ConfigError, "unknown environment kind");
}

std::uint64_t variant_seed_offset(Variant variant) {
    switch (variant) {
    case Variant::Standard: return 0;
    case Variant::Hard1: return 1000;
    case Variant::Hard2: return 2000;
    case Variant::Hard: return 3000;
    }
    return 0;
}

std::uint64_t train_seed(Variant variant, std::uint64_t index) {
    return 2 * (variant_seed_offset(variant) + index);
}

std::uint64_t eval_seed(Variant variant, std::uint64_t index) {
    return 2 * (variant_seed_offset(variant) + index) + 1;
}

void EpisodeConfig::validate() const {
    if (turn_limit < 1) throw Error(ErrorCode::ConfigError, "turn_limit must be >= 1");
    if (char_budget_total < 1 || char_budget_per_turn < 1) {
        throw Error(ErrorCode::ConfigError, "character budgets must be positive");
    }
    if (!(budget_stop_fraction > 0.0 && budget_stop_fraction <= 1.0)) {
        throw Error(ErrorCode::ConfigError, "budget_stop_fraction must lie in (0, 1]");
    }
}

namespace {

bool is_transport_failure(ErrorCode code) {
    return code == ErrorCode::Timeout || code == ErrorCode::TransportClosed ||
           code == ErrorCode::IdMismatch;
}

void distribute_rewards(Trajectory& trajectory, const RewardConfig& config) {
    if (trajectory.decisions.empty()) return;
    int malformed_turns = 0;
    std::vector<OutcomeKind> kinds;
    kinds.reserve(trajectory.decisions.size());
    for (const Turn& turn : trajectory.turns) {
        if (turn.format_error.has_value()) ++malformed_turns;
        for (const ActionOutcome& outcome : turn.outcomes) kinds.push_back(outcome.kind);
    }
    for (std::size_t i = 0; i < trajectory.decisions.size(); ++i) {
        double r = config.step_penalty;
        if (kinds[i] == OutcomeKind::Invalid) r += config.invalid_action_penalty;
        trajectory.decisions[i].reward = r;
    }
    const double outcome_term =
        config.rescaling_enabled ? trajectory.reward.R_scaled : trajectory.reward.R_outcome;
    trajectory.decisions.back().reward +=
        outcome_term + config.format_penalty * malformed_turns;
}

// Adopt the sampler's own records (state keys and behavior log-probabilities)
// for trainable agents, cross-checking them against what actually executed.
void merge_policy_decisions(Trajectory& trajectory, Agent& agent) {
    auto* policy_agent = dynamic_cast<PolicyAgent*>(&agent);
    if (policy_agent == nullptr) return;
    const std::vector<DecisionPoint> sampled = policy_agent->drain_decisions();
    if (sampled.size() != trajectory.decisions.size()) {
        std::ostringstream msg;
        msg << "sampled " << sampled.size() << " decisions but executed "
            << trajectory.decisions.size();
        throw Error(ErrorCode::OffPolicyDetected, msg.str());
    }
    for (std::size_t i = 0; i < sampled.size(); ++i) {
        if (sampled[i].state_key != trajectory.decisions[i].state_key ||
            sampled[i].action_id != trajectory.decisions[i].action_id) {
            throw Error(ErrorCode::OffPolicyDetected,
                        "sampled decision does not match the executed action");
        }
        trajectory.decisions[i].logprob_behavior = sampled[i].logprob_behavior;
    }
}

} // namespace

Trajectory run_episode(Environment& env, Agent& agent, const EpisodeConfig& config,
                       const RewardConfig& reward_config, std::uint64_t nonce,
                       Variant variant) {
    config.validate();
    reward_config.validate();

    Trajectory trajectory;
    trajectory.env = env.kind();
    trajectory.seed = env.seed();
    trajectory.variant = variant;
    trajectory.mode = config.mode;

    const bool single_turn = config.mode == InteractionMode::SingleTurn;
    const int turn_limit = single_turn ? 1 : config.turn_limit;
    const long long per_turn_budget =
        single_turn ? config.char_budget_total : config.char_budget_per_turn;
    const double budget_cutoff =
        config.budget_stop_fraction * static_cast<double>(config.char_budget_total);

    const std::vector<std::string> vocabulary = env.action_vocabulary();
    std::unordered_map<std::string, int> vocabulary_index;
    for (std::size_t i = 0; i < vocabulary.size(); ++i) {
        vocabulary_index.emplace(vocabulary[i], static_cast<int>(i));
    }

    agent.begin_episode(env, nonce);

    std::vector<TranscriptEntry> entries;
    long long content_chars = 0;
    if (!config.system_prompt.empty()) {
        entries.push_back({"system", config.system_prompt});
        content_chars += static_cast<long long>(config.system_prompt.size());
    }
    std::string environment_text = env.description() + "\n\n" + action_prompt_text();

    for (int turn_index = 1; turn_index <= turn_limit && env.running(); ++turn_index) {
        if (turn_index > 1 && static_cast<double>(content_chars) >= budget_cutoff) {
            trajectory.end = EpisodeEnd::BudgetExhausted;
            break;
        }
        entries.push_back({"environment", environment_text});
        content_chars += static_cast<long long>(environment_text.size());

        Turn turn;
        turn.observation = environment_text;

        agent.begin_turn(env);
        AgentRequest request;
        request.id = static_cast<std::uint64_t>(turn_index);
        request.transcript = entries;
        request.char_budget_turn = per_turn_budget;

        std::string raw;
        try {
            raw = agent.respond(request);
        } catch (const Error& error) {
            if (is_transport_failure(error.code())) {
                trajectory.end = EpisodeEnd::AgentFailure;
                trajectory.failure_note = error_code_name(error.code());
                trajectory.turns.push_back(std::move(turn));
                break;
            }
            throw;
        }
        if (static_cast<long long>(raw.size()) > per_turn_budget) {
            raw.resize(static_cast<std::size_t>(per_turn_budget)); // generation cutoff
        }
        entries.push_back({"agent", raw});
        content_chars += static_cast<long long>(raw.size());
        turn.raw_response = raw;

        const ParsedResponse parsed = parse_response(raw, vocabulary);
        if (!parsed.ok()) {
            turn.format_error = parsed.error;
        } else {
            turn.thinking = parsed.thinking;
            for (const std::string& command : parsed.actions) {
                if (!env.running()) {
                    turn.unexecuted.push_back(command);
                    continue;
                }
                DecisionPoint decision;
                decision.state_key = env.canonical_serialize();
                decision.action_id = vocabulary_index.at(command);
                const ActionOutcome outcome = env.apply_action(command);
                turn.actions.push_back(command);
                turn.outcomes.push_back(outcome);
                trajectory.decisions.push_back(std::move(decision));
            }
        }
        trajectory.turns.push_back(std::move(turn));
        if (!env.running()) break;

        std::string feedback;
        if (trajectory.turns.back().format_error.has_value()) {
            feedback = "Your previous response did not follow the required format.\n\n";
        }
        feedback += env.observation();
        environment_text = build_followup_prompt(feedback);
    }

    if (env.status() == EpisodeState::Success) {
        trajectory.success = true;
        trajectory.end = EpisodeEnd::TerminalSuccess;
    }
    // Otherwise the default TurnLimitReached stands unless a failure or the
    // budget stop already tagged the episode.
    trajectory.turn_count = static_cast<int>(trajectory.turns.size());

    trajectory.reward = assemble_total(trajectory, reward_config);
    distribute_rewards(trajectory, reward_config);
    merge_policy_decisions(trajectory, agent);
    agent.observe_trajectory(trajectory);
    return trajectory;
}

EvalSuite build_eval_suite(const EnvSpec& spec, int count, int repetitions) {
    if (count < 1 || repetitions < 1) {
        throw Error(ErrorCode::ConfigError, "suite size and repetitions must be positive");
    }
    make_env(spec, eval_seed(spec.variant, 0)); // validates the variant table
    EvalSuite suite;
    suite.spec = spec;
    suite.repetitions = repetitions;
    suite.seeds.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        suite.seeds.push_back(eval_seed(spec.variant, static_cast<std::uint64_t>(i)));
    }
    return suite;
}

namespace {

EvalReport aggregate_report(const EvalSuite& suite, std::vector<Trajectory>& episodes,
                            std::vector<Trajectory>* sink) {
    EvalReport report;
    report.per_rep_success.assign(static_cast<std::size_t>(suite.repetitions), 0.0);
    double turns_total = 0.0;
    double ratio_total = 0.0;
    for (std::size_t slot = 0; slot < episodes.size(); ++slot) {
        const Trajectory& trajectory = episodes[slot];
        const std::size_t rep = slot % static_cast<std::size_t>(suite.repetitions);
        report.episodes += 1;
        if (trajectory.success) {
            report.mean_success += 1.0;
            report.per_rep_success[rep] += 1.0;
        }
        turns_total += trajectory.turn_count;
        ratio_total += trajectory.reward.N > 0
                           ? static_cast<double>(trajectory.reward.N_eff) /
                                 static_cast<double>(trajectory.reward.N)
                           : 0.0;
    }
    if (report.episodes > 0) {
        report.mean_success /= static_cast<double>(report.episodes);
        report.mean_turns = turns_total / static_cast<double>(report.episodes);
        report.mean_effective_ratio = ratio_total / static_cast<double>(report.episodes);
        for (double& rate : report.per_rep_success) {
            rate /= static_cast<double>(suite.seeds.size());
        }
    }
    if (sink != nullptr) {
        for (Trajectory& trajectory : episodes) sink->push_back(std::move(trajectory));
    }
    return report;
}

} // namespace

EvalReport evaluate_parallel(const EvalSuite& suite,
                             const std::function<std::unique_ptr<Agent>()>& agent_factory,
                             const EpisodeConfig& config, const RewardConfig& reward_config,
                             int threads, std::vector<Trajectory>* sink) {
    if (threads < 1) {
        throw Error(ErrorCode::ConfigError, "evaluate_parallel: threads must be >= 1");
    }
    const std::size_t prompts = suite.seeds.size();
    if (threads == 1 || prompts <= 1) {
        const auto agent = agent_factory();
        return evaluate(suite, *agent, config, reward_config, sink);
    }

    const std::size_t reps = static_cast<std::size_t>(suite.repetitions);
    std::vector<Trajectory> slots(prompts * reps);
    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(threads), prompts);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::mutex error_mutex;
    std::exception_ptr first_error;

    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = prompts * w / workers;
        const std::size_t end = prompts * (w + 1) / workers;
        pool.emplace_back([&, begin, end]() {
            try {
                const auto agent = agent_factory();
                for (std::size_t prompt = begin; prompt < end; ++prompt) {
                    for (std::size_t rep = 0; rep < reps; ++rep) {
                        const std::uint64_t nonce =
                            static_cast<std::uint64_t>(prompt * reps + rep);
                        auto env = make_env(suite.spec, suite.seeds[prompt]);
                        slots[prompt * reps + rep] = run_episode(
                            *env, *agent, config, reward_config, nonce, suite.spec.variant);
                    }
                }
            } catch (...) {
                const std::lock_guard<std::mutex> hold(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (std::thread& worker : pool) worker.join();
    if (first_error) std::rethrow_exception(first_error);
    return aggregate_report(suite, slots, sink);
}

EvalReport evaluate(const EvalSuite& suite, Agent& agent, const EpisodeConfig& config,
                    const RewardConfig& reward_config, std::vector<Trajectory>* sink) {
    EvalReport report;
    report.per_rep_success.assign(static_cast<std::size_t>(suite.repetitions), 0.0);
    double turns_total = 0.0;
    double ratio_total = 0.0;

    for (std::size_t prompt = 0; prompt < suite.seeds.size(); ++prompt) {
        for (int rep = 0; rep < suite.repetitions; ++rep) {
            const std::uint64_t nonce =
                static_cast<std::uint64_t>(prompt) * static_cast<std::uint64_t>(suite.repetitions) +
                static_cast<std::uint64_t>(rep);
            auto env = make_env(suite.spec, suite.seeds[prompt]);
            Trajectory trajectory = run_episode(*env, agent, config, reward_config, nonce,
                                                suite.spec.variant);
            report.episodes += 1;
            if (trajectory.success) {
                report.mean_success += 1.0;
                report.per_rep_success[static_cast<std::size_t>(rep)] += 1.0;
            }
            turns_total += trajectory.turn_count;
            ratio_total += trajectory.reward.N > 0
                               ? static_cast<double>(trajectory.reward.N_eff) /
                                     static_cast<double>(trajectory.reward.N)
                               : 0.0;
            if (sink != nullptr) sink->push_back(std::move(trajectory));
        }
    }
    if (report.episodes > 0) {
        report.mean_success /= static_cast<double>(report.episodes);
        report.mean_turns = turns_total / static_cast<double>(report.episodes);
        report.mean_effective_ratio = ratio_total / static_cast<double>(report.episodes);
        for (double& rate : report.per_rep_success) {
            rate /= static_cast<double>(suite.seeds.size());
        }
    }
    return report;
}

} // namespace gridlab
