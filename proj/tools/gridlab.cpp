// Command-line front end: generate instances, play them by hand, train the
// built-in policies, evaluate agents on held-out suites, and export metrics.
//
// Exit codes: 0 success, 2 configuration problem, 3 runtime failure,
// 4 unsupported environment/variant combination.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gridlab/config.hpp"
#include "gridlab/maze.hpp"
#include "gridlab/protocol.hpp"
#include "gridlab/trainer.hpp"

namespace {

using namespace gridlab;

struct GenOptions {
    int count = 10;
    std::string split = "eval";
    int start = 0;
    std::string out = "-";
};

struct PlayOptions {
    std::uint64_t seed = 0;
    bool seed_given = false;
    std::string record;
};

struct TrainOptions {
    std::string metrics = "metrics.jsonl";
    std::string checkpoint = "checkpoint.txt";
    bool quiet = false;
};

struct EvalOptions {
    std::string checkpoint;
    std::string out;
};

struct ExportOptions {
    std::string metrics = "metrics.jsonl";
    std::string out = "-";
};

// Writes either to stdout ("-") or to a file, with one flush at the end.
class OutputTarget {
  public:
    explicit OutputTarget(const std::string& path) {
        if (path != "-") {
            file_.open(path, std::ios::binary | std::ios::trunc);
            if (!file_) {
                throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
            }
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }
    void finish() {
        stream().flush();
        if (file_.is_open() && !file_) {
            throw Error(ErrorCode::IoError, "write failed");
        }
    }

  private:
    std::ofstream file_;
};

int run_gen(const RunConfig& config, const GenOptions& options) {
    if (options.count < 1) throw Error(ErrorCode::ConfigError, "gen: --count must be >= 1");
    if (options.start < 0) throw Error(ErrorCode::ConfigError, "gen: --start must be >= 0");
    const bool training_split = options.split == "train";
    if (!training_split && options.split != "eval") {
        throw Error(ErrorCode::ConfigError, "gen: --split must be 'train' or 'eval'");
    }
    OutputTarget target(options.out);
    for (int i = 0; i < options.count; ++i) {
        const int index = options.start + i;
        const std::uint64_t seed = training_split ? train_seed(config.env.variant, index)
                                                  : eval_seed(config.env.variant, index);
        const auto env = make_env(config.env, seed);
        nlohmann::ordered_json record;
        record["env"] = env_kind_name(config.env.kind);
        record["variant"] = variant_name(config.env.variant);
        record["split"] = options.split;
        record["index"] = index;
        record["seed"] = seed;
        record["render"] = env->render();
        record["flags"] = env->state_flags();
        record["description"] = env->description();
        target.stream() << record.dump() << '\n';
    }
    target.finish();
    return 0;
}

std::string trimmed_lower(const std::string& raw) {
    std::size_t begin = 0;
    std::size_t end = raw.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(raw[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(raw[end - 1]))) --end;
    std::string out = raw.substr(begin, end - begin);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

void print_breakdown(const RewardBreakdown& reward) {
    std::cout << "R_outcome  " << reward.R_outcome << "\n"
              << "N          " << reward.N << "\n"
              << "N_eff      " << reward.N_eff << "\n"
              << "R_scaled   " << reward.R_scaled << "\n"
              << "penalties  " << reward.penalties << "\n"
              << "R_total    " << reward.R_total << "\n";
}

int run_play(const RunConfig& config, const PlayOptions& options) {
    const std::uint64_t seed =
        options.seed_given ? options.seed : eval_seed(config.env.variant, 0);
    const auto env = make_env(config.env, seed);
    const auto vocabulary = env->action_vocabulary();

    std::cout << env->description() << "\n\n"
              << "Type a command and press enter. 'quit' abandons the session.\n";

    Trajectory trajectory;
    trajectory.env = config.env.kind;
    trajectory.seed = seed;
    trajectory.variant = config.env.variant;
    trajectory.mode = InteractionMode::MultiTurn;

    while (env->running() &&
           trajectory.turn_count < config.episode.turn_limit) {
        std::cout << '\n' << env->observation() << "\n> " << std::flush;
        std::string line;
        if (!std::getline(std::cin, line)) {
            std::cout << "\nSession abandoned; nothing recorded.\n";
            return 0;
        }
        const std::string command = trimmed_lower(line);
        if (command.empty()) continue;
        if (command == "quit") {
            std::cout << "Session abandoned; nothing recorded.\n";
            return 0;
        }
        if (std::find(vocabulary.begin(), vocabulary.end(), command) == vocabulary.end()) {
            std::cout << "Unknown command. Available commands:\n";
            for (const std::string& known : vocabulary) std::cout << "  " << known << '\n';
            continue;
        }
        Turn turn;
        turn.observation = env->observation();
        turn.raw_response = line;
        const ActionOutcome outcome = env->apply_action(command);
        turn.actions.push_back(command);
        turn.outcomes.push_back(outcome);
        trajectory.turns.push_back(std::move(turn));
        trajectory.turn_count = static_cast<int>(trajectory.turns.size());
        if (!outcome.note.empty()) std::cout << outcome.note << '\n';
    }

    trajectory.success = env->status() == EpisodeState::Success;
    trajectory.end = trajectory.success ? EpisodeEnd::TerminalSuccess
                                        : EpisodeEnd::TurnLimitReached;
    trajectory.reward = assemble_total(trajectory, config.reward);

    std::cout << '\n' << env->observation() << "\n\n"
              << (trajectory.success ? "Solved." : "Out of turns.") << "\n\n";
    print_breakdown(trajectory.reward);

    if (!options.record.empty()) {
        OutputTarget target(options.record);
        target.stream() << trajectory_to_json_line(trajectory) << '\n';
        target.finish();
        std::cout << "\nRecorded to " << options.record << "\n";
    }
    return 0;
}

int run_train(const RunConfig& config, const TrainOptions& options) {
    const TrainerConfig trainer_config = make_trainer_config(config);
    Trainer trainer(trainer_config);

    OutputTarget metrics(options.metrics);
    const std::vector<IterationMetrics> history = trainer.run(&metrics.stream());
    metrics.finish();

    save_checkpoint(options.checkpoint, trainer.policy(), trainer.critic(),
                    run_config_hash(config), trainer.iterations_done());

    if (!options.quiet && !history.empty()) {
        std::cout << history.back().to_json_line() << '\n';
    }
    return 0;
}

int run_eval(const RunConfig& config, const EvalOptions& options) {
    const EvalSuite suite =
        build_eval_suite(config.env, config.eval.count, config.eval.repetitions);
    EpisodeConfig episode = config.episode;
    episode.mode = config.mode;

    std::vector<Trajectory> sink;
    std::vector<Trajectory>* sink_ptr = options.out.empty() ? nullptr : &sink;
    EvalReport report;

    if (!options.checkpoint.empty()) {
        const Checkpoint loaded = load_checkpoint(options.checkpoint);
        if (loaded.config_hash != run_config_hash(config)) {
            std::cerr << "note: checkpoint was trained under a different configuration\n";
        }
        PolicyAgentOptions policy_options;
        policy_options.chain_limit = config.agent.chain_limit;
        policy_options.greedy = config.agent.greedy;
        const PolicyModel* model = &loaded.model;
        report = evaluate_parallel(
            suite,
            [&config, &policy_options, model]() {
                return std::make_unique<PolicyAgent>(const_cast<PolicyModel*>(model),
                                                     config.agent.seed, policy_options);
            },
            episode, config.reward, config.parallelism, sink_ptr);
    } else if (!config.agent.address.empty()) {
        // A remote agent is one connection; evaluation stays serial.
        const auto agent = make_agent(config.agent);
        report = evaluate(suite, *agent, episode, config.reward, sink_ptr);
    } else {
        report = evaluate_parallel(
            suite, [&config]() { return make_agent(config.agent); }, episode,
            config.reward, config.parallelism, sink_ptr);
    }

    if (!options.out.empty()) {
        OutputTarget target(options.out);
        for (const Trajectory& trajectory : sink) {
            target.stream() << trajectory_to_json_line(trajectory) << '\n';
        }
        target.finish();
    }

    nlohmann::ordered_json summary;
    summary["mean_success"] = report.mean_success;
    summary["mean_turns"] = report.mean_turns;
    summary["mean_effective_ratio"] = report.mean_effective_ratio;
    summary["per_rep_success"] = report.per_rep_success;
    summary["episodes"] = report.episodes;
    std::cout << summary.dump() << '\n';
    return 0;
}

int run_export(const ExportOptions& options) {
    std::ifstream in(options.metrics, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open '" + options.metrics + "'");
    OutputTarget target(options.out);
    target.stream() << "iteration,success_rate,mean_turns,mean_N,mean_N_eff_ratio,"
                       "L_max,policy_loss,value_loss\n";
    std::string line;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
            target.stream() << j.at("iteration").dump() << ','
                            << j.at("success_rate").dump() << ','
                            << j.at("mean_turns").dump() << ','
                            << j.at("mean_N").dump() << ','
                            << j.at("mean_N_eff_ratio").dump() << ','
                            << j.at("L_max").dump() << ','
                            << j.at("losses").at("policy").dump() << ','
                            << j.at("losses").at("value").dump() << '\n';
        } catch (const nlohmann::json::exception&) {
            throw Error(ErrorCode::IoError, "metrics line " + std::to_string(line_number) +
                                                " is not a valid record");
        }
    }
    target.finish();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"gridlab: multi-turn grid-world laboratory"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "JSON configuration file");
    auto* opt_env = app.add_option("--env", "Environment kind: maze, sokoban, taxi");
    auto* opt_variant =
        app.add_option("--variant", "Environment variant: standard, hard1, hard2, hard");
    auto* opt_size = app.add_option("--size", "Maze board size override (odd, >= 3)");
    auto* opt_mode =
        app.add_option("--mode", "Interaction mode: multi_turn or single_turn");
    auto* opt_agent =
        app.add_option("--agent", "Agent name: random, oracle_maze, oracle_sokoban, "
                                  "oracle_taxi, tabular_policy");
    auto* opt_agent_seed = app.add_option("--agent-seed", "Agent random seed");
    auto* opt_address =
        app.add_option("--address", "Remote agent transport (exec:<cmd> or tcp:host:port)");
    auto* opt_greedy = app.add_flag("--greedy", "Policy agents pick argmax actions");
    auto* opt_turn_limit = app.add_option("--turn-limit", "Turns allowed per episode");
    auto* opt_rescale =
        app.add_option("--rescaling", "Outcome reward rescaling: true or false");
    auto* opt_anneal = app.add_option("--anneal", "Turn-limit annealing: true or false");
    auto* opt_tau = app.add_option("--tau", "Annealing update period (iterations)");
    auto* opt_iterations = app.add_option("--iterations", "Training iterations");
    auto* opt_run_seed = app.add_option("--run-seed", "Training run seed");
    auto* opt_pool = app.add_option("--prompt-pool", "Training instance pool size");
    auto* opt_eval_count = app.add_option("--eval-count", "Held-out instances to evaluate");
    auto* opt_eval_reps = app.add_option("--eval-reps", "Repetitions per instance");
    auto* opt_parallelism = app.add_option("--parallelism", "Worker threads for evaluation");

    GenOptions gen_options;
    auto* gen = app.add_subcommand("gen", "Generate instance records as JSON lines");
    gen->add_option("--count", gen_options.count, "Instances to generate");
    gen->add_option("--split", gen_options.split, "Seed split: train or eval");
    gen->add_option("--start", gen_options.start, "First instance index");
    gen->add_option("--out", gen_options.out, "Output path ('-' for stdout)");

    PlayOptions play_options;
    auto* play = app.add_subcommand("play", "Play an instance interactively");
    auto* opt_play_seed =
        play->add_option("--seed", play_options.seed, "Instance seed (default: held-out #0)");
    play->add_option("--record", play_options.record, "Write the finished episode here");

    TrainOptions train_options;
    auto* train = app.add_subcommand("train", "Train the built-in policy");
    train->add_option("--metrics", train_options.metrics, "Metrics JSONL output path");
    train->add_option("--checkpoint", train_options.checkpoint, "Checkpoint output path");
    train->add_flag("--quiet", train_options.quiet, "Suppress the final metrics line");

    EvalOptions eval_options;
    auto* eval = app.add_subcommand("eval", "Evaluate an agent on held-out instances");
    eval->add_option("--checkpoint", eval_options.checkpoint, "Evaluate this checkpoint");
    eval->add_option("--out", eval_options.out, "Write per-episode JSON lines here");

    ExportOptions export_options;
    auto* exporter = app.add_subcommand("export", "Convert metrics JSONL to CSV");
    exporter->add_option("--metrics", export_options.metrics, "Metrics JSONL input path");
    exporter->add_option("--out", export_options.out, "CSV output path ('-' for stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig config;
        if (!config_path.empty()) config = load_run_config(config_path);

        auto parse_bool = [](const std::string& text, const char* what) {
            if (text == "true" || text == "1" || text == "on") return true;
            if (text == "false" || text == "0" || text == "off") return false;
            throw Error(ErrorCode::ConfigError,
                        std::string(what) + " must be true or false");
        };
        if (opt_env->count() > 0)
            config.env.kind = env_kind_from_name(opt_env->as<std::string>());
        if (opt_variant->count() > 0)
            config.env.variant = variant_from_name(opt_variant->as<std::string>());
        if (opt_size->count() > 0) config.env.size_override = opt_size->as<int>();
        if (opt_mode->count() > 0)
            config.mode = interaction_mode_from_name(opt_mode->as<std::string>());
        if (opt_agent->count() > 0) config.agent.name = opt_agent->as<std::string>();
        if (opt_agent_seed->count() > 0)
            config.agent.seed = opt_agent_seed->as<std::uint64_t>();
        if (opt_address->count() > 0) config.agent.address = opt_address->as<std::string>();
        if (opt_greedy->count() > 0) config.agent.greedy = true;
        if (opt_turn_limit->count() > 0)
            config.episode.turn_limit = opt_turn_limit->as<int>();
        if (opt_rescale->count() > 0)
            config.reward.rescaling_enabled =
                parse_bool(opt_rescale->as<std::string>(), "--rescaling");
        if (opt_anneal->count() > 0)
            config.train.anneal_enabled =
                parse_bool(opt_anneal->as<std::string>(), "--anneal");
        if (opt_tau->count() > 0) config.train.anneal_tau = opt_tau->as<int>();
        if (opt_iterations->count() > 0)
            config.train.iterations = opt_iterations->as<int>();
        if (opt_run_seed->count() > 0)
            config.train.run_seed = opt_run_seed->as<std::uint64_t>();
        if (opt_pool->count() > 0) config.train.prompt_pool = opt_pool->as<int>();
        if (opt_eval_count->count() > 0) config.eval.count = opt_eval_count->as<int>();
        if (opt_eval_reps->count() > 0)
            config.eval.repetitions = opt_eval_reps->as<int>();
        if (opt_parallelism->count() > 0)
            config.parallelism = opt_parallelism->as<int>();
        if (config.parallelism < 1) {
            throw Error(ErrorCode::ConfigError, "parallelism must be >= 1");
        }
        play_options.seed_given = opt_play_seed->count() > 0;

        if (gen->parsed()) return run_gen(config, gen_options);
        if (play->parsed()) return run_play(config, play_options);
        if (train->parsed()) return run_train(config, train_options);
        if (eval->parsed()) return run_eval(config, eval_options);
        if (exporter->parsed()) return run_export(export_options);
        std::cerr << "error: no subcommand selected\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        switch (e.code()) {
        case ErrorCode::UnsupportedVariant: return 4;
        case ErrorCode::ConfigError: return 2;
        default: return 3;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
