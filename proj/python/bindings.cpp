// Python bindings for the grid-world laboratory. The surface mirrors the
// command-line tool: environments, the text protocol, reward scaling, the
// advantage/clip estimators, turn-limit annealing, episode rollouts, batch
// evaluation, and desk-scale training. Structured results cross the boundary
// as JSON text so Python sees exactly the bytes the JSONL files contain.

#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "gridlab/agents.hpp"
#include "gridlab/anneal.hpp"
#include "gridlab/config.hpp"
#include "gridlab/optimizer.hpp"
#include "gridlab/protocol.hpp"
#include "gridlab/reward.hpp"
#include "gridlab/rollout.hpp"
#include "gridlab/trainer.hpp"

namespace py = pybind11;
using namespace gridlab;

namespace {

EnvSpec spec_from_names(const std::string& kind, const std::string& variant, int size) {
    EnvSpec spec;
    spec.kind = env_kind_from_name(kind);
    spec.variant = variant_from_name(variant);
    spec.size_override = size;
    return spec;
}

py::dict outcome_to_dict(const ActionOutcome& outcome) {
    py::dict d;
    d["kind"] = std::string(outcome_kind_name(outcome.kind));
    d["note"] = outcome.note;
    return d;
}

py::dict parse_to_dict(const ParsedResponse& parsed) {
    py::dict d;
    d["ok"] = parsed.ok();
    d["thinking"] = parsed.thinking;
    d["actions"] = parsed.actions;
    if (parsed.error.has_value()) {
        py::dict e;
        e["kind"] = std::string(parse_error_kind_name(parsed.error->kind));
        e["index"] = parsed.error->index;
        e["token"] = parsed.error->token;
        d["error"] = e;
    } else {
        d["error"] = py::none();
    }
    return d;
}

// Thin wrapper holding the annealing state together with its configuration.
class AnnealSchedule {
  public:
    AnnealSchedule(int initial_limit, int tau, bool per_prompt_mean) {
        AnnealConfig config;
        config.initial_L_max = initial_limit;
        config.tau = tau;
        config.per_prompt_mean = per_prompt_mean;
        state_ = make_anneal_state(config);
    }

    void record(int turns, int prompt_id) { record_episode(state_, turns, prompt_id); }
    bool end_iteration() { return maybe_update(state_); }
    int turn_limit() const { return state_.L_max; }

  private:
    AnnealState state_;
};

std::string train_from_json(const std::string& config_json,
                            const std::string& metrics_path,
                            const std::string& checkpoint_path) {
    const RunConfig config = run_config_from_json_text(config_json);
    Trainer trainer(make_trainer_config(config));
    std::ostringstream metrics;
    trainer.run(&metrics);
    if (!metrics_path.empty()) {
        std::ofstream out(metrics_path, std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + metrics_path);
        out << metrics.str();
    }
    if (!checkpoint_path.empty()) {
        save_checkpoint(checkpoint_path, trainer.policy(), trainer.critic(),
                        run_config_hash(config), trainer.iterations_done());
    }
    return metrics.str();
}

std::string report_to_json(const EvalReport& report) {
    nlohmann::ordered_json j;
    j["mean_success"] = report.mean_success;
    j["mean_turns"] = report.mean_turns;
    j["mean_effective_ratio"] = report.mean_effective_ratio;
    j["per_rep_success"] = report.per_rep_success;
    j["episodes"] = report.episodes;
    return j.dump();
}

std::string evaluate_from_json(const std::string& config_json,
                               const std::string& checkpoint_path,
                               const std::string& episodes_path) {
    const RunConfig config = run_config_from_json_text(config_json);
    const EvalSuite suite =
        build_eval_suite(config.env, config.eval.count, config.eval.repetitions);
    EpisodeConfig episode = config.episode;
    episode.mode = config.mode;

    std::vector<Trajectory> sink;
    std::vector<Trajectory>* sink_ptr = episodes_path.empty() ? nullptr : &sink;

    EvalReport report;
    if (!checkpoint_path.empty()) {
        const Checkpoint loaded = load_checkpoint(checkpoint_path);
        const PolicyModel* model = &loaded.model;
        PolicyAgentOptions options;
        options.chain_limit = config.agent.chain_limit;
        options.greedy = config.agent.greedy;
        const std::uint64_t agent_seed = config.agent.seed;
        report = evaluate_parallel(
            suite,
            [model, agent_seed, options]() {
                return std::make_unique<PolicyAgent>(const_cast<PolicyModel*>(model),
                                                     agent_seed, options);
            },
            episode, config.reward, config.parallelism, sink_ptr);
    } else if (!config.agent.address.empty()) {
        const std::unique_ptr<Agent> agent = make_agent(config.agent);
        report = evaluate(suite, *agent, episode, config.reward, sink_ptr);
    } else {
        report = evaluate_parallel(
            suite, [&config]() { return make_agent(config.agent); }, episode, config.reward,
            config.parallelism, sink_ptr);
    }

    if (!episodes_path.empty()) {
        std::ofstream out(episodes_path, std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + episodes_path);
        for (const Trajectory& trajectory : sink) {
            out << trajectory_to_json_line(trajectory) << '\n';
        }
    }
    return report_to_json(report);
}

std::string play_episode_from_json(const std::string& config_json, std::uint64_t seed,
                                   std::uint64_t nonce) {
    const RunConfig config = run_config_from_json_text(config_json);
    const std::unique_ptr<Environment> env = make_env(config.env, seed);
    const std::unique_ptr<Agent> agent = make_agent(config.agent);
    EpisodeConfig episode = config.episode;
    episode.mode = config.mode;
    const Trajectory trajectory = run_episode(*env, *agent, episode, config.reward,
                                              nonce, config.env.variant);
    return trajectory_to_json_line(trajectory);
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Grid-world laboratory for multi-turn reinforcement learning";

    py::class_<Environment>(m, "Environment",
                            "One grid-world instance with text rendering and "
                            "string-command stepping")
        .def("render", &Environment::render)
        .def("state_flags", &Environment::state_flags)
        .def("canonical_serialize", &Environment::canonical_serialize)
        .def("description", &Environment::description)
        .def("observation", &Environment::observation)
        .def("action_vocabulary", &Environment::action_vocabulary)
        .def("running", &Environment::running)
        .def("status",
             [](const Environment& env) {
                 return std::string(episode_state_name(env.status()));
             })
        .def("apply_action",
             [](Environment& env, const std::string& command) {
                 return outcome_to_dict(env.apply_action(command));
             },
             py::arg("command"))
        .def("clone", &Environment::clone);

    m.def(
        "make_env",
        [](const std::string& kind, const std::string& variant, int size,
           std::uint64_t seed) { return make_env(spec_from_names(kind, variant, size), seed); },
        py::arg("kind"), py::arg("variant") = "standard", py::arg("size") = 0,
        py::arg("seed") = 0,
        "Build a maze/sokoban/taxi instance for a variant and seed");

    m.def(
        "train_seed",
        [](const std::string& variant, std::uint64_t index) {
            return train_seed(variant_from_name(variant), index);
        },
        py::arg("variant"), py::arg("index"),
        "Seed of the index-th training instance of a variant (even seeds)");
    m.def(
        "eval_seed",
        [](const std::string& variant, std::uint64_t index) {
            return eval_seed(variant_from_name(variant), index);
        },
        py::arg("variant"), py::arg("index"),
        "Seed of the index-th held-out instance of a variant (odd seeds)");

    m.def(
        "parse_response",
        [](const std::string& raw, const std::vector<std::string>& vocabulary) {
            return parse_to_dict(parse_response(raw, vocabulary));
        },
        py::arg("raw"), py::arg("vocabulary"),
        "Parse a <think>/<action> response against an action vocabulary");

    m.def("rescale_reward", &rescale_reward, py::arg("outcome"), py::arg("n"),
          py::arg("n_eff"),
          "Scale an outcome reward by the fraction of effective actions");

    m.def(
        "compute_gae",
        [](const std::vector<double>& rewards, const std::vector<double>& values,
           double gamma, double lambda) {
            const AdvantageBatch batch = compute_gae(rewards, values, gamma, lambda);
            py::dict d;
            d["advantages"] = batch.advantages;
            d["deltas"] = batch.deltas;
            return d;
        },
        py::arg("rewards"), py::arg("values"), py::arg("gamma") = 1.0,
        py::arg("lambda_") = 1.0,
        "Generalized advantage estimates (values has one extra bootstrap entry)");

    m.def("ppo_clip_term", &ppo_clip_term, py::arg("ratio"), py::arg("advantage"),
          py::arg("epsilon"),
          "Pessimistic clipped surrogate contribution for one decision");

    py::class_<AnnealSchedule>(m, "AnnealSchedule",
                               "Non-increasing turn-limit schedule updated every "
                               "tau iterations from recorded turn usage")
        .def(py::init<int, int, bool>(), py::arg("initial_limit") = 30,
             py::arg("tau") = 100, py::arg("per_prompt_mean") = false)
        .def("record", &AnnealSchedule::record, py::arg("turns"),
             py::arg("prompt_id") = 0)
        .def("end_iteration", &AnnealSchedule::end_iteration,
             "Close one iteration; returns True when the limit was recomputed")
        .def_property_readonly("turn_limit", &AnnealSchedule::turn_limit);

    m.def("default_config",
          []() { return run_config_to_json_text(RunConfig{}); },
          "Default run configuration as JSON text");
    m.def(
        "normalize_config",
        [](const std::string& text) {
            return run_config_to_json_text(run_config_from_json_text(text));
        },
        py::arg("config_json"),
        "Validate a configuration document and return its canonical form");

    m.def("play_episode", &play_episode_from_json, py::arg("config_json"),
          py::arg("seed"), py::arg("nonce") = 0,
          "Run one episode and return the trajectory record as JSON text");

    m.def("evaluate", &evaluate_from_json, py::arg("config_json"),
          py::arg("checkpoint_path") = std::string(),
          py::arg("episodes_path") = std::string(),
          "Evaluate an agent over the held-out suite; returns the report as JSON");

    m.def("train", &train_from_json, py::arg("config_json"),
          py::arg("metrics_path") = std::string(),
          py::arg("checkpoint_path") = std::string(),
          "Run the trainer; returns per-iteration metrics as JSONL text");

    py::register_exception<Error>(m, "GridlabError");
}
