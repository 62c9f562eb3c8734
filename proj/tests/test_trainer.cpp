#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "doctest.h"
#include "gridlab/trainer.hpp"

using namespace gridlab;

namespace {

TrainerConfig small_config() {
    TrainerConfig config;
    config.env = EnvSpec{EnvKind::Maze, Variant::Standard, 5};
    config.iterations = 6;
    config.prompts_per_iteration = 4;
    config.group_size = 2;
    config.prompt_pool = 4;
    config.run_seed = 11;
    config.initial_turn_limit = 8;
    config.anneal_enabled = false;
    config.policy_lr = 0.5;
    config.critic_lr = 0.2;
    config.policy_warmup = 0;
    config.critic_warmup = 0;
    return config;
}

std::string metrics_text(const TrainerConfig& config) {
    Trainer trainer(config);
    std::ostringstream out;
    trainer.run(&out);
    return out.str();
}

} // namespace

TEST_CASE("trainer configs are validated") {
    TrainerConfig config = small_config();
    config.iterations = 0;
    CHECK_THROWS_AS(Trainer{config}, Error);

    config = small_config();
    config.gamma = 0.0;
    CHECK_THROWS_AS(Trainer{config}, Error);

    config = small_config();
    config.lambda = 1.5;
    CHECK_THROWS_AS(Trainer{config}, Error);

    config = small_config();
    config.policy_lr = -1.0;
    try {
        Trainer trainer(config);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ConfigError);
    }
}

TEST_CASE("a short run produces well-formed metrics") {
    TrainerConfig config = small_config();
    Trainer trainer(config);
    std::ostringstream out;
    const std::vector<IterationMetrics> history = trainer.run(&out);
    REQUIRE(history.size() == 6);

    std::istringstream lines(out.str());
    std::string line;
    int parsed = 0;
    while (std::getline(lines, line)) {
        const nlohmann::json j = nlohmann::json::parse(line);
        ++parsed;
        CHECK(j.at("iteration").get<int>() == parsed);
        CHECK(j.at("success_rate").get<double>() >= 0.0);
        CHECK(j.at("success_rate").get<double>() <= 1.0);
        CHECK(j.at("mean_turns").get<double>() >= 1.0);
        CHECK(j.at("mean_N").get<double>() >= 1.0);
        CHECK(j.at("mean_N_eff_ratio").get<double>() >= 0.0);
        CHECK(j.at("mean_N_eff_ratio").get<double>() <= 1.0);
        CHECK(j.at("L_max").get<int>() == 8);
        CHECK(j.at("losses").contains("policy"));
        CHECK(j.at("losses").contains("value"));
    }
    CHECK(parsed == 6);

    // Updates actually moved the policy.
    CHECK(trainer.policy().parameters().max_abs() > 0.0);
    CHECK(trainer.iterations_done() == 6);
}

TEST_CASE("identical configs produce byte-identical metrics streams") {
    const TrainerConfig config = small_config();
    const std::string first = metrics_text(config);
    const std::string second = metrics_text(config);
    CHECK(first == second);
    CHECK(!first.empty());

    TrainerConfig other = small_config();
    other.run_seed = 12;
    CHECK(metrics_text(other) != first);
}

TEST_CASE("annealing shrinks the turn limit during training") {
    TrainerConfig config = small_config();
    config.anneal_enabled = true;
    config.anneal_tau = 2;
    config.iterations = 8;
    config.initial_turn_limit = 8;
    Trainer trainer(config);

    int previous = trainer.current_turn_limit();
    CHECK(previous == 8);
    bool shrank = false;
    for (int i = 0; i < config.iterations; ++i) {
        const IterationMetrics metrics = trainer.run_iteration();
        CHECK(metrics.L_max <= previous);
        if (metrics.L_max < previous) shrank = true;
        previous = metrics.L_max;
        CHECK(metrics.L_max >= 1);
    }
    // A fresh random policy rarely uses all 8 turns on every episode, so at
    // least one midpoint update is expected to bite.
    CHECK(shrank);
}

TEST_CASE("checkpoints restore parameters exactly") {
    TrainerConfig config = small_config();
    config.iterations = 3;
    Trainer trainer(config);
    trainer.run(nullptr);

    const std::string path = "checkpoint_roundtrip.tmp";
    save_checkpoint(path, trainer.policy(), trainer.critic(), 0xDEADBEEFCAFEull, 3);
    const Checkpoint loaded = load_checkpoint(path);
    std::remove(path.c_str());

    CHECK(loaded.config_hash == 0xDEADBEEFCAFEull);
    CHECK(loaded.iteration == 3);
    CHECK(loaded.model.kind() == trainer.policy().kind());
    CHECK(loaded.model.action_vocabulary() == trainer.policy().action_vocabulary());

    const ParamBlock& original = trainer.policy().parameters();
    const ParamBlock& restored = loaded.model.parameters();
    REQUIRE(restored.rows.size() == original.rows.size());
    for (const auto& [key, values] : original.rows) {
        const auto it = restored.rows.find(key);
        REQUIRE(it != restored.rows.end());
        REQUIRE(it->second.size() == values.size());
        for (std::size_t i = 0; i < values.size(); ++i) {
            CHECK(it->second[i] == values[i]); // hex-float exactness
        }
    }
    const ParamBlock& critic_original = trainer.critic().parameters();
    const ParamBlock& critic_restored = loaded.critic.parameters();
    REQUIRE(critic_restored.rows.size() == critic_original.rows.size());
    for (const auto& [key, values] : critic_original.rows) {
        const auto it = critic_restored.rows.find(key);
        REQUIRE(it != critic_restored.rows.end());
        CHECK(it->second == values);
    }
}

TEST_CASE("corrupt checkpoints are rejected") {
    const std::string path = "checkpoint_corrupt.tmp";
    {
        std::ofstream out(path);
        out << "not a checkpoint\n";
    }
    try {
        load_checkpoint(path);
        FAIL("expected a throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::IoError);
    }
    std::remove(path.c_str());
    CHECK_THROWS_AS(load_checkpoint("missing_file.tmp"), Error);
}
