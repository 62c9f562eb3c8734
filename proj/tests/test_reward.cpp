#include <doctest.h>

#include <cmath>

#include "gridlab/reward.hpp"
#include "gridlab/trajectory.hpp"

using namespace gridlab;

namespace {

Turn make_turn(std::vector<OutcomeKind> kinds, bool malformed = false) {
    Turn turn;
    for (OutcomeKind kind : kinds) {
        turn.actions.push_back("a");
        turn.outcomes.push_back({kind, ""});
    }
    if (malformed) {
        turn.format_error = ParseError{ParseErrorKind::MissingThinkTag, -1, ""};
    }
    return turn;
}

} // namespace

TEST_CASE("outcome scaling matches the ratio formula over the exhaustive grid") {
    for (double R : {0.0, 0.5, 1.0}) {
        for (int N = 0; N <= 20; ++N) {
            for (int N_eff = 0; N_eff <= N; ++N_eff) {
                const double got = rescale_reward(R, N, N_eff);
                if (N == 0) {
                    CHECK(got == R);
                } else {
                    const double expected =
                        R * static_cast<double>(N_eff) / static_cast<double>(N);
                    CHECK(got == doctest::Approx(expected).epsilon(1e-15));
                    CHECK(got >= 0.0);
                    CHECK(got <= R + 1e-15);
                }
            }
        }
    }
}

TEST_CASE("outcome scaling is monotone in the effective count") {
    for (int N = 1; N <= 20; ++N) {
        double prev = -1.0;
        for (int N_eff = 0; N_eff <= N; ++N_eff) {
            const double got = rescale_reward(1.0, N, N_eff);
            CHECK(got >= prev);
            prev = got;
        }
        CHECK(rescale_reward(1.0, N, N) == doctest::Approx(1.0));
        CHECK(rescale_reward(1.0, N, 0) == 0.0);
    }
}

TEST_CASE("count violations are rejected") {
    CHECK_THROWS_AS(rescale_reward(1.0, 3, 4), Error);
    CHECK_THROWS_AS(rescale_reward(1.0, -1, 0), Error);
    CHECK_THROWS_AS(rescale_reward(1.0, 2, -1), Error);
    try {
        rescale_reward(1.0, 3, 4);
    } catch (const Error& error) {
        CHECK(error.code() == ErrorCode::CountViolation);
    }
}

TEST_CASE("action counting separates executed from effective") {
    Trajectory trajectory;
    trajectory.turns.push_back(make_turn({OutcomeKind::Effective, OutcomeKind::Ineffective}));
    trajectory.turns.push_back(make_turn({}, true));
    trajectory.turns.push_back(make_turn({OutcomeKind::Invalid, OutcomeKind::TerminalSuccess}));
    int N = 0;
    int N_eff = 0;
    count_actions(trajectory, N, N_eff);
    CHECK(N == 4);
    CHECK(N_eff == 2); // the success action changes state, so it counts
}

TEST_CASE("total assembly applies penalties after scaling") {
    Trajectory trajectory;
    trajectory.turns.push_back(make_turn({OutcomeKind::Effective, OutcomeKind::Ineffective}));
    trajectory.turns.push_back(make_turn({}, true));
    trajectory.turns.push_back(make_turn({OutcomeKind::Invalid, OutcomeKind::TerminalSuccess}));
    trajectory.success = true;

    RewardConfig config;
    RewardBreakdown out = assemble_total(trajectory, config);
    CHECK(out.R_outcome == 1.0);
    CHECK(out.N == 4);
    CHECK(out.N_eff == 2);
    CHECK(out.R_scaled == doctest::Approx(0.5));
    CHECK(out.penalties == doctest::Approx(-0.15)); // one bad turn, one invalid action
    CHECK(out.R_total == doctest::Approx(0.35));

    config.rescaling_enabled = false;
    out = assemble_total(trajectory, config);
    CHECK(out.R_scaled == doctest::Approx(0.5)); // still reported
    CHECK(out.R_total == doctest::Approx(0.85)); // raw outcome plus penalties
}

TEST_CASE("step-cost ablation cancels a ten-action success exactly") {
    Trajectory trajectory;
    trajectory.turns.push_back(make_turn({OutcomeKind::Effective, OutcomeKind::Effective,
                                          OutcomeKind::Effective, OutcomeKind::Effective,
                                          OutcomeKind::Effective}));
    trajectory.turns.push_back(make_turn({OutcomeKind::Effective, OutcomeKind::Effective,
                                          OutcomeKind::Effective, OutcomeKind::Effective,
                                          OutcomeKind::TerminalSuccess}));
    trajectory.success = true;

    RewardConfig config;
    config.rescaling_enabled = false;
    config.step_penalty = -0.1;
    const RewardBreakdown out = assemble_total(trajectory, config);
    CHECK(out.N == 10);
    CHECK(out.R_total == doctest::Approx(0.0));
}

TEST_CASE("failures earn only penalties") {
    Trajectory trajectory;
    trajectory.turns.push_back(make_turn({OutcomeKind::Effective, OutcomeKind::Invalid}));
    trajectory.success = false;

    const RewardBreakdown out = assemble_total(trajectory, RewardConfig{});
    CHECK(out.R_outcome == 0.0);
    CHECK(out.R_scaled == 0.0);
    CHECK(out.R_total == doctest::Approx(-0.05));
}

TEST_CASE("degenerate episodes with no executed actions keep the raw outcome") {
    Trajectory trajectory;
    trajectory.turns.push_back(make_turn({}, true));
    trajectory.turns.push_back(make_turn({}, true));
    trajectory.success = false;

    const RewardBreakdown out = assemble_total(trajectory, RewardConfig{});
    CHECK(out.N == 0);
    CHECK(out.R_scaled == 0.0);
    CHECK(out.R_total == doctest::Approx(-0.2)); // two malformed turns
}

TEST_CASE("reward configuration rejects sign errors") {
    RewardConfig config;
    config.step_penalty = 0.1;
    CHECK_THROWS_AS(config.validate(), Error);
    config = RewardConfig{};
    config.outcome_success = 0.0;
    CHECK_THROWS_AS(config.validate(), Error);
    config = RewardConfig{};
    config.format_penalty = 0.2;
    CHECK_THROWS_AS(config.validate(), Error);
}

TEST_CASE("trajectory records survive a serialization round trip") {
    Trajectory trajectory;
    trajectory.env = EnvKind::Sokoban;
    trajectory.seed = 1234567;
    trajectory.variant = Variant::Hard1;
    trajectory.mode = InteractionMode::SingleTurn;
    Turn turn = make_turn({OutcomeKind::Effective, OutcomeKind::Invalid});
    turn.observation = "Game state:\n#####\n";
    turn.thinking = "push the box\nnow";
    turn.raw_response = "<think>push the box\nnow</think><action>move up; fly</action>";
    turn.unexecuted = {"move down"};
    trajectory.turns.push_back(turn);
    trajectory.turns.push_back(make_turn({}, true));
    trajectory.reward = assemble_total(trajectory, RewardConfig{});
    trajectory.success = false;
    trajectory.turn_count = 2;
    trajectory.end = EpisodeEnd::BudgetExhausted;

    const std::string line = trajectory_to_json_line(trajectory);
    CHECK(line.find('\n') == std::string::npos);
    const Trajectory back = trajectory_from_json_line(line);
    CHECK(back.env == trajectory.env);
    CHECK(back.seed == trajectory.seed);
    CHECK(back.variant == trajectory.variant);
    CHECK(back.mode == trajectory.mode);
    CHECK(back.turns.size() == 2);
    CHECK(back.turns[0].observation == turn.observation);
    CHECK(back.turns[0].thinking == turn.thinking);
    CHECK(back.turns[0].raw_response == turn.raw_response);
    CHECK(back.turns[0].actions == turn.actions);
    CHECK(back.turns[0].outcomes.size() == 2);
    CHECK(back.turns[0].outcomes[1].kind == OutcomeKind::Invalid);
    CHECK(back.turns[0].unexecuted == turn.unexecuted);
    CHECK_FALSE(back.turns[0].format_error.has_value());
    REQUIRE(back.turns[1].format_error.has_value());
    CHECK(back.turns[1].format_error->kind == ParseErrorKind::MissingThinkTag);
    CHECK(back.reward.R_total == trajectory.reward.R_total);
    CHECK(back.reward.N == trajectory.reward.N);
    CHECK(back.end == EpisodeEnd::BudgetExhausted);
    CHECK(back.turn_count == 2);

    CHECK_THROWS_AS(trajectory_from_json_line("{not json"), Error);
    CHECK_THROWS_AS(trajectory_from_json_line("{\"env\":\"maze\"}"), Error);
}
