#include <doctest.h>

#include <set>
#include <string>

#include "gridlab/rng.hpp"
#include "gridlab/sokoban.hpp"
#include "test_util.hpp"

using namespace gridlab;
using testutil::parse_sokoban_render;
using testutil::solve_sokoban_render;

namespace {

SokobanEnv make_env(int width, int height, int boxes, std::uint64_t seed) {
    return SokobanEnv(width, height, boxes,
                      sokoban_default_reverse_steps(width, height, boxes), seed);
}

} // namespace

TEST_CASE("bad dimensions are rejected") {
    CHECK_THROWS_AS(generate_sokoban(4, 7, 2, 10, 0), Error);
    CHECK_THROWS_AS(generate_sokoban(7, 4, 2, 10, 0), Error);
    CHECK_THROWS_AS(generate_sokoban(7, 7, 0, 10, 0), Error);
    CHECK_THROWS_AS(generate_sokoban(7, 7, 2, 0, 0), Error);
}

TEST_CASE("fresh boards satisfy structural invariants") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        SokobanEnv env = make_env(7, 7, 2, seed);
        const SokobanState& s = env.state();
        CHECK(s.boxes.size() == 2);
        CHECK(s.goals.size() == 2);
        CHECK(s.boxes_on_goals() < 2); // at least one box off goal
        CHECK_FALSE(s.is_wall(s.player.row, s.player.col));
        CHECK_FALSE(s.has_box(s.player));
        CHECK_FALSE(s.has_goal(s.player)); // fresh renders are lossless
        for (const GridPos& b : s.boxes) CHECK_FALSE(s.is_wall(b.row, b.col));
        for (const GridPos& g : s.goals) CHECK_FALSE(s.is_wall(g.row, g.col));
        // Border is solid wall.
        for (int c = 0; c < s.width; ++c) {
            CHECK(s.is_wall(0, c));
            CHECK(s.is_wall(s.height - 1, c));
        }
        for (int r = 0; r < s.height; ++r) {
            CHECK(s.is_wall(r, 0));
            CHECK(s.is_wall(r, s.width - 1));
        }
    }
}

TEST_CASE("variant dimensions match their configurations") {
    SokobanEnv standard = make_env(7, 7, 2, 1);
    CHECK(standard.state().width == 7);
    CHECK(standard.state().boxes.size() == 2);
    SokobanEnv hard1 = make_env(10, 10, 2, 1);
    CHECK(hard1.state().width == 10);
    CHECK(hard1.state().height == 10);
    SokobanEnv hard2 = make_env(7, 7, 3, 1);
    CHECK(hard2.state().boxes.size() == 3);
}

TEST_CASE("an independent solver cracks 200 generated standard boards") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        SokobanEnv env = make_env(7, 7, 2, seed);
        auto parsed = parse_sokoban_render(env.render());
        auto plan = solve_sokoban_render(parsed);
        REQUIRE_MESSAGE(plan.has_value(), "seed ", seed, " should be solvable");
    }
}

TEST_CASE("the independent solver also cracks larger variants") {
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        SokobanEnv hard1 = make_env(10, 10, 2, seed);
        CHECK(solve_sokoban_render(parse_sokoban_render(hard1.render())).has_value());
        SokobanEnv hard2 = make_env(7, 7, 3, seed);
        CHECK(solve_sokoban_render(parse_sokoban_render(hard2.render())).has_value());
    }
}

TEST_CASE("the retained forward solution replays to success") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        SokobanEnv env = make_env(7, 7, 2, seed);
        REQUIRE_FALSE(env.recorded_solution().empty());
        for (const std::string& cmd : env.recorded_solution()) {
            if (!env.running()) break;
            ActionOutcome outcome = env.apply_action(cmd);
            // Every recorded command must do something.
            CHECK(outcome.effective());
        }
        CHECK(env.status() == EpisodeState::Success);
    }
}

TEST_CASE("solver plans replay to success through the environment") {
    for (std::uint64_t seed = 300; seed < 320; ++seed) {
        SokobanEnv env = make_env(7, 7, 2, seed);
        auto plan = solve_sokoban_render(parse_sokoban_render(env.render()));
        REQUIRE(plan.has_value());
        for (const std::string& cmd : *plan) {
            REQUIRE(env.running());
            env.apply_action(cmd);
        }
        CHECK(env.status() == EpisodeState::Success);
    }
}

TEST_CASE("box count is conserved under random play") {
    SokobanEnv env = make_env(7, 7, 2, 11);
    SplitMix64 rng(0);
    const auto vocab = env.action_vocabulary();
    for (int i = 0; i < 10000 && env.running(); ++i) {
        env.apply_action(vocab[static_cast<std::size_t>(rng.below(vocab.size()))]);
        CHECK(env.state().boxes.size() == 2);
    }
}

TEST_CASE("effectiveness equals render change under random play") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        SokobanEnv env = make_env(7, 7, 2, seed);
        SplitMix64 rng(seed + 50);
        const auto vocab = env.action_vocabulary();
        for (int i = 0; i < 500 && env.running(); ++i) {
            const std::string before = env.render();
            ActionOutcome outcome =
                env.apply_action(vocab[static_cast<std::size_t>(rng.below(vocab.size()))]);
            CHECK(outcome.effective() == (before != env.render()));
        }
    }
}

TEST_CASE("moving into a box is ineffective; pushing moves both") {
    // Hand-built 5x5 board, goal directly behind the box:
    //   #####
    //   #...#
    //   #PBG#
    //   #...#
    //   #####
    SokobanState s;
    s.width = 5;
    s.height = 5;
    s.wall.assign(25, 0);
    for (int i = 0; i < 5; ++i) {
        s.wall[static_cast<std::size_t>(i)] = 1;          // top row
        s.wall[static_cast<std::size_t>(20 + i)] = 1;     // bottom row
        s.wall[static_cast<std::size_t>(5 * i)] = 1;      // left column
        s.wall[static_cast<std::size_t>(5 * i + 4)] = 1;  // right column
    }
    s.player = {2, 1};
    s.boxes = {{2, 2}};
    s.goals = {{2, 3}};

    CHECK(render_sokoban(s) == "#####\n#...#\n#PBG#\n#...#\n#####");

    auto parsed = parse_sokoban_render(render_sokoban(s));
    CHECK(parsed.player == std::pair<int, int>{2, 1});
    CHECK(parsed.boxes.count({2, 2}) == 1);
    CHECK(parsed.goals.count({2, 3}) == 1);
    auto plan = solve_sokoban_render(parsed);
    REQUIRE(plan.has_value());
    CHECK(*plan == std::vector<std::string>{"push right"});

    // A plain move cannot enter the box cell.
    SokobanState blocked = s;
    ActionOutcome no_push = step_sokoban(blocked, SokobanAction::MoveRight);
    CHECK(no_push.kind == OutcomeKind::Ineffective);
    CHECK(blocked.player == s.player);
    CHECK(blocked.boxes == s.boxes);

    // The push advances the box onto the goal and the player into its place.
    ActionOutcome push = step_sokoban(s, SokobanAction::PushRight);
    CHECK(push.kind == OutcomeKind::TerminalSuccess);
    CHECK(s.player == GridPos{2, 2});
    CHECK(s.boxes == std::vector<GridPos>{{2, 3}});
    CHECK(s.solved());

    // Pushing with a wall beyond the box is ineffective.
    SokobanState pinned = blocked;
    pinned.boxes = {{2, 3}};
    pinned.goals = {{1, 1}};
    pinned.player = {2, 2};
    ActionOutcome into_wall = step_sokoban(pinned, SokobanAction::PushRight);
    CHECK(into_wall.kind == OutcomeKind::Ineffective);
    CHECK(pinned.player == GridPos{2, 2});
}

TEST_CASE("push mechanics on a generated board") {
    // Find a generated board where the recorded solution starts with a push;
    // verify the push advances box and player together.
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        SokobanEnv env = make_env(7, 7, 2, seed);
        const std::string first = env.recorded_solution().front();
        if (first.rfind("push ", 0) != 0) continue;
        const SokobanState before = env.state();
        ActionOutcome outcome = env.apply_action(first);
        CHECK(outcome.effective());
        CHECK(env.state().player != before.player);
        CHECK(env.state().boxes != before.boxes);
        return;
    }
    FAIL("no seed produced a leading push");
}

TEST_CASE("blocked moves and pushes leave the board unchanged") {
    SokobanEnv env = make_env(7, 7, 2, 4);
    // Walk the player into the border wall repeatedly: find a direction whose
    // neighbor is a wall.
    const SokobanState& s = env.state();
    struct {
        const char* cmd;
        int dr, dc;
    } dirs[] = {{"move up", -1, 0}, {"move down", 1, 0}, {"move left", 0, -1},
                {"move right", 0, 1}};
    bool exercised = false;
    for (const auto& d : dirs) {
        if (s.is_wall(s.player.row + d.dr, s.player.col + d.dc)) {
            const std::string before = env.render();
            CHECK(env.apply_action(d.cmd).kind == OutcomeKind::Ineffective);
            CHECK(env.render() == before);
            exercised = true;
            break;
        }
    }
    // Pushing with no adjacent box in some direction is ineffective too.
    for (const auto& d : dirs) {
        GridPos ahead{s.player.row + d.dr, s.player.col + d.dc};
        if (!s.has_box(ahead)) {
            std::string cmd = std::string("push ") + (d.cmd + 5);
            CHECK(env.apply_action(cmd).kind == OutcomeKind::Ineffective);
            exercised = true;
            break;
        }
    }
    CHECK(exercised);
}

TEST_CASE("progress tracks boxes on goals") {
    SokobanEnv env = make_env(7, 7, 2, 21);
    auto [on_goal, total] = sokoban_progress(env.state());
    CHECK(total == 2);
    CHECK(on_goal < total);
    // Replay to success; progress must end at (2, 2).
    for (const std::string& cmd : env.recorded_solution()) {
        if (!env.running()) break;
        env.apply_action(cmd);
    }
    auto [done, total2] = sokoban_progress(env.state());
    CHECK(done == 2);
    CHECK(total2 == 2);
    CHECK(env.observation().find("Progress: 2/2 boxes on goals.") != std::string::npos);
}

TEST_CASE("render round trip recovers the fresh state") {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
        SokobanEnv env = make_env(7, 7, 2, seed);
        const SokobanState& s = env.state();
        auto parsed = parse_sokoban_render(env.render());
        CHECK(parsed.player == std::pair<int, int>{s.player.row, s.player.col});
        std::set<std::pair<int, int>> boxes, goals;
        for (const GridPos& b : s.boxes) boxes.insert({b.row, b.col});
        for (const GridPos& g : s.goals) goals.insert({g.row, g.col});
        CHECK(parsed.boxes == boxes);
        CHECK(parsed.goals == goals);
    }
}

TEST_CASE("generation is deterministic in the seed") {
    SokobanEnv a = make_env(7, 7, 2, 77);
    SokobanEnv b = make_env(7, 7, 2, 77);
    CHECK(a.render() == b.render());
    CHECK(a.recorded_solution() == b.recorded_solution());
    SokobanEnv c = make_env(7, 7, 2, 78);
    CHECK(a.render() != c.render());
}

TEST_CASE("description embeds the board, legend, and actions") {
    SokobanEnv env = make_env(7, 7, 2, 2);
    const std::string desc = env.description();
    CHECK(desc.find("You are playing Sokoban") == 0);
    CHECK(desc.find("Game state:") != std::string::npos);
    CHECK(desc.find(env.render()) != std::string::npos);
    CHECK(desc.find("*: Box on goal location") != std::string::npos);
    CHECK(desc.find("push up, push down, push left, push right") != std::string::npos);
    CHECK(desc.find("no operation (stay in place)") != std::string::npos);
}
