#include <doctest.h>

#include <string>

#include "gridlab/maze.hpp"
#include "test_util.hpp"

using namespace gridlab;
using testutil::maze_render_bfs;
using testutil::parse_maze_render;

namespace {

// Oracle pass over a render: connectivity, symbol counts, and goal placement
// at the row-major-first maximal breadth-first-search distance.
void check_maze_invariants(const std::string& render, int expected_size) {
    auto m = parse_maze_render(render);
    REQUIRE(m.rows == expected_size);
    REQUIRE(m.cols == expected_size);
    REQUIRE(m.player.first >= 0);
    REQUIRE(m.goal.first >= 0);

    int players = 0, goals = 0;
    for (const auto& row : m.grid) {
        for (const auto& tok : row) {
            players += tok == "P" ? 1 : 0;
            goals += tok == "X" ? 1 : 0;
            const bool known = tok == "P" || tok == "X" || tok == "o" || tok == "*";
            CHECK(known);
        }
    }
    CHECK(players == 1);
    CHECK(goals == 1);

    auto dist = maze_render_bfs(m, m.player);
    int best = -1;
    std::pair<int, int> first_best{-1, -1};
    for (int r = 0; r < m.rows; ++r) {
        for (int c = 0; c < m.cols; ++c) {
            if (!m.passable(r, c)) continue;
            const int d = dist[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
            CHECK(d >= 0); // connected
            if (d > best) {
                best = d;
                first_best = {r, c};
            }
        }
    }
    CHECK(m.goal == first_best);
}

} // namespace

TEST_CASE("even sizes and tiny sizes are rejected") {
    CHECK_THROWS_AS(generate_maze(4, 0), Error);
    CHECK_THROWS_AS(generate_maze(10, 5), Error);
    CHECK_THROWS_AS(generate_maze(1, 0), Error);
    CHECK_THROWS_AS(generate_maze(-3, 0), Error);
    try {
        generate_maze(4, 0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidSize);
    }
}

TEST_CASE("player starts at the first corner") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        MazeState s = generate_maze(11, seed);
        CHECK(s.player == GridPos{0, 0});
    }
}

TEST_CASE("generated mazes are connected with a farthest goal") {
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        check_maze_invariants(render_maze(generate_maze(11, seed)), 11);
    }
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        check_maze_invariants(render_maze(generate_maze(15, seed)), 15);
    }
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        check_maze_invariants(render_maze(generate_maze(3, seed)), 3);
    }
}

TEST_CASE("generation is deterministic in the seed") {
    CHECK(render_maze(generate_maze(11, 123)) == render_maze(generate_maze(11, 123)));
    CHECK(render_maze(generate_maze(11, 123)) != render_maze(generate_maze(11, 124)));
}

TEST_CASE("shortest path matches the render oracle and reaches the goal") {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        MazeEnv env(11, seed);
        auto m = parse_maze_render(env.render());
        auto dist = maze_render_bfs(m, m.player);
        const int oracle_len =
            dist[static_cast<std::size_t>(m.goal.first)][static_cast<std::size_t>(m.goal.second)];

        auto path = maze_shortest_path(env.state());
        REQUIRE(path.has_value());
        CHECK(static_cast<int>(path->size()) == oracle_len);

        ActionOutcome last;
        for (MazeAction a : *path) {
            REQUIRE(env.running());
            last = env.step(a);
            CHECK(last.kind != OutcomeKind::Ineffective);
        }
        CHECK(last.kind == OutcomeKind::TerminalSuccess);
        CHECK(env.status() == EpisodeState::Success);
    }
}

TEST_CASE("a single move changes exactly two render symbols") {
    MazeEnv env(11, 42);
    auto path = maze_shortest_path(env.state());
    REQUIRE(path.has_value());
    REQUIRE_FALSE(path->empty());
    const std::string before = env.render();
    env.step((*path)[0]);
    const std::string after = env.render();
    REQUIRE(before.size() == after.size());
    int diffs = 0;
    for (std::size_t i = 0; i < before.size(); ++i) diffs += before[i] != after[i] ? 1 : 0;
    CHECK(diffs == 2);
}

TEST_CASE("moves into walls and no operation are ineffective") {
    MazeEnv env(11, 7);
    // Player sits at the corner, so up and left are off-board.
    CHECK(env.step(MazeAction::MoveUp).kind == OutcomeKind::Ineffective);
    CHECK(env.step(MazeAction::MoveLeft).kind == OutcomeKind::Ineffective);
    CHECK(env.step(MazeAction::NoOperation).kind == OutcomeKind::Ineffective);
    CHECK(env.status() == EpisodeState::Running);
}

TEST_CASE("command round trip covers the whole vocabulary") {
    MazeEnv env(5, 0);
    for (const std::string& cmd : env.action_vocabulary()) {
        auto action = maze_action_from_command(cmd);
        REQUIRE(action.has_value());
        CHECK(maze_action_command(*action) == cmd);
    }
    CHECK_FALSE(maze_action_from_command("fly").has_value());
    CHECK_FALSE(maze_action_from_command("MOVE UP").has_value());
}

TEST_CASE("description embeds the board and the action list") {
    MazeEnv env(11, 3);
    const std::string desc = env.description();
    CHECK(desc.find("navigating a maze") != std::string::npos);
    CHECK(desc.find("Maze Board:") != std::string::npos);
    CHECK(desc.find(env.render()) != std::string::npos);
    CHECK(desc.find("'move up'") != std::string::npos);
    CHECK(desc.find("no operation") != std::string::npos);
    CHECK(env.observation().find(env.render()) != std::string::npos);
}
