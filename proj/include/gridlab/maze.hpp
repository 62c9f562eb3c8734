#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridlab/env.hpp"
#include "gridlab/rng.hpp"

namespace gridlab {

enum class MazeAction { MoveUp, MoveDown, MoveLeft, MoveRight, NoOperation };

// Board squares: cells live at (even, even) coordinates and are always open;
// odd coordinates hold the wall slots the generator carves. The player moves
// one square at a time, so carved slots are walkable squares too.
struct MazeState {
    int size = 0; // odd board dimension, squares per side
    std::vector<std::uint8_t> wall; // row-major, 1 = wall square
    GridPos player;
    GridPos goal;

    bool in_bounds(int row, int col) const {
        return row >= 0 && row < size && col >= 0 && col < size;
    }
    bool is_wall(int row, int col) const {
        return wall[static_cast<std::size_t>(row) * size + col] != 0;
    }
};

// Randomized Prim's on the even-coordinate cell lattice. Player starts at the
// first available corner in scan order (top-left first; every corner is a
// cell, so this is the top-left corner). The goal is placed at the square of
// maximal BFS distance from the player, ties broken in row-major order.
// Throws InvalidSize for even sizes or sizes below 3.
MazeState generate_maze(int size, std::uint64_t seed);

// Space-separated symbols per row, LF between rows: P player, X goal,
// o open, * wall. The player occludes the goal when co-located.
std::string render_maze(const MazeState& state);

// BFS distances over open squares from `from`; -1 marks unreachable squares
// and walls.
std::vector<int> maze_bfs_distances(const MazeState& state, GridPos from);

// Shortest action sequence from the player to the goal (empty when already
// there, nullopt when unreachable, which generation never produces).
std::optional<std::vector<MazeAction>> maze_shortest_path(const MazeState& state);

const char* maze_action_command(MazeAction action);
std::optional<MazeAction> maze_action_from_command(const std::string& command);

// State-level dynamics: moves into walls or off the board are Ineffective;
// reaching the goal is TerminalSuccess.
ActionOutcome step_maze(MazeState& state, MazeAction action);

class MazeEnv final : public Environment {
  public:
    MazeEnv(int size, std::uint64_t seed)
        : Environment(EnvKind::Maze, seed), state_(generate_maze(size, seed)) {}

    const MazeState& state() const { return state_; }

    // Typed dynamics: moves into walls or off the board leave the state
    // unchanged, reaching the goal ends the episode.
    ActionOutcome step(MazeAction action);

    std::string render() const override { return render_maze(state_); }
    std::vector<std::string> action_vocabulary() const override;
    std::string description() const override;
    std::string observation() const override;
    std::unique_ptr<Environment> clone() const override { return std::make_unique<MazeEnv>(*this); }

  protected:
    StepEffect do_step(const std::string& command) override;

  private:
    MazeState state_;
};

} // namespace gridlab
