#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gridlab/env.hpp"
#include "gridlab/rng.hpp"

namespace gridlab {

enum class SokobanAction {
    MoveUp,
    MoveDown,
    MoveLeft,
    MoveRight,
    PushUp,
    PushDown,
    PushLeft,
    PushRight,
    NoOperation,
};

struct SokobanState {
    int width = 0, height = 0;
    std::vector<std::uint8_t> wall; // row-major, 1 = wall
    GridPos player;
    std::vector<GridPos> boxes; // kept sorted row-major
    std::vector<GridPos> goals; // sorted row-major

    bool in_bounds(int row, int col) const {
        return row >= 0 && row < height && col >= 0 && col < width;
    }
    bool is_wall(int row, int col) const {
        return wall[static_cast<std::size_t>(row) * width + col] != 0;
    }
    bool has_box(GridPos p) const;
    bool has_goal(GridPos p) const;
    int boxes_on_goals() const;
    bool solved() const { return boxes_on_goals() == static_cast<int>(boxes.size()); }
};

struct SokobanInstance {
    SokobanState state;
    // Forward plan recorded by the reverse-play generator: replaying it from
    // the initial state reaches a solved position.
    std::vector<std::string> solution;
};

// Reverse-play generation: boxes start on the goals (a solved position), then
// a seeded sequence of pulls and player walks scrambles the board, so the
// instance is solvable by construction in at most reverse_steps pushes.
// Requires width, height >= 5 and 1 <= num_boxes <= floor(path cells / 4).
// Throws GenerationFailed when no valid instance emerges within the retry
// budget for this seed.
SokobanInstance generate_sokoban(int width, int height, int num_boxes, int reverse_steps,
                                 std::uint64_t seed);

// Default scramble length: 2 * (width + height) pulls per box.
int sokoban_default_reverse_steps(int width, int height, int num_boxes);

// Symbols per the legend: P player, B box, G goal, * box on goal, # wall,
// . empty. Player standing on a goal renders as P. No separators, LF between
// rows.
std::string render_sokoban(const SokobanState& state);

// (boxes on goals, total boxes)
std::pair<int, int> sokoban_progress(const SokobanState& state);

const char* sokoban_action_command(SokobanAction action);
std::optional<SokobanAction> sokoban_action_from_command(const std::string& command);

// State-level dynamics: moves step into empty floor only (a box blocks a
// plain move); pushes need a box ahead and a free cell beyond and advance
// both box and player; all boxes on goals is TerminalSuccess.
ActionOutcome step_sokoban(SokobanState& state, SokobanAction action);

// Breadth-first search over (player, boxes) states: the fewest-actions
// command sequence that puts every box on a goal, nullopt when unsolvable or
// the search exceeds max_states. Generated instances always solve.
std::optional<std::vector<std::string>> solve_sokoban(const SokobanState& state,
                                                      std::size_t max_states = 4000000);

class SokobanEnv final : public Environment {
  public:
    SokobanEnv(int width, int height, int num_boxes, int reverse_steps, std::uint64_t seed)
        : Environment(EnvKind::Sokoban, seed),
          instance_(generate_sokoban(width, height, num_boxes, reverse_steps, seed)) {}

    const SokobanState& state() const { return instance_.state; }
    const std::vector<std::string>& recorded_solution() const { return instance_.solution; }

    ActionOutcome step(SokobanAction action);

    std::string render() const override { return render_sokoban(instance_.state); }
    std::vector<std::string> action_vocabulary() const override;
    std::string description() const override;
    std::string observation() const override;
    std::unique_ptr<Environment> clone() const override {
        return std::make_unique<SokobanEnv>(*this);
    }

  protected:
    StepEffect do_step(const std::string& command) override;

  private:
    SokobanInstance instance_;
};

} // namespace gridlab
