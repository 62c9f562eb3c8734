#include "gridlab/maze.hpp"

#include <algorithm>
#include <deque>

namespace gridlab {

namespace {

struct FrontierWall {
    int wall_row, wall_col; // the slot between the two cells
    int to_row, to_col;     // cell on the far side
};

constexpr int kRowDelta[4] = {-1, 1, 0, 0}; // up, down, left, right
constexpr int kColDelta[4] = {0, 0, -1, 1};

} // namespace

MazeState generate_maze(int size, std::uint64_t seed) {
    if (size < 3 || size % 2 == 0) {
        throw Error(ErrorCode::InvalidSize, "maze size must be odd and >= 3, got " + std::to_string(size));
    }

    MazeState state;
    state.size = size;
    state.wall.assign(static_cast<std::size_t>(size) * size, 1);

    // Cells at (even, even) are always open.
    for (int r = 0; r < size; r += 2)
        for (int c = 0; c < size; c += 2) state.wall[static_cast<std::size_t>(r) * size + c] = 0;

    SplitMix64 rng(seed);
    const int cells = (size + 1) / 2; // cells per side
    std::vector<std::uint8_t> visited(static_cast<std::size_t>(cells) * cells, 0);
    std::vector<FrontierWall> frontier;

    auto push_walls = [&](int cr, int cc) {
        for (int d = 0; d < 4; ++d) {
            const int nr = cr + kRowDelta[d], nc = cc + kColDelta[d];
            if (nr < 0 || nr >= cells || nc < 0 || nc >= cells) continue;
            frontier.push_back({cr + nr, cc + nc, nr, nc}); // slot is the midpoint in board coords
        }
    };

    visited[0] = 1; // Prim grows from the player's corner cell (0, 0)
    push_walls(0, 0);
    while (!frontier.empty()) {
        const std::size_t i = rng.below(frontier.size());
        const FrontierWall w = frontier[i];
        frontier[i] = frontier.back();
        frontier.pop_back();
        std::uint8_t& seen = visited[static_cast<std::size_t>(w.to_row) * cells + w.to_col];
        if (seen) continue;
        seen = 1;
        state.wall[static_cast<std::size_t>(w.wall_row) * size + w.wall_col] = 0;
        push_walls(w.to_row, w.to_col);
    }

    state.player = {0, 0};
    const std::vector<int> dist = maze_bfs_distances(state, state.player);
    int best = -1;
    GridPos goal{0, 0};
    for (int r = 0; r < size; ++r) {
        for (int c = 0; c < size; ++c) {
            const int d = dist[static_cast<std::size_t>(r) * size + c];
            if (d > best) {
                best = d;
                goal = {r, c};
            }
        }
    }
    state.goal = goal;
    return state;
}

std::string render_maze(const MazeState& state) {
    std::string out;
    out.reserve(static_cast<std::size_t>(state.size) * (state.size * 2));
    for (int r = 0; r < state.size; ++r) {
        if (r > 0) out += '\n';
        for (int c = 0; c < state.size; ++c) {
            if (c > 0) out += ' ';
            char sym;
            if (state.player.row == r && state.player.col == c) sym = 'P';
            else if (state.goal.row == r && state.goal.col == c) sym = 'X';
            else if (state.is_wall(r, c)) sym = '*';
            else sym = 'o';
            out += sym;
        }
    }
    return out;
}

std::vector<int> maze_bfs_distances(const MazeState& state, GridPos from) {
    std::vector<int> dist(static_cast<std::size_t>(state.size) * state.size, -1);
    std::deque<GridPos> queue;
    dist[static_cast<std::size_t>(from.row) * state.size + from.col] = 0;
    queue.push_back(from);
    while (!queue.empty()) {
        const GridPos p = queue.front();
        queue.pop_front();
        const int d = dist[static_cast<std::size_t>(p.row) * state.size + p.col];
        for (int k = 0; k < 4; ++k) {
            const int nr = p.row + kRowDelta[k], nc = p.col + kColDelta[k];
            if (!state.in_bounds(nr, nc) || state.is_wall(nr, nc)) continue;
            int& nd = dist[static_cast<std::size_t>(nr) * state.size + nc];
            if (nd != -1) continue;
            nd = d + 1;
            queue.push_back({nr, nc});
        }
    }
    return dist;
}

std::optional<std::vector<MazeAction>> maze_shortest_path(const MazeState& state) {
    const std::vector<int> dist = maze_bfs_distances(state, state.player);
    const int goal_d = dist[static_cast<std::size_t>(state.goal.row) * state.size + state.goal.col];
    if (goal_d < 0) return std::nullopt;

    // Walk backwards from the goal along strictly decreasing distances.
    static constexpr MazeAction kTowards[4] = {MazeAction::MoveDown, MazeAction::MoveUp,
                                               MazeAction::MoveRight, MazeAction::MoveLeft};
    std::vector<MazeAction> path(static_cast<std::size_t>(goal_d), MazeAction::NoOperation);
    GridPos cur = state.goal;
    for (int d = goal_d; d > 0; --d) {
        for (int k = 0; k < 4; ++k) {
            const int nr = cur.row + kRowDelta[k], nc = cur.col + kColDelta[k];
            if (!state.in_bounds(nr, nc) || state.is_wall(nr, nc)) continue;
            if (dist[static_cast<std::size_t>(nr) * state.size + nc] == d - 1) {
                // kTowards[k] moves from (nr, nc) to cur.
                path[static_cast<std::size_t>(d) - 1] = kTowards[k];
                cur = {nr, nc};
                break;
            }
        }
    }
    return path;
}

const char* maze_action_command(MazeAction action) {
    switch (action) {
    case MazeAction::MoveUp: return "move up";
    case MazeAction::MoveDown: return "move down";
    case MazeAction::MoveLeft: return "move left";
    case MazeAction::MoveRight: return "move right";
    case MazeAction::NoOperation: return "no operation";
    }
    return "?";
}

std::optional<MazeAction> maze_action_from_command(const std::string& command) {
    if (command == "move up") return MazeAction::MoveUp;
    if (command == "move down") return MazeAction::MoveDown;
    if (command == "move left") return MazeAction::MoveLeft;
    if (command == "move right") return MazeAction::MoveRight;
    if (command == "no operation") return MazeAction::NoOperation;
    return std::nullopt;
}

ActionOutcome MazeEnv::step(MazeAction action) { return apply_action(maze_action_command(action)); }

std::vector<std::string> MazeEnv::action_vocabulary() const {
    return {"move up", "move down", "move left", "move right", "no operation"};
}

std::string MazeEnv::observation() const { return "Maze Board:\n" + render(); }

std::string MazeEnv::description() const {
    std::string out =
        "You are an agent tasked with navigating a maze. Your goal is to move the player (P) "
        "to the destination (X) through a series of turns.\n\n";
    out += observation();
    out +=
        "\n\nLegend:\n"
        "'P' represents the player starting point\n"
        "'X' represents the destination point\n"
        "'o' represents empty space (passable)\n"
        "'*' represents a wall (impassable)\n\n"
        "Your available moves are:\n"
        "'move up': move player one cell up.\n"
        "'move down': move player one cell down\n"
        "'move left': move player one cell to the left\n"
        "'move right': move player one cell to the right\n"
        "'no operation': stay in place";
    return out;
}

ActionOutcome step_maze(MazeState& state, MazeAction action) {
    ActionOutcome out;
    out.kind = OutcomeKind::Ineffective;
    if (action == MazeAction::NoOperation) {
        out.note = "no_operation";
        return out;
    }
    int dr = 0, dc = 0;
    switch (action) {
    case MazeAction::MoveUp: dr = -1; break;
    case MazeAction::MoveDown: dr = 1; break;
    case MazeAction::MoveLeft: dc = -1; break;
    case MazeAction::MoveRight: dc = 1; break;
    default: break;
    }
    const int nr = state.player.row + dr, nc = state.player.col + dc;
    if (!state.in_bounds(nr, nc) || state.is_wall(nr, nc)) {
        out.note = "blocked";
        return out;
    }
    state.player = {nr, nc};
    if (state.player == state.goal) {
        out.kind = OutcomeKind::TerminalSuccess;
        out.note = "reached_goal";
    } else {
        out.kind = OutcomeKind::Effective;
        out.note = "moved";
    }
    return out;
}

Environment::StepEffect MazeEnv::do_step(const std::string& command) {
    const std::optional<MazeAction> action = maze_action_from_command(command);
    if (!action) return {true, false, "unknown_command"};
    const ActionOutcome out = step_maze(state_, *action);
    return {out.kind == OutcomeKind::Invalid, out.kind == OutcomeKind::TerminalSuccess, out.note};
}

} // namespace gridlab
