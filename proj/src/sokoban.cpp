#include "gridlab/sokoban.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <sstream>
#include <unordered_map>

namespace gridlab {

namespace {

struct Delta {
    int dr, dc;
};

// Indexed by direction: up, down, left, right.
constexpr std::array<Delta, 4> kDeltas = {{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
constexpr std::array<const char*, 4> kDirNames = {"up", "down", "left", "right"};

int opposite(int dir) {
    switch (dir) {
        case 0: return 1;
        case 1: return 0;
        case 2: return 3;
        default: return 2;
    }
}

void sort_boxes(std::vector<GridPos>& boxes) { std::sort(boxes.begin(), boxes.end()); }

bool is_floor(const SokobanState& s, int row, int col) {
    return s.in_bounds(row, col) && !s.is_wall(row, col);
}

bool open_cell(const SokobanState& s, int row, int col) {
    return is_floor(s, row, col) && !s.has_box({row, col});
}

void move_box(SokobanState& s, GridPos from, GridPos to) {
    auto it = std::find(s.boxes.begin(), s.boxes.end(), from);
    *it = to;
    sort_boxes(s.boxes);
}

// Largest 4-connected component of floor cells, as a cell list.
std::vector<GridPos> largest_floor_component(const SokobanState& s) {
    std::vector<int> label(static_cast<std::size_t>(s.width) * s.height, -1);
    std::vector<GridPos> best;
    for (int r = 0; r < s.height; ++r) {
        for (int c = 0; c < s.width; ++c) {
            if (s.is_wall(r, c) || label[static_cast<std::size_t>(r) * s.width + c] >= 0) continue;
            std::vector<GridPos> component;
            std::vector<GridPos> stack{{r, c}};
            label[static_cast<std::size_t>(r) * s.width + c] = 1;
            while (!stack.empty()) {
                GridPos p = stack.back();
                stack.pop_back();
                component.push_back(p);
                for (const Delta& d : kDeltas) {
                    int nr = p.row + d.dr, nc = p.col + d.dc;
                    if (!is_floor(s, nr, nc)) continue;
                    int& mark = label[static_cast<std::size_t>(nr) * s.width + nc];
                    if (mark >= 0) continue;
                    mark = 1;
                    stack.push_back({nr, nc});
                }
            }
            if (component.size() > best.size()) best = std::move(component);
        }
    }
    std::sort(best.begin(), best.end());
    return best;
}

struct ReverseOp {
    bool pull; // otherwise a plain player move
    int dir;   // direction the player moved
};

// One generation attempt; returns empty optional when the attempt fails a
// quality gate (not enough room, no pull ever possible, or the scramble left
// the board solved).
std::optional<SokobanInstance> attempt_generation(int width, int height, int num_boxes,
                                                  int reverse_steps, SplitMix64& rng) {
    SokobanState s;
    s.width = width;
    s.height = height;
    s.wall.assign(static_cast<std::size_t>(width) * height, 0);
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const bool border = r == 0 || c == 0 || r == height - 1 || c == width - 1;
            if (border || rng.chance(0.2)) {
                s.wall[static_cast<std::size_t>(r) * width + c] = 1;
            }
        }
    }

    std::vector<GridPos> room = largest_floor_component(s);
    if (static_cast<int>(room.size()) < 4 * num_boxes + 1) return std::nullopt;

    // Goals (and the boxes on them) are distinct cells of the room.
    std::vector<GridPos> pool = room;
    for (int i = 0; i < num_boxes; ++i) {
        std::size_t pick = static_cast<std::size_t>(rng.below(pool.size()));
        s.goals.push_back(pool[pick]);
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    }
    sort_boxes(s.goals);
    s.boxes = s.goals;
    s.player = pool[static_cast<std::size_t>(rng.below(pool.size()))];

    // Scramble backwards from the solved position: pulls are inverse pushes,
    // so inverting the op sequence yields a forward solution.
    std::vector<ReverseOp> ops;
    int pulls_done = 0;
    const int max_iters = 12 * reverse_steps + 32;
    for (int iter = 0; iter < max_iters && pulls_done < reverse_steps; ++iter) {
        std::vector<int> pull_dirs, move_dirs;
        for (int dir = 0; dir < 4; ++dir) {
            const Delta& d = kDeltas[static_cast<std::size_t>(dir)];
            GridPos dest{s.player.row + d.dr, s.player.col + d.dc};
            if (!open_cell(s, dest.row, dest.col)) continue;
            move_dirs.push_back(dir);
            GridPos behind{s.player.row - d.dr, s.player.col - d.dc};
            if (s.has_box(behind)) pull_dirs.push_back(dir);
        }
        if (pull_dirs.empty() && move_dirs.empty()) break;
        const bool do_pull = !pull_dirs.empty() && (move_dirs.empty() || rng.chance(0.6));
        if (do_pull) {
            int dir = pull_dirs[static_cast<std::size_t>(rng.below(pull_dirs.size()))];
            const Delta& d = kDeltas[static_cast<std::size_t>(dir)];
            GridPos old_player = s.player;
            move_box(s, {old_player.row - d.dr, old_player.col - d.dc}, old_player);
            s.player = {old_player.row + d.dr, old_player.col + d.dc};
            ops.push_back({true, dir});
            ++pulls_done;
        } else {
            int dir = move_dirs[static_cast<std::size_t>(rng.below(move_dirs.size()))];
            const Delta& d = kDeltas[static_cast<std::size_t>(dir)];
            s.player = {s.player.row + d.dr, s.player.col + d.dc};
            ops.push_back({false, dir});
        }
    }
    // Fresh boards must render losslessly: a player spawned on a goal would
    // hide that goal from the only observation channel.
    if (pulls_done == 0 || s.solved() || s.has_goal(s.player)) return std::nullopt;

    SokobanInstance out;
    out.state = s;
    out.solution.reserve(ops.size());
    for (auto it = ops.rbegin(); it != ops.rend(); ++it) {
        std::string cmd = it->pull ? "push " : "move ";
        cmd += kDirNames[static_cast<std::size_t>(opposite(it->dir))];
        out.solution.push_back(std::move(cmd));
    }
    return out;
}

} // namespace

bool SokobanState::has_box(GridPos p) const {
    return std::find(boxes.begin(), boxes.end(), p) != boxes.end();
}

bool SokobanState::has_goal(GridPos p) const {
    return std::find(goals.begin(), goals.end(), p) != goals.end();
}

int SokobanState::boxes_on_goals() const {
    int n = 0;
    for (const GridPos& b : boxes) n += has_goal(b) ? 1 : 0;
    return n;
}

int sokoban_default_reverse_steps(int width, int height, int num_boxes) {
    return 2 * (width + height) * num_boxes;
}

SokobanInstance generate_sokoban(int width, int height, int num_boxes, int reverse_steps,
                                 std::uint64_t seed) {
    if (width < 5 || height < 5) {
        throw Error(ErrorCode::InvalidSize, "sokoban board must be at least 5x5");
    }
    if (num_boxes < 1) throw Error(ErrorCode::InvalidSize, "sokoban needs at least one box");
    if (reverse_steps < 1) {
        throw Error(ErrorCode::InvalidSize, "sokoban reverse_steps must be positive");
    }
    constexpr int kMaxAttempts = 100;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        SplitMix64 rng(SplitMix64::derive(
            seed, {SplitMix64::hash_tag("sokoban"), static_cast<std::uint64_t>(attempt)}));
        std::optional<SokobanInstance> inst =
            attempt_generation(width, height, num_boxes, reverse_steps, rng);
        if (inst) return std::move(*inst);
    }
    std::ostringstream msg;
    msg << "no valid sokoban instance for seed " << seed << " (" << width << "x" << height << ", "
        << num_boxes << " boxes)";
    throw Error(ErrorCode::GenerationFailed, msg.str());
}

std::string render_sokoban(const SokobanState& state) {
    std::string out;
    out.reserve(static_cast<std::size_t>(state.height) * (state.width + 1));
    for (int r = 0; r < state.height; ++r) {
        for (int c = 0; c < state.width; ++c) {
            char symbol = '.';
            GridPos p{r, c};
            if (state.player == p) {
                symbol = 'P';
            } else if (state.has_box(p)) {
                symbol = state.has_goal(p) ? '*' : 'B';
            } else if (state.has_goal(p)) {
                symbol = 'G';
            } else if (state.is_wall(r, c)) {
                symbol = '#';
            }
            out.push_back(symbol);
        }
        if (r + 1 < state.height) out.push_back('\n');
    }
    return out;
}

std::pair<int, int> sokoban_progress(const SokobanState& state) {
    return {state.boxes_on_goals(), static_cast<int>(state.boxes.size())};
}

const char* sokoban_action_command(SokobanAction action) {
    switch (action) {
        case SokobanAction::MoveUp: return "move up";
        case SokobanAction::MoveDown: return "move down";
        case SokobanAction::MoveLeft: return "move left";
        case SokobanAction::MoveRight: return "move right";
        case SokobanAction::PushUp: return "push up";
        case SokobanAction::PushDown: return "push down";
        case SokobanAction::PushLeft: return "push left";
        case SokobanAction::PushRight: return "push right";
        case SokobanAction::NoOperation: return "no operation";
    }
    return "";
}

std::optional<SokobanAction> sokoban_action_from_command(const std::string& command) {
    for (SokobanAction a :
         {SokobanAction::MoveUp, SokobanAction::MoveDown, SokobanAction::MoveLeft,
          SokobanAction::MoveRight, SokobanAction::PushUp, SokobanAction::PushDown,
          SokobanAction::PushLeft, SokobanAction::PushRight, SokobanAction::NoOperation}) {
        if (command == sokoban_action_command(a)) return a;
    }
    return std::nullopt;
}

ActionOutcome SokobanEnv::step(SokobanAction action) {
    return apply_action(sokoban_action_command(action));
}

std::vector<std::string> SokobanEnv::action_vocabulary() const {
    return {"move up",  "move down", "move left",  "move right",  "push up",
            "push down", "push left", "push right", "no operation"};
}

std::string SokobanEnv::observation() const {
    const auto [on_goal, total] = sokoban_progress(instance_.state);
    std::ostringstream out;
    out << "Game state:\n"
        << render() << "\n\nProgress: " << on_goal << "/" << total << " boxes on goals.";
    return out.str();
}

std::string SokobanEnv::description() const {
    std::string out =
        "You are playing Sokoban, a puzzle game where you need to push boxes onto goal "
        "locations.\n\n";
    out += observation();
    out +=
        "\n\nLegend:\n"
        "- P: Player\n"
        "- B: Box\n"
        "- G: Goal location\n"
        "- *: Box on goal location\n"
        "- #: Wall\n"
        "- .: Empty space\n\n"
        "Available actions:\n"
        "- push up, push down, push left, push right (to push a box if adjacent)\n"
        "- move up, move down, move left, move right (to move without pushing)\n"
        "- no operation (stay in place)";
    return out;
}

ActionOutcome step_sokoban(SokobanState& s, SokobanAction action) {
    ActionOutcome out;
    out.kind = OutcomeKind::Ineffective;
    if (action == SokobanAction::NoOperation) {
        out.note = "no_operation";
        return out;
    }

    const int idx = static_cast<int>(action);
    const bool is_push = idx >= static_cast<int>(SokobanAction::PushUp);
    const Delta& d = kDeltas[static_cast<std::size_t>(idx % 4)];
    GridPos ahead{s.player.row + d.dr, s.player.col + d.dc};

    if (!is_push) {
        if (!is_floor(s, ahead.row, ahead.col)) {
            out.note = "blocked_by_wall";
        } else if (s.has_box(ahead)) {
            out.note = "blocked_by_box";
        } else {
            s.player = ahead;
            out.kind = OutcomeKind::Effective;
            out.note = "moved";
        }
        return out;
    }

    if (!s.has_box(ahead)) {
        out.note = "no_box_to_push";
        return out;
    }
    GridPos beyond{ahead.row + d.dr, ahead.col + d.dc};
    if (!open_cell(s, beyond.row, beyond.col)) {
        out.note = "push_blocked";
        return out;
    }
    move_box(s, ahead, beyond);
    s.player = ahead;
    if (s.solved()) {
        out.kind = OutcomeKind::TerminalSuccess;
        out.note = "all_boxes_on_goals";
    } else {
        out.kind = OutcomeKind::Effective;
        out.note = s.has_goal(beyond) ? "box_on_goal" : "pushed";
    }
    return out;
}

Environment::StepEffect SokobanEnv::do_step(const std::string& command) {
    const std::optional<SokobanAction> action = sokoban_action_from_command(command);
    if (!action) return {true, false, "unknown_command"};
    const ActionOutcome out = step_sokoban(instance_.state, *action);
    return {out.kind == OutcomeKind::Invalid, out.kind == OutcomeKind::TerminalSuccess, out.note};
}

namespace {

// Pack player + sorted box cells into one key (7 bits per cell index covers
// boards up to 128 squares; box count is small by construction).
std::uint64_t pack_state(const SokobanState& s) {
    std::uint64_t key = static_cast<std::uint64_t>(s.player.row * s.width + s.player.col);
    for (const GridPos& b : s.boxes) {
        key = (key << 7) | static_cast<std::uint64_t>(b.row * s.width + b.col);
    }
    return key;
}

} // namespace

std::optional<std::vector<std::string>> solve_sokoban(const SokobanState& start,
                                                      std::size_t max_states) {
    if (start.boxes.size() > 8) return std::nullopt; // key packing limit
    if (start.solved()) return std::vector<std::string>{};

    static const SokobanAction kAll[8] = {
        SokobanAction::MoveUp,  SokobanAction::MoveDown,  SokobanAction::MoveLeft,
        SokobanAction::MoveRight, SokobanAction::PushUp,  SokobanAction::PushDown,
        SokobanAction::PushLeft, SokobanAction::PushRight,
    };

    struct Node {
        SokobanState state;
        std::uint64_t key;
    };
    std::unordered_map<std::uint64_t, std::pair<std::uint64_t, SokobanAction>> parent;
    std::deque<Node> frontier;
    const std::uint64_t start_key = pack_state(start);
    parent.emplace(start_key, std::make_pair(start_key, SokobanAction::NoOperation));
    frontier.push_back({start, start_key});

    while (!frontier.empty() && parent.size() < max_states) {
        Node node = std::move(frontier.front());
        frontier.pop_front();
        for (SokobanAction action : kAll) {
            SokobanState next = node.state;
            const ActionOutcome out = step_sokoban(next, action);
            if (!out.effective()) continue;
            const std::uint64_t key = pack_state(next);
            if (parent.count(key)) continue;
            parent.emplace(key, std::make_pair(node.key, action));
            if (out.kind == OutcomeKind::TerminalSuccess) {
                std::vector<std::string> plan;
                std::uint64_t cursor = key;
                while (cursor != start_key) {
                    const auto& [prev, via] = parent.at(cursor);
                    plan.push_back(sokoban_action_command(via));
                    cursor = prev;
                }
                std::reverse(plan.begin(), plan.end());
                return plan;
            }
            frontier.push_back({std::move(next), key});
        }
    }
    return std::nullopt;
}

} // namespace gridlab
