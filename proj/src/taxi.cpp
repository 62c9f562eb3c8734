#include "gridlab/taxi.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace gridlab {

namespace {

std::string cell_content(const TaxiState& s, GridPos p) {
    const bool taxi_here = s.taxi == p;
    const bool carrying = s.status == PassengerStatus::InTaxi;
    const bool delivered = s.status == PassengerStatus::Delivered;
    const bool waiting_passenger_here =
        s.status == PassengerStatus::Waiting && s.passenger_cell() == p;
    const bool delivered_passenger_here = delivered && s.destination_cell() == p;
    const bool destination_here = s.destination_cell() == p;

    if (taxi_here) {
        if (carrying) return destination_here ? "T(P)/D" : "T(P)";
        std::string out = "T";
        if (waiting_passenger_here || delivered_passenger_here) out += "/P";
        if (destination_here) out += "/D";
        return out;
    }
    if (waiting_passenger_here) return destination_here ? "P/D" : "P";
    if (destination_here) return "D";
    for (std::size_t i = 0; i < TaxiState::landmarks().size(); ++i) {
        if (TaxiState::landmarks()[i] == p) return std::string(1, TaxiState::landmark_letters()[i]);
    }
    return "";
}

// 5-character slot; longer content (only "T(P)/D") is emitted unpadded.
std::string pad_slot(const std::string& content) {
    constexpr int kWidth = 5;
    const int len = static_cast<int>(content.size());
    if (len >= kWidth) return content;
    const int left = (kWidth - len) / 2;
    const int right = kWidth - len - left;
    return std::string(left, ' ') + content + std::string(right, ' ');
}

} // namespace

const char* passenger_status_name(PassengerStatus status) {
    switch (status) {
        case PassengerStatus::Waiting: return "waiting";
        case PassengerStatus::InTaxi: return "in_taxi";
        case PassengerStatus::Delivered: return "delivered";
    }
    return "";
}

const std::array<char, 4>& TaxiState::landmark_letters() {
    static const std::array<char, 4> letters = {'R', 'G', 'Y', 'B'};
    return letters;
}

const std::array<GridPos, 4>& TaxiState::landmarks() {
    static const std::array<GridPos, 4> cells = {{{0, 0}, {0, 4}, {4, 0}, {4, 3}}};
    return cells;
}

const std::vector<GridPos>& TaxiState::wall_segments() {
    static const std::vector<GridPos> segments = {{0, 1}, {1, 1}, {3, 0}, {4, 0}, {3, 2}, {4, 2}};
    return segments;
}

bool TaxiState::wall_between(GridPos cell, GridPos right_neighbor) {
    if (cell.row != right_neighbor.row || right_neighbor.col != cell.col + 1) return false;
    const auto& segs = wall_segments();
    return std::find(segs.begin(), segs.end(), cell) != segs.end();
}

TaxiState generate_taxi(std::uint64_t seed) {
    SplitMix64 rng(SplitMix64::derive(seed, {SplitMix64::hash_tag("taxi")}));
    TaxiState s;
    const int cell = static_cast<int>(rng.below(TaxiState::kSize * TaxiState::kSize));
    s.taxi = {cell / TaxiState::kSize, cell % TaxiState::kSize};
    s.passenger_landmark = static_cast<int>(rng.below(4));
    int dest = static_cast<int>(rng.below(3));
    if (dest >= s.passenger_landmark) ++dest;
    s.destination_landmark = dest;
    s.status = PassengerStatus::Waiting;
    return s;
}

std::string render_taxi(const TaxiState& state) {
    constexpr int kSize = TaxiState::kSize;
    std::string out = "+";
    out.append(29, '-');
    out += "+\n";
    for (int r = 0; r < kSize; ++r) {
        out += "|";
        for (int c = 0; c < kSize; ++c) {
            out += pad_slot(cell_content(state, {r, c}));
            if (c + 1 < kSize) {
                out += TaxiState::wall_between({r, c}, {r, c + 1}) ? "|" : ":";
            }
        }
        out += "|\n";
    }
    out += "+";
    out.append(29, '-');
    out += "+";
    return out;
}

const char* taxi_action_command(TaxiAction action) {
    switch (action) {
        case TaxiAction::MoveUp: return "move up";
        case TaxiAction::MoveDown: return "move down";
        case TaxiAction::MoveLeft: return "move left";
        case TaxiAction::MoveRight: return "move right";
        case TaxiAction::Pickup: return "pickup";
        case TaxiAction::Dropoff: return "dropoff";
    }
    return "";
}

std::optional<TaxiAction> taxi_action_from_command(const std::string& command) {
    for (TaxiAction a : {TaxiAction::MoveUp, TaxiAction::MoveDown, TaxiAction::MoveLeft,
                         TaxiAction::MoveRight, TaxiAction::Pickup, TaxiAction::Dropoff}) {
        if (command == taxi_action_command(a)) return a;
    }
    return std::nullopt;
}

ActionOutcome TaxiEnv::step(TaxiAction action) { return apply_action(taxi_action_command(action)); }

std::string TaxiEnv::state_flags() const {
    return std::string("passenger=") + passenger_status_name(state_.status);
}

std::vector<std::string> TaxiEnv::action_vocabulary() const {
    return {"move up", "move down", "move left", "move right", "pickup", "dropoff"};
}

std::string TaxiEnv::observation() const { return "Taxi Map:\n" + render(); }

std::string TaxiEnv::description() const {
    std::string out =
        "You are an agent controlling a taxi in a 5x5 grid world. Your goal is to pick up the "
        "passenger and deliver them to the destination.\n\n";
    out += observation();
    out +=
        "\n\n"
        "'|' represents a wall (an impassable barrier).\n"
        "':' represents an open path (a tile you can move through).\n"
        "'T' represents the taxi position.\n"
        "'P' represents the passenger position (if not in the taxi).\n"
        "'D' represents the destination.\n"
        "'R', 'G', 'Y', 'B' are special points.\n"
        "'T/P' means the taxi and the passenger are in the same cell, but the passenger has NOT "
        "been picked up yet.\n"
        "'T(P)' means the taxi is carrying the passenger (the passenger has been picked up).\n"
        "'T(P)/D' means the taxi carrying the passenger is at the destination.\n"
        "'T/P/D' means the taxi and the passenger all arrive at the destination cell.\n"
        "'P/D' means the passenger and the destination are in the same cell (passenger not picked "
        "up).\n\n"
        "Your available actions are:\n"
        "'move down': move the taxi one cell down.\n"
        "'move up': move the taxi one cell up.\n"
        "'move right': move the taxi one cell right.\n"
        "'move left': move the taxi one cell left.\n"
        "'pickup': pick up the passenger. This action is only valid when the taxi is at the "
        "passenger's location; otherwise, it will incur a penalty.\n"
        "'dropoff': drop off the passenger. This action is only valid when the taxi is at the "
        "destination and carrying the passenger; otherwise, it will incur a penalty.";
    return out;
}

ActionOutcome step_taxi(TaxiState& state, TaxiAction action) {
    ActionOutcome out;
    switch (action) {
        case TaxiAction::Pickup:
            if (state.status == PassengerStatus::Waiting && state.taxi == state.passenger_cell()) {
                state.status = PassengerStatus::InTaxi;
                out.kind = OutcomeKind::Effective;
                out.note = "picked_up";
            } else {
                out.kind = OutcomeKind::Invalid;
                out.note = "invalid_pickup";
            }
            return out;
        case TaxiAction::Dropoff:
            if (state.status == PassengerStatus::InTaxi &&
                state.taxi == state.destination_cell()) {
                state.status = PassengerStatus::Delivered;
                out.kind = OutcomeKind::TerminalSuccess;
                out.note = "delivered";
            } else {
                out.kind = OutcomeKind::Invalid;
                out.note = "invalid_dropoff";
            }
            return out;
        default: break;
    }

    int dr = 0, dc = 0;
    switch (action) {
        case TaxiAction::MoveUp: dr = -1; break;
        case TaxiAction::MoveDown: dr = 1; break;
        case TaxiAction::MoveLeft: dc = -1; break;
        case TaxiAction::MoveRight: dc = 1; break;
        default: break;
    }
    const GridPos target{state.taxi.row + dr, state.taxi.col + dc};
    if (target.row < 0 || target.row >= TaxiState::kSize || target.col < 0 ||
        target.col >= TaxiState::kSize) {
        out.kind = OutcomeKind::Ineffective;
        out.note = "blocked_by_edge";
        return out;
    }
    const GridPos left_cell = dc >= 0 ? state.taxi : target;
    const GridPos right_cell = dc >= 0 ? target : state.taxi;
    if (dc != 0 && TaxiState::wall_between(left_cell, right_cell)) {
        out.kind = OutcomeKind::Ineffective;
        out.note = "blocked_by_wall";
        return out;
    }
    state.taxi = target;
    out.kind = OutcomeKind::Effective;
    out.note = "moved";
    return out;
}

Environment::StepEffect TaxiEnv::do_step(const std::string& command) {
    const std::optional<TaxiAction> action = taxi_action_from_command(command);
    if (!action) return {true, false, "unknown_command"};
    const ActionOutcome out = step_taxi(state_, *action);
    return {out.kind == OutcomeKind::Invalid, out.kind == OutcomeKind::TerminalSuccess, out.note};
}

std::vector<TaxiAction> taxi_route(GridPos from, GridPos to) {
    static const TaxiAction kMoves[4] = {TaxiAction::MoveUp, TaxiAction::MoveDown,
                                         TaxiAction::MoveLeft, TaxiAction::MoveRight};
    static const int kDr[4] = {-1, 1, 0, 0};
    static const int kDc[4] = {0, 0, -1, 1};

    const auto index = [](GridPos p) { return p.row * TaxiState::kSize + p.col; };
    std::array<int, 25> came_from;
    std::array<TaxiAction, 25> came_via;
    came_from.fill(-1);
    came_via.fill(TaxiAction::MoveUp);
    std::deque<GridPos> frontier;
    frontier.push_back(from);
    came_from[static_cast<std::size_t>(index(from))] = index(from);

    while (!frontier.empty()) {
        const GridPos cell = frontier.front();
        frontier.pop_front();
        if (cell == to) break;
        for (int k = 0; k < 4; ++k) {
            const GridPos next{cell.row + kDr[k], cell.col + kDc[k]};
            if (next.row < 0 || next.row >= TaxiState::kSize || next.col < 0 ||
                next.col >= TaxiState::kSize) {
                continue;
            }
            if (kDc[k] != 0) {
                const GridPos left = kDc[k] > 0 ? cell : next;
                const GridPos right = kDc[k] > 0 ? next : cell;
                if (TaxiState::wall_between(left, right)) continue;
            }
            auto& mark = came_from[static_cast<std::size_t>(index(next))];
            if (mark >= 0) continue;
            mark = index(cell);
            came_via[static_cast<std::size_t>(index(next))] = kMoves[k];
            frontier.push_back(next);
        }
    }

    std::vector<TaxiAction> route;
    int cursor = index(to);
    const int origin = index(from);
    while (cursor != origin) {
        route.push_back(came_via[static_cast<std::size_t>(cursor)]);
        cursor = came_from[static_cast<std::size_t>(cursor)];
    }
    std::reverse(route.begin(), route.end());
    return route;
}

std::vector<std::string> taxi_oracle_plan(const TaxiState& state) {
    std::vector<std::string> plan;
    if (state.status == PassengerStatus::Delivered) return plan;
    GridPos cursor = state.taxi;
    if (state.status == PassengerStatus::Waiting) {
        for (TaxiAction move : taxi_route(cursor, state.passenger_cell())) {
            plan.push_back(taxi_action_command(move));
        }
        plan.push_back(taxi_action_command(TaxiAction::Pickup));
        cursor = state.passenger_cell();
    }
    for (TaxiAction move : taxi_route(cursor, state.destination_cell())) {
        plan.push_back(taxi_action_command(move));
    }
    plan.push_back(taxi_action_command(TaxiAction::Dropoff));
    return plan;
}

} // namespace gridlab
