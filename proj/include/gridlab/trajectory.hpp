#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridlab/protocol.hpp"
#include "gridlab/reward.hpp"

namespace gridlab {

enum class InteractionMode { MultiTurn, SingleTurn };

std::string interaction_mode_name(InteractionMode mode);
InteractionMode interaction_mode_from_name(const std::string& name); // throws ConfigError

// One sampled/executed environment action: the unit at which credit is
// assigned. state_key is the canonical serialization before the action.
struct DecisionPoint {
    std::string state_key;
    int action_id = -1;
    double logprob_behavior = 0.0;
    double reward = 0.0;
};

enum class EpisodeEnd {
    TerminalSuccess,
    TurnLimitReached,
    BudgetExhausted,
    AgentFailure, // transport error, timeout, id mismatch
};

std::string episode_end_name(EpisodeEnd end);

struct Trajectory {
    EnvKind env = EnvKind::Maze;
    std::uint64_t seed = 0;
    Variant variant = Variant::Standard;
    InteractionMode mode = InteractionMode::MultiTurn;
    std::vector<Turn> turns;
    RewardBreakdown reward;
    bool success = false;
    int turn_count = 0;
    EpisodeEnd end = EpisodeEnd::TurnLimitReached;
    std::string failure_note; // reason code for AgentFailure, else empty

    // Per-action credit-assignment records, in execution order.
    std::vector<DecisionPoint> decisions;
};

// One trajectory per line; parse round-trips every serialized field.
std::string trajectory_to_json_line(const Trajectory& trajectory);
Trajectory trajectory_from_json_line(const std::string& line); // throws IoError

} // namespace gridlab
