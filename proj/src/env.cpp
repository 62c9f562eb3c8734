#include "gridlab/env.hpp"

namespace gridlab {

const char* error_code_name(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidSize: return "InvalidSize";
    case ErrorCode::GenerationFailed: return "GenerationFailed";
    case ErrorCode::StepAfterTerminal: return "StepAfterTerminal";
    case ErrorCode::CountViolation: return "CountViolation";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonPositiveRatio: return "NonPositiveRatio";
    case ErrorCode::OffPolicyDetected: return "OffPolicyDetected";
    case ErrorCode::TurnOverflow: return "TurnOverflow";
    case ErrorCode::UnsupportedVariant: return "UnsupportedVariant";
    case ErrorCode::KindEnvMismatch: return "KindEnvMismatch";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Timeout: return "Timeout";
    case ErrorCode::TransportClosed: return "TransportClosed";
    case ErrorCode::IdMismatch: return "IdMismatch";
    }
    return "UnknownError";
}

const char* env_kind_name(EnvKind kind) {
    switch (kind) {
    case EnvKind::Maze: return "maze";
    case EnvKind::Sokoban: return "sokoban";
    case EnvKind::Taxi: return "taxi";
    }
    return "?";
}

const char* variant_name(Variant variant) {
    switch (variant) {
    case Variant::Standard: return "standard";
    case Variant::Hard1: return "hard1";
    case Variant::Hard2: return "hard2";
    case Variant::Hard: return "hard";
    }
    return "?";
}

EnvKind env_kind_from_name(const std::string& name) {
    if (name == "maze") return EnvKind::Maze;
    if (name == "sokoban") return EnvKind::Sokoban;
    if (name == "taxi") return EnvKind::Taxi;
    throw Error(ErrorCode::ConfigError, "unknown environment: " + name);
}

Variant variant_from_name(const std::string& name) {
    if (name == "standard") return Variant::Standard;
    if (name == "hard1") return Variant::Hard1;
    if (name == "hard2") return Variant::Hard2;
    if (name == "hard") return Variant::Hard;
    throw Error(ErrorCode::ConfigError, "unknown variant: " + name);
}

const char* outcome_kind_name(OutcomeKind kind) {
    switch (kind) {
    case OutcomeKind::Effective: return "effective";
    case OutcomeKind::Ineffective: return "ineffective";
    case OutcomeKind::Invalid: return "invalid";
    case OutcomeKind::TerminalSuccess: return "terminal_success";
    }
    return "?";
}

const char* episode_state_name(EpisodeState state) {
    switch (state) {
    case EpisodeState::Running: return "running";
    case EpisodeState::Success: return "success";
    case EpisodeState::TurnLimitReached: return "turn_limit_reached";
    case EpisodeState::BudgetExhausted: return "budget_exhausted";
    }
    return "?";
}

std::string Environment::canonical_serialize() const {
    std::string out = render();
    out += "\nflags:";
    out += state_flags();
    out += '\n';
    return out;
}

ActionOutcome Environment::apply_action(const std::string& command) {
    if (status_ != EpisodeState::Running) {
        throw Error(ErrorCode::StepAfterTerminal,
                    "apply_action on a finished episode (" + std::string(episode_state_name(status_)) + ")");
    }
    const std::string before = canonical_serialize();
    StepEffect effect = do_step(command);
    const std::string after = canonical_serialize();
    ++step_count_;

    ActionOutcome outcome;
    outcome.note = effect.note;
    if (effect.success) {
        status_ = EpisodeState::Success;
        outcome.kind = OutcomeKind::TerminalSuccess;
    } else if (effect.invalid) {
        outcome.kind = OutcomeKind::Invalid;
    } else if (classify_effectiveness(before, after)) {
        outcome.kind = OutcomeKind::Effective;
    } else {
        outcome.kind = OutcomeKind::Ineffective;
    }
    return outcome;
}

} // namespace gridlab
