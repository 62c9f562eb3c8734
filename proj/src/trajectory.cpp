#include "gridlab/trajectory.hpp"

#include <json.hpp>

namespace gridlab {

using nlohmann::json;

std::string interaction_mode_name(InteractionMode mode) {
    return mode == InteractionMode::MultiTurn ? "multi_turn" : "single_turn";
}

InteractionMode interaction_mode_from_name(const std::string& name) {
    if (name == "multi_turn") return InteractionMode::MultiTurn;
    if (name == "single_turn") return InteractionMode::SingleTurn;
    throw Error(ErrorCode::ConfigError, "unknown interaction mode: " + name);
}

std::string episode_end_name(EpisodeEnd end) {
    switch (end) {
    case EpisodeEnd::TerminalSuccess: return "terminal_success";
    case EpisodeEnd::TurnLimitReached: return "turn_limit_reached";
    case EpisodeEnd::BudgetExhausted: return "budget_exhausted";
    case EpisodeEnd::AgentFailure: return "agent_failure";
    }
    return "?";
}

namespace {

EpisodeEnd episode_end_from_name(const std::string& name) {
    if (name == "terminal_success") return EpisodeEnd::TerminalSuccess;
    if (name == "turn_limit_reached") return EpisodeEnd::TurnLimitReached;
    if (name == "budget_exhausted") return EpisodeEnd::BudgetExhausted;
    if (name == "agent_failure") return EpisodeEnd::AgentFailure;
    throw Error(ErrorCode::IoError, "unknown episode end: " + name);
}

OutcomeKind outcome_kind_from_name(const std::string& name) {
    if (name == "effective") return OutcomeKind::Effective;
    if (name == "ineffective") return OutcomeKind::Ineffective;
    if (name == "invalid") return OutcomeKind::Invalid;
    if (name == "terminal_success") return OutcomeKind::TerminalSuccess;
    throw Error(ErrorCode::IoError, "unknown outcome kind: " + name);
}

ParseErrorKind parse_error_kind_from_name(const std::string& name) {
    if (name == "missing_think_tag") return ParseErrorKind::MissingThinkTag;
    if (name == "missing_action_tag") return ParseErrorKind::MissingActionTag;
    if (name == "empty_action_list") return ParseErrorKind::EmptyActionList;
    if (name == "unknown_command") return ParseErrorKind::UnknownCommand;
    if (name == "tag_order_violation") return ParseErrorKind::TagOrderViolation;
    throw Error(ErrorCode::IoError, "unknown parse error kind: " + name);
}

json turn_to_json(const Turn& turn) {
    json out;
    out["observation"] = turn.observation;
    out["thinking"] = turn.thinking;
    out["raw_response"] = turn.raw_response;
    out["actions"] = turn.actions;
    json outcomes = json::array();
    for (const ActionOutcome& outcome : turn.outcomes) {
        outcomes.push_back({{"kind", outcome_kind_name(outcome.kind)}, {"note", outcome.note}});
    }
    out["outcomes"] = std::move(outcomes);
    out["unexecuted"] = turn.unexecuted;
    if (turn.format_error.has_value()) {
        out["format_error"] = {{"kind", parse_error_kind_name(turn.format_error->kind)},
                               {"index", turn.format_error->index},
                               {"token", turn.format_error->token}};
    } else {
        out["format_error"] = nullptr;
    }
    return out;
}

Turn turn_from_json(const json& in) {
    Turn turn;
    turn.observation = in.at("observation").get<std::string>();
    turn.thinking = in.at("thinking").get<std::string>();
    turn.raw_response = in.at("raw_response").get<std::string>();
    turn.actions = in.at("actions").get<std::vector<std::string>>();
    for (const json& item : in.at("outcomes")) {
        ActionOutcome outcome;
        outcome.kind = outcome_kind_from_name(item.at("kind").get<std::string>());
        outcome.note = item.at("note").get<std::string>();
        turn.outcomes.push_back(std::move(outcome));
    }
    turn.unexecuted = in.at("unexecuted").get<std::vector<std::string>>();
    const json& err = in.at("format_error");
    if (!err.is_null()) {
        ParseError parse_error;
        parse_error.kind = parse_error_kind_from_name(err.at("kind").get<std::string>());
        parse_error.index = err.at("index").get<int>();
        parse_error.token = err.at("token").get<std::string>();
        turn.format_error = std::move(parse_error);
    }
    return turn;
}

} // namespace

std::string trajectory_to_json_line(const Trajectory& trajectory) {
    json out;
    out["env"] = env_kind_name(trajectory.env);
    out["seed"] = trajectory.seed;
    out["variant"] = variant_name(trajectory.variant);
    out["mode"] = interaction_mode_name(trajectory.mode);
    json turns = json::array();
    for (const Turn& turn : trajectory.turns) turns.push_back(turn_to_json(turn));
    out["turns"] = std::move(turns);
    out["reward"] = {{"R_outcome", trajectory.reward.R_outcome},
                     {"N", trajectory.reward.N},
                     {"N_eff", trajectory.reward.N_eff},
                     {"R_scaled", trajectory.reward.R_scaled},
                     {"penalties", trajectory.reward.penalties},
                     {"R_total", trajectory.reward.R_total}};
    out["success"] = trajectory.success;
    out["turn_count"] = trajectory.turn_count;
    out["end"] = episode_end_name(trajectory.end);
    out["failure_note"] = trajectory.failure_note;
    return out.dump();
}

Trajectory trajectory_from_json_line(const std::string& line) {
    json in;
    try {
        in = json::parse(line);
    } catch (const json::exception& error) {
        throw Error(ErrorCode::IoError, std::string("trajectory parse: ") + error.what());
    }
    try {
        Trajectory trajectory;
        trajectory.env = env_kind_from_name(in.at("env").get<std::string>());
        trajectory.seed = in.at("seed").get<std::uint64_t>();
        trajectory.variant = variant_from_name(in.at("variant").get<std::string>());
        trajectory.mode = interaction_mode_from_name(in.at("mode").get<std::string>());
        for (const json& turn : in.at("turns")) trajectory.turns.push_back(turn_from_json(turn));
        const json& reward = in.at("reward");
        trajectory.reward.R_outcome = reward.at("R_outcome").get<double>();
        trajectory.reward.N = reward.at("N").get<int>();
        trajectory.reward.N_eff = reward.at("N_eff").get<int>();
        trajectory.reward.R_scaled = reward.at("R_scaled").get<double>();
        trajectory.reward.penalties = reward.at("penalties").get<double>();
        trajectory.reward.R_total = reward.at("R_total").get<double>();
        trajectory.success = in.at("success").get<bool>();
        trajectory.turn_count = in.at("turn_count").get<int>();
        trajectory.end = episode_end_from_name(in.at("end").get<std::string>());
        trajectory.failure_note = in.at("failure_note").get<std::string>();
        return trajectory;
    } catch (const json::exception& error) {
        throw Error(ErrorCode::IoError, std::string("trajectory fields: ") + error.what());
    }
}

} // namespace gridlab
