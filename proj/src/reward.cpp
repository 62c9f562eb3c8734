#include "gridlab/reward.hpp"

#include <sstream>

#include "gridlab/trajectory.hpp"

namespace gridlab {

void RewardConfig::validate() const {
    std::ostringstream bad;
    if (outcome_success <= 0.0) bad << "outcome_success must be positive; ";
    if (format_penalty > 0.0) bad << "format_penalty must be <= 0; ";
    if (invalid_action_penalty > 0.0) bad << "invalid_action_penalty must be <= 0; ";
    if (step_penalty > 0.0) bad << "step_penalty must be <= 0; ";
    const std::string msg = bad.str();
    if (!msg.empty()) throw Error(ErrorCode::ConfigError, "reward config: " + msg);
}

void count_actions(const Trajectory& trajectory, int& N, int& N_eff) {
    N = 0;
    N_eff = 0;
    for (const Turn& turn : trajectory.turns) {
        for (const ActionOutcome& outcome : turn.outcomes) {
            ++N;
            if (outcome.effective()) ++N_eff;
        }
    }
}

double rescale_reward(double R_outcome, int N, int N_eff) {
    if (N < 0 || N_eff < 0) {
        throw Error(ErrorCode::CountViolation, "negative action counts");
    }
    if (N_eff > N) {
        std::ostringstream msg;
        msg << "N_eff (" << N_eff << ") exceeds N (" << N << ")";
        throw Error(ErrorCode::CountViolation, msg.str());
    }
    if (N == 0) return R_outcome;
    return R_outcome * static_cast<double>(N_eff) / static_cast<double>(N);
}

RewardBreakdown assemble_total(const Trajectory& trajectory, const RewardConfig& config) {
    config.validate();
    RewardBreakdown out;
    out.R_outcome = trajectory.success ? config.outcome_success : 0.0;
    count_actions(trajectory, out.N, out.N_eff);
    out.R_scaled = rescale_reward(out.R_outcome, out.N, out.N_eff);

    int malformed_turns = 0;
    int invalid_actions = 0;
    for (const Turn& turn : trajectory.turns) {
        if (turn.format_error.has_value()) ++malformed_turns;
        for (const ActionOutcome& outcome : turn.outcomes) {
            if (outcome.kind == OutcomeKind::Invalid) ++invalid_actions;
        }
    }
    out.penalties = config.format_penalty * malformed_turns +
                    config.invalid_action_penalty * invalid_actions +
                    config.step_penalty * out.N;

    const double outcome_term = config.rescaling_enabled ? out.R_scaled : out.R_outcome;
    out.R_total = outcome_term + out.penalties;
    return out;
}

} // namespace gridlab
