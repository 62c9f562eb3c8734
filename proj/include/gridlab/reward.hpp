#pragma once

#include "gridlab/error.hpp"

namespace gridlab {

struct Trajectory;

struct RewardConfig {
    double outcome_success = 1.0;        // terminal reward for task completion
    double format_penalty = -0.1;        // per turn with a malformed response
    double invalid_action_penalty = -0.05; // per invalid action
    double step_penalty = 0.0;           // per executed action (ablation: -0.1)
    bool rescaling_enabled = true;       // scale outcome by N_eff / N

    void validate() const;
};

struct RewardBreakdown {
    double R_outcome = 0.0;
    int N = 0;
    int N_eff = 0;
    double R_scaled = 0.0;
    double penalties = 0.0;
    double R_total = 0.0;
};

// (N, N_eff): executed actions and those whose outcome changed the state
// (terminal success included). Invalid actions count in N only.
void count_actions(const Trajectory& trajectory, int& N, int& N_eff);

// Outcome scaling by the effective-action ratio. N = 0 returns the outcome
// unchanged (degenerate episode; the format penalty handles it elsewhere).
double rescale_reward(double R_outcome, int N, int N_eff);

RewardBreakdown assemble_total(const Trajectory& trajectory, const RewardConfig& config);

} // namespace gridlab
