#include "gridlab/anneal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace gridlab {

void AnnealConfig::validate() const {
    if (initial_L_max < 1) throw Error(ErrorCode::ConfigError, "initial_L_max must be >= 1");
    if (tau < 1) throw Error(ErrorCode::ConfigError, "tau must be >= 1");
}

AnnealState make_anneal_state(const AnnealConfig& config) {
    config.validate();
    AnnealState state;
    state.L_max = config.initial_L_max;
    state.tau = config.tau;
    state.per_prompt_mean = config.per_prompt_mean;
    return state;
}

void record_episode(AnnealState& state, int turns, int prompt_id) {
    if (turns < 1) {
        throw Error(ErrorCode::TurnOverflow, "episode used fewer than one turn");
    }
    if (turns > state.L_max) {
        std::ostringstream msg;
        msg << "episode used " << turns << " turns with cap " << state.L_max;
        throw Error(ErrorCode::TurnOverflow, msg.str());
    }
    state.turns_used.push_back(turns);
    state.prompt_ids.push_back(prompt_id);
}

namespace {

double window_mean(const AnnealState& state) {
    if (!state.per_prompt_mean) {
        long long total = 0;
        for (int t : state.turns_used) total += t;
        return static_cast<double>(total) / static_cast<double>(state.turns_used.size());
    }
    // Mean of per-prompt means: prompts with many episodes do not dominate.
    std::map<int, std::pair<long long, long long>> sums; // prompt -> (sum, count)
    for (std::size_t i = 0; i < state.turns_used.size(); ++i) {
        auto& entry = sums[state.prompt_ids[i]];
        entry.first += state.turns_used[i];
        entry.second += 1;
    }
    double total = 0.0;
    for (const auto& [prompt, entry] : sums) {
        (void)prompt;
        total += static_cast<double>(entry.first) / static_cast<double>(entry.second);
    }
    return total / static_cast<double>(sums.size());
}

} // namespace

bool maybe_update(AnnealState& state) {
    ++state.iteration;
    if (state.iteration % state.tau != 0) return false;
    if (state.turns_used.empty()) return false;

    const double mean = window_mean(state);
    const int window_max = *std::max_element(state.turns_used.begin(), state.turns_used.end());
    const double midpoint = (mean + static_cast<double>(window_max)) / 2.0;
    int next = static_cast<int>(std::floor(midpoint + 0.5)); // round half up
    next = std::max(next, 1);
    state.L_max = std::min(state.L_max, next);

    state.turns_used.clear();
    state.prompt_ids.clear();
    return true;
}

} // namespace gridlab
