#pragma once

#include <vector>

#include "gridlab/error.hpp"

namespace gridlab {

// Turn-limit annealing: every `tau` iterations the cap moves to the rounded
// midpoint of the window's mean and max turn counts, then the window clears.
// Because every recorded episode ran under the current cap, the midpoint can
// never exceed it, so the cap is non-increasing and has fixed points where
// all episodes use exactly L_max turns.
struct AnnealConfig {
    int initial_L_max = 30;
    int tau = 100;           // iterations between updates
    bool per_prompt_mean = false; // average per-prompt means instead of all episodes

    void validate() const; // throws ConfigError
};

struct AnnealState {
    int L_max = 30;
    int tau = 100;
    bool per_prompt_mean = false;
    long long iteration = 0; // completed training iterations

    // Window since the last update: turn counts, grouped by prompt when the
    // per-prompt variant is enabled (prompt_ids aligned with turns_used).
    std::vector<int> turns_used;
    std::vector<int> prompt_ids;
};

AnnealState make_anneal_state(const AnnealConfig& config);

// Record one finished episode. Requires 1 <= turns <= L_max; beyond the cap
// throws TurnOverflow (the harness must never let an episode run long).
void record_episode(AnnealState& state, int turns, int prompt_id = 0);

// Close out one iteration. On every tau-th call with a non-empty window,
// lowers L_max to round-half-up((mean + max) / 2), floored at 1, and clears
// the window. Returns true when the cap was recomputed.
bool maybe_update(AnnealState& state);

} // namespace gridlab
