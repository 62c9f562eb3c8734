#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gridlab/env.hpp"
#include "gridlab/rng.hpp"

namespace gridlab {

enum class TaxiAction {
    MoveUp,
    MoveDown,
    MoveLeft,
    MoveRight,
    Pickup,
    Dropoff,
};

enum class PassengerStatus { Waiting, InTaxi, Delivered };

const char* passenger_status_name(PassengerStatus status);

struct TaxiState {
    static constexpr int kSize = 5;

    GridPos taxi;
    int passenger_landmark = 0;  // index into landmarks()
    int destination_landmark = 0;
    PassengerStatus status = PassengerStatus::Waiting;

    // Landmark letters in order: R, G, Y, B.
    static const std::array<char, 4>& landmark_letters();
    static const std::array<GridPos, 4>& landmarks();
    // Wall segments between (row, col) and (row, col + 1).
    static const std::vector<GridPos>& wall_segments();
    static bool wall_between(GridPos cell, GridPos right_neighbor);

    GridPos passenger_cell() const { return landmarks()[passenger_landmark]; }
    GridPos destination_cell() const { return landmarks()[destination_landmark]; }
};

// Fixed layout; seed draws the taxi cell and the two distinct landmark roles.
TaxiState generate_taxi(std::uint64_t seed);

// State-level dynamics: moves blocked by edges or wall segments are
// Ineffective; pickup/dropoff outside their validity rules are Invalid and
// leave the state untouched; a valid dropoff is TerminalSuccess.
ActionOutcome step_taxi(TaxiState& state, TaxiAction action);

// Bordered 5x5 map with 5-character cell slots, '|' wall separators, ':'
// open separators, and compound symbols (T/P, T(P), T(P)/D, T/P/D, P/D).
std::string render_taxi(const TaxiState& state);

const char* taxi_action_command(TaxiAction action);
std::optional<TaxiAction> taxi_action_from_command(const std::string& command);

// Shortest wall-respecting move sequence between two cells (empty when equal;
// the fixed layout keeps every pair reachable).
std::vector<TaxiAction> taxi_route(GridPos from, GridPos to);

// Complete minimal command plan from the given state: drive to the passenger,
// pick up, drive to the destination, drop off (skipping finished phases).
std::vector<std::string> taxi_oracle_plan(const TaxiState& state);

class TaxiEnv final : public Environment {
  public:
    explicit TaxiEnv(std::uint64_t seed)
        : Environment(EnvKind::Taxi, seed), state_(generate_taxi(seed)) {}

    const TaxiState& state() const { return state_; }

    ActionOutcome step(TaxiAction action);

    std::string render() const override { return render_taxi(state_); }
    std::string state_flags() const override;
    std::vector<std::string> action_vocabulary() const override;
    std::string description() const override;
    std::string observation() const override;
    std::unique_ptr<Environment> clone() const override {
        return std::make_unique<TaxiEnv>(*this);
    }

  protected:
    StepEffect do_step(const std::string& command) override;

  private:
    TaxiState state_;
};

} // namespace gridlab
