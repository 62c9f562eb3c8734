#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "gridlab/error.hpp"

namespace gridlab {

enum class EnvKind { Maze, Sokoban, Taxi };

enum class Variant { Standard, Hard1, Hard2, Hard };

const char* env_kind_name(EnvKind kind);
const char* variant_name(Variant variant);
EnvKind env_kind_from_name(const std::string& name);   // throws ConfigError
Variant variant_from_name(const std::string& name);    // throws ConfigError

struct GridPos {
    int row = 0;
    int col = 0;
    auto operator<=>(const GridPos&) const = default;
};

enum class OutcomeKind { Effective, Ineffective, Invalid, TerminalSuccess };

const char* outcome_kind_name(OutcomeKind kind);

// Result of one executed action. An action is "effective" when the canonical
// serialization of the state changed; the success action changes state too,
// so TerminalSuccess counts as effective for reward accounting. Invalid means
// the command was a rule violation (e.g. pickup away from the passenger): it
// never mutates state, so it is ineffective for counting purposes but keeps a
// distinct reason code for the validity penalty.
struct ActionOutcome {
    OutcomeKind kind = OutcomeKind::Ineffective;
    std::string note;

    bool effective() const {
        return kind == OutcomeKind::Effective || kind == OutcomeKind::TerminalSuccess;
    }
    bool invalid() const { return kind == OutcomeKind::Invalid; }
};

// Environments only ever move Running -> Success by themselves; the rollout
// harness assigns TurnLimitReached / BudgetExhausted at the episode level.
enum class EpisodeState { Running, Success, TurnLimitReached, BudgetExhausted };

const char* episode_state_name(EpisodeState state);

// Byte-wise state change test. Both serializations must come from the same
// instance for the result to mean anything.
inline bool classify_effectiveness(const std::string& before, const std::string& after) {
    return before != after;
}

// Common surface of the three grid worlds. An instance is a single-owner
// mutable state machine seeded at construction; reconstructing with the same
// parameters yields a byte-identical initial canonical serialization.
class Environment {
  public:
    virtual ~Environment() = default;

    EnvKind kind() const { return kind_; }
    std::uint64_t seed() const { return seed_; }
    int step_count() const { return step_count_; }
    EpisodeState status() const { return status_; }
    bool running() const { return status_ == EpisodeState::Running; }

    // ASCII render of the full observable game content. Lines joined with LF,
    // no trailing newline. Format is bit-exact per environment (see
    // docs/formats.md).
    virtual std::string render() const = 0;

    // Non-visual flags appended to the canonical serialization. Empty when the
    // render already shows everything.
    virtual std::string state_flags() const { return std::string(); }

    // Lower-case command strings accepted by apply_action.
    virtual std::vector<std::string> action_vocabulary() const = 0;

    // First-turn environment description (rules, legend, current state).
    virtual std::string description() const = 0;

    // The state block repeated in follow-up feedback (map plus any progress
    // line), without the rules text.
    virtual std::string observation() const = 0;

    virtual std::unique_ptr<Environment> clone() const = 0;

    // render + LF + "flags:" + state_flags() + LF. Deterministic and injective
    // over reachable states of a fixed instance.
    std::string canonical_serialize() const;

    // Executes one vocabulary command. Classifies the outcome by comparing
    // canonical serializations before and after; increments step_count
    // regardless of outcome. Throws StepAfterTerminal unless status is
    // Running.
    ActionOutcome apply_action(const std::string& command);

  protected:
    Environment(EnvKind kind, std::uint64_t seed) : kind_(kind), seed_(seed) {}
    Environment(const Environment&) = default;
    Environment& operator=(const Environment&) = default;

    struct StepEffect {
        bool invalid = false;
        bool success = false;
        std::string note;
    };

    // Environment-specific dynamics. Must leave the state untouched when
    // reporting invalid.
    virtual StepEffect do_step(const std::string& command) = 0;

  private:
    EnvKind kind_;
    std::uint64_t seed_;
    int step_count_ = 0;
    EpisodeState status_ = EpisodeState::Running;
};

} // namespace gridlab
