#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gridlab/env.hpp"

namespace gridlab {

enum class ParseErrorKind {
    MissingThinkTag,
    MissingActionTag,
    EmptyActionList,
    UnknownCommand,
    TagOrderViolation,
};

const char* parse_error_kind_name(ParseErrorKind kind);

struct ParseError {
    ParseErrorKind kind;
    int index = -1;    // position of the offending command (UnknownCommand)
    std::string token; // the offending command text (UnknownCommand)
};

struct ParsedResponse {
    std::string thinking;
    std::vector<std::string> actions;
    std::optional<ParseError> error;

    bool ok() const { return !error.has_value(); }
};

// Strict response parsing: exactly one <think>...</think> pair followed by
// one <action>...</action> pair. Prose before the first think tag and after
// the closing action tag is tolerated; stray or repeated tag literals are
// TagOrderViolation. The action body splits on ';'; segments are trimmed,
// ASCII-lowercased, empty segments dropped, and each validated against the
// vocabulary. Total: every input yields a parse or one specific error.
ParsedResponse parse_response(const std::string& raw,
                              const std::vector<std::string>& action_vocabulary);

// The fixed turn-format instruction appended to every prompt.
const std::string& action_prompt_text();

// First turn: system prompt (may be empty), environment description, action
// prompt — in that order, separated by blank lines.
std::string build_first_prompt(const std::string& system_prompt,
                               const std::string& env_description);

// Later turns: environment feedback (outcome notes plus the new state text)
// followed by the action prompt.
std::string build_followup_prompt(const std::string& feedback);

// One think/action exchange as executed against the environment.
struct Turn {
    std::string observation;  // text shown to the agent this turn
    std::string thinking;
    std::string raw_response;
    std::vector<std::string> actions;          // executed commands
    std::vector<ActionOutcome> outcomes;       // aligned with actions
    std::vector<std::string> unexecuted;       // parsed but skipped (episode ended mid-set)
    std::optional<ParseError> format_error;
};

struct Transcript {
    std::string system_prompt;
    std::vector<Turn> turns;
    int turn_limit = 0;
    long long char_budget_total = 0;
    long long char_budget_per_turn = 0;

    // Characters of conversation content accumulated so far.
    long long content_chars() const;
};

} // namespace gridlab
