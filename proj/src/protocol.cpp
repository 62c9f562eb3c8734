#include "gridlab/protocol.hpp"

#include <algorithm>
#include <cctype>

namespace gridlab {

namespace {

constexpr const char* kThinkOpen = "<think>";
constexpr const char* kThinkClose = "</think>";
constexpr const char* kActionOpen = "<action>";
constexpr const char* kActionClose = "</action>";

bool contains(const std::string& text, std::size_t from, std::size_t to, const char* needle) {
    if (from >= to) return false;
    const std::size_t pos = text.find(needle, from);
    return pos != std::string::npos && pos < to;
}

std::string trim(const std::string& text) {
    std::size_t begin = 0, end = text.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
    return text.substr(begin, end - begin);
}

std::string lower(std::string text) {
    std::transform(text.begin(), text.end(), text.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    return text;
}

ParsedResponse fail(ParseErrorKind kind, int index = -1, std::string token = {}) {
    ParsedResponse r;
    r.error = ParseError{kind, index, std::move(token)};
    return r;
}

} // namespace

const char* parse_error_kind_name(ParseErrorKind kind) {
    switch (kind) {
        case ParseErrorKind::MissingThinkTag: return "missing_think_tag";
        case ParseErrorKind::MissingActionTag: return "missing_action_tag";
        case ParseErrorKind::EmptyActionList: return "empty_action_list";
        case ParseErrorKind::UnknownCommand: return "unknown_command";
        case ParseErrorKind::TagOrderViolation: return "tag_order_violation";
    }
    return "";
}

ParsedResponse parse_response(const std::string& raw,
                              const std::vector<std::string>& action_vocabulary) {
    const std::size_t think_open = raw.find(kThinkOpen);
    if (think_open == std::string::npos) return fail(ParseErrorKind::MissingThinkTag);
    // Action tags ahead of the think block are out of order, not prose.
    if (contains(raw, 0, think_open, kActionOpen) || contains(raw, 0, think_open, kActionClose)) {
        return fail(ParseErrorKind::TagOrderViolation);
    }

    const std::size_t think_body = think_open + std::char_traits<char>::length(kThinkOpen);
    const std::size_t think_close = raw.find(kThinkClose, think_body);
    if (think_close == std::string::npos) return fail(ParseErrorKind::MissingThinkTag);
    if (contains(raw, think_body, think_close, kThinkOpen) ||
        contains(raw, think_body, think_close, kActionOpen) ||
        contains(raw, think_body, think_close, kActionClose)) {
        return fail(ParseErrorKind::TagOrderViolation);
    }

    const std::size_t after_think = think_close + std::char_traits<char>::length(kThinkClose);
    const std::size_t action_open = raw.find(kActionOpen, after_think);
    if (action_open == std::string::npos) return fail(ParseErrorKind::MissingActionTag);
    if (contains(raw, after_think, action_open, kThinkOpen) ||
        contains(raw, after_think, action_open, kThinkClose)) {
        return fail(ParseErrorKind::TagOrderViolation);
    }

    const std::size_t action_body = action_open + std::char_traits<char>::length(kActionOpen);
    const std::size_t action_close = raw.find(kActionClose, action_body);
    if (action_close == std::string::npos) return fail(ParseErrorKind::MissingActionTag);
    if (contains(raw, action_body, action_close, kThinkOpen) ||
        contains(raw, action_body, action_close, kThinkClose) ||
        contains(raw, action_body, action_close, kActionOpen)) {
        return fail(ParseErrorKind::TagOrderViolation);
    }

    // A second tag pair after the structure closes is a repetition, not prose.
    const std::size_t tail = action_close + std::char_traits<char>::length(kActionClose);
    if (contains(raw, tail, raw.size(), kThinkOpen) ||
        contains(raw, tail, raw.size(), kThinkClose) ||
        contains(raw, tail, raw.size(), kActionOpen) ||
        contains(raw, tail, raw.size(), kActionClose)) {
        return fail(ParseErrorKind::TagOrderViolation);
    }

    ParsedResponse result;
    result.thinking = trim(raw.substr(think_body, think_close - think_body));

    const std::string body = raw.substr(action_body, action_close - action_body);
    std::vector<std::string> commands;
    std::size_t start = 0;
    while (start <= body.size()) {
        const std::size_t semi = body.find(';', start);
        const std::size_t end = semi == std::string::npos ? body.size() : semi;
        std::string segment = lower(trim(body.substr(start, end - start)));
        if (!segment.empty()) commands.push_back(std::move(segment));
        if (semi == std::string::npos) break;
        start = semi + 1;
    }
    if (commands.empty()) return fail(ParseErrorKind::EmptyActionList);

    for (std::size_t i = 0; i < commands.size(); ++i) {
        if (std::find(action_vocabulary.begin(), action_vocabulary.end(), commands[i]) ==
            action_vocabulary.end()) {
            return fail(ParseErrorKind::UnknownCommand, static_cast<int>(i), commands[i]);
        }
    }
    result.actions = std::move(commands);
    return result;
}

const std::string& action_prompt_text() {
    static const std::string text =
        "For each turn, your response must follow a strict two-part structure. First, you must "
        "conduct your detailed reasoning within <think> and </think> tags. Inside your thoughts, "
        "analyze the current state, reflect on your previous actions, and plan your next step. "
        "Second, immediately following your reasoning, you must provide your output within "
        "<action> and </action> tags. The content of the <action> tag is critical and depends on "
        "the task. For interactive tasks, generate one or more commands separated by a semicolon, "
        "for example, <action>move up; move right</action>. Your response for the turn concludes "
        "after you output the closing </action> tag. Now, generate your thought and action based "
        "on the current state.";
    return text;
}

std::string build_first_prompt(const std::string& system_prompt,
                               const std::string& env_description) {
    std::string out;
    if (!system_prompt.empty()) {
        out += system_prompt;
        out += "\n\n";
    }
    out += env_description;
    out += "\n\n";
    out += action_prompt_text();
    return out;
}

std::string build_followup_prompt(const std::string& feedback) {
    return feedback + "\n\n" + action_prompt_text();
}

long long Transcript::content_chars() const {
    long long total = static_cast<long long>(system_prompt.size());
    for (const Turn& turn : turns) {
        total += static_cast<long long>(turn.observation.size());
        total += static_cast<long long>(turn.raw_response.size());
    }
    return total;
}

} // namespace gridlab
