#include <doctest.h>

#include <string>
#include <vector>

#include "gridlab/protocol.hpp"
#include "gridlab/rng.hpp"

using namespace gridlab;

namespace {

const std::vector<std::string> kVocab = {"move up",  "move down",    "move left",
                                         "move right", "no operation"};

ParseErrorKind error_of(const ParsedResponse& r) {
    REQUIRE(r.error.has_value());
    return r.error->kind;
}

} // namespace

TEST_CASE("well-formed responses parse into thinking and actions") {
    auto r = parse_response("<think>go</think><action>move up; move right</action>", kVocab);
    REQUIRE(r.ok());
    CHECK(r.thinking == "go");
    CHECK(r.actions == std::vector<std::string>{"move up", "move right"});
}

TEST_CASE("order and duplicates are preserved") {
    auto r = parse_response(
        "<think>loop</think><action>move up; move up; move left; move up</action>", kVocab);
    REQUIRE(r.ok());
    CHECK(r.actions ==
          std::vector<std::string>{"move up", "move up", "move left", "move up"});
}

TEST_CASE("segments are trimmed, lowercased, and empty ones dropped") {
    auto r = parse_response(
        "<think>x</think><action>  MOVE UP ;; Move Right ;   </action>", kVocab);
    REQUIRE(r.ok());
    CHECK(r.actions == std::vector<std::string>{"move up", "move right"});
}

TEST_CASE("missing tags are reported precisely") {
    CHECK(error_of(parse_response("<action>move up</action>", kVocab)) ==
          ParseErrorKind::MissingThinkTag);
    CHECK(error_of(parse_response("no tags at all", kVocab)) == ParseErrorKind::MissingThinkTag);
    CHECK(error_of(parse_response("<think>unclosed", kVocab)) == ParseErrorKind::MissingThinkTag);
    CHECK(error_of(parse_response("<think>x</think>", kVocab)) ==
          ParseErrorKind::MissingActionTag);
    CHECK(error_of(parse_response("<think>x</think><action>move up", kVocab)) ==
          ParseErrorKind::MissingActionTag);
}

TEST_CASE("empty action lists are rejected") {
    CHECK(error_of(parse_response("<think>x</think><action></action>", kVocab)) ==
          ParseErrorKind::EmptyActionList);
    CHECK(error_of(parse_response("<think>x</think><action>  ;  ; </action>", kVocab)) ==
          ParseErrorKind::EmptyActionList);
}

TEST_CASE("unknown commands carry their index and token") {
    auto r = parse_response("<think>x</think><action>move up; fly; move up</action>", kVocab);
    REQUIRE_FALSE(r.ok());
    CHECK(r.error->kind == ParseErrorKind::UnknownCommand);
    CHECK(r.error->index == 1);
    CHECK(r.error->token == "fly");

    auto first = parse_response("<think>x</think><action>warp</action>", kVocab);
    CHECK(first.error->index == 0);
    CHECK(first.error->token == "warp");
}

TEST_CASE("tag order violations cover nesting, repetition, and inversion") {
    // Action pair before the think pair.
    CHECK(error_of(parse_response(
              "<action>move up</action><think>x</think><action>move up</action>", kVocab)) ==
          ParseErrorKind::TagOrderViolation);
    // Nested think.
    CHECK(error_of(parse_response(
              "<think>a<think>b</think></think><action>move up</action>", kVocab)) ==
          ParseErrorKind::TagOrderViolation);
    // Action tags inside the think body.
    CHECK(error_of(parse_response(
              "<think>a<action>move up</action></think><action>move up</action>", kVocab)) ==
          ParseErrorKind::TagOrderViolation);
    // Think tags between the two blocks.
    CHECK(error_of(parse_response(
              "<think>a</think><think>b</think><action>move up</action>", kVocab)) ==
          ParseErrorKind::TagOrderViolation);
    // Repeated pair after the structure closes.
    CHECK(error_of(parse_response(
              "<think>a</think><action>move up</action><action>move up</action>", kVocab)) ==
          ParseErrorKind::TagOrderViolation);
    CHECK(error_of(parse_response(
              "<think>a</think><action>move up</action><think>b</think>", kVocab)) ==
          ParseErrorKind::TagOrderViolation);
}

TEST_CASE("prose outside the structure is tolerated") {
    auto r = parse_response(
        "Sure, here is my move.\n<think>plan</think><action>move up</action>\nDone!", kVocab);
    REQUIRE(r.ok());
    CHECK(r.thinking == "plan");
    CHECK(r.actions == std::vector<std::string>{"move up"});
}

TEST_CASE("prose between the blocks is tolerated") {
    auto r = parse_response("<think>plan</think> and now "
                            "<action>move up</action>", kVocab);
    REQUIRE(r.ok());
    CHECK(r.actions == std::vector<std::string>{"move up"});
}

TEST_CASE("empty thinking is structurally valid") {
    auto r = parse_response("<think></think><action>no operation</action>", kVocab);
    REQUIRE(r.ok());
    CHECK(r.thinking.empty());
}

TEST_CASE("round trip recovers any rendered action list") {
    SplitMix64 rng(404);
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(6));
        std::vector<std::string> actions;
        for (int i = 0; i < n; ++i) {
            actions.push_back(kVocab[static_cast<std::size_t>(rng.below(kVocab.size()))]);
        }
        std::string rendered = "<think>step " + std::to_string(trial) + "</think><action>";
        for (int i = 0; i < n; ++i) {
            if (i > 0) rendered += "; ";
            rendered += actions[static_cast<std::size_t>(i)];
        }
        rendered += "</action>";
        auto r = parse_response(rendered, kVocab);
        REQUIRE(r.ok());
        CHECK(r.actions == actions);
        CHECK(r.thinking == "step " + std::to_string(trial));
    }
}

TEST_CASE("parsing is total over random byte strings") {
    SplitMix64 rng(777);
    const std::string pieces[] = {"<think>", "</think>", "<action>", "</action>",
                                  "move up", ";",        " ",        "fly"};
    for (int trial = 0; trial < 10000; ++trial) {
        std::string input;
        if (trial % 2 == 0) {
            const int len = static_cast<int>(rng.below(120));
            for (int i = 0; i < len; ++i) {
                input.push_back(static_cast<char>(rng.below(256)));
            }
        } else {
            const int parts = static_cast<int>(rng.below(12));
            for (int i = 0; i < parts; ++i) {
                input += pieces[static_cast<std::size_t>(rng.below(8))];
            }
        }
        auto r = parse_response(input, kVocab); // must not throw
        if (!r.ok()) {
            const int kind = static_cast<int>(r.error->kind);
            CHECK(kind >= 0);
            CHECK(kind <= static_cast<int>(ParseErrorKind::TagOrderViolation));
        }
    }
}

TEST_CASE("first prompts assemble system, description, and action prompt in order") {
    const std::string prompt =
        build_first_prompt("You are a helpful assistant.", "You are playing Sokoban, briefly.");
    CHECK(prompt.find("You are a helpful assistant.") == 0);
    const std::size_t desc = prompt.find("You are playing Sokoban");
    const std::size_t action = prompt.find("For each turn, your response must follow");
    REQUIRE(desc != std::string::npos);
    REQUIRE(action != std::string::npos);
    CHECK(desc > prompt.find("assistant."));
    CHECK(action > desc);
    CHECK(prompt.rfind("based on the current state.") == prompt.size() -
                                                             std::string("based on the current "
                                                                         "state.")
                                                                 .size());
}

TEST_CASE("an empty system prompt starts the prompt with the description") {
    const std::string prompt = build_first_prompt("", "Maze description here.");
    CHECK(prompt.find("Maze description here.") == 0);
}

TEST_CASE("follow-up prompts are feedback plus the action prompt") {
    const std::string prompt = build_followup_prompt("Maze Board:\nP o\no X");
    CHECK(prompt.find("Maze Board:") == 0);
    CHECK(prompt.find("For each turn, your response must follow") != std::string::npos);
    CHECK(prompt.find("You are a helpful assistant") == std::string::npos);
}

TEST_CASE("transcript counts conversation characters") {
    Transcript t;
    t.system_prompt = "sys";
    Turn a;
    a.observation = "obs1";
    a.raw_response = "resp1";
    Turn b;
    b.observation = "ob2";
    b.raw_response = "r2";
    t.turns = {a, b};
    CHECK(t.content_chars() == 3 + 4 + 5 + 3 + 2);
}

TEST_CASE("error kind names are stable") {
    CHECK(std::string(parse_error_kind_name(ParseErrorKind::MissingThinkTag)) ==
          "missing_think_tag");
    CHECK(std::string(parse_error_kind_name(ParseErrorKind::MissingActionTag)) ==
          "missing_action_tag");
    CHECK(std::string(parse_error_kind_name(ParseErrorKind::EmptyActionList)) ==
          "empty_action_list");
    CHECK(std::string(parse_error_kind_name(ParseErrorKind::UnknownCommand)) ==
          "unknown_command");
    CHECK(std::string(parse_error_kind_name(ParseErrorKind::TagOrderViolation)) ==
          "tag_order_violation");
}
