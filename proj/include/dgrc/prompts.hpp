#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace dgrc {

// CHAT renders role/content messages for instruct models; BASE renders a
// two-speaker quotation for base models.
enum class PromptMode { kChat, kBase };

enum class Header { kNone, kReject, kDigression };

enum class Role { kSystem, kUser, kAssistant };

inline constexpr std::string_view kSystemInstruction =
    "Please respond to the following message as naturally as possible, using "
    "a single sentence, as if we were talking to each other. Please keep it "
    "short.";
inline constexpr std::string_view kRejectHeader = "No, that's not true!";
inline constexpr std::string_view kDigressionHeader = "Hey, wait a minute!";

// Response header text; empty for Header::kNone.
std::string_view header_text(Header header);
// "none" | "reject" | "digression"
std::string_view to_string(Header header);
Header parse_header(std::string_view name);

std::string_view to_string(PromptMode mode);
PromptMode parse_prompt_mode(std::string_view name);

std::string_view to_string(Role role);
Role parse_role(std::string_view name);

struct ChatMessage {
  Role role;
  std::string content;
  bool operator==(const ChatMessage&) const = default;
};

struct ChatPrompt {
  std::vector<ChatMessage> messages;
  // Header the continuation completes, when the last message is an
  // assistant turn.
  std::optional<std::string> assistant_prefix;
  bool operator==(const ChatPrompt&) const = default;
};

// Conditioning context handed to a backend: chat messages or raw text.
using Context = std::variant<ChatPrompt, std::string>;

ChatPrompt render_chat(std::string_view utterance, Header header);

// `{name1} said, "{body}," and {name2} replied, "{header}` where body is the
// utterance without its terminal punctuation mark.
std::string render_base(std::string_view utterance, Header header,
                        std::string_view name1, std::string_view name2);

class NamePool {
 public:
  explicit NamePool(std::vector<std::string> names);

  // One name per line; blank lines ignored.
  static NamePool parse(std::string_view text);
  static NamePool load(const std::filesystem::path& path);

  std::span<const std::string> names() const { return names_; }
  std::size_t size() const { return names_.size(); }

 private:
  std::vector<std::string> names_;
};

// Two distinct names, a pure function of (seed, item_id).
std::pair<std::string, std::string> sample_names(const NamePool& pool,
                                                 std::uint64_t seed,
                                                 std::string_view item_id);

// Rendering settings shared by generation and scoring so both see the same
// speaker names for an item.
struct PromptSettings {
  PromptMode mode = PromptMode::kChat;
  const NamePool* names = nullptr;  // required in BASE mode
  std::uint64_t name_seed = 0;

  Context render(std::string_view item_id, std::string_view utterance,
                 Header header) const;
};

// Chat prompts serialize to `[{"role": ..., "content": ...}]`.
nlohmann::json messages_to_json(const ChatPrompt& prompt);
ChatPrompt messages_from_json(const nlohmann::json& messages);

// Chat: the user message. Base: the quoted body after ` said, "`, with the
// terminal period restored. Empty when not recognizable.
std::string context_utterance(const Context& context);
// Header the context ends with, kNone when absent.
Header context_header(const Context& context);

}  // namespace dgrc
