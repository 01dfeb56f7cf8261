#include "dgrc/prompts.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "dgrc/error.hpp"
#include "dgrc/hashing.hpp"
#include "dgrc/text.hpp"

namespace dgrc {
namespace {

constexpr std::string_view kSaidOpen = " said, \"";
constexpr std::string_view kSaidClose = ",\" and ";
constexpr std::string_view kRepliedOpen = " replied, \"";

bool is_terminal(char c) { return c == '.' || c == '!' || c == '?'; }

}  // namespace

std::string_view header_text(Header header) {
  switch (header) {
    case Header::kReject:
      return kRejectHeader;
    case Header::kDigression:
      return kDigressionHeader;
    case Header::kNone:
      break;
  }
  return {};
}

std::string_view to_string(Header header) {
  switch (header) {
    case Header::kReject:
      return "reject";
    case Header::kDigression:
      return "digression";
    case Header::kNone:
      break;
  }
  return "none";
}

Header parse_header(std::string_view name) {
  if (name == "none") return Header::kNone;
  if (name == "reject") return Header::kReject;
  if (name == "digression") return Header::kDigression;
  throw InvalidInput("unknown header '" + std::string(name) + "'");
}

std::string_view to_string(PromptMode mode) {
  return mode == PromptMode::kChat ? "chat" : "base";
}

PromptMode parse_prompt_mode(std::string_view name) {
  if (name == "chat") return PromptMode::kChat;
  if (name == "base") return PromptMode::kBase;
  throw ConfigError("unknown prompt mode '" + std::string(name) + "'");
}

std::string_view to_string(Role role) {
  switch (role) {
    case Role::kSystem:
      return "system";
    case Role::kUser:
      return "user";
    case Role::kAssistant:
      break;
  }
  return "assistant";
}

Role parse_role(std::string_view name) {
  if (name == "system") return Role::kSystem;
  if (name == "user") return Role::kUser;
  if (name == "assistant") return Role::kAssistant;
  throw InvalidInput("unknown role '" + std::string(name) + "'");
}

ChatPrompt render_chat(std::string_view utterance, Header header) {
  if (trim(utterance).empty()) throw InvalidInput("empty utterance");
  ChatPrompt prompt;
  prompt.messages.push_back({Role::kSystem, std::string(kSystemInstruction)});
  prompt.messages.push_back({Role::kUser, std::string(utterance)});
  if (header != Header::kNone) {
    prompt.messages.push_back({Role::kAssistant, std::string(header_text(header))});
    prompt.assistant_prefix = std::string(header_text(header));
  }
  return prompt;
}

std::string render_base(std::string_view utterance, Header header,
                        std::string_view name1, std::string_view name2) {
  utterance = trim(utterance);
  if (utterance.size() < 2 || !is_terminal(utterance.back()) ||
      is_terminal(utterance[utterance.size() - 2])) {
    throw InvalidInput("utterance must end with a single terminal punctuation "
                       "mark: '" + std::string(utterance) + "'");
  }
  if (name1 == name2) {
    throw InvalidInput("speaker names must differ: '" + std::string(name1) + "'");
  }
  std::string out(name1);
  out += kSaidOpen;
  out += utterance.substr(0, utterance.size() - 1);
  out += kSaidClose;
  out += name2;
  out += kRepliedOpen;
  out += header_text(header);
  return out;
}

NamePool::NamePool(std::vector<std::string> names) : names_(std::move(names)) {
  if (names_.size() < 2) {
    throw ConfigError("name pool needs at least 2 names, got " +
                      std::to_string(names_.size()));
  }
  std::unordered_set<std::string> seen;
  for (const auto& name : names_) {
    if (name.empty()) throw ConfigError("name pool contains an empty name");
    if (!seen.insert(name).second) {
      throw ConfigError("name pool contains duplicate name '" + name + "'");
    }
  }
}

NamePool NamePool::parse(std::string_view text) {
  std::vector<std::string> names;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    const auto name = trim(line);
    if (!name.empty()) names.emplace_back(name);
  }
  return NamePool(std::move(names));
}

NamePool NamePool::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open names file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::pair<std::string, std::string> sample_names(const NamePool& pool,
                                                 std::uint64_t seed,
                                                 std::string_view item_id) {
  const std::size_t n = pool.size();
  if (n < 2) throw ConfigError("name pool needs at least 2 names");
  SplitMix64 rng(Hasher64(seed).add("names").add(item_id).digest());
  const std::uint64_t first = rng.below(n);
  const std::uint64_t offset = 1 + rng.below(n - 1);
  const std::uint64_t second = (first + offset) % n;
  return {pool.names()[first], pool.names()[second]};
}

Context PromptSettings::render(std::string_view item_id,
                               std::string_view utterance,
                               Header header) const {
  if (mode == PromptMode::kChat) return render_chat(utterance, header);
  if (names == nullptr) throw ConfigError("base prompt mode needs a name pool");
  const auto [name1, name2] = sample_names(*names, name_seed, item_id);
  return render_base(utterance, header, name1, name2);
}

nlohmann::json messages_to_json(const ChatPrompt& prompt) {
  auto out = nlohmann::json::array();
  for (const auto& m : prompt.messages) {
    out.push_back({{"role", to_string(m.role)}, {"content", m.content}});
  }
  return out;
}

ChatPrompt messages_from_json(const nlohmann::json& messages) {
  if (!messages.is_array()) throw InvalidInput("messages must be an array");
  ChatPrompt prompt;
  for (const auto& m : messages) {
    if (!m.is_object() || !m.contains("role") || !m.contains("content") ||
        !m["role"].is_string() || !m["content"].is_string()) {
      throw InvalidInput("message needs string role and content");
    }
    prompt.messages.push_back(
        {parse_role(m["role"].get<std::string>()), m["content"].get<std::string>()});
  }
  if (!prompt.messages.empty() && prompt.messages.back().role == Role::kAssistant) {
    prompt.assistant_prefix = prompt.messages.back().content;
  }
  return prompt;
}

std::string context_utterance(const Context& context) {
  if (const auto* chat = std::get_if<ChatPrompt>(&context)) {
    for (const auto& m : chat->messages) {
      if (m.role == Role::kUser) return m.content;
    }
    return {};
  }
  const auto& text = std::get<std::string>(context);
  const std::size_t open = text.find(kSaidOpen);
  if (open == std::string::npos) return text;
  const std::size_t body = open + kSaidOpen.size();
  const std::size_t close = text.find(kSaidClose, body);
  if (close == std::string::npos) return text.substr(body);
  return text.substr(body, close - body) + ".";
}

Header context_header(const Context& context) {
  std::string_view tail;
  if (const auto* chat = std::get_if<ChatPrompt>(&context)) {
    if (chat->messages.empty() || chat->messages.back().role != Role::kAssistant) {
      return Header::kNone;
    }
    tail = chat->messages.back().content;
  } else {
    const auto& text = std::get<std::string>(context);
    const std::size_t replied = text.rfind(kRepliedOpen);
    if (replied == std::string::npos) return Header::kNone;
    tail = std::string_view(text).substr(replied + kRepliedOpen.size());
  }
  if (tail == kRejectHeader) return Header::kReject;
  if (tail == kDigressionHeader) return Header::kDigression;
  return Header::kNone;
}

}  // namespace dgrc
