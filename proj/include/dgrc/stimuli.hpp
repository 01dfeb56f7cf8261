#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace dgrc {

// One (subject NP, VP1, VP2) triple from the stimulus table.
struct StimulusItem {
  std::string id;
  std::string subject;
  std::string vp1;
  std::string vp2;

  bool operator==(const StimulusItem&) const = default;
};

enum class Structure { kArc, kCoord };

// Which VP slot of the recombined utterance a sub-utterance comes from.
enum class Slot { kVp1 = 1, kVp2 = 2 };

std::string_view to_string(Structure structure);
Structure parse_structure(std::string_view text);

// A recombined utterance together with its two divided sub-utterances.
// `sub1` is built from whichever VP sits in the first slot of `surface`.
struct UtteranceVariant {
  std::string item_id;
  Structure structure = Structure::kArc;
  bool swapped = false;
  std::string surface;
  std::string sub1;
  std::string sub2;

  const std::string& sub(Slot slot) const {
    return slot == Slot::kVp1 ? sub1 : sub2;
  }
  bool operator==(const UtteranceVariant&) const = default;
};

// Parses the tab-separated stimulus table. The header must be
// `subject\tvp1\tvp2`, optionally followed by `\tid`. Without an id column,
// items are numbered item_0001, item_0002, ... in row order.
std::vector<StimulusItem> parse_items(std::string_view raw_text);
std::vector<StimulusItem> load_items(const std::filesystem::path& path);

enum class IdColumn { kOmit, kInclude };
std::string serialize_items(std::span<const StimulusItem> items,
                            IdColumn ids = IdColumn::kOmit);

StimulusItem swap_vps(const StimulusItem& item);

std::string build_full(const StimulusItem& item, Structure structure);
std::string build_sub(const StimulusItem& item, Slot slot);
UtteranceVariant build_variant(const StimulusItem& item, Structure structure,
                               bool swapped);

nlohmann::json to_json(const UtteranceVariant& variant);

}  // namespace dgrc
