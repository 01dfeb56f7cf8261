#include "dgrc/stimuli.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "dgrc/error.hpp"
#include "dgrc/text.hpp"

namespace dgrc {
namespace {

constexpr std::string_view kRelativizer = "who";

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

std::string item_id_for_row(std::size_t row) {
  std::string digits = std::to_string(row);
  if (digits.size() < 4) digits.insert(0, 4 - digits.size(), '0');
  return "item_" + digits;
}

// VP text with any trailing sentence punctuation removed.
std::string_view bare(std::string_view vp) {
  vp = trim(vp);
  while (!vp.empty() && (vp.back() == '.' || vp.back() == '!' ||
                         vp.back() == '?')) {
    vp.remove_suffix(1);
  }
  return trim(vp);
}

}  // namespace

std::string_view to_string(Structure structure) {
  return structure == Structure::kArc ? "arc" : "coord";
}

Structure parse_structure(std::string_view text) {
  if (text == "arc") return Structure::kArc;
  if (text == "coord") return Structure::kCoord;
  throw InvalidInput("unknown structure '" + std::string(text) + "'");
}

std::vector<StimulusItem> parse_items(std::string_view raw_text) {
  std::vector<StimulusItem> items;
  std::unordered_set<std::string> seen_ids;
  bool have_header = false;
  bool has_id_column = false;
  std::size_t line_no = 0;
  std::size_t data_row = 0;

  std::size_t pos = 0;
  while (pos <= raw_text.size()) {
    std::size_t end = raw_text.find('\n', pos);
    if (end == std::string_view::npos) end = raw_text.size();
    std::string_view line = raw_text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) {
      if (pos > raw_text.size()) break;
      continue;
    }

    const auto fields = split_tabs(line);
    if (!have_header) {
      if (fields.size() < 3 || fields.size() > 4 || trim(fields[0]) != "subject" ||
          trim(fields[1]) != "vp1" || trim(fields[2]) != "vp2" ||
          (fields.size() == 4 && trim(fields[3]) != "id")) {
        throw ParseError("expected header 'subject\\tvp1\\tvp2[\\tid]'", line_no);
      }
      has_id_column = fields.size() == 4;
      have_header = true;
      continue;
    }

    const std::size_t expected = has_id_column ? 4 : 3;
    if (fields.size() != expected) {
      throw ParseError("expected " + std::to_string(expected) +
                           " tab-separated fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    }
    static constexpr const char* kNames[] = {"subject", "vp1", "vp2", "id"};
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (trim(fields[i]).empty()) {
        throw ParseError(std::string("empty ") + kNames[i] + " field", line_no);
      }
    }

    ++data_row;
    StimulusItem item;
    item.subject = std::string(trim(fields[0]));
    item.vp1 = std::string(trim(fields[1]));
    item.vp2 = std::string(trim(fields[2]));
    item.id = has_id_column ? std::string(trim(fields[3]))
                            : item_id_for_row(data_row);
    if (!seen_ids.insert(item.id).second) {
      throw ParseError("duplicate id '" + item.id + "'", line_no);
    }
    items.push_back(std::move(item));
  }
  if (!have_header) throw ParseError("missing header row", 0);
  return items;
}

std::vector<StimulusItem> load_items(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open items file: " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_items(buffer.str());
  } catch (const ParseError& e) {
    throw ParseError(path.string() + ": " + e.what(), e.line());
  }
}

std::string serialize_items(std::span<const StimulusItem> items, IdColumn ids) {
  std::string out = ids == IdColumn::kInclude ? "subject\tvp1\tvp2\tid\n"
                                              : "subject\tvp1\tvp2\n";
  for (const auto& item : items) {
    out += item.subject + '\t' + item.vp1 + '\t' + item.vp2;
    if (ids == IdColumn::kInclude) out += '\t' + item.id;
    out += '\n';
  }
  return out;
}

StimulusItem swap_vps(const StimulusItem& item) {
  StimulusItem out = item;
  std::swap(out.vp1, out.vp2);
  return out;
}

std::string build_full(const StimulusItem& item, Structure structure) {
  const std::string_view subject = trim(item.subject);
  std::string out(subject);
  if (structure == Structure::kArc) {
    out += ", ";
    out += kRelativizer;
    out += ' ';
    out += bare(item.vp1);
    out += ", ";
  } else {
    out += ' ';
    out += bare(item.vp1);
    out += " and ";
  }
  out += bare(item.vp2);
  out += '.';
  return out;
}

std::string build_sub(const StimulusItem& item, Slot slot) {
  std::string out(trim(item.subject));
  out += ' ';
  out += bare(slot == Slot::kVp1 ? item.vp1 : item.vp2);
  out += '.';
  return out;
}

UtteranceVariant build_variant(const StimulusItem& item, Structure structure,
                               bool swapped) {
  const StimulusItem arranged = swapped ? swap_vps(item) : item;
  return UtteranceVariant{
      .item_id = item.id,
      .structure = structure,
      .swapped = swapped,
      .surface = build_full(arranged, structure),
      .sub1 = build_sub(arranged, Slot::kVp1),
      .sub2 = build_sub(arranged, Slot::kVp2),
  };
}

nlohmann::json to_json(const UtteranceVariant& variant) {
  return {
      {"item_id", variant.item_id},
      {"structure", to_string(variant.structure)},
      {"swapped", variant.swapped},
      {"surface", variant.surface},
      {"sub1", variant.sub1},
      {"sub2", variant.sub2},
  };
}

}  // namespace dgrc
