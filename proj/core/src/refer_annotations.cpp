#include "macsort/refer_annotations.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <optional>
#include <sstream>

#include <nlohmann/json.hpp>

#include "macsort/errors.hpp"

namespace macsort {
namespace {

using nlohmann::json;

std::string required_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw Error(ErrorCode::SchemaError, std::string(key));
  if (!it->is_string()) throw Error(ErrorCode::SchemaError, std::string(key) + ": expected string");
  auto value = it->get<std::string>();
  if (value.empty()) throw Error(ErrorCode::SchemaError, std::string(key) + ": must be non-empty");
  return value;
}

std::string optional_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_string()) throw Error(ErrorCode::SchemaError, std::string(key) + ": expected string");
  return it->get<std::string>();
}

std::vector<std::string> optional_list(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return {};
  if (!it->is_array()) throw Error(ErrorCode::SchemaError, std::string(key) + ": expected array");
  std::vector<std::string> out;
  for (const auto& item : *it) {
    if (!item.is_string()) {
      throw Error(ErrorCode::SchemaError, std::string(key) + ": expected array of strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

struct Token {
  std::size_t begin;
  std::size_t end;
  std::string lower;
};

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i >= text.size()) break;
    const std::size_t begin = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    tokens.push_back({begin, i, to_lower(text.substr(begin, i - begin))});
  }
  return tokens;
}

bool same_word(const std::string& a, const std::string& b) {
  if (a == b) return true;
  auto plural_of = [](const std::string& p, const std::string& s) {
    return (p.size() == s.size() + 1 && p.compare(0, s.size(), s) == 0 && p.back() == 's') ||
           (p.size() == s.size() + 2 && p.compare(0, s.size(), s) == 0 &&
            p.compare(s.size(), 2, "es") == 0);
  };
  return plural_of(a, b) || plural_of(b, a);
}

// Index of the first token of `anchor` when it terminates tokens[first, last).
std::optional<std::size_t> match_tail(const std::vector<Token>& tokens, std::size_t first,
                                      std::size_t last, const std::vector<Token>& anchor) {
  if (anchor.empty() || last - first < anchor.size()) return std::nullopt;
  const std::size_t start = last - anchor.size();
  for (std::size_t k = 0; k < anchor.size(); ++k) {
    const auto& word = tokens[start + k].lower;
    const auto& want = anchor[k].lower;
    const bool ok = (k + 1 == anchor.size()) ? same_word(word, want) : word == want;
    if (!ok) return std::nullopt;
  }
  return start;
}

std::optional<std::size_t> match_any(const std::vector<Token>& tokens, std::size_t first,
                                     std::size_t last,
                                     const std::vector<std::vector<Token>>& anchors) {
  for (const auto& anchor : anchors) {
    if (auto pos = match_tail(tokens, first, last, anchor)) return pos;
  }
  return std::nullopt;
}

std::string_view span_text(std::string_view text, const std::vector<Token>& tokens,
                           std::size_t first, std::size_t last) {
  if (first >= last) return {};
  return text.substr(tokens[first].begin, tokens[last - 1].end - tokens[first].begin);
}

[[noreturn]] void grammar_error(std::string_view reason, std::string_view remainder) {
  throw Error(ErrorCode::CaptionGrammarError,
              std::string(reason) + ": \"" + std::string(remainder) + "\"");
}

}  // namespace

CaptionQuery parse_caption(std::string_view caption, const GmotAnnotation& annotation) {
  std::string_view text = caption;
  while (!text.empty() && (std::isspace(static_cast<unsigned char>(text.back())) || text.back() == '.')) {
    text.remove_suffix(1);
  }
  const auto tokens = tokenize(text);
  if (tokens.empty() || tokens.front().lower != "track") {
    grammar_error("caption must start with \"Track\"", text);
  }

  std::vector<std::vector<Token>> anchors;
  anchors.push_back(tokenize(annotation.class_name));
  for (const auto& syn : annotation.class_synonyms) anchors.push_back(tokenize(syn));

  std::size_t clause = tokens.size();
  for (std::size_t i = 1; i + 1 < tokens.size(); ++i) {
    if (tokens[i].lower == "while" && tokens[i + 1].lower == "excluding") {
      clause = i;
      break;
    }
  }

  const auto head_class = match_any(tokens, 1, clause, anchors);
  if (!head_class) {
    grammar_error("no class name ends the include phrase", span_text(text, tokens, 1, clause));
  }

  CaptionQuery query;
  query.general = std::string(span_text(text, tokens, *head_class, clause));
  query.include = std::string(span_text(text, tokens, 1, *head_class));

  if (clause < tokens.size()) {
    const std::size_t first = clause + 2;
    const auto tail_class = match_any(tokens, first, tokens.size(), anchors);
    if (!tail_class) {
      grammar_error("no class name ends the excluding clause",
                    span_text(text, tokens, first, tokens.size()));
    }
    if (*tail_class == first) {
      grammar_error("excluding clause has no attribute", span_text(text, tokens, first, tokens.size()));
    }
    query.exclude = std::string(span_text(text, tokens, first, *tail_class));
  }
  return query;
}

GmotAnnotation parse_annotation(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::JsonError, e.what());
  }
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "<root>: expected object");

  GmotAnnotation a;
  a.class_name = required_string(j, "class_name");
  a.class_synonyms = optional_list(j, "class_synonyms");
  a.definition = optional_string(j, "definition");
  a.include_attributes = optional_list(j, "include_attributes");
  a.exclude_attributes = optional_list(j, "exclude_attributes");
  a.caption = required_string(j, "caption");
  a.track_path = optional_string(j, "track_path");
  parse_caption(a.caption, a);
  return a;
}

GmotAnnotation load_annotation(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_annotation(buf.str());
}

std::filesystem::path resolve_track_path(const std::filesystem::path& annotation_file,
                                         const GmotAnnotation& annotation) {
  return annotation_file.parent_path() / annotation.track_path;
}

std::string serialize_annotation(const GmotAnnotation& a) {
  json j = {
      {"class_name", a.class_name},
      {"class_synonyms", a.class_synonyms},
      {"definition", a.definition},
      {"include_attributes", a.include_attributes},
      {"exclude_attributes", a.exclude_attributes},
      {"caption", a.caption},
      {"track_path", a.track_path},
  };
  return j.dump(2);
}

}  // namespace macsort
