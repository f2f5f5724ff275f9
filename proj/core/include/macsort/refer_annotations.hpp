#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace macsort {

/// One Refer-GMOT annotation record.
struct GmotAnnotation {
  std::string class_name;
  std::vector<std::string> class_synonyms;
  std::string definition;
  std::vector<std::string> include_attributes;
  std::vector<std::string> exclude_attributes;
  std::string caption;
  std::string track_path;

  friend bool operator==(const GmotAnnotation&, const GmotAnnotation&) = default;
};

/// The three prompts a caption decomposes into. An empty `exclude` means the
/// caption had no excluding clause.
struct CaptionQuery {
  std::string general;
  std::string include;
  std::string exclude;

  friend bool operator==(const CaptionQuery&, const CaptionQuery&) = default;
};

/// Parses the JSON annotation text. Required fields are `class_name` and
/// `caption`; the list fields default to empty and the string fields to "".
/// The caption is validated against the annotation's class anchors.
///
/// Throws JsonError on malformed JSON, SchemaError naming the offending field,
/// and CaptionGrammarError when the caption does not follow either template.
GmotAnnotation parse_annotation(std::string_view json_text);

/// Reads and parses an annotation file; track_path is kept as written.
GmotAnnotation load_annotation(const std::filesystem::path& path);

/// Resolves track_path against the directory holding the annotation file.
std::filesystem::path resolve_track_path(const std::filesystem::path& annotation_file,
                                         const GmotAnnotation& annotation);

std::string serialize_annotation(const GmotAnnotation& annotation);

/// Splits a caption of the form
///   "Track <include> <class>"  or
///   "Track <include> <class> while excluding <exclude> <class>"
/// using the annotation's class_name (then class_synonyms) as anchors.
/// Class matching ignores case and a trailing plural "s"; attribute phrases
/// are returned verbatim from the caption.
CaptionQuery parse_caption(std::string_view caption, const GmotAnnotation& annotation);

}  // namespace macsort
