#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "macsort/refer_annotations.hpp"
#include "oracles.hpp"

using namespace macsort;

namespace {

GmotAnnotation car_annotation() {
  GmotAnnotation a;
  a.class_name = "car";
  a.caption = "Track white headlight cars while excluding red taillight cars";
  return a;
}

const char* kCarJson = R"({
  "class_name": "car",
  "class_synonyms": ["automobile", "vehicle"],
  "definition": "a road vehicle with four wheels",
  "include_attributes": ["white headlight"],
  "exclude_attributes": ["red taillight"],
  "caption": "Track white headlight cars while excluding red taillight cars",
  "track_path": "tracks/car_01.txt"
})";

std::string random_word(oracle::Gen& gen) {
  static const std::vector<std::string> syllables = {"ka", "lo", "mi", "ren", "tu", "sa", "vor", "el", "pi", "dun"};
  std::string w;
  const int n = gen.integer(1, 3);
  for (int i = 0; i < n; ++i) w += syllables[gen.integer(0, static_cast<int>(syllables.size()) - 1)];
  return w;
}

std::string random_phrase(oracle::Gen& gen, int min_words, int max_words) {
  std::string out;
  const int n = gen.integer(min_words, max_words);
  for (int i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += random_word(gen);
  }
  return out;
}

}  // namespace

TEST(ParseAnnotation, CarExamplePopulatesAllFields) {
  const GmotAnnotation a = parse_annotation(kCarJson);
  EXPECT_EQ(a.class_name, "car");
  EXPECT_EQ(a.class_synonyms, (std::vector<std::string>{"automobile", "vehicle"}));
  EXPECT_EQ(a.definition, "a road vehicle with four wheels");
  EXPECT_EQ(a.include_attributes, (std::vector<std::string>{"white headlight"}));
  EXPECT_EQ(a.exclude_attributes, (std::vector<std::string>{"red taillight"}));
  EXPECT_EQ(a.caption, "Track white headlight cars while excluding red taillight cars");
  EXPECT_EQ(a.track_path, "tracks/car_01.txt");
}

TEST(ParseAnnotation, MissingClassNameIsSchemaError) {
  const char* text = R"({"caption": "Track red balloon"})";
  EXPECT_MACSORT_ERROR(parse_annotation(text), ErrorCode::SchemaError);
  EXPECT_NE(testing_support::error_message_of([&] { parse_annotation(text); }).find("class_name"), std::string::npos);
}

TEST(ParseAnnotation, EmptyExcludeListDefaults) {
  const GmotAnnotation a =
      parse_annotation(R"({"class_name": "balloon", "caption": "Track red balloon", "exclude_attributes": []})");
  EXPECT_TRUE(a.exclude_attributes.empty());
  EXPECT_TRUE(a.class_synonyms.empty());
  EXPECT_TRUE(a.include_attributes.empty());
}

TEST(ParseAnnotation, MalformedJson) {
  EXPECT_MACSORT_ERROR(parse_annotation("{\"class_name\": "), ErrorCode::JsonError);
}

TEST(ParseAnnotation, IllTypedFieldNamesTheField) {
  const char* text = R"({"class_name": "car", "caption": "Track cars", "class_synonyms": "auto"})";
  EXPECT_MACSORT_ERROR(parse_annotation(text), ErrorCode::SchemaError);
  EXPECT_NE(testing_support::error_message_of([&] { parse_annotation(text); }).find("class_synonyms"),
            std::string::npos);
}

TEST(ParseAnnotation, UnparsableCaptionRejected) {
  EXPECT_MACSORT_ERROR(parse_annotation(R"({"class_name": "duck", "caption": "Follow the ducks"})"),
                       ErrorCode::CaptionGrammarError);
}

TEST(ParseAnnotation, SerializeRoundTrip) {
  const GmotAnnotation a = parse_annotation(kCarJson);
  const GmotAnnotation b = parse_annotation(serialize_annotation(a));
  EXPECT_EQ(a, b);
  EXPECT_EQ(serialize_annotation(a), serialize_annotation(b));
}

TEST(ParseAnnotation, TrackPathResolvesNextToAnnotation) {
  const GmotAnnotation a = parse_annotation(kCarJson);
  EXPECT_EQ(resolve_track_path("/data/refer/car.json", a), std::filesystem::path("/data/refer/tracks/car_01.txt"));
}

TEST(ParseCaption, CarExample) {
  const CaptionQuery q = parse_caption(car_annotation().caption, car_annotation());
  EXPECT_EQ(q.general, "cars");
  EXPECT_EQ(q.include, "white headlight");
  EXPECT_EQ(q.exclude, "red taillight");
}

TEST(ParseCaption, NoExclusionTemplate) {
  GmotAnnotation a;
  a.class_name = "balloon";
  const CaptionQuery q = parse_caption("Track red balloon", a);
  EXPECT_EQ(q, (CaptionQuery{"balloon", "red", ""}));
}

TEST(ParseCaption, MissingTrackKeyword) {
  GmotAnnotation a;
  a.class_name = "duck";
  EXPECT_MACSORT_ERROR(parse_caption("Follow the ducks", a), ErrorCode::CaptionGrammarError);
}

TEST(ParseCaption, CaseAndTrailingPeriod) {
  GmotAnnotation a;
  a.class_name = "Car";
  const CaptionQuery q = parse_caption("track Blue CARS.", a);
  EXPECT_EQ(q, (CaptionQuery{"CARS", "Blue", ""}));
}

TEST(ParseCaption, SynonymAnchor) {
  GmotAnnotation a;
  a.class_name = "car";
  a.class_synonyms = {"automobile"};
  const CaptionQuery q = parse_caption("Track rusty automobiles while excluding shiny automobiles", a);
  EXPECT_EQ(q, (CaptionQuery{"automobiles", "rusty", "shiny"}));
}

TEST(ParseCaption, MultiWordClass) {
  GmotAnnotation a;
  a.class_name = "traffic cone";
  const CaptionQuery q = parse_caption("Track orange traffic cones while excluding fallen traffic cones", a);
  EXPECT_EQ(q, (CaptionQuery{"traffic cones", "orange", "fallen"}));
}

TEST(ParseCaption, AllObjectsWithoutAttribute) {
  GmotAnnotation a;
  a.class_name = "fish";
  EXPECT_EQ(parse_caption("Track fishes", a), (CaptionQuery{"fishes", "", ""}));
}

TEST(ParseCaption, ClassMissingFromTail) {
  GmotAnnotation a;
  a.class_name = "car";
  EXPECT_MACSORT_ERROR(parse_caption("Track red cars while excluding blue trucks", a), ErrorCode::CaptionGrammarError);
  EXPECT_MACSORT_ERROR(parse_caption("Track red trucks", a), ErrorCode::CaptionGrammarError);
}

TEST(ParseCaption, ExcludingClauseNeedsAttribute) {
  GmotAnnotation a;
  a.class_name = "car";
  EXPECT_MACSORT_ERROR(parse_caption("Track red cars while excluding cars", a), ErrorCode::CaptionGrammarError);
}

TEST(ParseCaptionProperty, TemplateInversionOnRandomWords) {
  oracle::Gen gen(21);
  for (int i = 0; i < 1000; ++i) {
    GmotAnnotation a;
    a.class_name = random_word(gen);
    const std::string general = gen.coin() ? a.class_name + "s" : a.class_name;
    const std::string include = random_phrase(gen, 0, 3);
    const bool with_exclude = gen.coin();
    const std::string exclude = with_exclude ? random_phrase(gen, 1, 3) : "";
    std::string caption = "Track " + (include.empty() ? "" : include + " ") + general;
    if (with_exclude) caption += " while excluding " + exclude + " " + general;
    a.caption = caption;
    const CaptionQuery q = parse_caption(caption, a);
    EXPECT_EQ(q, (CaptionQuery{general, include, exclude})) << caption;
  }
}
