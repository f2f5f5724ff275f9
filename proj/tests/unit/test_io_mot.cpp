#include <cstring>

#include <gtest/gtest.h>

#include "expect_error.hpp"
#include "macsort/io_mot.hpp"
#include "oracles.hpp"

using namespace macsort;

namespace {

std::vector<Embedding> random_embeddings(oracle::Gen& gen, int count, int dim) {
  std::vector<Embedding> out;
  for (int i = 0; i < count; ++i) out.push_back(gen.embedding(dim));
  return out;
}

std::vector<Detection> random_detections(oracle::Gen& gen, int frames, int per_frame, int dim) {
  std::vector<Detection> out;
  for (int f = 1; f <= frames; ++f) {
    for (int k = 0; k < per_frame; ++k) out.push_back({f, gen.box(300.0, 10, 50), gen.uniform(0.0, 1.0), gen.embedding(dim)});
  }
  return out;
}

// Float32 storage: values survive a write/read only after rounding to float.
Embedding as_float(const Embedding& e) {
  std::vector<double> v;
  for (double x : e.values()) v.push_back(static_cast<float>(x));
  return Embedding(v);
}

}  // namespace

TEST(ParseMot, ExampleLine) {
  const auto records = parse_mot("1,1,100,50,20,40,0.9,-1,-1,-1\n");
  ASSERT_EQ(records.size(), 1u);
  const MotRecord& r = records[0];
  EXPECT_EQ(r.frame, 1);
  EXPECT_EQ(r.id, 1);
  EXPECT_EQ(r.left, 100.0);
  EXPECT_EQ(r.top, 50.0);
  EXPECT_EQ(r.width, 20.0);
  EXPECT_EQ(r.height, 40.0);
  EXPECT_EQ(r.conf, 0.9);
  EXPECT_EQ(r.x, -1.0);
  EXPECT_EQ(r.z, -1.0);
  const BBox b = r.box();
  EXPECT_EQ(b.u, 110.0);
  EXPECT_EQ(b.v, 70.0);
}

TEST(ParseMot, NineColumnsAndBlankLines) {
  const auto records = parse_mot("\n2,-1,0,0,5,5,0.5,-1,-1\r\n\n3,4,1.5,2.5,3,4,1,-1,-1,-1");
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].frame, 2);
  EXPECT_EQ(records[0].id, -1);
  EXPECT_EQ(records[1].left, 1.5);
}

TEST(ParseMot, EmptyText) { EXPECT_TRUE(parse_mot("").empty()); }

TEST(ParseMot, WrongColumnCountNamesLine) {
  const auto msg = testing_support::error_message_of([] { parse_mot("1,1,0,0,5,5,1,-1,-1\n1,2,3,4,5\n"); });
  EXPECT_NE(msg.find("line 2"), std::string::npos);
  EXPECT_MACSORT_ERROR(parse_mot("1,2,3,4,5\n"), ErrorCode::ParseError);
}

TEST(ParseMot, BadFields) {
  EXPECT_MACSORT_ERROR(parse_mot("x,1,0,0,5,5,1,-1,-1\n"), ErrorCode::ParseError);
  EXPECT_MACSORT_ERROR(parse_mot("1.5,1,0,0,5,5,1,-1,-1\n"), ErrorCode::ParseError);
  EXPECT_MACSORT_ERROR(parse_mot("0,1,0,0,5,5,1,-1,-1\n"), ErrorCode::ParseError);
  EXPECT_MACSORT_ERROR(parse_mot("1,1,0,0,nan,5,1,-1,-1\n"), ErrorCode::ParseError);
  EXPECT_MACSORT_ERROR(parse_mot("1,1,0,0,0,5,1,-1,-1\n"), ErrorCode::NonPositiveBox);
  EXPECT_MACSORT_ERROR(parse_mot("1,1,0,0,5,-2,1,-1,-1\n"), ErrorCode::NonPositiveBox);
}

TEST(MotFiles, MissingFileIsIoError) {
  oracle::TempDir dir("mot_missing");
  EXPECT_MACSORT_ERROR(read_mot(dir / "nope.txt"), ErrorCode::IoError);
}

TEST(MotFiles, FormatIsCanonical) {
  const std::vector<MotRecord> recs = {MotRecord::from_box(2, 7, {20, 30, 10, 20}, 0.5),
                                       MotRecord::from_box(1, 3, BBox::from_ltwh(1.234, 5.678, 9, 10), 1.0)};
  EXPECT_EQ(format_mot(recs), "1,3,1.23,5.68,9.00,10.00,1.0000,-1,-1,-1\n2,7,15.00,20.00,10.00,20.00,0.5000,-1,-1,-1\n");
}

TEST(MotFiles, GroupedByFrame) {
  oracle::TempDir dir("mot_grouped");
  oracle::write_file(dir / "a.txt", "2,1,0,0,5,5,1,-1,-1,-1\n1,1,0,0,5,5,1,-1,-1,-1\n2,2,9,9,5,5,1,-1,-1,-1\n");
  const auto grouped = read_mot(dir / "a.txt");
  ASSERT_EQ(grouped.size(), 2u);
  ASSERT_EQ(grouped.at(2).size(), 2u);
  EXPECT_EQ(grouped.at(2)[1].id, 2);
}

TEST(MotFilesProperty, WriteReadWriteIsIdempotent) {
  oracle::Gen gen(101);
  for (int trial = 0; trial < 30; ++trial) {
    oracle::TempDir dir("mot_idem");
    std::vector<MotRecord> recs;
    for (int i = gen.integer(0, 60); i > 0; --i) {
      recs.push_back(MotRecord::from_box(gen.integer(1, 20), gen.integer(-1, 9), gen.box(500.0, 1, 80), gen.uniform()));
    }
    write_mot(recs, dir / "a.txt");
    const std::string first = oracle::read_file(dir / "a.txt");
    write_mot(read_mot_records(dir / "a.txt"), dir / "b.txt");
    EXPECT_EQ(oracle::read_file(dir / "b.txt"), first);
  }
}

TEST(Sidecar, HeaderLayout) {
  const std::vector<Embedding> e = {Embedding{1.0, -2.0}};
  const auto bytes = encode_embeddings(e);
  ASSERT_EQ(bytes.size(), 16u + 8u);
  EXPECT_EQ(std::memcmp(bytes.data(), "EMB1", 4), 0);
  EXPECT_EQ(bytes[4], 2);
  EXPECT_EQ(bytes[8], 1);
  // 1.0f is 0x3F800000, little-endian.
  EXPECT_EQ(bytes[16], 0x00);
  EXPECT_EQ(bytes[19], 0x3F);
  EXPECT_EQ(bytes[23], 0xC0);
}

TEST(Sidecar, RoundTripIsBitExact) {
  oracle::Gen gen(102);
  oracle::TempDir dir("sidecar");
  const auto embs = random_embeddings(gen, 100, 128);
  write_embeddings(embs, dir / "a.emb");
  const auto back = read_embeddings(dir / "a.emb");
  ASSERT_EQ(back.size(), 100u);
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(back[i], as_float(embs[i]));
  write_embeddings(back, dir / "b.emb");
  EXPECT_EQ(oracle::read_file(dir / "a.emb"), oracle::read_file(dir / "b.emb"));
}

TEST(Sidecar, SingleOneDimensionalRow) {
  const std::vector<Embedding> e = {Embedding{0.25}};
  const auto back = decode_embeddings(encode_embeddings(e));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0], Embedding{0.25});
}

TEST(Sidecar, EmptyList) { EXPECT_TRUE(decode_embeddings(encode_embeddings(std::vector<Embedding>{})).empty()); }

TEST(Sidecar, TruncatedBody) {
  oracle::Gen gen(103);
  auto bytes = encode_embeddings(random_embeddings(gen, 3, 4));
  bytes.pop_back();
  EXPECT_MACSORT_ERROR(decode_embeddings(bytes), ErrorCode::TruncatedBody);
  bytes.resize(10);
  EXPECT_MACSORT_ERROR(decode_embeddings(bytes), ErrorCode::TruncatedBody);
}

TEST(Sidecar, BadMagic) {
  auto bytes = encode_embeddings(std::vector<Embedding>{Embedding{1.0}});
  bytes[3] = '2';
  EXPECT_MACSORT_ERROR(decode_embeddings(bytes), ErrorCode::BadMagic);
  EXPECT_MACSORT_ERROR(decode_embeddings(std::vector<unsigned char>{'E', 'M'}), ErrorCode::BadMagic);
}

TEST(Sidecar, TrailingBytesRejected) {
  auto bytes = encode_embeddings(std::vector<Embedding>{Embedding{1.0}});
  bytes.push_back(0);
  EXPECT_MACSORT_ERROR(decode_embeddings(bytes), ErrorCode::MalformedSidecar);
}

TEST(Sidecar, MixedDimensionsRejected) {
  const std::vector<Embedding> e = {Embedding{1.0}, Embedding{1.0, 2.0}};
  EXPECT_MACSORT_ERROR(encode_embeddings(e), ErrorCode::DimensionMismatch);
}

TEST(Detections, RoundTripKeepsRowsAligned) {
  oracle::Gen gen(104);
  oracle::TempDir dir("dets");
  auto dets = random_detections(gen, 5, 4, 16);
  std::swap(dets.front(), dets.back());
  write_detections(dets, dir / "d.txt", dir / "d.emb");
  const auto back = read_detections(dir / "d.txt", dir / "d.emb");
  ASSERT_EQ(back.size(), dets.size());
  for (std::size_t i = 1; i < back.size(); ++i) EXPECT_LE(back[i - 1].frame, back[i].frame);
  // Every row's embedding still belongs to the box written with it.
  for (const auto& b : back) {
    bool found = false;
    for (const auto& d : dets) {
      if (d.frame == b.frame && std::abs(d.bbox.left() - b.bbox.left()) < 0.006 &&
          as_float(d.embedding) == b.embedding) {
        found = true;
      }
    }
    EXPECT_TRUE(found);
  }
}

TEST(Detections, MissingSidecar) {
  oracle::TempDir dir("dets_missing");
  oracle::write_file(dir / "d.txt", "1,-1,0,0,5,5,1,-1,-1,-1\n");
  EXPECT_MACSORT_ERROR(read_detections(dir / "d.txt", dir / "d.emb"), ErrorCode::SidecarMismatch);
}

TEST(PromptDumpTest, OnlyGeneral) {
  oracle::Gen gen(105);
  oracle::TempDir dir("dump_general");
  write_detections(random_detections(gen, 3, 5, 8), dir / "general.txt", dir / "general.emb");
  const PromptFrame f = read_prompt_dump(dir.path(), 2, 0.0);
  EXPECT_EQ(f.general.size(), 5u);
  EXPECT_TRUE(f.include.empty());
  EXPECT_TRUE(f.exclude.empty());
  for (std::size_t k = 0; k < f.general.size(); ++k) EXPECT_EQ(f.general[k].index, k);
}

TEST(PromptDumpTest, AllThreeSets) {
  oracle::Gen gen(106);
  oracle::TempDir dir("dump_all");
  for (const char* stem : {"general", "include", "exclude"}) {
    write_detections(random_detections(gen, 4, 3, 8), dir / (std::string(stem) + ".txt"),
                     dir / (std::string(stem) + ".emb"));
  }
  const PromptDump dump(dir.path());
  EXPECT_EQ(dump.last_frame(), 4);
  EXPECT_TRUE(dump.has_include());
  EXPECT_TRUE(dump.has_exclude());
  const PromptFrame f = dump.frame(3, 0.0);
  EXPECT_EQ(f.general.size(), 3u);
  EXPECT_EQ(f.include.size(), 3u);
  EXPECT_EQ(f.exclude.size(), 3u);
  EXPECT_TRUE(dump.frame(9).general.empty());
}

TEST(PromptDumpTest, ScoresBelowThresholdDropped) {
  oracle::TempDir dir("dump_threshold");
  std::vector<Detection> dets = {{1, {10, 10, 5, 5}, 0.1, Embedding{1.0}},
                                 {1, {20, 10, 5, 5}, 0.2, Embedding{1.0}},
                                 {1, {30, 10, 5, 5}, 0.9, Embedding{1.0}}};
  write_detections(dets, dir / "general.txt", dir / "general.emb");
  const PromptFrame f = read_prompt_dump(dir.path(), 1);
  ASSERT_EQ(f.general.size(), 2u);
  EXPECT_EQ(f.general[0].index, 1u);
  EXPECT_EQ(f.general[1].index, 2u);
}

TEST(PromptDumpTest, RowCountMismatch) {
  oracle::Gen gen(107);
  oracle::TempDir dir("dump_mismatch");
  write_detections(random_detections(gen, 2, 5, 8), dir / "general.txt", dir / "general.emb");
  write_embeddings(random_embeddings(gen, 9, 8), dir / "general.emb");
  EXPECT_MACSORT_ERROR(PromptDump{dir.path()}, ErrorCode::SidecarMismatch);
}

TEST(PromptDumpTest, MissingGeneral) {
  oracle::TempDir dir("dump_empty");
  EXPECT_MACSORT_ERROR(PromptDump{dir.path()}, ErrorCode::MissingGeneralFile);
}
