// Copyright 2026 The fedaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fedaudit/dataset.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "fedaudit/error.hpp"

namespace fedaudit {
namespace {

template <typename F>
void expect_code(F&& f, ErrorCode code) {
  try {
    f();
    ADD_FAILURE() << "expected " << code_name(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

DatasetSpec spec_for(std::vector<std::string> groups = {}) {
  DatasetSpec spec;
  spec.score_column = "score";
  spec.group_column = "race";
  spec.groups = std::move(groups);
  return spec;
}

constexpr const char* kCsv =
    "id,race,score\n"
    "1,B,3\n"
    "2,A,7\n"
    "3,\"C, other\",1\n"
    "4,A,2\r\n"
    "5,B,10\n";

TEST(CsvTest, QuotesCommasAndLineEnds) {
  const auto rows = parse_csv("a,b\n\"x,\"\"y\"\"\",2\r\n,3\n");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][0], "x,\"y\"");
  EXPECT_EQ(rows[1][1], "2");
  EXPECT_EQ(rows[2][0], "");
  EXPECT_EQ(rows[2][1], "3");
}

TEST(CsvTest, NoTrailingNewline) {
  const auto rows = parse_csv("a\n1");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][0], "1");
}

TEST(CsvTest, UnterminatedQuote) {
  expect_code([] { parse_csv("a\n\"oops\n"); }, ErrorCode::kDataset);
}

TEST(IngestTest, KeepsRowOrderAndSortsLabels) {
  const auto ds = ingest_text(kCsv, spec_for());
  EXPECT_EQ(ds.labels, (std::vector<std::string>{"A", "B", "C, other"}));
  EXPECT_EQ(ds.scores, (std::vector<double>{3, 7, 1, 2, 10}));
  EXPECT_EQ(ds.group_index, (std::vector<std::uint32_t>{1, 0, 2, 0, 1}));
  EXPECT_EQ(ds.group_counts(), (std::vector<std::uint64_t>{2, 2, 1}));
  const auto groups = ds.by_group();
  EXPECT_EQ(groups.at("A"), (std::vector<double>{7, 2}));
}

TEST(IngestTest, Whitelist) {
  const auto ds = ingest_text(kCsv, spec_for({"A", "B"}));
  EXPECT_EQ(ds.size(), 4u);
  EXPECT_EQ(ds.labels, (std::vector<std::string>{"A", "B"}));
  expect_code([] { ingest_text(kCsv, spec_for({"A", "Z"})); }, ErrorCode::kDataset);
}

TEST(IngestTest, JitterSubtractsOpenUniform) {
  auto spec = spec_for();
  spec.jitter = true;
  spec.jitter_seed = 5;
  const auto plain = ingest_text(kCsv, spec_for());
  const auto a = ingest_text(kCsv, spec);
  const auto b = ingest_text(kCsv, spec);
  EXPECT_EQ(a.scores, b.scores);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_LT(a.scores[i], plain.scores[i]);
    EXPECT_GT(a.scores[i], plain.scores[i] - 1.0);
  }
  spec.jitter_seed = 6;
  EXPECT_NE(ingest_text(kCsv, spec).scores, a.scores);
}

TEST(IngestTest, Errors) {
  auto missing = spec_for();
  missing.score_column = "decile";
  expect_code([&] { ingest_text(kCsv, missing); }, ErrorCode::kDataset);
  expect_code([] { ingest_text("race,score\nA,high\n", spec_for()); }, ErrorCode::kDataset);
  expect_code([] { ingest_text("race,score\nA,inf\n", spec_for()); }, ErrorCode::kDataset);
  expect_code([] { ingest_text("race,score\nA\n", spec_for()); }, ErrorCode::kDataset);
  expect_code([] { ingest_text("race,score\n", spec_for()); }, ErrorCode::kDataset);
  expect_code([] { ingest_text("", spec_for()); }, ErrorCode::kDataset);
  auto file = spec_for();
  file.path = "/nonexistent/fedaudit/input.csv";
  expect_code([&] { ingest(file); }, ErrorCode::kIo);
}

TEST(IngestTest, SiloScores) {
  const auto ds = ingest_text(kCsv, spec_for());
  const Assignment a = {1, 2, 1, 1, 2};
  const auto s1 = ds.silo_scores(a, 1);
  EXPECT_EQ(s1.at("A"), (std::vector<double>{2}));
  EXPECT_EQ(s1.at("B"), (std::vector<double>{3}));
  EXPECT_EQ(s1.at("C, other"), (std::vector<double>{1}));
  EXPECT_EQ(ds.silo_scores(a, 2).count("C, other"), 0u);
}

TEST(AssignmentCsvTest, RoundTrip) {
  const Assignment a = {3, 1, 2, 2};
  std::ostringstream out;
  write_assignment_csv(out, a);
  EXPECT_EQ(out.str(), "row,silo\n0,3\n1,1\n2,2\n3,2\n");
  EXPECT_EQ(read_assignment_csv(out.str(), 4), a);
  // Rows may come in any order.
  EXPECT_EQ(read_assignment_csv("row,silo\n1,1\n0,3\n3,2\n2,2\n", 4), a);
}

TEST(AssignmentCsvTest, Errors) {
  expect_code([] { read_assignment_csv("id,silo\n0,1\n", 1); }, ErrorCode::kDataset);
  expect_code([] { read_assignment_csv("row,silo\n0,1\n", 2); }, ErrorCode::kDataset);
  expect_code([] { read_assignment_csv("row,silo\n0,0\n", 1); }, ErrorCode::kDataset);
  expect_code([] { read_assignment_csv("row,silo\n0,1.5\n", 1); }, ErrorCode::kDataset);
  expect_code([] { read_assignment_csv("row,silo\n0,1\n0,2\n", 2); }, ErrorCode::kDataset);
  expect_code([] { read_assignment_csv("row,silo\n5,1\n", 1); }, ErrorCode::kDataset);
}

TEST(BetaDatasetTest, ShapeAndMeans) {
  const auto ds = make_beta_dataset(20000, 2, 5, 10000, 5, 2, 1);
  EXPECT_EQ(ds.labels, (std::vector<std::string>{"A", "B"}));
  EXPECT_EQ(ds.group_counts(), (std::vector<std::uint64_t>{20000, 10000}));
  const auto g = ds.by_group();
  double ma = 0.0;
  for (double x : g.at("A")) ma += x;
  double mb = 0.0;
  for (double x : g.at("B")) mb += x;
  EXPECT_NEAR(ma / 20000, 2.0 / 7.0, 0.005);
  EXPECT_NEAR(mb / 10000, 5.0 / 7.0, 0.005);
  EXPECT_EQ(make_beta_dataset(10, 2, 5, 10, 5, 2, 1).scores,
            make_beta_dataset(10, 2, 5, 10, 5, 2, 1).scores);
}

TEST(FormatTest, RoundTripsDoubles) {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789}) {
    EXPECT_EQ(std::stod(format_double(x)), x);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

}  // namespace
}  // namespace fedaudit
