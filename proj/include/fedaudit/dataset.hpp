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

// CSV ingestion of scored individuals and CSV output helpers.

#ifndef FEDAUDIT_DATASET_HPP_
#define FEDAUDIT_DATASET_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fedaudit/audit_central.hpp"
#include "fedaudit/scenario.hpp"

namespace fedaudit {

struct DatasetSpec {
  std::string path;
  std::string score_column;
  std::string group_column;
  std::vector<std::string> groups;  // whitelist; empty keeps every group
  bool jitter = false;              // Z = score - U, U ~ Uniform(0, 1)
  std::uint64_t jitter_seed = 0;
};

// Filtered, ingested rows. Row r of the dataset is the r-th kept CSV row
// (0-based); allocation files refer to these row ids.
struct Dataset {
  std::vector<std::string> labels;         // sorted group labels
  std::vector<std::uint32_t> group_index;  // per row, into labels
  std::vector<double> scores;

  std::size_t size() const { return scores.size(); }
  std::vector<std::uint64_t> group_counts() const;
  std::map<std::string, std::vector<double>> by_group() const;
  GroupedSample grouped() const;
  // Scores of the rows whose assignment equals `silo`, keyed by label.
  std::map<std::string, std::vector<double>> silo_scores(
      const Assignment& assignment, std::uint32_t silo) const;
};

// RFC 4180 style parsing: comma separator, double-quoted fields with ""
// escapes, LF or CRLF line ends.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

// Errors: kIo (unreadable file), kDataset (missing columns, non-numeric
// scores, unknown whitelist labels, no rows left after filtering).
Dataset ingest(const DatasetSpec& spec);
Dataset ingest_text(std::string_view csv_text, const DatasetSpec& spec);

// Two Beta-distributed groups "A" and "B".
Dataset make_beta_dataset(std::size_t n_a, double a_alpha, double a_beta,
                          std::size_t n_b, double b_alpha, double b_beta,
                          std::uint64_t seed);

// Allocation CSV: header "row,silo", one line per dataset row, silo 1-based.
void write_assignment_csv(std::ostream& out, const Assignment& assignment);
// Errors: kDataset (bad header, rows out of order or missing, bad silo).
Assignment read_assignment_csv(std::string_view text, std::size_t rows);

// 17 significant digits, '.' decimal point, locale independent.
std::string format_double(double x);

std::string read_file(const std::string& path);

}  // namespace fedaudit

#endif  // FEDAUDIT_DATASET_HPP_
