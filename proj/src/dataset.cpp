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

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>

#include "fedaudit/error.hpp"
#include "fedaudit/random.hpp"

namespace fedaudit {
namespace {

[[noreturn]] void bad_data(const std::string& why) {
  throw Error(ErrorCode::kDataset, why);
}

bool parse_number(std::string_view text, double& out) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

std::size_t column_of(const std::vector<std::string>& header, const std::string& name) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) bad_data("column '" + name + "' not found");
  return static_cast<std::size_t>(it - header.begin());
}

}  // namespace

std::vector<std::uint64_t> Dataset::group_counts() const {
  std::vector<std::uint64_t> counts(labels.size(), 0);
  for (auto g : group_index) ++counts[g];
  return counts;
}

std::map<std::string, std::vector<double>> Dataset::by_group() const {
  std::map<std::string, std::vector<double>> out;
  for (const auto& label : labels) out[label];
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[labels[group_index[i]]].push_back(scores[i]);
  }
  return out;
}

GroupedSample Dataset::grouped() const { return GroupedSample(by_group()); }

std::map<std::string, std::vector<double>> Dataset::silo_scores(
    const Assignment& assignment, std::uint32_t silo) const {
  std::map<std::string, std::vector<double>> out;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (assignment[i] == silo) out[labels[group_index[i]]].push_back(scores[i]);
  }
  return out;
}

std::vector<std::vector<std::string>> parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      row.push_back(std::move(field));
      field.clear();
      field_started = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (field_started || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      field_started = false;
    } else {
      field.push_back(c);
      field_started = true;
    }
  }
  if (in_quotes) bad_data("unterminated quoted field");
  if (field_started || !field.empty() || !row.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Dataset ingest(const DatasetSpec& spec) {
  return ingest_text(read_file(spec.path), spec);
}

Dataset ingest_text(std::string_view csv_text, const DatasetSpec& spec) {
  const auto rows = parse_csv(csv_text);
  if (rows.empty()) bad_data("empty CSV");
  const auto& header = rows.front();
  const std::size_t score_col = column_of(header, spec.score_column);
  const std::size_t group_col = column_of(header, spec.group_column);

  const std::set<std::string> whitelist(spec.groups.begin(), spec.groups.end());
  std::vector<std::pair<std::string, double>> kept;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() <= std::max(score_col, group_col)) {
      bad_data("row " + std::to_string(r) + " has too few fields");
    }
    const std::string& label = row[group_col];
    if (!whitelist.empty() && !whitelist.count(label)) continue;
    double score = 0.0;
    if (!parse_number(row[score_col], score)) {
      bad_data("non-numeric score '" + row[score_col] + "' in row " + std::to_string(r));
    }
    kept.emplace_back(label, score);
  }
  if (kept.empty()) bad_data("no rows left after filtering");

  Dataset out;
  std::set<std::string> present;
  for (const auto& [label, score] : kept) present.insert(label);
  for (const auto& label : whitelist) {
    if (!present.count(label)) bad_data("group '" + label + "' not present in data");
  }
  out.labels.assign(present.begin(), present.end());
  CounterRng jitter(derive_seed(spec.jitter_seed, "jitter"));
  for (const auto& [label, score] : kept) {
    const auto it = std::lower_bound(out.labels.begin(), out.labels.end(), label);
    out.group_index.push_back(static_cast<std::uint32_t>(it - out.labels.begin()));
    out.scores.push_back(spec.jitter ? score - jitter.uniform_open() : score);
  }
  return out;
}

Dataset make_beta_dataset(std::size_t n_a, double a_alpha, double a_beta,
                          std::size_t n_b, double b_alpha, double b_beta,
                          std::uint64_t seed) {
  Dataset out;
  out.labels = {"A", "B"};
  const auto a = sample_beta(a_alpha, a_beta, n_a, derive_seed(seed, "group-a"));
  const auto b = sample_beta(b_alpha, b_beta, n_b, derive_seed(seed, "group-b"));
  out.scores.insert(out.scores.end(), a.begin(), a.end());
  out.scores.insert(out.scores.end(), b.begin(), b.end());
  out.group_index.assign(n_a, 0);
  out.group_index.insert(out.group_index.end(), n_b, 1);
  return out;
}

void write_assignment_csv(std::ostream& out, const Assignment& assignment) {
  out << "row,silo\n";
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    out << i << ',' << assignment[i] << '\n';
  }
}

Assignment read_assignment_csv(std::string_view text, std::size_t rows) {
  const auto table = parse_csv(text);
  if (table.empty() || table.front().size() < 2 || table.front()[0] != "row" ||
      table.front()[1] != "silo") {
    bad_data("allocation file must start with header 'row,silo'");
  }
  if (table.size() - 1 != rows) {
    bad_data("allocation has " + std::to_string(table.size() - 1) +
             " rows, dataset has " + std::to_string(rows));
  }
  Assignment out(rows, 0);
  std::vector<bool> seen(rows, false);
  for (std::size_t r = 1; r < table.size(); ++r) {
    double row_id = 0;
    double silo = 0;
    if (table[r].size() < 2 || !parse_number(table[r][0], row_id) ||
        !parse_number(table[r][1], silo) || row_id < 0 || silo < 1 ||
        row_id != std::floor(row_id) || silo != std::floor(silo) ||
        row_id >= static_cast<double>(rows)) {
      bad_data("bad allocation line " + std::to_string(r));
    }
    const auto idx = static_cast<std::size_t>(row_id);
    if (seen[idx]) bad_data("row " + std::to_string(idx) + " allocated twice");
    seen[idx] = true;
    out[idx] = static_cast<std::uint32_t>(silo);
  }
  return out;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto [ptr, ec] =
      std::to_chars(buf, buf + sizeof(buf), x, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

}  // namespace fedaudit
