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

#include "fedaudit/wire.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <string_view>

#include "fedaudit/error.hpp"

namespace fedaudit {
namespace {

class Writer {
 public:
  template <typename T>
  void put(T value) {
    auto bits = static_cast<std::uint64_t>(value);
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      out_.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
    }
  }
  void put_f64(double value) { put(std::bit_cast<std::uint64_t>(value)); }
  void put_string(const std::string& s) {
    put(static_cast<std::uint16_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  void put_raw(std::string_view s) { out_.insert(out_.end(), s.begin(), s.end()); }

  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

[[noreturn]] void malformed(const std::string& why) {
  throw Error(ErrorCode::kMalformedMessage, why);
}

bool valid_utf8(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t extra = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c & 0xE0) == 0xC0) {
      extra = 1;
      cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
      extra = 2;
      cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
      extra = 3;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + extra >= s.size()) return false;
    for (std::size_t k = 1; k <= extra; ++k) {
      const auto cc = static_cast<unsigned char>(s[i + k]);
      if ((cc & 0xC0) != 0x80) return false;
      cp = (cp << 6) | (cc & 0x3F);
    }
    // Overlong forms, surrogates, out of range.
    if ((extra == 1 && cp < 0x80) || (extra == 2 && cp < 0x800) ||
        (extra == 3 && cp < 0x10000) || cp > 0x10FFFF ||
        (cp >= 0xD800 && cp <= 0xDFFF)) {
      return false;
    }
    i += extra + 1;
  }
  return true;
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bits |= static_cast<std::uint64_t>(bytes_[pos_ + i]) << (8 * i);
    }
    pos_ += sizeof(T);
    return static_cast<T>(bits);
  }
  double get_f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
  std::string get_string() {
    const auto len = get<std::uint16_t>();
    need(len);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), len);
    pos_ += len;
    if (!valid_utf8(s)) malformed("string field is not valid UTF-8");
    return s;
  }
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) malformed("message truncated");
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

nlohmann::json quantiles_json(const QuantileArray& q) {
  return nlohmann::json(std::vector<double>(q.values().begin(), q.values().end()));
}

}  // namespace

std::vector<std::uint8_t> encode_message(const SiloMessage& msg) {
  if (msg.grid().k() > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kInvalidArgument, "k does not fit the wire format");
  }
  if (!valid_utf8(msg.silo_id())) {
    throw Error(ErrorCode::kInvalidArgument, "silo id is not valid UTF-8");
  }
  for (const auto& entry : msg.entries()) {
    if (!valid_utf8(entry.label)) {
      throw Error(ErrorCode::kInvalidArgument, "group label is not valid UTF-8");
    }
  }
  Writer w;
  w.put_raw(std::string_view(kWireMagic, 3));
  w.put(static_cast<std::uint8_t>(kWireVersion));
  w.put_string(msg.silo_id());
  w.put(static_cast<std::uint32_t>(msg.grid().k()));
  w.put_f64(msg.grid().trim_epsilon());
  w.put(static_cast<std::uint16_t>(msg.entries().size()));
  for (const auto& entry : msg.entries()) {
    w.put_string(entry.label);
    w.put(static_cast<std::uint64_t>(entry.sketch.count()));
    for (double v : entry.sketch.values()) w.put_f64(v);
  }
  return w.take();
}

SiloMessage decode_message(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.need(4);
  if (std::memcmp(bytes.data(), kWireMagic, 3) != 0) malformed("bad magic");
  if (bytes[3] != static_cast<std::uint8_t>(kWireVersion)) {
    throw Error(ErrorCode::kUnsupportedVersion,
                "wire version byte " + std::to_string(bytes[3]));
  }
  r.get<std::uint32_t>();

  std::string silo_id = r.get_string();
  const auto k = r.get<std::uint32_t>();
  const double eps = r.get_f64();
  if (k == 0) malformed("k must be >= 1");
  if (!(eps >= 0.0 && eps < 0.5)) malformed("trim epsilon out of range");
  const GridSpec grid(k, eps);

  const auto group_count = r.get<std::uint16_t>();
  if (group_count == 0) malformed("message without groups");
  std::vector<GroupEntry> entries;
  for (std::uint16_t g = 0; g < group_count; ++g) {
    std::string label = r.get_string();
    const auto count = r.get<std::uint64_t>();
    r.need(static_cast<std::size_t>(k) * 8);
    std::vector<double> values(k);
    for (auto& v : values) v = r.get_f64();
    entries.push_back({std::move(label), QuantileSketch(grid, std::move(values), count)});
  }
  if (r.remaining() != 0) malformed("trailing bytes after message");
  try {
    return SiloMessage(std::move(silo_id), grid, std::move(entries));
  } catch (const Error& e) {
    malformed(e.what());
  }
}

nlohmann::json message_to_json(const SiloMessage& msg) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& entry : msg.entries()) {
    groups.push_back({{"label", entry.label},
                      {"count", entry.sketch.count()},
                      {"values", quantiles_json(entry.sketch.quantiles())}});
  }
  return {{"version", 1},
          {"silo_id", msg.silo_id()},
          {"k", msg.grid().k()},
          {"trim_epsilon", msg.grid().trim_epsilon()},
          {"groups", std::move(groups)}};
}

SiloMessage message_from_json(const nlohmann::json& j) {
  try {
    if (j.at("version").get<int>() != 1) {
      throw Error(ErrorCode::kUnsupportedVersion, "json message version");
    }
    const GridSpec grid(j.at("k").get<std::size_t>(),
                        j.at("trim_epsilon").get<double>());
    std::vector<GroupEntry> entries;
    for (const auto& g : j.at("groups")) {
      entries.push_back({g.at("label").get<std::string>(),
                         QuantileSketch(grid, g.at("values").get<std::vector<double>>(),
                                        g.at("count").get<std::uint64_t>())});
    }
    return SiloMessage(j.at("silo_id").get<std::string>(), grid, std::move(entries));
  } catch (const nlohmann::json::exception& e) {
    malformed(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidSketch ||
        e.code() == ErrorCode::kUnsupportedVersion) {
      throw;
    }
    malformed(e.what());
  }
}

nlohmann::json report_to_json(const AuditReport& report) {
  nlohmann::json out;
  out["p"] = report.p;
  out["g_hat"] = report.g_hat;
  out["h_hat"] = report.h_hat;
  const auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  out["v_mix"] = opt(report.v_mix);
  out["v_bar"] = opt(report.v_bar);
  out["r"] = opt(report.r);
  out["v1_mix"] = opt(report.v1_mix);
  out["v1_bar"] = opt(report.v1_bar);
  out["grid"] = {{"k", report.grid.k()},
                 {"trim_epsilon", report.grid.trim_epsilon()}};
  out["weights"] = {{"alpha", report.weights.alpha},
                    {"pi", report.weights.pi},
                    {"beta", report.weights.beta}};
  nlohmann::json mixtures = nlohmann::json::object();
  for (const auto& [label, q] : report.mixture_quantiles) {
    mixtures[label] = quantiles_json(q);
  }
  nlohmann::json within = nlohmann::json::object();
  for (const auto& [label, q] : report.within_group_barycenters) {
    within[label] = quantiles_json(q);
  }
  out["mixture_quantiles"] = std::move(mixtures);
  out["barycenter_quantiles"] = quantiles_json(report.barycenter_quantiles);
  out["within_group_barycenters"] = std::move(within);
  const auto cells = [](const auto& list) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [silo, group] : list) {
      arr.push_back({{"silo", silo}, {"group", group}});
    }
    return arr;
  };
  out["metadata"] = {{"silo_count", report.metadata.silo_count},
                     {"silo_ids", report.metadata.silo_ids},
                     {"total_count", report.metadata.total_count},
                     {"n_min", report.metadata.n_min},
                     {"degenerate_cells", cells(report.metadata.degenerate_cells)},
                     {"missing_cells", cells(report.metadata.missing_cells)}};
  return out;
}

}  // namespace fedaudit
