#pragma once

// Intensity mapping tables and their CSV / JSON file formats.

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "imfkit/error.hpp"
#include "imfkit/image.hpp"

namespace imfkit {

/// Λ(z) for one channel. Entries are real-valued; an entry is absent until it
/// is estimated or filled in by completion.
class ImfTable {
 public:
  ImfTable() { present_.fill(false); values_.fill(0.0); }

  static ImfTable identity() {
    ImfTable t;
    for (int z = 0; z < kLevels; ++z) t.set(z, z);
    return t;
  }

  bool present(int z) const { return present_[z]; }
  double value(int z) const { return values_[z]; }
  std::optional<double> get(int z) const {
    return present_[z] ? std::optional<double>(values_[z]) : std::nullopt;
  }

  void set(int z, double v) {
    values_[z] = v;
    present_[z] = true;
  }
  void erase(int z) {
    values_[z] = 0.0;
    present_[z] = false;
  }

  int count_present() const {
    int n = 0;
    for (bool p : present_) n += p;
    return n;
  }
  bool is_total() const { return count_present() == kLevels; }

  std::vector<int> present_levels() const {
    std::vector<int> out;
    for (int z = 0; z < kLevels; ++z)
      if (present_[z]) out.push_back(z);
    return out;
  }

  friend bool operator==(const ImfTable&, const ImfTable&) = default;

 private:
  std::array<double, kLevels> values_;
  std::array<bool, kLevels> present_;
};

/// One table per image channel, in channel order.
using ChannelTables = std::vector<ImfTable>;

inline ChannelTables identity_tables(int channels) {
  return ChannelTables(channels, ImfTable::identity());
}

namespace detail {

inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace detail

inline std::string table_to_csv(const ImfTable& t) {
  std::string out = "z,value,present\n";
  for (int z = 0; z < kLevels; ++z) {
    out += std::to_string(z) + ',';
    if (t.present(z)) out += detail::format_real(t.value(z));
    out += t.present(z) ? ",1\n" : ",0\n";
  }
  return out;
}

inline ImfTable table_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("z,value,present", 0) != 0)
    throw InvalidArgument("table csv: missing header 'z,value,present'");
  ImfTable t;
  std::array<bool, kLevels> seen{};
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos)
      throw InvalidArgument("table csv line " + std::to_string(line_no) +
                            ": expected 3 fields");
    try {
      const int z = std::stoi(line.substr(0, c1));
      const std::string value = line.substr(c1 + 1, c2 - c1 - 1);
      const std::string flag = line.substr(c2 + 1);
      if (z < 0 || z > kMaxLevel || seen[z])
        throw InvalidArgument("bad or repeated level");
      seen[z] = true;
      if (flag == "1") {
        t.set(z, std::stod(value));
      } else if (flag != "0") {
        throw InvalidArgument("present flag must be 0 or 1");
      }
    } catch (const std::exception& e) {
      throw InvalidArgument("table csv line " + std::to_string(line_no) + ": " +
                            e.what());
    }
  }
  return t;
}

inline nlohmann::json tables_to_json(const ChannelTables& tables) {
  nlohmann::json channels = nlohmann::json::array();
  for (const auto& t : tables) {
    nlohmann::json values = nlohmann::json::array();
    for (int z = 0; z < kLevels; ++z)
      values.push_back(t.present(z) ? nlohmann::json(t.value(z)) : nlohmann::json());
    channels.push_back(std::move(values));
  }
  return {{"levels", kLevels}, {"channels", std::move(channels)}};
}

inline ChannelTables tables_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("channels") || !j["channels"].is_array())
    throw InvalidArgument("table json: missing 'channels' array");
  if (j.value("levels", kLevels) != kLevels)
    throw InvalidArgument("table json: only 256 levels are supported");
  ChannelTables out;
  for (const auto& values : j["channels"]) {
    if (!values.is_array() || values.size() != kLevels)
      throw InvalidArgument("table json: each channel needs 256 entries");
    ImfTable t;
    for (int z = 0; z < kLevels; ++z) {
      if (values[z].is_null()) continue;
      if (!values[z].is_number())
        throw InvalidArgument("table json: entries are numbers or null");
      t.set(z, values[z].get<double>());
    }
    out.push_back(t);
  }
  return out;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void save_table_csv(const ImfTable& t, const std::filesystem::path& path) {
  write_text(path, table_to_csv(t));
}

inline ImfTable load_table_csv(const std::filesystem::path& path) {
  return table_from_csv(read_text(path));
}

inline void save_tables_json(const ChannelTables& t, const std::filesystem::path& path) {
  write_text(path, tables_to_json(t).dump(1) + "\n");
}

inline ChannelTables load_tables_json(const std::filesystem::path& path) {
  try {
    return tables_from_json(nlohmann::json::parse(read_text(path)));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("table json " + path.string() + ": " + e.what());
  }
}

}  // namespace imfkit
