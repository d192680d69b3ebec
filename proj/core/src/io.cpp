#include "xnetrec/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "xnetrec/errors.hpp"

namespace xnetrec::io {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

// Reads all non-empty lines after the header; returns header fields.
std::vector<std::string> read_table(const std::filesystem::path& path,
                                    std::vector<std::vector<std::string>>& rows) {
  auto in = open_in(path);
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  auto header = split_line(line);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split_line(line));
  }
  return header;
}

DataError row_error(const std::filesystem::path& path, std::size_t row, const std::string& why) {
  // +2: one for the header, one for 1-based numbering.
  return DataError(path.string() + ":" + std::to_string(row + 2) + ": " + why);
}

template <typename T>
T parse_int(const std::string& s, const std::filesystem::path& path, std::size_t row) {
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw row_error(path, row, "bad integer '" + s + "'");
  return v;
}

double parse_real(const std::string& s, const std::filesystem::path& path, std::size_t row) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v)) throw row_error(path, row, "bad number '" + s + "'");
  return v;
}

}  // namespace

std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream s(line);
  while (std::getline(s, field, delim)) out.push_back(field);
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

void write_interactions(const std::filesystem::path& path, std::span<const Interaction> rows) {
  auto out = open_out(path);
  out << "user,item,timestamp,network\n";
  for (const auto& r : rows) {
    out << r.user << ',' << r.item << ',' << r.timestamp << ',' << to_string(r.network) << '\n';
  }
}

std::vector<Interaction> read_interactions(const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> rows;
  const auto header = read_table(path, rows);
  if (header != std::vector<std::string>{"user", "item", "timestamp", "network"}) {
    throw DataError(path.string() + ": expected header user,item,timestamp,network");
  }
  std::vector<Interaction> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != 4) throw row_error(path, i, "expected 4 fields");
    Interaction r;
    r.user = parse_int<UserId>(f[0], path, i);
    r.item = parse_int<ItemId>(f[1], path, i);
    r.timestamp = parse_int<Timestamp>(f[2], path, i);
    if (r.timestamp < 0) throw row_error(path, i, "negative timestamp");
    try {
      r.network = network_from_string(f[3]);
    } catch (const DataError& e) {
      throw row_error(path, i, e.what());
    }
    out.push_back(r);
  }
  return out;
}

void write_snapshots(const std::filesystem::path& path, std::span<const TopicalSnapshot> rows) {
  const std::size_t k = rows.empty() ? 0 : rows.front().frequencies.size();
  auto out = open_out(path);
  out << "user,network,interval";
  for (std::size_t c = 1; c <= k; ++c) out << ",f" << c;
  out << '\n';
  for (const auto& r : rows) {
    if (r.frequencies.size() != k) throw ShapeError("snapshot rows disagree on topic count");
    out << r.user << ',' << to_string(r.network) << ',' << r.interval;
    for (double f : r.frequencies) out << ',' << format_real(f);
    out << '\n';
  }
}

std::vector<TopicalSnapshot> read_snapshots(const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> rows;
  const auto header = read_table(path, rows);
  if (header.size() < 4 || header[0] != "user" || header[1] != "network" || header[2] != "interval") {
    throw DataError(path.string() + ": expected header user,network,interval,f1..fK");
  }
  const std::size_t k = header.size() - 3;
  std::vector<TopicalSnapshot> out;
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& f = rows[i];
    if (f.size() != k + 3) throw row_error(path, i, "expected " + std::to_string(k + 3) + " fields");
    TopicalSnapshot s;
    s.user = parse_int<UserId>(f[0], path, i);
    try {
      s.network = network_from_string(f[1]);
    } catch (const DataError& e) {
      throw row_error(path, i, e.what());
    }
    s.interval = parse_int<int>(f[2], path, i);
    if (s.interval < 1) throw row_error(path, i, "interval must be >= 1");
    s.frequencies.reserve(k);
    for (std::size_t c = 0; c < k; ++c) {
      const double v = parse_real(f[c + 3], path, i);
      if (v < 0.0) throw row_error(path, i, "negative topical frequency");
      s.frequencies.push_back(v);
    }
    out.push_back(std::move(s));
  }
  return out;
}

void write_user_kinds(const std::filesystem::path& path, const std::map<UserId, UserKind>& kinds) {
  auto out = open_out(path);
  out << "user,kind\n";
  for (const auto& [u, k] : kinds) out << u << ',' << to_string(k) << '\n';
}

std::map<UserId, UserKind> read_user_kinds(const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> rows;
  const auto header = read_table(path, rows);
  if (header != std::vector<std::string>{"user", "kind"}) throw DataError(path.string() + ": expected header user,kind");
  std::map<UserId, UserKind> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 2) throw row_error(path, i, "expected 2 fields");
    try {
      out[parse_int<UserId>(rows[i][0], path, i)] = user_kind_from_string(rows[i][1]);
    } catch (const DataError& e) {
      throw row_error(path, i, e.what());
    }
  }
  return out;
}

void write_item_topics(const std::filesystem::path& path, const std::map<ItemId, std::vector<double>>& topics) {
  const std::size_t k = topics.empty() ? 0 : topics.begin()->second.size();
  auto out = open_out(path);
  out << "item";
  for (std::size_t c = 1; c <= k; ++c) out << ",t" << c;
  out << '\n';
  for (const auto& [item, v] : topics) {
    if (v.size() != k) throw ShapeError("item topic rows disagree on topic count");
    out << item;
    for (double x : v) out << ',' << format_real(x);
    out << '\n';
  }
}

std::map<ItemId, std::vector<double>> read_item_topics(const std::filesystem::path& path) {
  std::vector<std::vector<std::string>> rows;
  const auto header = read_table(path, rows);
  if (header.size() < 2 || header[0] != "item") throw DataError(path.string() + ": expected header item,t1..tK");
  const std::size_t k = header.size() - 1;
  std::map<ItemId, std::vector<double>> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != k + 1) throw row_error(path, i, "expected " + std::to_string(k + 1) + " fields");
    std::vector<double> v;
    v.reserve(k);
    for (std::size_t c = 0; c < k; ++c) v.push_back(parse_real(rows[i][c + 1], path, i));
    out[parse_int<ItemId>(rows[i][0], path, i)] = std::move(v);
  }
  return out;
}

}  // namespace xnetrec::io
