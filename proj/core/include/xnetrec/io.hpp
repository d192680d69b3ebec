#pragma once

// Delimiter-separated text formats shared by the library and the CLI.
//
//   interactions:  user,item,timestamp,network
//   snapshots:     user,network,interval,f1,...,fK   (K fixed per file)
//   users:         user,kind
//   item topics:   item,t1,...,tK
//
// Reals are written with 17 significant digits so files round-trip exactly.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "xnetrec/data.hpp"

namespace xnetrec::io {

void write_interactions(const std::filesystem::path& path, std::span<const Interaction> rows);
std::vector<Interaction> read_interactions(const std::filesystem::path& path);

void write_snapshots(const std::filesystem::path& path, std::span<const TopicalSnapshot> rows);
// Throws DataError if rows disagree on K or carry negative frequencies.
std::vector<TopicalSnapshot> read_snapshots(const std::filesystem::path& path);

void write_user_kinds(const std::filesystem::path& path, const std::map<UserId, UserKind>& kinds);
std::map<UserId, UserKind> read_user_kinds(const std::filesystem::path& path);

void write_item_topics(const std::filesystem::path& path, const std::map<ItemId, std::vector<double>>& topics);
std::map<ItemId, std::vector<double>> read_item_topics(const std::filesystem::path& path);

// Shortest decimal text that parses back to the same double.
std::string format_real(double v);

// Splits one line on `delim`.
std::vector<std::string> split_line(const std::string& line, char delim = ',');

}  // namespace xnetrec::io
