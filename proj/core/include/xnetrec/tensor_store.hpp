#pragma once

// Parameter checkpoints.
//
// Text format, version 1:
//
//   xnetrec-tensors 1
//   meta <key> <value>            (zero or more; value runs to end of line)
//   manifest <n>
//   <name> <rows> <cols>          (n lines)
//   tensor <name>
//   <cols values>                 (rows lines, %.17g, space separated)
//   ...                           (one tensor block per manifest entry, same order)
//   end
//
// Values round-trip bit-exactly.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "xnetrec/matrix.hpp"

namespace xnetrec {

struct NamedTensor {
  std::string name;
  Matrix data;
};

class TensorStore {
 public:
  static constexpr int kFormatVersion = 1;

  void set_meta(const std::string& key, const std::string& value) { meta_[key] = value; }
  // Throws DataError if the key is missing.
  const std::string& meta(const std::string& key) const;
  bool has_meta(const std::string& key) const { return meta_.contains(key); }

  void add(std::string name, Matrix data);
  // Throws DataError if absent.
  const Matrix& get(const std::string& name) const;
  // Throws ShapeError unless the stored tensor has the given shape.
  const Matrix& get(const std::string& name, std::size_t rows, std::size_t cols) const;
  bool contains(const std::string& name) const;

  const std::vector<NamedTensor>& tensors() const { return tensors_; }

  void save(const std::filesystem::path& path) const;
  static TensorStore load(const std::filesystem::path& path);

 private:
  std::map<std::string, std::string> meta_;
  std::vector<NamedTensor> tensors_;
};

// Column vector of ids stored as doubles (exact below 2^53).
Matrix ids_to_matrix(const std::vector<std::int64_t>& ids);
std::vector<std::int64_t> matrix_to_ids(const Matrix& m);

}  // namespace xnetrec
