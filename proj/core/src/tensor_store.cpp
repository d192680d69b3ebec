#include "xnetrec/tensor_store.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "xnetrec/errors.hpp"
#include "xnetrec/io.hpp"

namespace xnetrec {

const std::string& TensorStore::meta(const std::string& key) const {
  const auto it = meta_.find(key);
  if (it == meta_.end()) throw DataError("checkpoint has no '" + key + "' entry");
  return it->second;
}

void TensorStore::add(std::string name, Matrix data) {
  if (name.empty() || name.find_first_of(" \t\n") != std::string::npos) {
    throw ConfigError("tensor names must be non-empty and free of whitespace: '" + name + "'");
  }
  if (contains(name)) throw ConfigError("duplicate tensor '" + name + "'");
  tensors_.push_back({std::move(name), std::move(data)});
}

bool TensorStore::contains(const std::string& name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return true;
  }
  return false;
}

const Matrix& TensorStore::get(const std::string& name) const {
  for (const auto& t : tensors_) {
    if (t.name == name) return t.data;
  }
  throw DataError("checkpoint has no tensor '" + name + "'");
}

const Matrix& TensorStore::get(const std::string& name, std::size_t rows, std::size_t cols) const {
  const auto& m = get(name);
  if (m.rows != rows || m.cols != cols) {
    throw ShapeError("tensor '" + name + "' is " + std::to_string(m.rows) + "x" + std::to_string(m.cols) +
                     ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
  }
  return m;
}

void TensorStore::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "xnetrec-tensors " << kFormatVersion << '\n';
  for (const auto& [k, v] : meta_) out << "meta " << k << ' ' << v << '\n';
  out << "manifest " << tensors_.size() << '\n';
  for (const auto& t : tensors_) out << t.name << ' ' << t.data.rows << ' ' << t.data.cols << '\n';
  for (const auto& t : tensors_) {
    out << "tensor " << t.name << '\n';
    for (std::size_t r = 0; r < t.data.rows; ++r) {
      for (std::size_t c = 0; c < t.data.cols; ++c) {
        if (c) out << ' ';
        out << io::format_real(t.data(r, c));
      }
      out << '\n';
    }
  }
  out << "end\n";
}

TensorStore TensorStore::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open checkpoint '" + path.string() + "'");
  const auto bad = [&](const std::string& why) { return DataError(path.string() + ": " + why); };

  std::string line;
  if (!std::getline(in, line) || line != "xnetrec-tensors " + std::to_string(kFormatVersion)) {
    throw bad("not a version " + std::to_string(kFormatVersion) + " tensor file");
  }
  TensorStore store;
  std::vector<std::tuple<std::string, std::size_t, std::size_t>> manifest;
  while (std::getline(in, line)) {
    if (line.starts_with("meta ")) {
      const auto sp = line.find(' ', 5);
      if (sp == std::string::npos) {
        store.meta_[line.substr(5)] = "";
      } else {
        store.meta_[line.substr(5, sp - 5)] = line.substr(sp + 1);
      }
      continue;
    }
    if (line.starts_with("manifest ")) {
      const std::size_t n = std::stoul(line.substr(9));
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::getline(in, line)) throw bad("truncated manifest");
        std::istringstream s(line);
        std::string name;
        std::size_t rows = 0;
        std::size_t cols = 0;
        if (!(s >> name >> rows >> cols)) throw bad("bad manifest line '" + line + "'");
        manifest.emplace_back(name, rows, cols);
      }
      break;
    }
    throw bad("unexpected line '" + line + "'");
  }
  for (const auto& [name, rows, cols] : manifest) {
    if (!std::getline(in, line) || line != "tensor " + name) throw bad("expected tensor block '" + name + "'");
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
      if (!std::getline(in, line)) throw bad("truncated tensor '" + name + "'");
      std::istringstream s(line);
      for (std::size_t c = 0; c < cols; ++c) {
        std::string tok;
        if (!(s >> tok)) throw bad("short row in tensor '" + name + "'");
        char* end = nullptr;
        m(r, c) = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size()) throw bad("bad value '" + tok + "' in tensor '" + name + "'");
      }
    }
    store.add(name, std::move(m));
  }
  if (!std::getline(in, line) || line != "end") throw bad("missing end marker");
  return store;
}

Matrix ids_to_matrix(const std::vector<std::int64_t>& ids) {
  Matrix m(ids.size(), 1);
  for (std::size_t i = 0; i < ids.size(); ++i) m(i, 0) = static_cast<double>(ids[i]);
  return m;
}

std::vector<std::int64_t> matrix_to_ids(const Matrix& m) {
  std::vector<std::int64_t> ids(m.rows);
  for (std::size_t i = 0; i < m.rows; ++i) ids[i] = static_cast<std::int64_t>(m(i, 0));
  return ids;
}

}  // namespace xnetrec
