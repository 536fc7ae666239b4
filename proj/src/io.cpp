#include "nlsq/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

namespace nlsq {

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  return hash;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_text(std::uint64_t seed, std::uint64_t config_hash,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows) {
  std::string out;
  out += "# seed " + std::to_string(seed) + "\n";
  char hash_buf[24];
  std::snprintf(hash_buf, sizeof(hash_buf), "%016llx",
                static_cast<unsigned long long>(config_hash));
  out += std::string("# config ") + hash_buf + "\n";
  for (size_t c = 0; c < columns.size(); ++c) {
    if (c) out += ",";
    out += columns[c];
  }
  out += "\n";
  for (const auto& row : rows) {
    if (row.size() != columns.size())
      throw std::invalid_argument("csv_text: ragged row");
    for (size_t c = 0; c < row.size(); ++c) {
      if (c) out += ",";
      out += format_double(row[c]);
    }
    out += "\n";
  }
  return out;
}

void OutputBundle::add(const std::string& name, std::string content) {
  files_[name] = std::move(content);
}

void OutputBundle::flush(const std::string& directory) const {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(directory, ec);
  if (ec)
    throw std::runtime_error("output: cannot create directory " + directory);
  for (const auto& [name, content] : files_) {
    std::ofstream f(fs::path(directory) / name, std::ios::binary);
    if (!f)
      throw std::runtime_error("output: cannot open " + name);
    f << content;
    if (!f) throw std::runtime_error("output: write failed for " + name);
  }
}

}  // namespace nlsq
