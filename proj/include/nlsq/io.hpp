#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace nlsq {

std::uint64_t fnv1a(const std::string& text);

// every export begins with '#' manifest lines carrying the seed and the
// config hash; no timestamps, so identical runs are byte-identical
std::string csv_text(std::uint64_t seed, std::uint64_t config_hash,
                     const std::vector<std::string>& columns,
                     const std::vector<std::vector<double>>& rows);

// outputs staged in memory and flushed together, so a failing run leaves
// no partial files behind
class OutputBundle {
 public:
  void add(const std::string& name, std::string content);
  void flush(const std::string& directory) const;

 private:
  std::map<std::string, std::string> files_;
};

std::string format_double(double v);

}  // namespace nlsq
