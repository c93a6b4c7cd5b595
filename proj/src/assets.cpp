#include "t2m/assets.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace t2m::assets {

std::string load(std::string_view name) {
  if (const char* dir = std::getenv("T2M_ASSET_DIR"); dir && *dir) {
    const std::filesystem::path p = std::filesystem::path(dir) / std::string(name);
    if (std::ifstream in{p, std::ios::binary}) {
      std::ostringstream ss;
      ss << in.rdbuf();
      return ss.str();
    }
  }
  for (std::size_t i = 0; i < detail::kEntryCount; ++i) {
    if (name == detail::kEntries[i].name) return detail::kEntries[i].content;
  }
  throw std::out_of_range("unknown asset " + std::string(name));
}

std::vector<std::string> names() {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < detail::kEntryCount; ++i) out.emplace_back(detail::kEntries[i].name);
  return out;
}

}  // namespace t2m::assets
