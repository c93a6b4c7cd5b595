#pragma once

// Text assets (prompt templates, the grammar) compiled into the library.
// Setting T2M_ASSET_DIR makes lookups read <dir>/<name> first.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace t2m::assets {

namespace detail {
struct Entry {
  const char* name;
  const char* content;
};
extern const Entry kEntries[];
extern const std::size_t kEntryCount;
}  // namespace detail

// Throws std::out_of_range for unknown names.
std::string load(std::string_view name);
std::vector<std::string> names();

}  // namespace t2m::assets
