#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace ragds::fs {

/// Reads a whole file; throws IoFailure when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temp file and renames it over `path`, so readers
/// either see the old content or the complete new content.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace ragds::fs
