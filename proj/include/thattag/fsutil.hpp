#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace thattag {

std::string read_file(const std::filesystem::path& path);

// Writes through a sibling temp file and renames it into place, so readers
// never observe a truncated file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Regular files in `dir` whose name matches the shell glob `pattern`,
// sorted lexicographically by filename.
std::vector<std::filesystem::path> list_files(const std::filesystem::path& dir,
                                              const std::string& pattern);

}  // namespace thattag
