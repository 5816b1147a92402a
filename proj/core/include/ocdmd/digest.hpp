#pragma once

#include <filesystem>
#include <string>

namespace ocdmd {

// Lower-case hex SHA-256 of a file's bytes. Throws IoError if unreadable.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace ocdmd
