#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace feedflow::io {

/// Formats a double with 12 significant digits ("%.12g"); all CSV output
/// goes through this so reruns are byte-identical.
std::string fmt(double v);

std::string read_file(const std::filesystem::path& path);

/// Write-then-rename so partially written files are never observed.
void atomic_write(const std::filesystem::path& path, const std::string& content);

/// FNV-1a over the file bytes, hex string. Used in run manifests.
std::string fnv1a_hex(const std::filesystem::path& path);

std::vector<std::string> split(const std::string& line, char sep);

}  // namespace feedflow::io
