#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace terraindiff {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSoftware = 1;
inline constexpr int kExitNoInput = 66;
inline constexpr int kExitDivergence = 70;

// Entry point of the terraindiff executable.
int run_cli(int argc, const char* const* argv);

// 64-bit FNV-1a of a file's bytes as 16 hex digits.
std::string file_checksum(const std::filesystem::path& path);

// Writes text to path through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& text);

}  // namespace terraindiff
