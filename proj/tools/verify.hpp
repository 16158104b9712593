#pragma once

#include <filesystem>
#include <optional>

namespace kgz::tools {

/// Prints one PASS/FAIL line per invariant; true when all pass.
bool verify(bool quick, const std::optional<std::filesystem::path>& cache_dir);

}  // namespace kgz::tools
