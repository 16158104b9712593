#pragma once

#include <cstdint>
#include <filesystem>

#include "kgz/evolution.hpp"

namespace kgz {

// Binary layout (native little-endian):
//   "KGZCKPT\0"  u32 version  f64 t  f64 alpha  f64 R  u64 N  f64 h1_reference
//   4 x (N-1) f64 sine coefficients (u, u_t, n, n_t)  u32 crc32 of all preceding bytes
//
// Coefficients are stored rather than physical values so a resumed run
// reproduces an uninterrupted one bit for bit.

constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    SpectralState state;
    double h1_reference = 0.0;
};

void save_checkpoint(const std::filesystem::path& file, const SpectralState& s, double h1_reference);

/// Throws std::runtime_error on I/O failure, bad magic, unknown version,
/// truncation or checksum mismatch.
Checkpoint load_checkpoint(const std::filesystem::path& file);

}  // namespace kgz
