#pragma once

// Binary checkpoint layout (all integers little-endian):
//   "TSQN"                      4-byte magic
//   u8   format version         (kCheckpointVersion)
//   u32  number of layer widths, then u32 per width
//   u64  parameter count, then f64 per parameter
//   u32  CRC-32 of every preceding byte

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "trustsim/qnetwork.h"

namespace trustsim {

inline constexpr std::uint8_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CheckpointChecksumError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class CheckpointVersionError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

class CheckpointFormatError : public CheckpointError {
 public:
  using CheckpointError::CheckpointError;
};

std::string EncodeCheckpoint(const QNetwork& net);
QNetwork DecodeCheckpoint(const std::string& bytes);

void SaveModel(const QNetwork& net, const std::filesystem::path& path);
QNetwork LoadModel(const std::filesystem::path& path);

// Hex SHA-256 of a file's bytes or of a string. A checkpoint ends with its
// own CRC-32, so a CRC of the whole file would be a constant.
std::string FileDigest(const std::filesystem::path& path);
std::string Digest(const std::string& bytes);

}  // namespace trustsim
