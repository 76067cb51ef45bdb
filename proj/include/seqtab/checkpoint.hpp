#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "seqtab/tensor.hpp"

namespace seqtab {

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Binary layout: "SQTB1", then until end of file one record per array:
// u32 name length, name bytes, u32 rank, rank x u32 dims, float32 values.
// All integers and floats are little-endian.
inline constexpr char kCheckpointMagic[] = "SQTB1";

struct CheckpointRecord {
  std::string name;
  Array<float> value;
};

std::string serialize_checkpoint(const std::vector<CheckpointRecord>& records);
std::vector<CheckpointRecord> deserialize_checkpoint(const std::string& bytes);

void write_checkpoint(const std::filesystem::path& path, const std::vector<CheckpointRecord>& records);
// Throws CheckpointError naming the file when it is missing or malformed.
std::vector<CheckpointRecord> read_checkpoint(const std::filesystem::path& path);

}  // namespace seqtab
