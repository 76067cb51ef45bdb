#include "seqtab/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace seqtab {

namespace {

constexpr size_t kMagicLen = sizeof(kCheckpointMagic) - 1;

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

class Reader {
 public:
  explicit Reader(const std::string& bytes) : bytes_(bytes) {}
  bool done() const { return pos_ == bytes_.size(); }
  uint32_t u32(const char* what) {
    need(4, what);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::string raw(size_t n, const char* what) {
    need(n, what);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

 private:
  void need(size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw CheckpointError(std::string("truncated checkpoint while reading ") + what + " at byte " +
                            std::to_string(pos_));
    }
  }
  const std::string& bytes_;
  size_t pos_ = 0;
};

}  // namespace

std::string serialize_checkpoint(const std::vector<CheckpointRecord>& records) {
  std::string out(kCheckpointMagic, kMagicLen);
  for (const auto& r : records) {
    put_u32(out, static_cast<uint32_t>(r.name.size()));
    out += r.name;
    put_u32(out, static_cast<uint32_t>(r.value.rank()));
    for (int dim : r.value.shape()) put_u32(out, static_cast<uint32_t>(dim));
    for (float f : r.value.values()) put_u32(out, std::bit_cast<uint32_t>(f));
  }
  return out;
}

std::vector<CheckpointRecord> deserialize_checkpoint(const std::string& bytes) {
  if (bytes.size() < kMagicLen || bytes.compare(0, kMagicLen, kCheckpointMagic) != 0) {
    throw CheckpointError("not a checkpoint: missing SQTB1 magic");
  }
  Reader in(bytes);
  in.raw(kMagicLen, "magic");
  std::vector<CheckpointRecord> records;
  while (!in.done()) {
    CheckpointRecord r;
    const uint32_t name_len = in.u32("name length");
    r.name = in.raw(name_len, "name");
    const uint32_t rank = in.u32("rank");
    if (rank > 8) throw CheckpointError("record " + r.name + " has implausible rank " + std::to_string(rank));
    Shape shape;
    for (uint32_t i = 0; i < rank; ++i) shape.push_back(static_cast<int>(in.u32("dimension")));
    std::vector<float> values(shape_size(shape));
    for (auto& v : values) v = std::bit_cast<float>(in.u32("value"));
    r.value = Array<float>(std::move(shape), std::move(values));
    records.push_back(std::move(r));
  }
  return records;
}

void write_checkpoint(const std::filesystem::path& path, const std::vector<CheckpointRecord>& records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write checkpoint " + path.string());
  const std::string bytes = serialize_checkpoint(records);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw CheckpointError("failed writing checkpoint " + path.string());
}

std::vector<CheckpointRecord> read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("checkpoint not found: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return deserialize_checkpoint(ss.str());
  } catch (const CheckpointError& e) {
    throw CheckpointError(path.string() + ": " + e.what());
  }
}

}  // namespace seqtab
