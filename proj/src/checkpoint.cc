#include "trustsim/checkpoint.h"

#include <bit>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <sstream>

#include <openssl/evp.h>
#include <zlib.h>

namespace trustsim {

namespace {

constexpr char kMagic[4] = {'T', 'S', 'Q', 'N'};

template <typename T>
void PutLe(std::string& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  }
}

template <typename T>
T GetLe(const std::string& in, std::size_t& pos) {
  if (pos + sizeof(T) > in.size()) throw CheckpointFormatError("checkpoint field past end");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(static_cast<unsigned char>(in[pos + i])) << (8 * i);
  }
  pos += sizeof(T);
  return value;
}

std::uint32_t Crc32(const char* data, std::size_t size) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(data), static_cast<uInt>(size));
  return static_cast<std::uint32_t>(crc);
}

std::string ReadAll(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::string EncodeCheckpoint(const QNetwork& net) {
  std::string out(kMagic, sizeof(kMagic));
  out.push_back(static_cast<char>(kCheckpointVersion));
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(net.widths().size()));
  for (int w : net.widths()) PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(w));
  PutLe<std::uint64_t>(out, net.num_params());
  for (double p : net.params()) PutLe<std::uint64_t>(out, std::bit_cast<std::uint64_t>(p));
  PutLe<std::uint32_t>(out, Crc32(out.data(), out.size()));
  return out;
}

QNetwork DecodeCheckpoint(const std::string& bytes) {
  if (bytes.size() < sizeof(kMagic) + 1) {
    throw CheckpointChecksumError("checkpoint truncated");
  }
  if (bytes.compare(0, sizeof(kMagic), kMagic, sizeof(kMagic)) != 0) {
    throw CheckpointFormatError("not a checkpoint file");
  }
  const auto version = static_cast<std::uint8_t>(bytes[sizeof(kMagic)]);
  if (version != kCheckpointVersion) {
    throw CheckpointVersionError("unsupported checkpoint version " +
                                 std::to_string(version));
  }
  if (bytes.size() < sizeof(kMagic) + 1 + 4) {
    throw CheckpointChecksumError("checkpoint truncated");
  }
  const std::size_t body = bytes.size() - 4;
  std::size_t tail = body;
  const auto stored = GetLe<std::uint32_t>(bytes, tail);
  if (stored != Crc32(bytes.data(), body)) {
    throw CheckpointChecksumError("checkpoint checksum mismatch");
  }

  std::size_t pos = sizeof(kMagic) + 1;
  const auto n_widths = GetLe<std::uint32_t>(bytes, pos);
  if (n_widths < 2 || n_widths > 64) throw CheckpointFormatError("bad architecture descriptor");
  std::vector<int> widths;
  for (std::uint32_t i = 0; i < n_widths; ++i) {
    widths.push_back(static_cast<int>(GetLe<std::uint32_t>(bytes, pos)));
  }
  QNetwork net(widths);
  const auto n_params = GetLe<std::uint64_t>(bytes, pos);
  if (n_params != net.num_params()) throw CheckpointFormatError("parameter count mismatch");
  for (double& p : net.params()) p = std::bit_cast<double>(GetLe<std::uint64_t>(bytes, pos));
  if (pos != body) throw CheckpointFormatError("trailing bytes in checkpoint");
  return net;
}

void SaveModel(const QNetwork& net, const std::filesystem::path& path) {
  const std::string bytes = EncodeCheckpoint(net);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw CheckpointError("cannot write " + tmp);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CheckpointError("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

QNetwork LoadModel(const std::filesystem::path& path) {
  return DecodeCheckpoint(ReadAll(path));
}

std::string Digest(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof(buf), "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

std::string FileDigest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  return Digest({std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()});
}

}  // namespace trustsim
