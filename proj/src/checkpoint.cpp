#include "gatenet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "gatenet/netlist_io.hpp"

namespace gatenet {
namespace {

constexpr char kMagic[4] = {'G', 'A', 'T', 'N'};
constexpr uint32_t kVersion = 1;

void put_u32(std::string& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((char)((v >> (8 * i)) & 0xff));
}

void put_f64(std::string& out, double d) {
  uint64_t bits = std::bit_cast<uint64_t>(d);
  for (int i = 0; i < 8; ++i) out.push_back((char)((bits >> (8 * i)) & 0xff));
}

void put_block(std::string& out, const Matrix& m) {
  put_u32(out, (uint32_t)m.rows());
  put_u32(out, (uint32_t)m.cols());
  for (size_t i = 0; i < m.size(); ++i) put_f64(out, m.data()[i]);
}

class Reader {
 public:
  Reader(const char* p, size_t n, const std::filesystem::path& path)
      : p_(p), n_(n), path_(path) {}

  uint32_t u32() {
    need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= (uint32_t)(uint8_t)p_[pos_ + i] << (8 * i);
    pos_ += 4;
    return v;
  }

  double f64() {
    need(8);
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
      bits |= (uint64_t)(uint8_t)p_[pos_ + i] << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(bits);
  }

  std::string bytes(size_t n) {
    need(n);
    std::string s(p_ + pos_, n);
    pos_ += n;
    return s;
  }

  Matrix block() {
    uint32_t r = u32();
    uint32_t c = u32();
    if (r > 1u << 20 || c > 1u << 20)
      throw IoError(path_.string() + ": implausible block shape");
    Matrix m((int)r, (int)c);
    for (size_t i = 0; i < m.size(); ++i) m.data()[i] = f64();
    return m;
  }

  bool exhausted() const { return pos_ == n_; }

 private:
  void need(size_t n) {
    if (pos_ + n > n_) throw IoError(path_.string() + ": truncated checkpoint");
  }

  const char* p_;
  size_t n_;
  size_t pos_ = 0;
  std::filesystem::path path_;
};

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::string out;
  out.append(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, (uint32_t)ckpt.config_json.size());
  out += ckpt.config_json;
  put_u32(out, ckpt.has_fcn ? 10u : 4u);
  put_block(out, ckpt.encoder.theta1);
  put_block(out, ckpt.encoder.theta2);
  put_block(out, ckpt.encoder.theta3);
  put_block(out, ckpt.encoder.proj);
  if (ckpt.has_fcn) {
    put_block(out, ckpt.fcn.w1);
    put_block(out, ckpt.fcn.b1);
    put_block(out, ckpt.fcn.w2);
    put_block(out, ckpt.fcn.b2);
    put_block(out, ckpt.fcn.w3);
    put_block(out, ckpt.fcn.b3);
  }
  write_file_atomic(path, out);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string raw((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  Reader r(raw.data(), raw.size(), path);
  if (r.bytes(4) != std::string(kMagic, 4))
    throw IoError(path.string() + ": not a checkpoint file");
  if (uint32_t v = r.u32(); v != kVersion)
    throw IoError(path.string() + ": unsupported checkpoint version " +
                  std::to_string(v));
  Checkpoint ckpt;
  ckpt.config_json = r.bytes(r.u32());
  uint32_t n_blocks = r.u32();
  if (n_blocks != 4 && n_blocks != 10)
    throw IoError(path.string() + ": unexpected block count " +
                  std::to_string(n_blocks));
  ckpt.encoder.theta1 = r.block();
  ckpt.encoder.theta2 = r.block();
  ckpt.encoder.theta3 = r.block();
  ckpt.encoder.proj = r.block();
  ckpt.has_fcn = n_blocks == 10;
  if (ckpt.has_fcn) {
    ckpt.fcn.w1 = r.block();
    ckpt.fcn.b1 = r.block();
    ckpt.fcn.w2 = r.block();
    ckpt.fcn.b2 = r.block();
    ckpt.fcn.w3 = r.block();
    ckpt.fcn.b3 = r.block();
  }
  if (!r.exhausted()) throw IoError(path.string() + ": trailing bytes");
  return ckpt;
}

}  // namespace gatenet
