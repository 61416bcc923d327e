#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "skyear/error.hpp"
#include "skyear/mae.hpp"

namespace skyear {

namespace {

constexpr std::string_view kMagic = "SKYMAE1";
constexpr std::uint32_t kVersion = 1;

class Writer {
 public:
  void u32(std::uint32_t v) { raw(v, 4); }
  void u64(std::uint64_t v) { raw(v, 8); }
  void i32(int v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void bytes(std::string_view s) { buf.insert(buf.end(), s.begin(), s.end()); }

  std::vector<char> buf;

 private:
  void raw(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
};

class Reader {
 public:
  explicit Reader(std::vector<char> data) : data_(std::move(data)) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(raw(4)); }
  std::uint64_t u64() { return raw(8); }
  int i32() { return static_cast<int>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string bytes(std::size_t n) {
    need(n);
    std::string s(data_.begin() + static_cast<std::ptrdiff_t>(pos_), data_.begin() + static_cast<std::ptrdiff_t>(pos_ + n));
    pos_ += n;
    return s;
  }
  std::size_t position() const { return pos_; }
  bool done() const { return pos_ == data_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > data_.size()) throw Error(ErrorCode::FormatError, "checkpoint truncated");
  }
  std::uint64_t raw(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= std::uint64_t(static_cast<unsigned char>(data_[pos_ + static_cast<std::size_t>(i)])) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  std::vector<char> data_;
  std::size_t pos_ = 0;
};

void write_config(Writer& w, const MaeConfig& c, const MelConfig& m, double threshold) {
  for (int v : {c.patch, c.grid_rows, c.grid_cols, c.embed_dim, c.enc_depth, c.enc_heads, c.dec_dim, c.dec_depth,
                c.dec_heads, c.mlp_ratio}) {
    w.i32(v);
  }
  w.f64(c.mask_ratio);
  w.f64(c.top_k);
  w.f64(m.fs);
  w.i32(m.fft_size);
  w.i32(m.hop);
  w.i32(m.mel_bins);
  w.f64(m.fmin);
  w.f64(m.fmax);
  w.f64(m.log_floor);
  w.i32(m.clip_samples);
  w.f64(threshold);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  Writer config;
  write_config(config, ckpt.params.config, ckpt.mel, ckpt.threshold);

  Writer w;
  w.bytes(kMagic);
  w.u32(kVersion);
  w.u32(static_cast<std::uint32_t>(config.buf.size()));
  w.buf.insert(w.buf.end(), config.buf.begin(), config.buf.end());
  std::uint64_t count = 0;
  ckpt.params.visit([&](const std::string&, const Eigen::MatrixXd&) { ++count; });
  w.u64(count);
  ckpt.params.visit([&](const std::string& name, const Eigen::MatrixXd& t) {
    w.u32(static_cast<std::uint32_t>(name.size()));
    w.bytes(name);
    w.u64(static_cast<std::uint64_t>(t.rows()));
    w.u64(static_cast<std::uint64_t>(t.cols()));
    for (Eigen::Index r = 0; r < t.rows(); ++r) {
      for (Eigen::Index c = 0; c < t.cols(); ++c) w.f64(t(r, c));
    }
  });

  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  f.write(w.buf.data(), static_cast<std::streamsize>(w.buf.size()));
  if (!f) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open checkpoint " + path.string());
  Reader r(std::vector<char>((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>()));
  if (r.bytes(kMagic.size()) != kMagic) throw Error(ErrorCode::FormatError, path.string() + " is not a model checkpoint");
  if (const auto version = r.u32(); version != kVersion) {
    throw Error(ErrorCode::FormatError, "unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t config_len = r.u32();
  const std::size_t config_start = r.position();

  Checkpoint ckpt;
  MaeConfig c;
  c.patch = r.i32();
  c.grid_rows = r.i32();
  c.grid_cols = r.i32();
  c.embed_dim = r.i32();
  c.enc_depth = r.i32();
  c.enc_heads = r.i32();
  c.dec_dim = r.i32();
  c.dec_depth = r.i32();
  c.dec_heads = r.i32();
  c.mlp_ratio = r.i32();
  c.mask_ratio = r.f64();
  c.top_k = r.f64();
  ckpt.mel.fs = r.f64();
  ckpt.mel.fft_size = r.i32();
  ckpt.mel.hop = r.i32();
  ckpt.mel.mel_bins = r.i32();
  ckpt.mel.fmin = r.f64();
  ckpt.mel.fmax = r.f64();
  ckpt.mel.log_floor = r.f64();
  ckpt.mel.clip_samples = r.i32();
  ckpt.threshold = r.f64();
  if (r.position() - config_start != config_len) throw Error(ErrorCode::FormatError, "config block size mismatch");

  ckpt.params = MaeParams::zeros(c);
  std::uint64_t expected = 0;
  ckpt.params.visit([&](const std::string&, const Eigen::MatrixXd&) { ++expected; });
  if (r.u64() != expected) throw Error(ErrorCode::FormatError, "unexpected tensor count");
  ckpt.params.visit([&](const std::string& name, Eigen::MatrixXd& t) {
    const std::string stored = r.bytes(r.u32());
    const auto rows = r.u64(), cols = r.u64();
    if (stored != name || rows != static_cast<std::uint64_t>(t.rows()) || cols != static_cast<std::uint64_t>(t.cols())) {
      throw Error(ErrorCode::FormatError, "tensor '" + stored + "' does not match expected '" + name + "'");
    }
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      for (Eigen::Index j = 0; j < t.cols(); ++j) t(i, j) = r.f64();
    }
  });
  if (!r.done()) throw Error(ErrorCode::FormatError, "trailing bytes in checkpoint");
  return ckpt;
}

}  // namespace skyear
