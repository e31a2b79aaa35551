// PXNET1 model files. Layout (all integers and floats little-endian):
//
//   bytes 0..5   "PXNET1"
//   u32          stage_count
//   u32          kernel_size
//   u32 x S      channels_per_stage
//   f64          learning_rate
//   f64          momentum
//   f64          weight_decay
//   u64          seed
//   u64          parameter_count
//   f64 x N      parameters in PixelNet declaration order

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "textdet/saliency.hpp"

namespace textdet {

namespace {

constexpr char kMagic[] = "PXNET1";
constexpr std::size_t kMagicSize = 6;

class Writer {
 public:
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { put(std::bit_cast<std::uint64_t>(v), 8); }
  void raw(const char* data, std::size_t n) { bytes_.append(data, n); }
  const std::string& bytes() const { return bytes_; }

 private:
  void put(std::uint64_t v, int n) {
    for (int i = 0; i < n; ++i) bytes_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  std::string bytes_;
};

class Reader {
 public:
  Reader(const std::string& bytes, std::string source) : bytes_(bytes), source_(std::move(source)) {}

  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(get(8)); }
  std::string raw(std::size_t n) {
    need(n);
    std::string s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > bytes_.size()) throw Error(ErrorCode::kBadModel, "truncated model file: " + source_);
  }
  std::uint64_t get(int n) {
    need(static_cast<std::size_t>(n));
    std::uint64_t v = 0;
    for (int i = 0; i < n; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    pos_ += static_cast<std::size_t>(n);
    return v;
  }

  const std::string& bytes_;
  std::string source_;
  std::size_t pos_ = 0;
};

}  // namespace

void save_model(const std::filesystem::path& path, const PixelNet& net) {
  const PixelNetConfig& c = net.config();
  Writer w;
  w.raw(kMagic, kMagicSize);
  w.u32(static_cast<std::uint32_t>(c.stage_count));
  w.u32(static_cast<std::uint32_t>(c.kernel_size));
  for (int ch : c.channels_per_stage) w.u32(static_cast<std::uint32_t>(ch));
  w.f64(c.learning_rate);
  w.f64(c.momentum);
  w.f64(c.weight_decay);
  w.u64(c.seed);
  w.u64(net.parameter_count());
  for (double p : net.parameters()) w.f64(p);

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write model: " + path.string());
  out.write(w.bytes().data(), static_cast<std::streamsize>(w.bytes().size()));
  if (!out) throw Error(ErrorCode::kIo, "write failed: " + path.string());
}

PixelNet load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kMissingFile, "missing file: " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Reader r(bytes, path.string());
  if (bytes.size() < kMagicSize || r.raw(kMagicSize) != std::string(kMagic, kMagicSize)) {
    throw Error(ErrorCode::kBadModel, "bad model magic: " + path.string());
  }
  PixelNetConfig c;
  c.stage_count = static_cast<int>(r.u32());
  c.kernel_size = static_cast<int>(r.u32());
  if (c.stage_count < 1 || c.stage_count > 12) throw Error(ErrorCode::kBadModel, "bad stage count: " + path.string());
  c.channels_per_stage.clear();
  for (int s = 0; s < c.stage_count; ++s) c.channels_per_stage.push_back(static_cast<int>(r.u32()));
  c.learning_rate = r.f64();
  c.momentum = r.f64();
  c.weight_decay = r.f64();
  c.seed = r.u64();
  const std::uint64_t count = r.u64();
  if (count > (bytes.size() / 8)) throw Error(ErrorCode::kBadModel, "parameter count exceeds file: " + path.string());
  std::vector<double> params(count);
  for (auto& p : params) p = r.f64();
  if (!r.at_end()) throw Error(ErrorCode::kBadModel, "trailing bytes in model: " + path.string());
  try {
    return PixelNet(std::move(c), std::move(params));
  } catch (const Error& e) {
    throw Error(ErrorCode::kBadModel, std::string("inconsistent model ") + path.string() + ": " + e.what());
  }
}

}  // namespace textdet
