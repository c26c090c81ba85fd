#include "coauthornet/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <iterator>

#include "coauthornet/errors.hpp"
#include "coauthornet/random.hpp"

namespace coauthornet {

namespace {

constexpr char kMagic[8] = {'C', 'A', 'N', 'C', 'K', 'P', 'T', '\0'};

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* c = static_cast<const char*>(p);
    buf_.insert(buf_.end(), c, c + n);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f64(double d) {
    std::uint64_t v;
    std::memcpy(&v, &d, sizeof v);
    u64(v);
  }
  const std::string& data() const { return buf_; }

 private:
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  std::size_t offset() const { return pos_; }
  std::size_t size() const { return data_.size(); }
  const std::string& data() const { return data_; }

  void need(std::size_t n, const char* what) {
    if (pos_ + n > end_) {
      throw FormatError("checkpoint truncated at offset " + std::to_string(pos_) + " reading " + what);
    }
  }
  void limit(std::size_t end) { end_ = end; }
  std::string bytes(std::size_t n, const char* what) {
    need(n, what);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  std::uint64_t u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return v;
  }
  double f64(const char* what) {
    const std::uint64_t v = u64(what);
    double d;
    std::memcpy(&d, &v, sizeof d);
    return d;
  }

 private:
  std::string data_;
  std::size_t pos_ = 0;
  std::size_t end_ = std::string::npos;
};

[[noreturn]] void bad(std::size_t offset, const std::string& what) {
  throw FormatError("corrupted checkpoint at offset " + std::to_string(offset) + ": " + what);
}

}  // namespace

void save_checkpoint(const std::string& path, const LinkModelParams& params,
                     const CheckpointMeta& meta) {
  LinkModelParams copy = params;
  Writer w;
  w.bytes(kMagic, sizeof kMagic);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(copy.op));
  w.u32(static_cast<std::uint32_t>(copy.sage.aggregator));
  w.u32(static_cast<std::uint32_t>(copy.sage.activation));
  w.u32(copy.sage.normalize ? 1 : 0);
  w.u32(static_cast<std::uint32_t>(copy.sage.layers.size()));
  w.u32(static_cast<std::uint32_t>(copy.sage.input_dim()));
  for (const auto& layer : copy.sage.layers) w.u32(static_cast<std::uint32_t>(layer.weight.rows()));
  w.u32(static_cast<std::uint32_t>(copy.hidden_weight.rows()));
  w.u64(meta.split_seed);
  for (const auto& block : copy.blocks()) {
    w.u32(static_cast<std::uint32_t>(block.name.size()));
    w.bytes(block.name.data(), block.name.size());
    w.u64(block.values.size());
    for (double v : block.values) w.f64(v);
  }
  w.u64(fnv1a64(w.data()));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint " + path);
  out.write(w.data().data(), static_cast<std::streamsize>(w.data().size()));

  std::ofstream manifest(path + ".manifest", std::ios::binary);
  if (!manifest) throw IoError("cannot write checkpoint manifest " + path + ".manifest");
  manifest << "format_version = " << kCheckpointVersion << '\n'
           << "operator = " << to_string(copy.op) << '\n'
           << "aggregator = " << to_string(copy.sage.aggregator) << '\n'
           << "activation = " << to_string(copy.sage.activation) << '\n'
           << "normalize = " << (copy.sage.normalize ? "true" : "false") << '\n'
           << "layers = " << copy.sage.layers.size() << '\n'
           << "input_dim = " << copy.sage.input_dim() << '\n'
           << "hidden = " << copy.hidden_weight.rows() << '\n'
           << "split_seed = " << meta.split_seed << '\n';
  for (std::size_t l = 0; l < copy.sage.layers.size(); ++l) {
    const auto& layer = copy.sage.layers[l];
    manifest << "shape sage.l" << l << ".weight = " << layer.weight.rows() << 'x'
             << layer.weight.cols() << '\n';
    if (copy.sage.aggregator == Aggregator::kMaxPool) {
      manifest << "shape sage.l" << l << ".pool_weight = " << layer.pool_weight.rows() << 'x'
               << layer.pool_weight.cols() << '\n'
               << "shape sage.l" << l << ".pool_bias = " << layer.pool_bias.size() << '\n';
    }
  }
  if (copy.has_hidden()) {
    manifest << "shape classifier.hidden_weight = " << copy.hidden_weight.rows() << 'x'
             << copy.hidden_weight.cols() << '\n'
             << "shape classifier.hidden_bias = " << copy.hidden_bias.size() << '\n';
  }
  manifest << "shape classifier.weight = " << copy.classifier_weight.size() << '\n'
           << "shape classifier.bias = 1\n";
  for (const auto& [k, v] : meta.config) manifest << "config " << k << " = " << v << '\n';
}

LinkModelParams load_checkpoint(const std::string& path, CheckpointMeta* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint " + path);
  Reader r(std::string(std::istreambuf_iterator<char>(in), {}));
  if (r.size() < sizeof kMagic + 8) bad(0, "file too short");
  const std::size_t body_end = r.size() - 8;
  r.limit(body_end);

  if (r.bytes(sizeof kMagic, "magic") != std::string(kMagic, sizeof kMagic)) bad(0, "bad magic");
  const std::size_t version_at = r.offset();
  if (r.u32("version") != kCheckpointVersion) bad(version_at, "unsupported format version");

  auto tag = [&](std::uint32_t max, const char* what) {
    const std::size_t at = r.offset();
    const std::uint32_t v = r.u32(what);
    if (v > max) bad(at, std::string("invalid ") + what + " tag");
    return v;
  };
  const auto op = static_cast<LinkOperator>(tag(4, "operator"));
  const auto aggregator = static_cast<Aggregator>(tag(1, "aggregator"));
  const auto activation = static_cast<Activation>(tag(2, "activation"));
  const bool normalize = tag(1, "normalize") == 1;
  const std::size_t layers_at = r.offset();
  const std::uint32_t layers = r.u32("layer count");
  if (layers == 0 || layers > 64) bad(layers_at, "implausible layer count");
  const std::uint32_t input_dim = r.u32("input dim");
  std::vector<std::size_t> dims;
  for (std::uint32_t l = 0; l < layers; ++l) dims.push_back(r.u32("layer dim"));
  const std::uint32_t hidden = r.u32("hidden size");
  const std::uint64_t split_seed = r.u64("split seed");

  LinkModelConfig cfg;
  cfg.dims = dims;
  cfg.aggregator = aggregator;
  cfg.activation = activation;
  cfg.normalize = normalize;
  cfg.op = op;
  cfg.hidden = hidden;
  Rng rng(0);
  LinkModelParams params;
  try {
    params = init_link_model(input_dim, cfg, rng);
  } catch (const ConfigError& e) {
    bad(layers_at, e.what());
  }
  for (auto& block : params.blocks()) {
    const std::size_t at = r.offset();
    const std::uint32_t len = r.u32("block name length");
    if (len > 256) bad(at, "implausible block name length");
    const std::string name = r.bytes(len, "block name");
    if (name != block.name) bad(at, "expected block " + block.name + ", found " + name);
    const std::size_t count_at = r.offset();
    if (r.u64("block size") != block.values.size()) bad(count_at, "size mismatch for " + name);
    for (double& v : block.values) v = r.f64("parameter values");
  }
  if (r.offset() != body_end) bad(r.offset(), "trailing bytes before checksum");
  r.limit(std::string::npos);
  const std::uint64_t expected = fnv1a64(std::string_view(r.data()).substr(0, body_end));
  if (r.u64("checksum") != expected) bad(body_end, "checksum mismatch");
  if (meta) meta->split_seed = split_seed;
  return params;
}

}  // namespace coauthornet
