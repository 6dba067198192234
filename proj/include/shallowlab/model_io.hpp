#pragma once

// Binary model container. All integers and floats are little-endian.
//
//   magic            8 bytes  "SLCRFMDL"
//   version          u32      kModelFormatVersion
//   task             u32      0 generic, 1 pos, 2 chunk
//   prefix_max       u32
//   suffix_max       u32
//   window           u32
//   word_window      u32
//   pos_window       u32
//   l2_sigma         f64
//   max_iterations   u64
//   tolerance        f64
//   feature_cutoff   u64
//   iterations       u32      optimizer iterations actually run
//   final_objective  f64
//   provenance       str      resolved run configuration
//   label_count      u32,  then label_count x str
//   feature_count    u64,  then feature_count x str
//   weights          f64 x (F*K + K*K + K), layout of crf::ParameterLayout
//   checksum         u32      CRC-32 (zlib) of every preceding byte
//
// str = u32 byte length followed by UTF-8 bytes.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <zlib.h>

#include "shallowlab/error.hpp"
#include "shallowlab/io.hpp"
#include "shallowlab/model.hpp"

namespace shallowlab {

inline constexpr std::uint32_t kModelFormatVersion = 1;
inline constexpr std::string_view kModelMagic = "SLCRFMDL";

namespace model_io_detail {

class Writer {
 public:
  void bytes(std::string_view b) { out_.append(b); }
  void u32(std::uint32_t v) { put(v, 4); }
  void u64(std::uint64_t v) { put(v, 8); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes(s);
  }
  std::string& data() { return out_; }

 private:
  void put(std::uint64_t v, int width) {
    for (int i = 0; i < width; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
  }
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view data) : data_(data) {}

  std::string_view bytes(std::size_t n) {
    if (n > data_.size() - pos_) {
      throw Error(ErrorKind::corrupt_model, "model file is truncated");
    }
    auto view = data_.substr(pos_, n);
    pos_ += n;
    return view;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(get(4)); }
  std::uint64_t u64() { return get(8); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() { return std::string(bytes(u32())); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::uint64_t get(int width) {
    const auto b = bytes(static_cast<std::size_t>(width));
    std::uint64_t v = 0;
    for (int i = width; i-- > 0;) v = (v << 8) | static_cast<std::uint8_t>(b[static_cast<std::size_t>(i)]);
    return v;
  }
  std::string_view data_;
  std::size_t pos_ = 0;
};

inline std::uint32_t crc32_of(std::string_view data) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in bounded pieces.
  constexpr std::size_t piece = 1u << 30;
  for (std::size_t at = 0; at < data.size(); at += piece) {
    const auto n = std::min(piece, data.size() - at);
    crc = ::crc32(crc, reinterpret_cast<const Bytef*>(data.data() + at),
                  static_cast<uInt>(n));
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace model_io_detail

inline std::string save_model(const CrfModel& model) {
  model_io_detail::Writer w;
  const auto& meta = model.metadata();
  w.bytes(kModelMagic);
  w.u32(kModelFormatVersion);
  w.u32(static_cast<std::uint32_t>(meta.task));
  w.u32(static_cast<std::uint32_t>(meta.pos_template.prefix_max));
  w.u32(static_cast<std::uint32_t>(meta.pos_template.suffix_max));
  w.u32(static_cast<std::uint32_t>(meta.pos_template.window));
  w.u32(static_cast<std::uint32_t>(meta.chunk_template.word_window));
  w.u32(static_cast<std::uint32_t>(meta.chunk_template.pos_window));
  w.f64(meta.train.l2_sigma);
  w.u64(meta.train.max_iterations);
  w.f64(meta.train.tolerance);
  w.u64(meta.train.feature_cutoff);
  w.u32(meta.iterations);
  w.f64(meta.final_objective);
  w.str(meta.provenance);
  w.u32(static_cast<std::uint32_t>(model.labels().size()));
  for (const auto& label : model.labels().items()) w.str(label);
  w.u64(model.features().size());
  for (const auto& feature : model.features().items()) w.str(feature);
  for (double v : model.weights()) w.f64(v);
  const auto crc = model_io_detail::crc32_of(w.data());
  w.u32(crc);
  return std::move(w.data());
}

inline CrfModel load_model(std::string_view data) {
  using model_io_detail::Reader;
  if (data.size() < kModelMagic.size() + 4 || data.substr(0, kModelMagic.size()) != kModelMagic) {
    throw Error(ErrorKind::corrupt_model, "not a model file (bad magic)");
  }
  Reader header(data.substr(kModelMagic.size(), 4));
  if (const auto version = header.u32(); version != kModelFormatVersion) {
    throw Error(ErrorKind::version_mismatch,
                "model format version " + std::to_string(version) + ", expected " +
                    std::to_string(kModelFormatVersion));
  }
  if (data.size() < kModelMagic.size() + 8) {
    throw Error(ErrorKind::corrupt_model, "model file is truncated");
  }
  const auto body = data.substr(0, data.size() - 4);
  if (Reader(data.substr(data.size() - 4)).u32() != model_io_detail::crc32_of(body)) {
    throw Error(ErrorKind::corrupt_model, "checksum mismatch");
  }

  Reader r(body);
  r.bytes(kModelMagic.size());
  r.u32();
  ModelMetadata meta;
  const auto task = r.u32();
  if (task > static_cast<std::uint32_t>(TaskKind::chunk)) {
    throw Error(ErrorKind::corrupt_model, "unknown task kind " + std::to_string(task));
  }
  meta.task = static_cast<TaskKind>(task);
  meta.pos_template.prefix_max = r.u32();
  meta.pos_template.suffix_max = r.u32();
  meta.pos_template.window = r.u32();
  meta.chunk_template.word_window = r.u32();
  meta.chunk_template.pos_window = r.u32();
  meta.train.l2_sigma = r.f64();
  meta.train.max_iterations = r.u64();
  meta.train.tolerance = r.f64();
  meta.train.feature_cutoff = r.u64();
  meta.iterations = r.u32();
  meta.final_objective = r.f64();
  meta.provenance = r.str();

  const std::uint32_t label_count = r.u32();
  if (label_count > r.remaining() / 4) {
    throw Error(ErrorKind::corrupt_model, "label count exceeds file size");
  }
  std::vector<std::string> labels(label_count);
  for (auto& label : labels) label = r.str();
  const std::uint64_t feature_count = r.u64();
  if (feature_count > r.remaining() / 4) {
    throw Error(ErrorKind::corrupt_model, "feature count exceeds file size");
  }
  std::vector<std::string> features(feature_count);
  for (auto& feature : features) feature = r.str();

  crf::LabelAlphabet label_alphabet(std::move(labels));
  crf::FeatureAlphabet feature_alphabet(std::move(features));
  if (label_alphabet.size() != label_count ||
      feature_alphabet.size() != feature_count) {
    throw Error(ErrorKind::corrupt_model, "duplicate alphabet entries");
  }
  const crf::ParameterLayout layout{feature_alphabet.size(), label_alphabet.size()};
  if (r.remaining() != layout.size() * 8) {
    throw Error(ErrorKind::corrupt_model, "weight block size does not match alphabets");
  }
  std::vector<double> weights(layout.size());
  for (double& v : weights) v = r.f64();
  try {
    return CrfModel(std::move(label_alphabet), std::move(feature_alphabet),
                    std::move(weights), std::move(meta));
  } catch (const Error& e) {
    throw Error(ErrorKind::corrupt_model, e.detail());
  }
}

inline void save_model_file(const CrfModel& model, const std::filesystem::path& path) {
  io::write_file_atomic(path, save_model(model));
}

inline CrfModel load_model_file(const std::filesystem::path& path) {
  try {
    return load_model(io::read_file(path));
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::io) throw;
    throw Error(e.kind(), path.string() + ": " + e.detail());
  }
}

}  // namespace shallowlab
