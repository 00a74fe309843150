// Copyright 2026 The Tempo Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// On-disk formats. All integers are little-endian.
//
// Video (.xvid):
//   "XVID" | u32 version=1 | u32 T | u32 H | u32 W | u32 C | T*H*W*C u8 pixels
//   pixels are frame-major, each frame stored [H][W][C].
//
// Checkpoint (.xtck):
//   "XTCK" | u32 version=1 | u32 count |
//   count x ( u32 name_len | name bytes | u32 rank | rank x u32 dim |
//             prod(dims) x f64 )
//   Optimizer state lives under the reserved "__optim__/" name prefix.
//
// Manifest: one video per line, "<relative path>\t<frames>\t<l0,l1,...>".
// Predictions / labels: "<id>,<v_0>,...,<v_{C-1}>" per line.

#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "tempo/eval.hpp"
#include "tempo/model.hpp"
#include "tempo/optim.hpp"
#include "tempo/sampling.hpp"
#include "tempo/tensor.hpp"

namespace tempo {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed on '" + path.string() + "'");
  return ss.str();
}

inline void write_file(const fs::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw IoError("cannot create directory '" + path.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed on '" + path.string() + "'");
}

namespace detail {

class ByteWriter {
 public:
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void f64(double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  }
  void bytes(std::string_view s) { buf_.append(s); }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

class ByteReader {
 public:
  ByteReader(std::string_view data, std::string what) : data_(data), what_(std::move(what)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
      v |= static_cast<std::uint32_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 4;
    return v;
  }
  double f64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(static_cast<unsigned char>(data_[pos_ + i])) << (8 * i);
    pos_ += 8;
    return std::bit_cast<double>(v);
  }
  std::string_view bytes(std::size_t n) {
    need(n);
    auto s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) const {
    require(data_.size() - pos_ >= n, what_, ": truncated at byte ", pos_);
  }

  std::string_view data_;
  std::string what_;
  std::size_t pos_ = 0;
};

inline std::uint32_t checked_u32(std::size_t v, const char* what) {
  require(v <= 0xffffffffu, what, " does not fit in u32");
  return static_cast<std::uint32_t>(v);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// video
// ---------------------------------------------------------------------------

inline std::string encode_video(const Video& v) {
  require(v.pixels.size() == v.frames * v.height * v.width * v.channels,
          "video: pixel count does not match dims");
  detail::ByteWriter w;
  w.bytes("XVID");
  w.u32(1);
  w.u32(detail::checked_u32(v.frames, "T"));
  w.u32(detail::checked_u32(v.height, "H"));
  w.u32(detail::checked_u32(v.width, "W"));
  w.u32(detail::checked_u32(v.channels, "C"));
  w.bytes({reinterpret_cast<const char*>(v.pixels.data()), v.pixels.size()});
  return w.take();
}

inline Video decode_video(std::string_view bytes, const std::string& what = "video") {
  detail::ByteReader r(bytes, what);
  require(r.bytes(4) == "XVID", what, ": bad magic");
  const auto version = r.u32();
  require(version == 1, what, ": unsupported version ", version);
  Video v;
  v.frames = r.u32();
  v.height = r.u32();
  v.width = r.u32();
  v.channels = r.u32();
  require(v.frames >= 1 && v.height >= 1 && v.width >= 1 && v.channels >= 1, what,
          ": zero dimension in header");
  const std::size_t n = v.frames * v.height * v.width * v.channels;
  require(r.remaining() == n, what, ": expected ", n, " pixel bytes, found ", r.remaining());
  auto px = r.bytes(n);
  v.pixels.assign(reinterpret_cast<const std::uint8_t*>(px.data()),
                  reinterpret_cast<const std::uint8_t*>(px.data()) + n);
  return v;
}

inline void write_video(const fs::path& path, const Video& v) { write_file(path, encode_video(v)); }

inline Video read_video(const fs::path& path) {
  const std::string bytes = read_file(path);
  return decode_video(bytes, path.string());
}

// ---------------------------------------------------------------------------
// checkpoint
// ---------------------------------------------------------------------------

inline constexpr std::string_view kOptimPrefix = "__optim__/";

struct Checkpoint {
  std::vector<std::pair<std::string, Tensor>> tensors;

  const Tensor* find(std::string_view name) const {
    for (const auto& [n, t] : tensors)
      if (n == name) return &t;
    return nullptr;
  }
};

inline std::string encode_checkpoint(const Checkpoint& ck) {
  detail::ByteWriter w;
  w.bytes("XTCK");
  w.u32(1);
  w.u32(detail::checked_u32(ck.tensors.size(), "tensor count"));
  for (const auto& [name, t] : ck.tensors) {
    w.u32(detail::checked_u32(name.size(), "name length"));
    w.bytes(name);
    w.u32(static_cast<std::uint32_t>(t.rank()));
    for (auto d : t.dims()) w.u32(detail::checked_u32(d, "dim"));
    for (double v : t.values()) w.f64(v);
  }
  return w.take();
}

inline Checkpoint decode_checkpoint(std::string_view bytes, const std::string& what = "checkpoint") {
  detail::ByteReader r(bytes, what);
  require(r.bytes(4) == "XTCK", what, ": bad magic");
  const auto version = r.u32();
  require(version == 1, what, ": unsupported version ", version);
  const auto count = r.u32();
  Checkpoint ck;
  for (std::uint32_t i = 0; i < count; ++i) {
    const auto len = r.u32();
    std::string name(r.bytes(len));
    const auto rank = r.u32();
    require(rank >= 1 && rank <= 5, what, ": tensor '", name, "' has rank ", rank);
    Shape dims(rank);
    for (auto& d : dims) d = r.u32();
    std::vector<double> data(shape_size(dims));
    require(r.remaining() / 8 >= data.size(), what, ": truncated tensor '", name, "'");
    for (auto& v : data) v = r.f64();
    ck.tensors.emplace_back(std::move(name), Tensor(std::move(dims), std::move(data)));
  }
  require(r.remaining() == 0, what, ": ", r.remaining(), " trailing bytes");
  return ck;
}

inline void write_checkpoint(const fs::path& path, const Checkpoint& ck) {
  write_file(path, encode_checkpoint(ck));
}

inline Checkpoint read_checkpoint(const fs::path& path) {
  return decode_checkpoint(read_file(path), path.string());
}

/// Parameters in store order, then velocities and the iteration counter
/// under the reserved prefix.
inline Checkpoint make_checkpoint(const ParamStore& params, const SgdState* state = nullptr,
                                  long iteration = -1) {
  Checkpoint ck;
  for (const auto& [name, gp] : params.entries()) {
    require(!name.starts_with(kOptimPrefix), "parameter name '", name, "' uses reserved prefix");
    ck.tensors.emplace_back(name, gp.value);
  }
  if (state && state->velocity.size() > 0) {
    for (const auto& [name, gp] : state->velocity.entries())
      ck.tensors.emplace_back(std::string(kOptimPrefix) + "velocity/" + name, gp.value);
  }
  if (iteration >= 0)
    ck.tensors.emplace_back(std::string(kOptimPrefix) + "iteration",
                            Tensor({1}, {static_cast<double>(iteration)}));
  return ck;
}

/// Copies checkpoint values into an already-shaped store. Every parameter
/// must be present with matching dims. Returns the stored iteration or -1.
inline long restore_checkpoint(const Checkpoint& ck, ParamStore& params,
                               SgdState* state = nullptr) {
  for (auto& [name, gp] : params.entries()) {
    const Tensor* t = ck.find(name);
    require(t != nullptr, "checkpoint is missing parameter '", name, "'");
    require(t->dims() == gp.value.dims(), "checkpoint parameter '", name, "' has shape ",
            shape_str(t->dims()), ", model expects ", shape_str(gp.value.dims()));
    gp.value = *t;
  }
  std::size_t model_tensors = 0;
  for (const auto& [name, t] : ck.tensors)
    if (!name.starts_with(kOptimPrefix)) ++model_tensors;
  require(model_tensors == params.size(), "checkpoint has ", model_tensors,
          " parameters, model has ", params.size());
  if (state) {
    *state = SgdState::zeros_like(params);
    for (auto& [name, gp] : state->velocity.entries()) {
      if (const Tensor* t = ck.find(std::string(kOptimPrefix) + "velocity/" + name)) {
        require(t->dims() == gp.value.dims(), "checkpoint velocity for '", name, "' has wrong shape");
        gp.value = *t;
      }
    }
  }
  const Tensor* it = ck.find(std::string(kOptimPrefix) + "iteration");
  return it ? static_cast<long>((*it)[0]) : -1;
}

// ---------------------------------------------------------------------------
// text formats
// ---------------------------------------------------------------------------

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view s, std::string_view what) {
  s = trim(s);
  double v = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && p == s.data() + s.size(), what, ": '", s, "' is not a number");
  return v;
}

inline long parse_long(std::string_view s, std::string_view what) {
  s = trim(s);
  long v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  require(ec == std::errc() && p == s.data() + s.size(), what, ": '", s, "' is not an integer");
  return v;
}

template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t lineno = 0, start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++lineno;
    const auto line = trim(text.substr(start, end - start));
    if (!line.empty() && line.front() != '#') fn(line, lineno);
    start = end + 1;
  }
}

}  // namespace detail

struct ManifestRow {
  std::string path;
  std::size_t frames = 0;
  std::vector<std::size_t> labels;
};

using Manifest = std::vector<ManifestRow>;

inline std::string format_manifest(const Manifest& m) {
  std::string out;
  for (const auto& row : m) {
    out += row.path + "\t" + std::to_string(row.frames) + "\t";
    for (std::size_t i = 0; i < row.labels.size(); ++i)
      out += (i ? "," : "") + std::to_string(row.labels[i]);
    out += "\n";
  }
  return out;
}

inline Manifest parse_manifest(std::string_view text, std::size_t num_classes,
                               const std::string& what = "manifest") {
  Manifest m;
  detail::for_each_line(text, [&](std::string_view line, std::size_t no) {
    const auto cols = detail::split(line, '\t');
    const std::string where = what + ":" + std::to_string(no);
    // an empty label field may lose its tab to trimming
    require(cols.size() == 2 || cols.size() == 3, where,
            ": expected 3 tab-separated fields, got ", cols.size());
    ManifestRow row;
    row.path = std::string(detail::trim(cols[0]));
    require(!row.path.empty(), where, ": empty path");
    const long f = detail::parse_long(cols[1], where);
    require(f >= 1, where, ": frame count must be >= 1");
    row.frames = static_cast<std::size_t>(f);
    if (cols.size() == 3 && !detail::trim(cols[2]).empty()) {
      for (auto tok : detail::split(cols[2], ',')) {
        const long l = detail::parse_long(tok, where);
        require(l >= 0 && static_cast<std::size_t>(l) < num_classes, where, ": label ", l,
                " outside [0,", num_classes, ")");
        row.labels.push_back(static_cast<std::size_t>(l));
      }
    }
    m.push_back(std::move(row));
  });
  return m;
}

inline Manifest read_manifest(const fs::path& path, std::size_t num_classes) {
  return parse_manifest(read_file(path), num_classes, path.string());
}

inline void write_manifest(const fs::path& path, const Manifest& m) {
  write_file(path, format_manifest(m));
}

inline LabelMatrix manifest_labels(const Manifest& m, std::size_t num_classes) {
  LabelMatrix lm{{}, num_classes, std::vector<double>(m.size() * num_classes, 0.0)};
  for (std::size_t i = 0; i < m.size(); ++i) {
    lm.ids.push_back(m[i].path);
    for (auto l : m[i].labels) lm.values[i * num_classes + l] = 1.0;
  }
  return lm;
}

/// 9 significant digits, "%.9g".
inline std::string format_scores(const ScoreMatrix& sm) {
  std::string out;
  char buf[32];
  for (std::size_t i = 0; i < sm.num_samples(); ++i) {
    out += sm.ids[i];
    for (double v : sm.row(i)) {
      std::snprintf(buf, sizeof buf, ",%.9g", v);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

inline ScoreMatrix parse_scores(std::string_view text, const std::string& what = "scores") {
  ScoreMatrix sm;
  bool first = true;
  detail::for_each_line(text, [&](std::string_view line, std::size_t no) {
    const auto cols = detail::split(line, ',');
    const std::string where = what + ":" + std::to_string(no);
    require(cols.size() >= 2, where, ": expected id and at least one value");
    if (first) {
      sm.num_classes = cols.size() - 1;
      first = false;
    }
    require(cols.size() - 1 == sm.num_classes, where, ": expected ", sm.num_classes,
            " values, got ", cols.size() - 1);
    sm.ids.emplace_back(detail::trim(cols[0]));
    for (std::size_t c = 1; c < cols.size(); ++c)
      sm.values.push_back(detail::parse_double(cols[c], where));
  });
  return sm;
}

inline void write_scores(const fs::path& path, const ScoreMatrix& sm) {
  write_file(path, format_scores(sm));
}

inline ScoreMatrix read_scores(const fs::path& path) {
  return parse_scores(read_file(path), path.string());
}

}  // namespace tempo
