// Copyright 2026 The AIFlow Authors. All Rights Reserved.
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

#include "aiflow/tofc/codec.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <zlib.h>

#include "aiflow/error.h"
#include "aiflow/io/binary.h"
#include "aiflow/tofc/range_coder.h"

namespace aiflow::tofc {
namespace {

std::vector<std::uint32_t> Cumulative(const std::vector<std::uint32_t>& freq) {
  std::vector<std::uint32_t> cum(freq.size() + 1, 0);
  for (std::size_t i = 0; i < freq.size(); ++i) cum[i + 1] = cum[i] + freq[i];
  return cum;
}

// Moves the total to exactly kTotal, taking from / giving to the largest
// entries (lowest index on ties) and never dropping an entry below 1.
void SettleTotal(std::vector<std::uint32_t>& freq) {
  std::int64_t sum = 0;
  for (std::uint32_t f : freq) sum += f;
  std::int64_t diff = static_cast<std::int64_t>(kTotal) - sum;
  while (diff != 0) {
    std::size_t mode = 0;
    for (std::size_t i = 1; i < freq.size(); ++i)
      if (freq[i] > freq[mode]) mode = i;
    if (diff > 0) {
      freq[mode] += static_cast<std::uint32_t>(diff);
      return;
    }
    const std::int64_t take = std::min<std::int64_t>(-diff, freq[mode] - 1);
    if (take <= 0) Fail(ErrorCode::kInternal, "frequency table cannot be normalized");
    freq[mode] -= static_cast<std::uint32_t>(take);
    diff += take;
  }
}

std::uint32_t Scaled(double p) {
  return static_cast<std::uint32_t>(std::floor(p * static_cast<double>(kTotal) + 0.5));
}

}  // namespace

FrequencyTable BuildFrequencyTable(const LaplacianModel& model, std::size_t dim) {
  FrequencyTable t;
  t.low = model.Low(dim);
  const std::int32_t high = model.High(dim);
  const std::size_t n = static_cast<std::size_t>(high - t.low) + 1;
  t.freq.assign(n + 1, 0);
  std::vector<double> tail_mass;
  double escape = EscapeMass(model, dim);
  const double outside = escape;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int32_t q = t.low + static_cast<std::int32_t>(i);
    const double p = Pmf(model, dim, q);
    t.freq[i] = Scaled(p);
    if (t.freq[i] == 0) {
      escape += p;
      t.tail_symbols.push_back(q);
      tail_mass.push_back(p);
    }
  }
  t.freq[n] = std::max<std::uint32_t>(1, Scaled(escape));
  SettleTotal(t.freq);
  t.cum = Cumulative(t.freq);

  tail_mass.push_back(outside);
  double w = 0.0;
  for (double m : tail_mass) w += m;
  for (double m : tail_mass) {
    const double share = w > 0.0 ? m / w : 1.0 / static_cast<double>(tail_mass.size());
    t.tail_freq.push_back(std::max<std::uint32_t>(1, Scaled(share)));
  }
  SettleTotal(t.tail_freq);
  t.tail_cum = Cumulative(t.tail_freq);
  return t;
}

std::size_t HeaderBytes(std::size_t rows) { return 4 + 1 + 2 + 2 + 1 + rows + 4; }

namespace {

// Tables are built on first use per (model, dim).
class TableCache {
 public:
  explicit TableCache(std::span<const LaplacianModel> models) : models_(models), tables_(models.size()) {}

  const FrequencyTable& Get(std::size_t model, std::size_t dim) {
    auto& per_model = tables_[model];
    if (per_model.empty()) per_model.resize(models_[model].dims());
    auto& slot = per_model[dim];
    if (slot.freq.empty()) slot = BuildFrequencyTable(models_[model], dim);
    return slot;
  }

 private:
  std::span<const LaplacianModel> models_;
  std::vector<std::vector<FrequencyTable>> tables_;
};

std::uint32_t SymbolCrc(std::span<const std::uint8_t> header, const SymbolMatrix& symbols) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, header.data(), static_cast<uInt>(header.size()));
  ByteWriter w;
  for (std::int32_t q : symbols.data) w.PutU32(static_cast<std::uint32_t>(q));
  const auto& b = w.bytes();
  crc = crc32(crc, b.data(), static_cast<uInt>(b.size()));
  return static_cast<std::uint32_t>(crc);
}

std::size_t Locate(const std::vector<std::uint32_t>& cum, std::uint32_t target) {
  return static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), target) - cum.begin()) - 1;
}

}  // namespace

std::vector<std::uint8_t> EncodeBitstream(const SymbolMatrix& symbols,
                                          std::span<const LaplacianModel> models,
                                          std::span<const std::size_t> routing) {
  Require(!models.empty() && models.size() <= 255, ErrorCode::kInvalidInput,
          "model bank must hold 1..255 models");
  Require(symbols.rows >= 1 && symbols.rows <= 0xFFFF && symbols.cols >= 1 && symbols.cols <= 0xFFFF,
          ErrorCode::kInvalidInput, "symbol matrix dimensions do not fit the header");
  Require(symbols.data.size() == symbols.rows * symbols.cols, ErrorCode::kInvalidInput,
          "symbol matrix size mismatch");
  Require(routing.size() == symbols.rows, ErrorCode::kInvalidInput, "one model id per row");
  for (std::size_t id : routing)
    Require(id < models.size(), ErrorCode::kInvalidInput, "unknown model id " + std::to_string(id));
  for (const LaplacianModel& m : models)
    Require(m.dims() == symbols.cols, ErrorCode::kInvalidInput,
            "model has " + std::to_string(m.dims()) + " dims, features have " +
                std::to_string(symbols.cols));

  ByteWriter w;
  w.PutTag("TOFC");
  w.PutU8(kBitstreamVersion);
  w.PutU16(static_cast<std::uint16_t>(symbols.rows));
  w.PutU16(static_cast<std::uint16_t>(symbols.cols));
  w.PutU8(static_cast<std::uint8_t>(models.size()));
  for (std::size_t id : routing) w.PutU8(static_cast<std::uint8_t>(id));
  w.PutU32(SymbolCrc(w.bytes(), symbols));

  TableCache cache(models);
  RangeEncoder enc;
  for (std::size_t r = 0; r < symbols.rows; ++r) {
    const auto row = symbols.row(r);
    for (std::size_t j = 0; j < symbols.cols; ++j) {
      const FrequencyTable& t = cache.Get(routing[r], j);
      const std::int64_t q = row[j];
      const std::int64_t i = q - t.low;
      if (i >= 0 && i < static_cast<std::int64_t>(t.escape_index()) && t.freq[i] > 0) {
        enc.Encode(t.cum[i], t.freq[i]);
        continue;
      }
      const std::size_t esc = t.escape_index();
      enc.Encode(t.cum[esc], t.freq[esc]);
      const auto it = std::lower_bound(t.tail_symbols.begin(), t.tail_symbols.end(), row[j]);
      const bool in_tail = it != t.tail_symbols.end() && *it == row[j];
      const std::size_t k = in_tail ? static_cast<std::size_t>(it - t.tail_symbols.begin())
                                    : t.tail_symbols.size();
      enc.Encode(t.tail_cum[k], t.tail_freq[k]);
      if (!in_tail) {
        const auto raw = static_cast<std::uint32_t>(row[j]);
        enc.Encode(raw >> 16, 1);
        enc.Encode(raw & 0xFFFFu, 1);
      }
    }
  }
  w.PutBytes(enc.Finish());
  return w.Release();
}

DecodedBitstream DecodeBitstream(std::span<const std::uint8_t> bytes,
                                 std::span<const LaplacianModel> models) {
  ByteReader r(bytes, ErrorCode::kMalformedBitstream);
  r.ExpectTag("TOFC");
  const std::uint8_t version = r.GetU8();
  if (version != kBitstreamVersion)
    Fail(ErrorCode::kMalformedBitstream, "unsupported bitstream version " + std::to_string(version));
  DecodedBitstream out;
  out.symbols.rows = r.GetU16();
  out.symbols.cols = r.GetU16();
  const std::size_t num_models = r.GetU8();
  if (out.symbols.rows == 0 || out.symbols.cols == 0)
    Fail(ErrorCode::kMalformedBitstream, "empty bitstream header");
  if (num_models != models.size())
    Fail(ErrorCode::kMalformedBitstream, "bitstream was coded with " + std::to_string(num_models) +
                                             " models, " + std::to_string(models.size()) + " given");
  for (const LaplacianModel& m : models)
    if (m.dims() != out.symbols.cols)
      Fail(ErrorCode::kMalformedBitstream, "header dimension does not match the model bank");
  for (std::size_t i = 0; i < out.symbols.rows; ++i) {
    const std::size_t id = r.GetU8();
    if (id >= models.size()) Fail(ErrorCode::kMalformedBitstream, "header names an unknown model");
    out.routing.push_back(id);
  }
  const std::size_t header_len = r.position();
  const std::uint32_t crc = r.GetU32();
  RangeDecoder dec(r.GetBytes(r.remaining()));

  TableCache cache(models);
  out.symbols.data.reserve(out.symbols.rows * out.symbols.cols);
  for (std::size_t row = 0; row < out.symbols.rows; ++row) {
    for (std::size_t j = 0; j < out.symbols.cols; ++j) {
      const FrequencyTable& t = cache.Get(out.routing[row], j);
      std::size_t i = Locate(t.cum, dec.GetTarget());
      dec.Consume(t.cum[i], t.freq[i]);
      if (i != t.escape_index()) {
        out.symbols.data.push_back(t.low + static_cast<std::int32_t>(i));
        continue;
      }
      const std::size_t k = Locate(t.tail_cum, dec.GetTarget());
      dec.Consume(t.tail_cum[k], t.tail_freq[k]);
      if (k < t.tail_symbols.size()) {
        out.symbols.data.push_back(t.tail_symbols[k]);
        continue;
      }
      const std::uint32_t hi = dec.GetTarget();
      dec.Consume(hi, 1);
      const std::uint32_t lo = dec.GetTarget();
      dec.Consume(lo, 1);
      out.symbols.data.push_back(static_cast<std::int32_t>((hi << 16) | lo));
    }
  }
  if (!dec.AtEnd()) Fail(ErrorCode::kMalformedBitstream, "payload does not end where the symbols do");
  if (SymbolCrc(bytes.first(header_len), out.symbols) != crc)
    Fail(ErrorCode::kMalformedBitstream, "checksum mismatch");
  return out;
}

}  // namespace aiflow::tofc
