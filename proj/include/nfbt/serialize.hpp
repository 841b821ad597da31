// nfbt - near-field beam training simulator for multiuser XL-MIMO
// Copyright 2026 the nfbt authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------
//
// Little-endian binary container. Every file starts with the magic "NFBT"
// and a u32 format version. A standalone scenario file continues with the
// scenario record (N_BS, K, L, S, geometry, seed, position triples,
// per-path components, interleaved re/im channel entries). Dataset,
// checkpoint and codebook files continue with tagged sections
// [tag 4 bytes][u64 payload length][payload]:
//   dataset    = META, then SCEN + GAIN + LABL per sample
//   checkpoint = META, GNNP (angle), GNNP (distance), TRST
//   codebook   = CDBK

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nfbt/array_channel.hpp"
#include "nfbt/codebooks.hpp"
#include "nfbt/gnn.hpp"
#include "nfbt/linalg.hpp"

namespace nfbt {

inline constexpr std::uint32_t kFormatVersion = 1;

// ---- low-level byte stream helpers -------------------------------------

class ByteWriter {
 public:
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f64(double v);
  void raw(const void* data, std::size_t size);
  void tag(const char (&t)[5]);
  void str(const std::string& s);  // u64 length + bytes

  const std::string& bytes() const { return buffer_; }
  std::string take() { return std::move(buffer_); }

 private:
  std::string buffer_;
};

class ByteReader {
 public:
  explicit ByteReader(std::string_view data) : data_(data) {}

  std::uint32_t u32();
  std::uint64_t u64();
  double f64();
  void raw(void* out, std::size_t size);
  std::string tag();
  std::string str();
  bool done() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  std::string_view data_;
  std::size_t pos_ = 0;
};

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& bytes);

// ---- scenario -----------------------------------------------------------

std::string scenario_bytes(const Scenario& s);  // record only, no magic
Scenario read_scenario_record(ByteReader& reader);

void save_scenario(const std::string& path, const Scenario& s);
Scenario load_scenario(const std::string& path);

/// JSON-lines debug export: one geometry line, then one line per user.
void export_scenario_jsonl(const std::string& path, const Scenario& s);

// ---- dataset ------------------------------------------------------------

struct DatasetMeta {
  std::string config_text;  // resolved config stamp
  std::uint32_t n_bs = 0;
  std::uint32_t beams_per_wide = 0;
  std::uint32_t num_rings = 0;
  std::uint32_t num_rf_chains = 0;
  std::uint32_t num_users = 0;
  std::uint64_t count = 0;
};

struct DatasetFile {
  DatasetMeta meta;
  std::vector<Scenario> scenarios;
  Dataset samples;  // gains + labels, same order as scenarios
};

void save_dataset(const std::string& path, const DatasetFile& data);
DatasetFile load_dataset(const std::string& path);

// ---- checkpoint ---------------------------------------------------------

struct Checkpoint {
  std::string config_text;
  NetDims dims;
  Aggregation mode = Aggregation::mean_others;
  std::uint64_t train_seed = 0;
  TrainState state;  // state.best carries the inference parameters
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// ---- codebook -----------------------------------------------------------

void save_codebook(const std::string& path, const NearFieldCodebook& cb);
NearFieldCodebook load_codebook(const std::string& path);

}  // namespace nfbt
