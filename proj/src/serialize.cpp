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

#include "nfbt/serialize.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "nfbt/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "the container format assumes a little-endian host");

namespace nfbt {

// ---- low-level ------------------------------------------------------------

void ByteWriter::u32(std::uint32_t v) { raw(&v, sizeof v); }
void ByteWriter::u64(std::uint64_t v) { raw(&v, sizeof v); }
void ByteWriter::f64(double v) { raw(&v, sizeof v); }

void ByteWriter::raw(const void* data, std::size_t size) {
  buffer_.append(static_cast<const char*>(data), size);
}

void ByteWriter::tag(const char (&t)[5]) { buffer_.append(t, 4); }

void ByteWriter::str(const std::string& s) {
  u64(s.size());
  buffer_.append(s);
}

std::uint32_t ByteReader::u32() {
  std::uint32_t v;
  raw(&v, sizeof v);
  return v;
}

std::uint64_t ByteReader::u64() {
  std::uint64_t v;
  raw(&v, sizeof v);
  return v;
}

double ByteReader::f64() {
  double v;
  raw(&v, sizeof v);
  return v;
}

void ByteReader::raw(void* out, std::size_t size) {
  if (pos_ + size > data_.size()) throw ConfigError("container: truncated file");
  std::memcpy(out, data_.data() + pos_, size);
  pos_ += size;
}

std::string ByteReader::tag() {
  char t[4];
  raw(t, 4);
  return std::string(t, 4);
}

std::string ByteReader::str() {
  const std::uint64_t size = u64();
  if (pos_ + size > data_.size()) throw ConfigError("container: truncated string");
  std::string s(data_.substr(pos_, size));
  pos_ += size;
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return bytes;
}

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ConfigError("short write: " + path);
}

namespace {

constexpr char kMagic[5] = "NFBT";

void write_header(ByteWriter& w) {
  w.tag(kMagic);
  w.u32(kFormatVersion);
}

void check_header(ByteReader& r, const std::string& what) {
  if (r.tag() != "NFBT") throw ConfigError(what + ": bad magic");
  const std::uint32_t version = r.u32();
  if (version != kFormatVersion)
    throw ConfigError(what + ": unsupported format version " + std::to_string(version));
}

void write_section(ByteWriter& w, const char (&tag)[5], const std::string& payload) {
  w.tag(tag);
  w.u64(payload.size());
  w.raw(payload.data(), payload.size());
}

struct Section {
  std::string tag;
  std::string payload;
};

std::optional<Section> next_section(ByteReader& r) {
  if (r.done()) return std::nullopt;
  Section s;
  s.tag = r.tag();
  const std::uint64_t size = r.u64();
  s.payload.resize(size);
  r.raw(s.payload.data(), size);
  return s;
}

void write_path(ByteWriter& w, const PathComponent& p) {
  w.f64(p.gain.real());
  w.f64(p.gain.imag());
  w.f64(p.distance);
  w.f64(p.sine_angle);
}

PathComponent read_path(ByteReader& r) {
  PathComponent p;
  const double re = r.f64();
  const double im = r.f64();
  p.gain = Complex(re, im);
  p.distance = r.f64();
  p.sine_angle = r.f64();
  return p;
}

void write_cvector(ByteWriter& w, const CVector& v) {
  w.u64(static_cast<std::uint64_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    w.f64(v[i].real());
    w.f64(v[i].imag());
  }
}

CVector read_cvector(ByteReader& r) {
  CVector v(static_cast<Eigen::Index>(r.u64()));
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double re = r.f64();
    const double im = r.f64();
    v[i] = Complex(re, im);
  }
  return v;
}

// shapes then row-major payload
void write_rmatrix(ByteWriter& w, const RMatrix& m) {
  w.u32(static_cast<std::uint32_t>(m.rows()));
  w.u32(static_cast<std::uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) w.f64(m(i, j));
}

RMatrix read_rmatrix(ByteReader& r) {
  const std::uint32_t rows = r.u32();
  const std::uint32_t cols = r.u32();
  RMatrix m(rows, cols);
  for (std::uint32_t i = 0; i < rows; ++i)
    for (std::uint32_t j = 0; j < cols; ++j) m(i, j) = r.f64();
  return m;
}

void write_rvector(ByteWriter& w, const RVector& v) {
  w.u32(static_cast<std::uint32_t>(v.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) w.f64(v[i]);
}

RVector read_rvector(ByteReader& r) {
  RVector v(r.u32());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = r.f64();
  return v;
}

void write_network(ByteWriter& w, const NetworkParams& net) {
  w.f64(net.input_scale);
  w.u32(static_cast<std::uint32_t>(net.updating_layers.size()));
  for (const UpdateLayerParams& l : net.updating_layers) {
    write_rmatrix(w, l.weight);
    write_rvector(w, l.bias);
  }
  write_rmatrix(w, net.fc_hidden.weight);
  write_rvector(w, net.fc_hidden.bias);
  write_rmatrix(w, net.fc_out.weight);
  write_rvector(w, net.fc_out.bias);
}

NetworkParams read_network(ByteReader& r) {
  NetworkParams net;
  net.input_scale = r.f64();
  const std::uint32_t layers = r.u32();
  for (std::uint32_t l = 0; l < layers; ++l) {
    UpdateLayerParams layer;
    layer.weight = read_rmatrix(r);
    layer.bias = read_rvector(r);
    net.updating_layers.push_back(std::move(layer));
  }
  net.fc_hidden.weight = read_rmatrix(r);
  net.fc_hidden.bias = read_rvector(r);
  net.fc_out.weight = read_rmatrix(r);
  net.fc_out.bias = read_rvector(r);
  return net;
}

void write_dual(ByteWriter& w, const DualParams& p) {
  write_network(w, p.angle);
  write_network(w, p.dist);
}

DualParams read_dual(ByteReader& r) {
  DualParams p;
  p.angle = read_network(r);
  p.dist = read_network(r);
  return p;
}

}  // namespace

// ---- scenario ---------------------------------------------------------------

std::string scenario_bytes(const Scenario& s) {
  ByteWriter w;
  const int num_paths = s.num_paths();
  w.u32(static_cast<std::uint32_t>(s.geometry.num_antennas));
  w.u32(static_cast<std::uint32_t>(s.num_users()));
  w.u32(static_cast<std::uint32_t>(num_paths));
  w.u32(static_cast<std::uint32_t>(s.scatterer_positions.size()));
  w.f64(s.geometry.carrier_freq);
  w.f64(s.geometry.wavelength);
  w.f64(s.geometry.spacing);
  w.u64(s.seed);
  for (const Vec3& p : s.user_positions) {
    w.f64(p.x);
    w.f64(p.y);
    w.f64(p.z);
  }
  for (const Vec3& p : s.scatterer_positions) {
    w.f64(p.x);
    w.f64(p.y);
    w.f64(p.z);
  }
  for (const NearFieldChannel& ch : s.channels) {
    if (static_cast<int>(ch.nlos.size()) != num_paths - 1)
      throw ConfigError("scenario_bytes: users disagree on the path count");
    write_path(w, ch.los);
    for (const PathComponent& p : ch.nlos) write_path(w, p);
    write_cvector(w, ch.h);
  }
  return w.take();
}

Scenario read_scenario_record(ByteReader& r) {
  Scenario s;
  const std::uint32_t n_bs = r.u32();
  const std::uint32_t num_users = r.u32();
  const std::uint32_t num_paths = r.u32();
  const std::uint32_t num_scatterers = r.u32();
  const double carrier = r.f64();
  const double wavelength = r.f64();
  const double spacing = r.f64();
  s.geometry.num_antennas = static_cast<int>(n_bs);
  s.geometry.carrier_freq = carrier;
  s.geometry.wavelength = wavelength;
  s.geometry.spacing = spacing;
  s.geometry.validate();
  s.seed = r.u64();
  s.user_positions.resize(num_users);
  for (Vec3& p : s.user_positions) {
    p.x = r.f64();
    p.y = r.f64();
    p.z = r.f64();
  }
  s.scatterer_positions.resize(num_scatterers);
  for (Vec3& p : s.scatterer_positions) {
    p.x = r.f64();
    p.y = r.f64();
    p.z = r.f64();
  }
  s.channels.resize(num_users);
  for (NearFieldChannel& ch : s.channels) {
    ch.los = read_path(r);
    ch.nlos.resize(num_paths - 1);
    for (PathComponent& p : ch.nlos) p = read_path(r);
    ch.h = read_cvector(r);
    if (ch.h.size() != static_cast<Eigen::Index>(n_bs))
      throw ConfigError("scenario record: channel length mismatch");
  }
  return s;
}

void save_scenario(const std::string& path, const Scenario& s) {
  ByteWriter w;
  write_header(w);
  const std::string record = scenario_bytes(s);
  w.raw(record.data(), record.size());
  write_file(path, w.bytes());
}

Scenario load_scenario(const std::string& path) {
  const std::string bytes = read_file(path);
  ByteReader r(bytes);
  check_header(r, "scenario file");
  return read_scenario_record(r);
}

void export_scenario_jsonl(const std::string& path, const Scenario& s) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw ConfigError("cannot write file: " + path);

  nlohmann::json head;
  head["n_bs"] = s.geometry.num_antennas;
  head["carrier_freq"] = s.geometry.carrier_freq;
  head["wavelength"] = s.geometry.wavelength;
  head["spacing"] = s.geometry.spacing;
  head["seed"] = s.seed;
  head["scatterers"] = nlohmann::json::array();
  for (const Vec3& p : s.scatterer_positions) head["scatterers"].push_back({p.x, p.y, p.z});
  out << head.dump() << '\n';

  for (int k = 0; k < s.num_users(); ++k) {
    const NearFieldChannel& ch = s.channels[k];
    nlohmann::json row;
    row["user"] = k;
    row["position"] = {s.user_positions[k].x, s.user_positions[k].y, s.user_positions[k].z};
    auto path_json = [](const PathComponent& p) {
      return nlohmann::json{{"gain_re", p.gain.real()},
                            {"gain_im", p.gain.imag()},
                            {"distance", p.distance},
                            {"sine_angle", p.sine_angle}};
    };
    row["los"] = path_json(ch.los);
    row["nlos"] = nlohmann::json::array();
    for (const PathComponent& p : ch.nlos) row["nlos"].push_back(path_json(p));
    out << row.dump() << '\n';
  }
}

// ---- dataset ---------------------------------------------------------------

void save_dataset(const std::string& path, const DatasetFile& data) {
  if (data.scenarios.size() != data.samples.size())
    throw ConfigError("save_dataset: scenarios and samples disagree");
  ByteWriter w;
  write_header(w);

  {
    ByteWriter meta;
    meta.u32(data.meta.n_bs);
    meta.u32(data.meta.beams_per_wide);
    meta.u32(data.meta.num_rings);
    meta.u32(data.meta.num_rf_chains);
    meta.u32(data.meta.num_users);
    meta.u64(data.meta.count);
    meta.str(data.meta.config_text);
    write_section(w, "META", meta.bytes());
  }

  for (std::size_t i = 0; i < data.samples.size(); ++i) {
    write_section(w, "SCEN", scenario_bytes(data.scenarios[i]));

    ByteWriter gains;
    const TrainSample& sample = data.samples[i];
    gains.u32(static_cast<std::uint32_t>(sample.gains.size()));
    for (const GainMatrix& gm : sample.gains) {
      gains.u32(static_cast<std::uint32_t>(gm.entries.rows()));
      gains.u32(static_cast<std::uint32_t>(gm.entries.cols()));
      for (Eigen::Index j = 0; j < gm.entries.cols(); ++j)
        for (Eigen::Index t = 0; t < gm.entries.rows(); ++t) {
          gains.f64(gm.entries(t, j).real());
          gains.f64(gm.entries(t, j).imag());
        }
    }
    write_section(w, "GAIN", gains.bytes());

    ByteWriter labels;
    labels.u32(static_cast<std::uint32_t>(sample.labels.size()));
    for (const CodewordIndex& idx : sample.labels) {
      labels.u32(static_cast<std::uint32_t>(idx.angle));
      labels.u32(static_cast<std::uint32_t>(idx.ring));
    }
    write_section(w, "LABL", labels.bytes());
  }
  write_file(path, w.bytes());
}

DatasetFile load_dataset(const std::string& path) {
  const std::string bytes = read_file(path);
  ByteReader r(bytes);
  check_header(r, "dataset file");

  DatasetFile data;
  bool have_meta = false;
  Scenario pending_scenario;
  bool have_scenario = false;
  TrainSample pending_sample;
  bool have_gains = false;

  while (auto section = next_section(r)) {
    ByteReader body(section->payload);
    if (section->tag == "META") {
      data.meta.n_bs = body.u32();
      data.meta.beams_per_wide = body.u32();
      data.meta.num_rings = body.u32();
      data.meta.num_rf_chains = body.u32();
      data.meta.num_users = body.u32();
      data.meta.count = body.u64();
      data.meta.config_text = body.str();
      have_meta = true;
    } else if (section->tag == "SCEN") {
      pending_scenario = read_scenario_record(body);
      have_scenario = true;
    } else if (section->tag == "GAIN") {
      if (!have_scenario) throw ConfigError("dataset file: GAIN before SCEN");
      pending_sample = TrainSample{};
      const std::uint32_t users = body.u32();
      for (std::uint32_t k = 0; k < users; ++k) {
        GainMatrix gm;
        const std::uint32_t rows = body.u32();
        const std::uint32_t cols = body.u32();
        gm.entries.resize(rows, cols);
        for (std::uint32_t j = 0; j < cols; ++j)
          for (std::uint32_t t = 0; t < rows; ++t) {
            const double re = body.f64();
            const double im = body.f64();
            gm.entries(t, j) = Complex(re, im);
          }
        pending_sample.gains.push_back(std::move(gm));
      }
      have_gains = true;
    } else if (section->tag == "LABL") {
      if (!have_gains) throw ConfigError("dataset file: LABL before GAIN");
      const std::uint32_t users = body.u32();
      for (std::uint32_t k = 0; k < users; ++k) {
        CodewordIndex idx;
        idx.angle = static_cast<int>(body.u32());
        idx.ring = static_cast<int>(body.u32());
        idx.flat = flat_index(idx.angle, idx.ring, pending_scenario.geometry.num_antennas);
        pending_sample.labels.push_back(idx);
      }
      data.scenarios.push_back(std::move(pending_scenario));
      data.samples.push_back(std::move(pending_sample));
      have_scenario = false;
      have_gains = false;
    } else {
      throw ConfigError("dataset file: unknown section " + section->tag);
    }
  }
  if (!have_meta) throw ConfigError("dataset file: missing META section");
  if (data.samples.size() != data.meta.count)
    throw ConfigError("dataset file: sample count disagrees with META");
  return data;
}

// ---- checkpoint --------------------------------------------------------------

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
  ByteWriter w;
  write_header(w);

  {
    ByteWriter meta;
    meta.u64(ckpt.train_seed);
    meta.u32(ckpt.mode == Aggregation::mean_others ? 0u : 1u);
    meta.u32(static_cast<std::uint32_t>(ckpt.dims.input_dim));
    meta.u32(static_cast<std::uint32_t>(ckpt.dims.feature_dim));
    meta.u32(static_cast<std::uint32_t>(ckpt.dims.num_layers));
    meta.u32(static_cast<std::uint32_t>(ckpt.dims.num_angles));
    meta.u32(static_cast<std::uint32_t>(ckpt.dims.num_rings));
    meta.str(ckpt.config_text);
    write_section(w, "META", meta.bytes());
  }

  {
    ByteWriter net;
    net.u32(0);
    write_network(net, ckpt.state.best.angle);
    write_section(w, "GNNP", net.bytes());
  }
  {
    ByteWriter net;
    net.u32(1);
    write_network(net, ckpt.state.best.dist);
    write_section(w, "GNNP", net.bytes());
  }

  {
    ByteWriter st;
    st.f64(ckpt.state.lr);
    st.f64(ckpt.state.best_acc_plateau);
    st.f64(ckpt.state.best_acc_exact);
    st.u32(static_cast<std::uint32_t>(ckpt.state.stall));
    st.u32(static_cast<std::uint32_t>(ckpt.state.next_epoch));
    st.u64(static_cast<std::uint64_t>(ckpt.state.adam.step));
    write_dual(st, ckpt.state.current);
    write_dual(st, ckpt.state.adam.m);
    write_dual(st, ckpt.state.adam.v);
    st.u64(ckpt.state.history.size());
    for (const HistoryRow& row : ckpt.state.history) {
      st.u32(static_cast<std::uint32_t>(row.epoch));
      st.f64(row.lr);
      st.f64(row.train_loss);
      st.f64(row.val_acc_angle);
      st.f64(row.val_acc_dist);
      st.f64(row.val_acc_overall);
    }
    write_section(w, "TRST", st.bytes());
  }
  write_file(path, w.bytes());
}

Checkpoint load_checkpoint(const std::string& path) {
  const std::string bytes = read_file(path);
  ByteReader r(bytes);
  check_header(r, "checkpoint file");

  Checkpoint ckpt;
  bool have_meta = false, have_angle = false, have_dist = false, have_state = false;
  while (auto section = next_section(r)) {
    ByteReader body(section->payload);
    if (section->tag == "META") {
      ckpt.train_seed = body.u64();
      ckpt.mode = body.u32() == 0 ? Aggregation::mean_others : Aggregation::zeroed;
      ckpt.dims.input_dim = static_cast<int>(body.u32());
      ckpt.dims.feature_dim = static_cast<int>(body.u32());
      ckpt.dims.num_layers = static_cast<int>(body.u32());
      ckpt.dims.num_angles = static_cast<int>(body.u32());
      ckpt.dims.num_rings = static_cast<int>(body.u32());
      ckpt.config_text = body.str();
      have_meta = true;
    } else if (section->tag == "GNNP") {
      const std::uint32_t which = body.u32();
      if (which == 0) {
        ckpt.state.best.angle = read_network(body);
        have_angle = true;
      } else {
        ckpt.state.best.dist = read_network(body);
        have_dist = true;
      }
    } else if (section->tag == "TRST") {
      ckpt.state.lr = body.f64();
      ckpt.state.best_acc_plateau = body.f64();
      ckpt.state.best_acc_exact = body.f64();
      ckpt.state.stall = static_cast<int>(body.u32());
      ckpt.state.next_epoch = static_cast<int>(body.u32());
      ckpt.state.adam.step = static_cast<long>(body.u64());
      ckpt.state.current = read_dual(body);
      ckpt.state.adam.m = read_dual(body);
      ckpt.state.adam.v = read_dual(body);
      const std::uint64_t rows = body.u64();
      for (std::uint64_t i = 0; i < rows; ++i) {
        HistoryRow row;
        row.epoch = static_cast<int>(body.u32());
        row.lr = body.f64();
        row.train_loss = body.f64();
        row.val_acc_angle = body.f64();
        row.val_acc_dist = body.f64();
        row.val_acc_overall = body.f64();
        ckpt.state.history.push_back(row);
      }
      have_state = true;
    } else {
      throw ConfigError("checkpoint file: unknown section " + section->tag);
    }
  }
  if (!have_meta || !have_angle || !have_dist || !have_state)
    throw ConfigError("checkpoint file: missing sections");
  return ckpt;
}

// ---- codebook ----------------------------------------------------------------

void save_codebook(const std::string& path, const NearFieldCodebook& cb) {
  ByteWriter w;
  write_header(w);
  ByteWriter body;
  body.u32(static_cast<std::uint32_t>(cb.num_angles()));
  body.u32(static_cast<std::uint32_t>(cb.num_rings()));
  for (Eigen::Index i = 0; i < cb.sine_angles.size(); ++i) body.f64(cb.sine_angles[i]);
  for (Eigen::Index i = 0; i < cb.ring_distances.size(); ++i) body.f64(cb.ring_distances[i]);
  for (Eigen::Index c = 0; c < cb.codewords.cols(); ++c)
    for (Eigen::Index i = 0; i < cb.codewords.rows(); ++i) {
      body.f64(cb.codewords(i, c).real());
      body.f64(cb.codewords(i, c).imag());
    }
  write_section(w, "CDBK", body.bytes());
  write_file(path, w.bytes());
}

NearFieldCodebook load_codebook(const std::string& path) {
  const std::string bytes = read_file(path);
  ByteReader r(bytes);
  check_header(r, "codebook file");
  auto section = next_section(r);
  if (!section || section->tag != "CDBK") throw ConfigError("codebook file: missing CDBK section");
  ByteReader body(section->payload);
  NearFieldCodebook cb;
  const std::uint32_t n_bs = body.u32();
  const std::uint32_t rings = body.u32();
  cb.sine_angles.resize(n_bs);
  for (std::uint32_t i = 0; i < n_bs; ++i) cb.sine_angles[i] = body.f64();
  cb.ring_distances.resize(rings);
  for (std::uint32_t i = 0; i < rings; ++i) cb.ring_distances[i] = body.f64();
  cb.codewords.resize(n_bs, static_cast<Eigen::Index>(n_bs) * rings);
  for (Eigen::Index c = 0; c < cb.codewords.cols(); ++c)
    for (Eigen::Index i = 0; i < cb.codewords.rows(); ++i) {
      const double re = body.f64();
      const double im = body.f64();
      cb.codewords(i, c) = Complex(re, im);
    }
  return cb;
}

}  // namespace nfbt
