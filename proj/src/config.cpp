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

#include "nfbt/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <sstream>

#include "nfbt/errors.hpp"
#include "nfbt/serialize.hpp"

namespace nfbt {

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, result.ptr);
}

double parse_double(const std::string& key, const std::string& value) {
  double v = 0.0;
  const auto result = std::from_chars(value.data(), value.data() + value.size(), v);
  if (result.ec != std::errc() || result.ptr != value.data() + value.size())
    throw ConfigError("config: bad number for " + key + ": '" + value + "'");
  return v;
}

long parse_long(const std::string& key, const std::string& value) {
  long v = 0;
  const auto result = std::from_chars(value.data(), value.data() + value.size(), v);
  if (result.ec != std::errc() || result.ptr != value.data() + value.size())
    throw ConfigError("config: bad integer for " + key + ": '" + value + "'");
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config: bad boolean for " + key + ": '" + value + "'");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    const auto begin = item.find_first_not_of(" \t");
    if (begin == std::string::npos) continue;
    const auto end = item.find_last_not_of(" \t");
    parts.push_back(item.substr(begin, end - begin + 1));
  }
  return parts;
}

struct Binding {
  std::string key;
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&)> set;
};

template <class T>
Binding bind_int(std::string key, T ExperimentConfig::* block, int T::* field) {
  return {key,
          [block, field](const ExperimentConfig& c) { return std::to_string(c.*block.*field); },
          [block, field, key](ExperimentConfig& c, const std::string& v) {
            c.*block.*field = static_cast<int>(parse_long(key, v));
          }};
}

template <class T>
Binding bind_double(std::string key, T ExperimentConfig::* block, double T::* field) {
  return {key,
          [block, field](const ExperimentConfig& c) { return format_double(c.*block.*field); },
          [block, field, key](ExperimentConfig& c, const std::string& v) {
            c.*block.*field = parse_double(key, v);
          }};
}

const std::vector<Binding>& bindings() {
  static const std::vector<Binding> table = [] {
    std::vector<Binding> b;
    using C = ExperimentConfig;

    b.push_back(bind_int("geometry.n_bs", &C::geometry, &C::Geometry::n_bs));
    b.push_back(bind_double("geometry.carrier_freq_hz", &C::geometry, &C::Geometry::carrier_freq_hz));
    b.push_back(bind_double("geometry.spacing_wavelengths", &C::geometry,
                            &C::Geometry::spacing_wavelengths));

    b.push_back(bind_int("codebook.beams_per_wide", &C::codebook, &C::Codebook::beams_per_wide));
    b.push_back(bind_int("codebook.rings", &C::codebook, &C::Codebook::rings));
    b.push_back({"codebook.ring_rule",
                 [](const C& c) { return c.codebook.ring_rule; },
                 [](C& c, const std::string& v) {
                   if (v != "reciprocal")
                     throw ConfigError("config: unsupported codebook.ring_rule '" + v + "'");
                   c.codebook.ring_rule = v;
                 }});
    b.push_back(bind_double("codebook.r_min", &C::codebook, &C::Codebook::r_min));
    b.push_back(bind_double("codebook.r_max_cap", &C::codebook, &C::Codebook::r_max_cap));

    auto scen = [](C& c) -> ScenarioConfig& { return c.scenario; };
    b.push_back({"scenario.k",
                 [](const C& c) { return std::to_string(c.scenario.num_users); },
                 [scen](C& c, const std::string& v) {
                   scen(c).num_users = static_cast<int>(parse_long("scenario.k", v));
                 }});
    b.push_back({"scenario.cluster_diameter",
                 [](const C& c) { return format_double(c.scenario.cluster_diameter); },
                 [](C& c, const std::string& v) {
                   c.scenario.cluster_diameter = parse_double("scenario.cluster_diameter", v);
                 }});
    b.push_back({"scenario.r_min",
                 [](const C& c) { return format_double(c.scenario.range_min); },
                 [](C& c, const std::string& v) {
                   c.scenario.range_min = parse_double("scenario.r_min", v);
                 }});
    b.push_back({"scenario.r_max",
                 [](const C& c) { return format_double(c.scenario.range_max); },
                 [](C& c, const std::string& v) {
                   c.scenario.range_max = parse_double("scenario.r_max", v);
                 }});
    b.push_back({"scenario.l",
                 [](const C& c) { return std::to_string(c.scenario.num_paths); },
                 [](C& c, const std::string& v) {
                   c.scenario.num_paths = static_cast<int>(parse_long("scenario.l", v));
                 }});
    b.push_back({"scenario.nlos_deficit_db",
                 [](const C& c) { return format_double(c.scenario.nlos_deficit_db); },
                 [](C& c, const std::string& v) {
                   c.scenario.nlos_deficit_db = parse_double("scenario.nlos_deficit_db", v);
                 }});
    b.push_back({"scenario.scatterer_pool",
                 [](const C& c) { return std::to_string(c.scenario.scatterer_pool); },
                 [](C& c, const std::string& v) {
                   c.scenario.scatterer_pool = static_cast<int>(parse_long("scenario.scatterer_pool", v));
                 }});
    auto bind_vec3 = [&b](const std::string& key, Vec3 ScenarioConfig::* field, double Vec3::* axis) {
      b.push_back({key,
                   [field, axis](const C& c) { return format_double(c.scenario.*field.*axis); },
                   [field, axis, key](C& c, const std::string& v) {
                     c.scenario.*field.*axis = parse_double(key, v);
                   }});
    };
    bind_vec3("scenario.bounds_x", &ScenarioConfig::bounds, &Vec3::x);
    bind_vec3("scenario.bounds_y", &ScenarioConfig::bounds, &Vec3::y);
    bind_vec3("scenario.bounds_z", &ScenarioConfig::bounds, &Vec3::z);
    bind_vec3("scenario.bs_x", &ScenarioConfig::bs_position, &Vec3::x);
    bind_vec3("scenario.bs_y", &ScenarioConfig::bs_position, &Vec3::y);
    bind_vec3("scenario.bs_z", &ScenarioConfig::bs_position, &Vec3::z);

    b.push_back(bind_double("power.p_ul_dbm", &C::power, &C::Power::p_ul_dbm));
    b.push_back(bind_double("power.p_dl_dbm", &C::power, &C::Power::p_dl_dbm));
    b.push_back(bind_double("power.noise_ul_dbm", &C::power, &C::Power::noise_ul_dbm));
    b.push_back(bind_double("power.noise_dl_dbm", &C::power, &C::Power::noise_dl_dbm));

    b.push_back(bind_double("timing.symbol_time", &C::timing, &C::Timing::symbol_time));
    b.push_back(bind_double("timing.frame_time", &C::timing, &C::Timing::frame_time));

    b.push_back(bind_int("train.samples", &C::train, &C::Training::samples));
    auto bind_sched_d = [&b](const std::string& key, double TrainSchedule::* field) {
      b.push_back({key,
                   [field](const C& c) { return format_double(c.train.schedule.*field); },
                   [field, key](C& c, const std::string& v) {
                     c.train.schedule.*field = parse_double(key, v);
                   }});
    };
    auto bind_sched_i = [&b](const std::string& key, int TrainSchedule::* field) {
      b.push_back({key,
                   [field](const C& c) { return std::to_string(c.train.schedule.*field); },
                   [field, key](C& c, const std::string& v) {
                     c.train.schedule.*field = static_cast<int>(parse_long(key, v));
                   }});
    };
    bind_sched_d("train.initial_lr", &TrainSchedule::initial_lr);
    bind_sched_i("train.epochs", &TrainSchedule::epochs);
    bind_sched_i("train.batch_size", &TrainSchedule::batch_size);
    bind_sched_i("train.plateau_epochs", &TrainSchedule::plateau_epochs);
    bind_sched_d("train.lr_decay_factor", &TrainSchedule::lr_decay_factor);
    bind_sched_d("train.improve_threshold", &TrainSchedule::improve_threshold);
    bind_sched_d("train.adam_beta1", &TrainSchedule::adam_beta1);
    bind_sched_d("train.adam_beta2", &TrainSchedule::adam_beta2);
    bind_sched_d("train.adam_eps", &TrainSchedule::adam_eps);
    bind_sched_d("train.validation_fraction", &TrainSchedule::validation_fraction);
    b.push_back(bind_int("train.feature_dim", &C::train, &C::Training::feature_dim));
    b.push_back(bind_int("train.num_layers", &C::train, &C::Training::num_layers));
    b.push_back({"train.randomize_p_ul",
                 [](const C& c) { return c.train.randomize_p_ul ? std::string("true") : std::string("false"); },
                 [](C& c, const std::string& v) {
                   c.train.randomize_p_ul = parse_bool("train.randomize_p_ul", v);
                 }});
    b.push_back(bind_double("train.p_ul_min_dbm", &C::train, &C::Training::p_ul_min_dbm));
    b.push_back(bind_double("train.p_ul_max_dbm", &C::train, &C::Training::p_ul_max_dbm));

    b.push_back(bind_int("eval.scenarios", &C::eval, &C::Eval::scenarios));
    b.push_back({"eval.p_ul_sweep_dbm",
                 [](const C& c) {
                   std::string out;
                   for (double v : c.eval.p_ul_sweep_dbm)
                     out += (out.empty() ? "" : ",") + format_double(v);
                   return out;
                 },
                 [](C& c, const std::string& v) {
                   c.eval.p_ul_sweep_dbm.clear();
                   for (const std::string& item : split_list(v))
                     c.eval.p_ul_sweep_dbm.push_back(parse_double("eval.p_ul_sweep_dbm", item));
                 }});
    b.push_back({"eval.p_dl_sweep_dbm",
                 [](const C& c) {
                   std::string out;
                   for (double v : c.eval.p_dl_sweep_dbm)
                     out += (out.empty() ? "" : ",") + format_double(v);
                   return out;
                 },
                 [](C& c, const std::string& v) {
                   c.eval.p_dl_sweep_dbm.clear();
                   for (const std::string& item : split_list(v))
                     c.eval.p_dl_sweep_dbm.push_back(parse_double("eval.p_dl_sweep_dbm", item));
                 }});
    b.push_back({"eval.k_sweep",
                 [](const C& c) {
                   std::string out;
                   for (int v : c.eval.k_sweep) out += (out.empty() ? "" : ",") + std::to_string(v);
                   return out;
                 },
                 [](C& c, const std::string& v) {
                   c.eval.k_sweep.clear();
                   for (const std::string& item : split_list(v))
                     c.eval.k_sweep.push_back(static_cast<int>(parse_long("eval.k_sweep", item)));
                 }});
    b.push_back({"eval.schemes",
                 [](const C& c) {
                   std::string out;
                   for (const std::string& v : c.eval.schemes) out += (out.empty() ? "" : ",") + v;
                   return out;
                 },
                 [](C& c, const std::string& v) { c.eval.schemes = split_list(v); }});
    b.push_back({"eval.count_phase3_for_exhaustive",
                 [](const C& c) {
                   return c.eval.count_phase3_for_exhaustive ? std::string("true")
                                                             : std::string("false");
                 },
                 [](C& c, const std::string& v) {
                   c.eval.count_phase3_for_exhaustive =
                       parse_bool("eval.count_phase3_for_exhaustive", v);
                 }});
    b.push_back(bind_int("eval.pilot_n_rf", &C::eval, &C::Eval::pilot_n_rf));

    b.push_back({"seed",
                 [](const C& c) { return std::to_string(c.seed); },
                 [](C& c, const std::string& v) {
                   c.seed = static_cast<std::uint64_t>(parse_long("seed", v));
                 }});
    return b;
  }();
  return table;
}

}  // namespace

void ExperimentConfig::validate() const {
  make_geometry();  // validates geometry
  if (codebook.beams_per_wide < 1 || geometry.n_bs % codebook.beams_per_wide != 0)
    throw ConfigError("config: N_BS must be divisible by codebook.beams_per_wide");
  if (codebook.rings < 1) throw ConfigError("config: codebook.rings must be >= 1");
  if (!(codebook.r_min > 0.0) || !(codebook.r_min < r_max_effective()))
    throw ConfigError("config: need 0 < codebook.r_min < effective r_max");
  scenario.validate();
  const int wide_beams = geometry.n_bs / codebook.beams_per_wide;
  if (wide_beams % resolved_n_rf() != 0)
    throw ConfigError("config: wide beam count must be divisible by the RF chain count");
  if (train.samples < 1) throw ConfigError("config: train.samples must be >= 1");
  if (train.feature_dim < 1 || train.num_layers < 1)
    throw ConfigError("config: network dimensions must be positive");
  train.schedule.validate();
  if (eval.scenarios < 1) throw ConfigError("config: eval.scenarios must be >= 1");
  for (const std::string& s : eval.schemes) {
    const auto sep = s.rfind('_');
    if (sep == std::string::npos) throw ConfigError("config: scheme id needs a precoder suffix: " + s);
    scheme_from_string(s.substr(0, sep));
    const std::string precoder = s.substr(sep + 1);
    if (precoder != "zf" && precoder != "mmse")
      throw ConfigError("config: unknown precoder variant in scheme " + s);
  }
}

ArrayGeometry ExperimentConfig::make_geometry() const {
  return ArrayGeometry::from_frequency(geometry.n_bs, geometry.carrier_freq_hz,
                                       geometry.spacing_wavelengths);
}

double ExperimentConfig::r_max_effective() const {
  return std::min(codebook.r_max_cap, rayleigh_distance(make_geometry()));
}

int ExperimentConfig::resolved_n_rf() const {
  return eval.pilot_n_rf > 0 ? eval.pilot_n_rf : scenario.num_users;
}

PilotConfig ExperimentConfig::make_pilot(double p_ul_dbm) const {
  PilotConfig cfg;
  cfg.power_ul = dbm_to_watts(p_ul_dbm);
  cfg.noise_ul = dbm_to_watts(power.noise_ul_dbm);
  cfg.num_rf_chains = resolved_n_rf();
  cfg.symbol_time = timing.symbol_time;
  return cfg;
}

NetDims ExperimentConfig::make_net_dims() const {
  NetDims dims;
  dims.input_dim = 2 * geometry.n_bs / codebook.beams_per_wide;
  dims.feature_dim = train.feature_dim;
  dims.num_layers = train.num_layers;
  dims.num_angles = geometry.n_bs;
  dims.num_rings = codebook.rings;
  return dims;
}

ExperimentConfig config_profile(const std::string& name) {
  ExperimentConfig cfg;  // defaults are the paper profile
  if (name == "paper") return cfg;
  if (name == "desk") {
    cfg.geometry.n_bs = 64;
    cfg.scenario.num_users = 4;
    cfg.scenario.num_paths = 2;
    cfg.scenario.range_min = 3.0;
    cfg.scenario.range_max = 18.0;
    cfg.train.samples = 2000;
    cfg.train.schedule.batch_size = 100;
    cfg.eval.k_sweep = {4};
    return cfg;
  }
  throw ConfigError("unknown profile: " + name);
}

ExperimentConfig parse_config_text(const std::string& text, const ExperimentConfig& base) {
  ExperimentConfig cfg = base;
  std::istringstream in(text);
  std::string line;
  bool saw_setting = false;
  while (std::getline(in, line)) {
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    line = line.substr(begin, end - begin + 1);

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config: expected 'key = value': " + line);
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t");
      return s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "profile") {
      if (saw_setting) throw ConfigError("config: 'profile' must come before other keys");
      cfg = config_profile(value);
      continue;
    }
    apply_config_override(cfg, key, value);
    saw_setting = true;
  }
  return cfg;
}

void apply_config_override(ExperimentConfig& cfg, const std::string& key,
                           const std::string& value) {
  for (const Binding& b : bindings()) {
    if (b.key == key) {
      b.set(cfg, value);
      return;
    }
  }
  throw ConfigError("config: unknown key '" + key + "'");
}

std::string serialize_config(const ExperimentConfig& cfg) {
  std::string out;
  for (const Binding& b : bindings()) {
    out += b.key;
    out += " = ";
    out += b.get(cfg);
    out += '\n';
  }
  return out;
}

ExperimentConfig load_config_file(const std::string& path, const ExperimentConfig& base) {
  return parse_config_text(read_file(path), base);
}

}  // namespace nfbt
