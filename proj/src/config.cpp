// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#include "crossbar/config.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <istream>
#include <limits>
#include <string_view>
#include <vector>

namespace crossbar {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) {
      return v;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
}

// Known keys and the scale from config units to the struct's units.
struct ScaledKey {
  std::string_view key;
  double HardwareProfile::*field;
  double unit;
};

constexpr std::array<ScaledKey, 20> kProfileKeys = {{
    {"profile.t_w_us", &HardwareProfile::t_w_us, 1.0},
    {"profile.e_w_uj", &HardwareProfile::e_w_uj, 1.0},
    {"profile.t_i_us", &HardwareProfile::t_i_us, 1.0},
    {"profile.e_i_uj", &HardwareProfile::e_i_uj, 1.0},
    {"profile.t_m_us", &HardwareProfile::t_m_us, 1.0},
    {"profile.e_m_uj", &HardwareProfile::e_m_uj, 1.0},
    {"profile.t_r_us", &HardwareProfile::t_r_us, 1.0},
    {"profile.e_r_uj", &HardwareProfile::e_r_uj, 1.0},
    {"profile.t_o_us", &HardwareProfile::t_o_us, 1.0},
    {"profile.e_o_uj", &HardwareProfile::e_o_uj, 1.0},
    {"profile.t_i_ns", &HardwareProfile::t_i_us, 1e-3},
    {"profile.e_i_nj", &HardwareProfile::e_i_uj, 1e-3},
    {"profile.t_m_ns", &HardwareProfile::t_m_us, 1e-3},
    {"profile.e_m_nj", &HardwareProfile::e_m_uj, 1e-3},
    {"profile.t_r_ns", &HardwareProfile::t_r_us, 1e-3},
    {"profile.e_r_nj", &HardwareProfile::e_r_uj, 1e-3},
    {"profile.t_o_ns", &HardwareProfile::t_o_us, 1e-3},
    {"profile.e_o_nj", &HardwareProfile::e_o_uj, 1e-3},
    {"profile.t_w_ns", &HardwareProfile::t_w_us, 1e-3},
    {"profile.e_w_nj", &HardwareProfile::e_w_uj, 1e-3},
}};

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k = {
        "device.dw_min", "device.asym_std", "device.d2d_std", "device.p2p_std", "device.w_max",
        "device.write_noise_std", "io.input_bits", "io.adc_bits", "io.sigma_out", "io.out_bound_factor",
        "io.noise_management", "io.update_management", "pulses.bl", "pulses.mode", "profile.preset",
        "profile.m_tiles", "profile.n_tile", "digital.bandwidth_bytes_per_us", "digital.energy_per_byte_uj",
        "digital.peak_flops", "digital.precision_bytes", "digital.transport_time_us",
        "digital.transport_energy_uj", "digital.cache_bytes"};
    for (const auto& s : kProfileKeys) {
      k.emplace_back(s.key);
    }
    return k;
  }();
  return keys;
}

std::optional<int> parse_bits(const Config& cfg, const std::string& key, std::optional<int> current) {
  const auto raw = cfg.get_string(key);
  if (!raw) {
    return current;
  }
  const std::string v = lower(*raw);
  if (v == "inf" || v == "infinite" || v == "none") {
    return std::nullopt;
  }
  const auto bits = cfg.get_int(key);
  return static_cast<int>(*bits);
}

void set_if(const Config& cfg, const std::string& key, double& field) {
  if (auto v = cfg.get_double(key)) {
    field = *v;
  }
}

}  // namespace

Config Config::parse(std::istream& in) {
  Config cfg;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(line.substr(0, hash));
    if (body.empty()) {
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
    }
    cfg.set(key, value);
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot read config file " + path.string());
  }
  return parse(in);
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = value; }

bool Config::has(const std::string& key) const { return entries_.contains(key); }

std::optional<std::string> Config::get_string(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::optional<double> Config::get_double(const std::string& key) const {
  const auto raw = get_string(key);
  if (!raw) {
    return std::nullopt;
  }
  const std::string v = lower(*raw);
  if (v == "inf" || v == "infinity") {
    return std::numeric_limits<double>::infinity();
  }
  return parse_double(key, *raw);
}

std::optional<long long> Config::get_int(const std::string& key) const {
  const auto raw = get_string(key);
  if (!raw) {
    return std::nullopt;
  }
  try {
    std::size_t used = 0;
    const long long v = std::stoll(*raw, &used);
    if (used == raw->size()) {
      return v;
    }
  } catch (const std::exception&) {
  }
  throw ConfigError("config key '" + key + "': expected an integer, got '" + *raw + "'");
}

std::optional<bool> Config::get_bool(const std::string& key) const {
  const auto raw = get_string(key);
  if (!raw) {
    return std::nullopt;
  }
  const std::string v = lower(*raw);
  if (v == "true" || v == "1" || v == "yes" || v == "on") {
    return true;
  }
  if (v == "false" || v == "0" || v == "no" || v == "off") {
    return false;
  }
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + *raw + "'");
}

void apply_config(const Config& cfg, DeviceParams& device) {
  set_if(cfg, "device.dw_min", device.dw_min);
  set_if(cfg, "device.asym_std", device.asym_std);
  set_if(cfg, "device.d2d_std", device.d2d_std);
  set_if(cfg, "device.p2p_std", device.p2p_std);
  set_if(cfg, "device.w_max", device.w_max);
  set_if(cfg, "device.write_noise_std", device.write_noise_std);
  device.validate();
}

void apply_config(const Config& cfg, IOParams& io) {
  io.input_bits = parse_bits(cfg, "io.input_bits", io.input_bits);
  io.adc_bits = parse_bits(cfg, "io.adc_bits", io.adc_bits);
  set_if(cfg, "io.sigma_out", io.sigma_out);
  set_if(cfg, "io.out_bound_factor", io.out_bound_factor);
  if (auto v = cfg.get_bool("io.noise_management")) {
    io.noise_management = *v;
  }
  if (auto v = cfg.get_bool("io.update_management")) {
    io.update_management = *v;
  }
  io.validate();
}

void apply_config(const Config& cfg, PulseConfig& pulses) {
  if (auto v = cfg.get_int("pulses.bl")) {
    pulses.bl = static_cast<int>(*v);
  }
  if (auto v = cfg.get_string("pulses.mode")) {
    const std::string mode = lower(*v);
    if (mode == "stochastic") {
      pulses.mode = UpdateMode::Stochastic;
    } else if (mode == "ideal") {
      pulses.mode = UpdateMode::Ideal;
    } else {
      throw ConfigError("config key 'pulses.mode': expected stochastic or ideal, got '" + *v + "'");
    }
  }
  pulses.validate();
}

void apply_config(const Config& cfg, HardwareProfile& profile) {
  if (auto v = cfg.get_int("profile.m_tiles")) {
    profile.m_tiles = static_cast<std::size_t>(*v);
  }
  if (auto v = cfg.get_int("profile.n_tile")) {
    profile.n_tile = static_cast<std::size_t>(*v);
  }
  for (const auto& k : kProfileKeys) {
    if (auto v = cfg.get_double(std::string(k.key))) {
      profile.*(k.field) = *v * k.unit;
    }
  }
  profile.validate();
}

void apply_config(const Config& cfg, DigitalProfile& digital) {
  set_if(cfg, "digital.bandwidth_bytes_per_us", digital.bandwidth_bytes_per_us);
  set_if(cfg, "digital.energy_per_byte_uj", digital.energy_per_byte_uj);
  set_if(cfg, "digital.peak_flops", digital.peak_flops);
  set_if(cfg, "digital.precision_bytes", digital.precision_bytes);
  set_if(cfg, "digital.transport_time_us", digital.transport_time_us);
  set_if(cfg, "digital.transport_energy_uj", digital.transport_energy_uj);
  set_if(cfg, "digital.cache_bytes", digital.cache_bytes);
  digital.validate();
}

HardwareProfile hardware_profile_from(const Config& cfg) {
  const std::string preset = lower(cfg.get_string("profile.preset").value_or("low"));
  HardwareProfile p;
  if (preset == "low") {
    p = HardwareProfile::low_end();
  } else if (preset == "high") {
    p = HardwareProfile::high_end();
  } else if (preset == "mid") {
    p = HardwareProfile::midpoint();
  } else {
    throw ConfigError("config key 'profile.preset': expected low, mid or high, got '" + preset + "'");
  }
  apply_config(cfg, p);
  return p;
}

std::vector<std::string> unknown_keys(const Config& cfg, const std::vector<std::string>& extra_prefixes) {
  std::vector<std::string> unknown;
  const auto& known = known_keys();
  for (const auto& [key, value] : cfg.entries()) {
    if (std::find(known.begin(), known.end(), key) != known.end()) {
      continue;
    }
    const bool prefixed = std::any_of(extra_prefixes.begin(), extra_prefixes.end(),
                                      [&](const std::string& p) { return key.rfind(p, 0) == 0; });
    if (!prefixed) {
      unknown.push_back(key);
    }
  }
  return unknown;
}

}  // namespace crossbar
