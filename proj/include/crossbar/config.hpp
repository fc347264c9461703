// Copyright 2026 The crossbar Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "crossbar/analog_tile.hpp"
#include "crossbar/cost_model.hpp"

namespace crossbar {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Line-oriented `key = value` settings with dotted keys, e.g.
/// `io.adc_bits = 9`. '#' starts a comment. Later assignments win.
class Config {
 public:
  static Config parse(std::istream& in);
  static Config load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::optional<std::string> get_string(const std::string& key) const;
  std::optional<double> get_double(const std::string& key) const;
  std::optional<long long> get_int(const std::string& key) const;
  std::optional<bool> get_bool(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

/// Overlay `device.*`, `io.*`, `pulses.*`, `profile.*` and `digital.*` keys
/// onto existing values. Resolutions accept "inf" for infinite.
void apply_config(const Config& cfg, DeviceParams& device);
void apply_config(const Config& cfg, IOParams& io);
void apply_config(const Config& cfg, PulseConfig& pulses);
void apply_config(const Config& cfg, HardwareProfile& profile);
void apply_config(const Config& cfg, DigitalProfile& digital);

/// Preset named by `profile.preset` (low, mid, high; default low) with
/// individual `profile.*` keys applied on top.
HardwareProfile hardware_profile_from(const Config& cfg);

/// Keys in `cfg` that no apply_config overload or caller-listed prefix uses.
std::vector<std::string> unknown_keys(const Config& cfg, const std::vector<std::string>& extra_prefixes = {});

}  // namespace crossbar
