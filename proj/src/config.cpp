// Copyright (c) 2026 The emtts Authors
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

#include "emtts/config.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

namespace emtts {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int64_t to_int(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const int64_t x = std::stoll(v, &pos);
    EMTTS_CHECK(pos == v.size(), "");
    return x;
  } catch (...) {
    throw Error("config key '" + key + "': expected integer, got '" + v + "'");
  }
}

real to_real(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    const real x = std::stod(v, &pos);
    EMTTS_CHECK(pos == v.size(), "");
    return x;
  } catch (...) {
    throw Error("config key '" + key + "': expected number, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error("config key '" + key + "': expected boolean, got '" + v + "'");
}

std::vector<real> to_real_list(const std::string& key, const std::string& v) {
  std::vector<real> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_real(key, item));
  }
  EMTTS_CHECK(!out.empty(), "config key '" << key << "': empty list");
  return out;
}

std::string fmt_real(real v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// One table drives parsing, snapshots and the documented key set.
struct KeyHandler {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::map<std::string, KeyHandler>& key_table() {
  static const std::map<std::string, KeyHandler> table = [] {
    std::map<std::string, KeyHandler> t;
    auto add_int = [&](const std::string& key, auto member) {
      t[key] = {[member](RunConfig& c, const std::string& k, const std::string& v) {
                  c.*member = static_cast<std::decay_t<decltype(std::declval<RunConfig>().*member)>>(to_int(k, v));
                },
                [member](const RunConfig& c) { return std::to_string(c.*member); }};
    };
    auto add_real = [&](const std::string& key, auto member) {
      t[key] = {[member](RunConfig& c, const std::string& k, const std::string& v) {
                  c.*member = to_real(k, v);
                },
                [member](const RunConfig& c) { return fmt_real(c.*member); }};
    };
    auto add_bool = [&](const std::string& key, auto member) {
      t[key] = {[member](RunConfig& c, const std::string& k, const std::string& v) {
                  c.*member = to_bool(k, v);
                },
                [member](const RunConfig& c) { return (c.*member) ? "true" : "false"; }};
    };

    // dsp
    t["n_fft"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                    c.dsp.n_fft = static_cast<int>(to_int(k, v));
                    c.dsp.win = c.dsp.n_fft;
                  },
                  [](const RunConfig& c) { return std::to_string(c.dsp.n_fft); }};
    t["hop"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                  c.dsp.hop = static_cast<int>(to_int(k, v));
                },
                [](const RunConfig& c) { return std::to_string(c.dsp.hop); }};
    t["n_mels"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                     c.dsp.n_mels = static_cast<int>(to_int(k, v));
                   },
                   [](const RunConfig& c) { return std::to_string(c.dsp.n_mels); }};
    t["reduction"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                        c.dsp.reduction = static_cast<int>(to_int(k, v));
                      },
                      [](const RunConfig& c) { return std::to_string(c.dsp.reduction); }};
    t["ref_db"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                     c.dsp.ref_db = to_real(k, v);
                   },
                   [](const RunConfig& c) { return fmt_real(c.dsp.ref_db); }};
    t["max_db"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                     c.dsp.max_db = to_real(k, v);
                   },
                   [](const RunConfig& c) { return fmt_real(c.dsp.max_db); }};
    t["preemphasis"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                          c.dsp.preemphasis = to_real(k, v);
                        },
                        [](const RunConfig& c) { return fmt_real(c.dsp.preemphasis); }};
    t["gl_iterations"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                            c.dsp.gl_iterations = static_cast<int>(to_int(k, v));
                          },
                          [](const RunConfig& c) { return std::to_string(c.dsp.gl_iterations); }};
    t["sharpening_power"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                               c.dsp.sharpening_power = to_real(k, v);
                             },
                             [](const RunConfig& c) { return fmt_real(c.dsp.sharpening_power); }};
    t["ssrn_output"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                          if (v == "linear")
                            c.dsp.ssrn_output_mel = false;
                          else if (v == "mel")
                            c.dsp.ssrn_output_mel = true;
                          else
                            throw Error("config key '" + k + "': expected linear|mel, got '" + v + "'");
                        },
                        [](const RunConfig& c) {
                          return c.dsp.ssrn_output_mel ? std::string("mel") : std::string("linear");
                        }};

    // model dims
    add_int("embed_dim", &RunConfig::embed_dim);
    add_int("hidden_dim", &RunConfig::hidden_dim);
    add_int("ssrn_channels", &RunConfig::ssrn_channels);
    add_real("dropout_rate", &RunConfig::dropout_rate);
    add_real("init_stddev", &RunConfig::init_stddev);

    // train
    add_real("learning_rate", &RunConfig::learning_rate);
    add_real("adam_beta1", &RunConfig::adam_beta1);
    add_real("adam_beta2", &RunConfig::adam_beta2);
    add_real("adam_eps", &RunConfig::adam_eps);
    add_int("batch_size", &RunConfig::batch_size);
    add_int("max_steps", &RunConfig::max_steps);
    add_int("checkpoint_every", &RunConfig::checkpoint_every);
    add_int("seed", &RunConfig::seed);
    add_int("crop_t", &RunConfig::crop_t);
    add_bool("guided_attention", &RunConfig::guided_attention);
    add_bool("deterministic", &RunConfig::deterministic);
    add_bool("augment_on_the_fly", &RunConfig::augment_on_the_fly);

    // augment policy
    t["warp_w"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                     c.augment.warp_w = static_cast<int>(to_int(k, v));
                   },
                   [](const RunConfig& c) { return std::to_string(c.augment.warp_w); }};
    t["mask_f"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                     c.augment.mask_f = static_cast<int>(to_int(k, v));
                   },
                   [](const RunConfig& c) { return std::to_string(c.augment.mask_f); }};
    t["mask_t"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                     c.augment.mask_t = static_cast<int>(to_int(k, v));
                   },
                   [](const RunConfig& c) { return std::to_string(c.augment.mask_t); }};
    t["n_freq_masks"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                           c.augment.n_freq_masks = static_cast<int>(to_int(k, v));
                         },
                         [](const RunConfig& c) { return std::to_string(c.augment.n_freq_masks); }};
    t["n_time_masks"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                           c.augment.n_time_masks = static_cast<int>(to_int(k, v));
                         },
                         [](const RunConfig& c) { return std::to_string(c.augment.n_time_masks); }};
    t["resize_ratios"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                            c.augment.resize_ratios = to_real_list(k, v);
                          },
                          [](const RunConfig& c) {
                            std::string s;
                            for (size_t i = 0; i < c.augment.resize_ratios.size(); ++i) {
                              if (i) s += ",";
                              s += fmt_real(c.augment.resize_ratios[i]);
                            }
                            return s;
                          }};
    t["expansion_factor"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                               c.augment.expansion_factor = static_cast<int>(to_int(k, v));
                             },
                             [](const RunConfig& c) {
                               return std::to_string(c.augment.expansion_factor);
                             }};

    // synth
    t["max_frames"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                         c.synth.max_frames = static_cast<int>(to_int(k, v));
                       },
                       [](const RunConfig& c) { return std::to_string(c.synth.max_frames); }};
    t["forced_attention"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                               c.synth.forced_attention = to_bool(k, v);
                             },
                             [](const RunConfig& c) {
                               return c.synth.forced_attention ? "true" : "false";
                             }};
    t["force_back"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                         c.synth.force_back = static_cast<int>(to_int(k, v));
                       },
                       [](const RunConfig& c) { return std::to_string(c.synth.force_back); }};
    t["force_forward"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                            c.synth.force_forward = static_cast<int>(to_int(k, v));
                          },
                          [](const RunConfig& c) { return std::to_string(c.synth.force_forward); }};
    t["stop_dwell"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                         c.synth.stop_dwell = static_cast<int>(to_int(k, v));
                       },
                       [](const RunConfig& c) { return std::to_string(c.synth.stop_dwell); }};
    t["incremental_decode"] = {[](RunConfig& c, const std::string& k, const std::string& v) {
                                 c.synth.incremental = to_bool(k, v);
                               },
                               [](const RunConfig& c) {
                                 return c.synth.incremental ? "true" : "false";
                               }};
    return t;
  }();
  return table;
}

}  // namespace

T2SConfig RunConfig::t2s_config() const {
  T2SConfig c;
  c.e = embed_dim;
  c.d = hidden_dim;
  c.mel_bins = dsp.n_mels;
  c.dropout_rate = dropout_rate;
  c.init_stddev = init_stddev;
  return c;
}

SsrnConfig RunConfig::ssrn_config() const {
  SsrnConfig c;
  c.c = ssrn_channels;
  c.in_bins = dsp.n_mels;
  c.out_bins = dsp.ssrn_out_bins();
  c.dropout_rate = dropout_rate;
  c.init_stddev = init_stddev;
  return c;
}

void RunConfig::validate() const {
  dsp.validate();
  t2s_config().validate();
  ssrn_config().validate();
  augment.validate(dsp.n_mels);
  synth.validate();
  EMTTS_CHECK(batch_size >= 1, "batch_size must be >= 1");
  EMTTS_CHECK(max_steps >= 1, "max_steps must be >= 1");
  EMTTS_CHECK(checkpoint_every >= 1, "checkpoint_every must be >= 1");
  EMTTS_CHECK(crop_t >= 4 && crop_t % dsp.reduction == 0,
              "crop_t must be a positive multiple of the reduction factor");
  EMTTS_CHECK(adam_beta1 > 0 && adam_beta1 < 1 && adam_beta2 > 0 && adam_beta2 < 1,
              "adam betas must be in (0,1)");
  EMTTS_CHECK(adam_eps > 0 && learning_rate >= 0, "bad optimizer constants");
  EMTTS_CHECK(dropout_rate >= 0 && dropout_rate < 1, "dropout_rate must be in [0,1)");
  EMTTS_CHECK(init_stddev > 0, "init_stddev must be positive");
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, handler] : key_table()) keys.push_back(key);
  return keys;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> entries;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    EMTTS_CHECK(eq != std::string::npos,
                "config line " << lineno << ": expected 'key = value', got '" << line << "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    EMTTS_CHECK(!key.empty(), "config line " << lineno << ": empty key");
    entries[key] = val;
  }
  return entries;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
  std::ifstream in(path);
  EMTTS_CHECK(in.good(), "cannot open config file: " << path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_config_text(text);
}

void apply_config_entries(RunConfig& cfg, const std::map<std::string, std::string>& entries) {
  const auto& table = key_table();
  for (const auto& [key, value] : entries) {
    auto it = table.find(key);
    EMTTS_CHECK(it != table.end(), "unknown config key: '" << key << "'");
    it->second.set(cfg, key, value);
  }
}

std::map<std::string, std::string> config_snapshot(const RunConfig& cfg) {
  std::map<std::string, std::string> snap;
  for (const auto& [key, handler] : key_table()) snap[key] = handler.get(cfg);
  return snap;
}

RunConfig config_from_snapshot(const std::map<std::string, std::string>& snapshot) {
  RunConfig cfg;
  apply_config_entries(cfg, snapshot);
  return cfg;
}

void echo_config(const std::string& dir, const RunConfig& cfg) {
  std::filesystem::create_directories(dir);
  std::ofstream out(std::filesystem::path(dir) / "config.echo");
  EMTTS_CHECK(out.good(), "cannot write config echo in " << dir);
  for (const auto& [key, value] : config_snapshot(cfg)) out << key << " = " << value << "\n";
}

}  // namespace emtts
