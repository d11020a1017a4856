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

#ifndef EMTTS_CONFIG_HPP_
#define EMTTS_CONFIG_HPP_

#include <map>
#include <string>

#include "emtts/augment.hpp"
#include "emtts/dsp.hpp"
#include "emtts/ssrn.hpp"
#include "emtts/synth.hpp"
#include "emtts/t2s.hpp"

namespace emtts {

// Everything a run needs, merged from defaults, an optional `key = value`
// config file, and command-line overrides. Unknown keys are rejected.
struct RunConfig {
  DspConfig dsp;

  int embed_dim = 128;
  int hidden_dim = 256;
  int ssrn_channels = 512;
  real dropout_rate = 0.05;
  real init_stddev = 0.02;

  // 0 means "module default": 2e-4 for t2s, 2e-5 for ssrn.
  real learning_rate = 0.0;
  real adam_beta1 = 0.5;
  real adam_beta2 = 0.9;
  real adam_eps = 1e-6;
  int batch_size = 8;
  int64_t max_steps = 20000;
  int64_t checkpoint_every = 2000;
  uint64_t seed = 42;
  int crop_t = 64;
  bool guided_attention = true;
  bool deterministic = false;
  bool augment_on_the_fly = false;

  AugmentPolicy augment;
  SynthOptions synth;

  real lr_for(const std::string& module) const {
    if (learning_rate > 0) return learning_rate;
    return module == "ssrn" ? 2e-5 : 2e-4;
  }
  T2SConfig t2s_config() const;
  SsrnConfig ssrn_config() const;

  void validate() const;
};

// Every documented config key, sorted.
std::vector<std::string> config_keys();

// key = value text, '#' comments, blank lines ignored.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::string& path);

// Applies entries onto a RunConfig; throws on unknown keys or bad values.
void apply_config_entries(RunConfig& cfg, const std::map<std::string, std::string>& entries);

// Full effective snapshot (every documented key), sorted by key.
std::map<std::string, std::string> config_snapshot(const RunConfig& cfg);
RunConfig config_from_snapshot(const std::map<std::string, std::string>& snapshot);

// Writes the snapshot as `key = value` lines into dir/config.echo.
void echo_config(const std::string& dir, const RunConfig& cfg);

}  // namespace emtts

#endif  // EMTTS_CONFIG_HPP_
