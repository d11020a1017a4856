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

#ifndef EMTTS_CHECKPOINT_HPP_
#define EMTTS_CHECKPOINT_HPP_

#include <map>
#include <string>
#include <vector>

#include "emtts/adam.hpp"
#include "emtts/tape.hpp"

namespace emtts {

// "EMTT" checkpoint: magic, version, module tag, step, config snapshot,
// vocabulary code points, named f64 parameter tensors, Adam state, and a
// trailing FNV-1a checksum over the payload. Everything little-endian.
// save -> load -> save is byte-identical.
struct LoadedCheckpoint {
  std::string module;
  uint64_t step = 0;
  std::map<std::string, std::string> config;
  std::vector<uint32_t> vocab;  // code points beyond PAD/EOS; empty for ssrn
  std::vector<std::pair<std::string, Tensor>> params;
  AdamState adam;
};

void save_checkpoint(const std::string& path, const std::string& module, uint64_t step,
                     const ModelParams& params, const AdamState& adam,
                     const std::map<std::string, std::string>& config,
                     const std::vector<uint32_t>& vocab);

LoadedCheckpoint load_checkpoint(const std::string& path);

// Copies loaded tensors into an existing parameter collection (names and
// shapes must match exactly) and optionally restores the Adam state.
void apply_checkpoint(const LoadedCheckpoint& ck, ModelParams& params, AdamState* adam);

}  // namespace emtts

#endif  // EMTTS_CHECKPOINT_HPP_
