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

#ifndef EMTTS_NN_HPP_
#define EMTTS_NN_HPP_

#include <string>
#include <vector>

#include "emtts/tape.hpp"

namespace emtts {

enum class Act { kNone, kRelu, kSigmoid };

// One layer of a convolutional stack. The same description drives parameter
// creation, the tape forward pass, and the incremental frame-by-frame
// runner used at synthesis time, so the three can never drift apart.
struct LayerDesc {
  enum class Kind { kConv, kHighway, kDeconv } kind = Kind::kConv;
  std::string name;
  int in_ch = 0;
  int out_ch = 0;  // Highway: equals in_ch
  int k = 1;
  int dilation = 1;
  bool causal = false;
  Act act = Act::kNone;   // applied after Conv/Deconv; Highway has its gate
  bool dropout = true;    // dropout after this layer when training
};

LayerDesc conv_layer(const std::string& name, int in_ch, int out_ch, int k, int dilation,
                     bool causal, Act act, bool dropout = true);
LayerDesc highway_layer(const std::string& name, int ch, int k, int dilation, bool causal);
LayerDesc deconv_layer(const std::string& name, int in_ch, int out_ch);

// Dropout control for one forward build. Masks are a pure function of
// (seed, step, layer counter), so a training trajectory is reproducible
// and independent of evaluation order.
struct DropoutCtx {
  bool enabled = false;
  real rate = 0.05;
  uint64_t seed = 0;
  uint64_t step = 0;
  int counter = 0;
};

// Creates weight/bias parameters for every layer under `prefix`. Weights
// are Gaussian(0, init_stddev^2) with per-parameter seeds derived from
// (seed, name); biases start at zero.
void create_stack_params(ModelParams& mp, const std::string& prefix,
                         const std::vector<LayerDesc>& stack, real init_stddev,
                         uint64_t seed);

// Binds parameters to tape leaves, one leaf per parameter per tape, so a
// batch of utterance subgraphs shares leaves and gradients accumulate once.
class ParamBinder {
 public:
  explicit ParamBinder(Tape& t) : tape_(&t) {}
  Var operator()(Parameter& p);

 private:
  Tape* tape_;
  std::unordered_map<const Parameter*, Var> cache_;
};

// Records the stack's forward pass on the tape.
Var run_stack(Tape& t, ParamBinder& bind, ModelParams& mp, const std::string& prefix,
              const std::vector<LayerDesc>& stack, Var x, DropoutCtx* dropout = nullptr);

// Per-frame evaluator for causal stacks. Feeding frames one at a time
// produces exactly the frames a full-prefix evaluation would produce
// (causality makes the prefix a valid oracle); each layer keeps a ring of
// just enough input history for its receptive field.
class IncrementalStackRunner {
 public:
  IncrementalStackRunner(const ModelParams& mp, const std::string& prefix,
                         const std::vector<LayerDesc>& stack);

  // Consumes one input frame, returns the corresponding output frame.
  std::vector<real> step(const std::vector<real>& frame);
  void reset();

 private:
  struct LayerState {
    const LayerDesc* desc;
    const Tensor* w;
    const Tensor* b;
    std::vector<real> history;  // ring of past input frames, in_ch per slot
    int slots = 0;
    int64_t frames_seen = 0;
  };
  std::vector<LayerState> layers_;
};

}  // namespace emtts

#endif  // EMTTS_NN_HPP_
