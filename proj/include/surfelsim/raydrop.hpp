// Copyright 2026 The surfelsim authors
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

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "surfelsim/polar_grid.hpp"

namespace surfelsim {

// Per-cell keep/drop probability models. A cell is a candidate only where
// the simulated occupancy is 1; everything else predicts 0.
enum class RaydropKind {
  kConstant,          // one keep probability everywhere
  kLogistic,          // logistic regression on the cell's own features
  kWindowedLogistic,  // logistic regression on a square cell neighbourhood
  kPlugin,            // probabilities read from a grid file
};

struct FeatureSpec {
  std::vector<std::int32_t> channels;  // feature-grid channels, in order
  std::int32_t window = 0;             // neighbourhood half-width

  std::int32_t dim() const {
    const std::int32_t w = 2 * window + 1;
    return static_cast<std::int32_t>(channels.size()) * w * w;
  }

  static FeatureSpec all_channels(std::int32_t window);
};

// Per-channel standardisation, estimated on the training cells and applied
// to every window offset of the channel.
struct Normalization {
  std::vector<double> mean;
  std::vector<double> stddev;
};

struct RaydropModel {
  RaydropKind kind = RaydropKind::kWindowedLogistic;
  FeatureSpec feature_spec;
  Normalization normalization;
  // Logistic kinds: dim() weights then the bias. Constant: the single keep
  // probability. Plugin: empty.
  std::vector<double> parameters;
  std::string plugin_path;
  double final_loss = 0.0;
};

struct TrainPair {
  const Grid* sim = nullptr;             // feature grid from project()
  const Grid* real_occupancy = nullptr;  // single channel, same shape
};

struct TrainConfig {
  RaydropKind kind = RaydropKind::kWindowedLogistic;
  std::int32_t window = 2;
  std::vector<std::int32_t> channels;  // empty selects all eight
  double step_size = 1e-4;
  std::int32_t epochs = 100;
  std::int32_t batch_cells = 8192;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
};

// Feature vector of one cell: channel-major over window offsets, columns
// wrapping around the azimuth seam, rows zero-padded past the edges.
void extract_cell_features(const Grid& grid, const FeatureSpec& spec,
                           const Normalization* normalization,
                           std::int32_t row, std::int32_t col,
                           std::span<float> out);

// Dense feature matrix for every cell, row-major cells by dim().
std::vector<float> extract_features(const Grid& grid, const FeatureSpec& spec,
                                    const Normalization* normalization);

// Mean binary cross-entropy of the keep labels over sim-occupied cells; the
// gradient (when non-empty, sized params.size()) is with respect to the
// logistic parameters. The model supplies the feature spec and
// normalization; `params` overrides its parameter vector.
double bce_loss_and_grad(const RaydropModel& model,
                         std::span<const TrainPair> pairs,
                         std::span<const double> params,
                         std::span<double> grad);

// Convenience wrapper evaluating the model's own parameters.
double bce_loss(const RaydropModel& model, std::span<const TrainPair> pairs);

// Fits the keep classifier on the paired grids. Labels are the real
// occupancy at sim-occupied cells. Deterministic for a fixed config: batch
// order is a seeded shuffle and accumulation order is fixed, so the same
// inputs produce an identical model byte for byte. Appends the per-epoch
// mean loss to loss_log when given.
RaydropModel train(std::span<const TrainPair> pairs, const TrainConfig& config,
                   std::vector<double>* loss_log = nullptr);

// Keep probability per cell; 0 wherever sim occupancy is 0.
Grid predict(const RaydropModel& model, const Grid& feature_grid);

// Bernoulli keep mask: cell (r, c) keeps iff u01(seed, r, c) < p. Pure
// function of (seed, cell), so thread counts cannot change the draw.
Grid sample_mask(const Grid& probabilities, std::uint64_t seed);

}  // namespace surfelsim
