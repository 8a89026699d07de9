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

#include "surfelsim/raydrop.hpp"

#include <algorithm>
#include <cmath>

#include "surfelsim/errors.hpp"
#include "surfelsim/io.hpp"
#include "surfelsim/rng.hpp"

namespace surfelsim {

namespace {

struct TrainCell {
  std::int32_t pair;
  std::int32_t row;
  std::int32_t col;
  float label;
};

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// Numerically stable BCE from the logit: max(z,0) - z*y + log(1+e^-|z|).
double bce_from_logit(double z, double y) {
  return std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
}

void validate_pairs(std::span<const TrainPair> pairs) {
  if (pairs.empty()) throw InputError("no training pairs");
  for (const TrainPair& pair : pairs) {
    if (!pair.sim || !pair.real_occupancy)
      throw InputError("training pair is missing a grid");
    if (pair.sim->channels != channel::kCount)
      throw InputError("sim grid must carry the full feature channels");
    if (pair.real_occupancy->channels != 1 ||
        pair.real_occupancy->rows != pair.sim->rows ||
        pair.real_occupancy->cols != pair.sim->cols)
      throw InputError("real occupancy grid does not match the sim grid");
  }
}

std::vector<TrainCell> collect_cells(std::span<const TrainPair> pairs) {
  std::vector<TrainCell> cells;
  for (std::size_t pi = 0; pi < pairs.size(); ++pi) {
    const Grid& sim = *pairs[pi].sim;
    const Grid& real = *pairs[pi].real_occupancy;
    for (std::int32_t r = 0; r < sim.rows; ++r)
      for (std::int32_t c = 0; c < sim.cols; ++c)
        if (sim.at(channel::kOccupancy, r, c) != 0.0f)
          cells.push_back({static_cast<std::int32_t>(pi), r, c,
                           real.at(0, r, c) != 0.0f ? 1.0f : 0.0f});
  }
  if (cells.empty()) throw InputError("no sim-occupied cells to train on");
  return cells;
}

bool is_logistic(RaydropKind kind) {
  return kind == RaydropKind::kLogistic ||
         kind == RaydropKind::kWindowedLogistic;
}

}  // namespace

FeatureSpec FeatureSpec::all_channels(std::int32_t window) {
  FeatureSpec spec;
  spec.window = window;
  for (std::int32_t c = 0; c < channel::kCount; ++c)
    spec.channels.push_back(c);
  return spec;
}

void extract_cell_features(const Grid& grid, const FeatureSpec& spec,
                           const Normalization* normalization,
                           std::int32_t row, std::int32_t col,
                           std::span<float> out) {
  const std::int32_t w = spec.window;
  std::size_t k = 0;
  for (std::size_t ci = 0; ci < spec.channels.size(); ++ci) {
    const std::int32_t ch = spec.channels[ci];
    const double mean = normalization ? normalization->mean[ci] : 0.0;
    const double inv_std =
        normalization ? 1.0 / normalization->stddev[ci] : 1.0;
    for (std::int32_t dr = -w; dr <= w; ++dr) {
      const std::int32_t r = row + dr;
      for (std::int32_t dc = -w; dc <= w; ++dc) {
        // The azimuth is periodic, rows are not.
        std::int32_t c = col + dc;
        if (c < 0) c += grid.cols;
        if (c >= grid.cols) c -= grid.cols;
        const double raw =
            (r >= 0 && r < grid.rows) ? grid.at(ch, r, c) : 0.0;
        out[k++] = static_cast<float>((raw - mean) * inv_std);
      }
    }
  }
}

std::vector<float> extract_features(const Grid& grid, const FeatureSpec& spec,
                                    const Normalization* normalization) {
  for (const std::int32_t ch : spec.channels)
    if (ch < 0 || ch >= grid.channels)
      throw InputError("feature channel outside the grid");
  if (normalization &&
      (normalization->mean.size() != spec.channels.size() ||
       normalization->stddev.size() != spec.channels.size()))
    throw InputError("normalization size does not match the feature spec");

  const std::int32_t dim = spec.dim();
  std::vector<float> features(grid.cell_count() *
                              static_cast<std::size_t>(dim));
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0;
       i < static_cast<std::int64_t>(grid.cell_count()); ++i) {
    const std::int32_t r = static_cast<std::int32_t>(i / grid.cols);
    const std::int32_t c = static_cast<std::int32_t>(i % grid.cols);
    extract_cell_features(grid, spec, normalization, r, c,
                          {features.data() + i * dim,
                           static_cast<std::size_t>(dim)});
  }
  return features;
}

double bce_loss_and_grad(const RaydropModel& model,
                         std::span<const TrainPair> pairs,
                         std::span<const double> params,
                         std::span<double> grad) {
  if (!is_logistic(model.kind))
    throw InputError("loss gradients are defined for the logistic kinds");
  validate_pairs(pairs);
  const std::int32_t dim = model.feature_spec.dim();
  if (static_cast<std::int32_t>(params.size()) != dim + 1)
    throw InputError("parameter vector size does not match the feature spec");
  if (!grad.empty() && grad.size() != params.size())
    throw InputError("gradient buffer size does not match the parameters");

  const std::vector<TrainCell> cells = collect_cells(pairs);
  std::fill(grad.begin(), grad.end(), 0.0);
  std::vector<float> x(dim);

  double loss = 0.0;
  for (const TrainCell& cell : cells) {
    extract_cell_features(*pairs[cell.pair].sim, model.feature_spec,
                          &model.normalization, cell.row, cell.col, x);
    double z = params[dim];
    for (std::int32_t k = 0; k < dim; ++k) z += params[k] * x[k];
    loss += bce_from_logit(z, cell.label);
    if (!grad.empty()) {
      const double g = sigmoid(z) - cell.label;
      for (std::int32_t k = 0; k < dim; ++k) grad[k] += g * x[k];
      grad[dim] += g;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(cells.size());
  for (double& g : grad) g *= inv_n;
  return loss * inv_n;
}

double bce_loss(const RaydropModel& model, std::span<const TrainPair> pairs) {
  if (is_logistic(model.kind))
    return bce_loss_and_grad(model, pairs, model.parameters, {});

  validate_pairs(pairs);
  double loss = 0.0;
  std::size_t count = 0;
  for (const TrainPair& pair : pairs) {
    const Grid probs = predict(model, *pair.sim);
    for (std::int32_t r = 0; r < probs.rows; ++r) {
      for (std::int32_t c = 0; c < probs.cols; ++c) {
        if (pair.sim->at(channel::kOccupancy, r, c) == 0.0f) continue;
        const double p =
            std::clamp<double>(probs.at(0, r, c), 1e-12, 1.0 - 1e-12);
        const double y = pair.real_occupancy->at(0, r, c) != 0.0f ? 1.0 : 0.0;
        loss += -(y * std::log(p) + (1.0 - y) * std::log1p(-p));
        ++count;
      }
    }
  }
  if (count == 0) throw InputError("no sim-occupied cells to score");
  return loss / static_cast<double>(count);
}

RaydropModel train(std::span<const TrainPair> pairs, const TrainConfig& config,
                   std::vector<double>* loss_log) {
  validate_pairs(pairs);
  if (config.kind == RaydropKind::kPlugin)
    throw InputError("plug-in models are loaded, not trained");
  if (!(config.step_size > 0.0) || config.epochs < 1 || config.batch_cells < 1)
    throw InputError("invalid training configuration");

  RaydropModel model;
  model.kind = config.kind;
  if (config.channels.empty()) {
    for (std::int32_t c = 0; c < channel::kCount; ++c)
      model.feature_spec.channels.push_back(c);
  } else {
    model.feature_spec.channels = config.channels;
  }
  for (const std::int32_t ch : model.feature_spec.channels)
    if (ch < 0 || ch >= channel::kCount)
      throw InputError("feature channel outside the grid");
  model.feature_spec.window =
      config.kind == RaydropKind::kWindowedLogistic ? config.window : 0;
  if (model.feature_spec.window < 0)
    throw InputError("window must be non-negative");

  const std::vector<TrainCell> cells = collect_cells(pairs);
  const double inv_n = 1.0 / static_cast<double>(cells.size());

  if (config.kind == RaydropKind::kConstant) {
    double mean_label = 0.0;
    for (const TrainCell& cell : cells) mean_label += cell.label;
    mean_label = std::clamp(mean_label * inv_n, 1e-6, 1.0 - 1e-6);
    model.parameters = {mean_label};
    model.final_loss = bce_loss(model, pairs);
    if (loss_log) loss_log->push_back(model.final_loss);
    return model;
  }

  // Standardisation from the training cells' own channel values.
  const std::size_t n_channels = model.feature_spec.channels.size();
  model.normalization.mean.assign(n_channels, 0.0);
  model.normalization.stddev.assign(n_channels, 1.0);
  for (std::size_t ci = 0; ci < n_channels; ++ci) {
    const std::int32_t ch = model.feature_spec.channels[ci];
    double sum = 0.0;
    for (const TrainCell& cell : cells)
      sum += pairs[cell.pair].sim->at(ch, cell.row, cell.col);
    const double mean = sum * inv_n;
    double var = 0.0;
    for (const TrainCell& cell : cells) {
      const double d = pairs[cell.pair].sim->at(ch, cell.row, cell.col) - mean;
      var += d * d;
    }
    var *= inv_n;
    model.normalization.mean[ci] = mean;
    model.normalization.stddev[ci] = var > 1e-12 ? std::sqrt(var) : 1.0;
  }

  const std::int32_t dim = model.feature_spec.dim();
  std::vector<double> params(dim + 1, 0.0);
  std::vector<double> m(dim + 1, 0.0), v(dim + 1, 0.0);
  std::vector<double> grad(dim + 1, 0.0);
  std::vector<float> x(dim);
  std::vector<std::size_t> order(cells.size());
  double step_count = 0.0;

  for (std::int32_t epoch = 0; epoch < config.epochs; ++epoch) {
    // Seeded shuffle; accumulation stays serial so the result is the same
    // bytes on every run and thread count.
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    SeqRng rng(config.seed, static_cast<std::uint64_t>(epoch));
    for (std::size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng.uniform_int(i)]);

    double epoch_loss = 0.0;
    std::size_t done = 0;
    while (done < order.size()) {
      const std::size_t batch = std::min<std::size_t>(
          config.batch_cells, order.size() - done);
      std::fill(grad.begin(), grad.end(), 0.0);
      for (std::size_t bi = 0; bi < batch; ++bi) {
        const TrainCell& cell = cells[order[done + bi]];
        extract_cell_features(*pairs[cell.pair].sim, model.feature_spec,
                              &model.normalization, cell.row, cell.col, x);
        double z = params[dim];
        for (std::int32_t k = 0; k < dim; ++k) z += params[k] * x[k];
        epoch_loss += bce_from_logit(z, cell.label);
        const double g = sigmoid(z) - cell.label;
        for (std::int32_t k = 0; k < dim; ++k) grad[k] += g * x[k];
        grad[dim] += g;
      }

      step_count += 1.0;
      const double inv_batch = 1.0 / static_cast<double>(batch);
      const double bias1 = 1.0 - std::pow(config.beta1, step_count);
      const double bias2 = 1.0 - std::pow(config.beta2, step_count);
      for (std::int32_t k = 0; k <= dim; ++k) {
        const double gk = grad[k] * inv_batch;
        m[k] = config.beta1 * m[k] + (1.0 - config.beta1) * gk;
        v[k] = config.beta2 * v[k] + (1.0 - config.beta2) * gk * gk;
        params[k] -= config.step_size * (m[k] / bias1) /
                     (std::sqrt(v[k] / bias2) + config.adam_eps);
      }
      done += batch;
    }
    if (loss_log) loss_log->push_back(epoch_loss * inv_n);
  }

  model.parameters = std::move(params);
  model.final_loss = bce_loss(model, pairs);
  return model;
}

Grid predict(const RaydropModel& model, const Grid& feature_grid) {
  if (feature_grid.channels != channel::kCount)
    throw InputError("feature grid must carry the full feature channels");

  Grid out = Grid::zeros(1, feature_grid.rows, feature_grid.cols);

  if (model.kind == RaydropKind::kConstant) {
    if (model.parameters.size() != 1)
      throw InputError("constant model needs exactly one parameter");
    const float p = static_cast<float>(model.parameters[0]);
    for (std::size_t i = 0; i < out.data.size(); ++i)
      out.data[i] =
          feature_grid.data[channel::kOccupancy * out.data.size() + i] != 0.0f
              ? p
              : 0.0f;
    return out;
  }

  if (model.kind == RaydropKind::kPlugin) {
    const Grid plug = read_grid(model.plugin_path);
    if (plug.channels != 1 || plug.rows != feature_grid.rows ||
        plug.cols != feature_grid.cols)
      throw InputError("plug-in probability grid does not match the sweep");
    for (std::size_t i = 0; i < out.data.size(); ++i) {
      const bool occ =
          feature_grid.data[channel::kOccupancy * out.data.size() + i] != 0.0f;
      out.data[i] = occ ? std::clamp(plug.data[i], 0.0f, 1.0f) : 0.0f;
    }
    return out;
  }

  const std::int32_t dim = model.feature_spec.dim();
  if (static_cast<std::int32_t>(model.parameters.size()) != dim + 1)
    throw InputError("model parameter size does not match its feature spec");

#pragma omp parallel
  {
    std::vector<float> x(dim);
#pragma omp for schedule(static)
    for (std::int64_t i = 0;
         i < static_cast<std::int64_t>(feature_grid.cell_count()); ++i) {
      const std::int32_t r = static_cast<std::int32_t>(i / feature_grid.cols);
      const std::int32_t c = static_cast<std::int32_t>(i % feature_grid.cols);
      if (feature_grid.at(channel::kOccupancy, r, c) == 0.0f) continue;
      extract_cell_features(feature_grid, model.feature_spec,
                            &model.normalization, r, c, x);
      double z = model.parameters[dim];
      for (std::int32_t k = 0; k < dim; ++k) z += model.parameters[k] * x[k];
      out.data[i] = static_cast<float>(sigmoid(z));
    }
  }
  return out;
}

Grid sample_mask(const Grid& probabilities, std::uint64_t seed) {
  if (probabilities.channels != 1)
    throw InputError("probability grid must have one channel");
  Grid mask = Grid::zeros(1, probabilities.rows, probabilities.cols);
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0;
       i < static_cast<std::int64_t>(probabilities.cell_count()); ++i) {
    const std::uint64_t r = i / probabilities.cols;
    const std::uint64_t c = i % probabilities.cols;
    mask.data[i] = u01(seed, r, c) < probabilities.data[i] ? 1.0f : 0.0f;
  }
  return mask;
}

}  // namespace surfelsim
