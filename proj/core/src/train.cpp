#include "sccl/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "sccl/errors.hpp"
#include "sccl/rng.hpp"

namespace sccl {

double softmax_cross_entropy(const std::vector<double>& logits,
                             const std::vector<std::int64_t>& labels,
                             std::int64_t classes, std::vector<double>* grad) {
  const std::int64_t rows = static_cast<std::int64_t>(labels.size());
  if (logits.size() != static_cast<std::size_t>(rows * classes)) {
    throw ShapeError("logits size does not match labels × classes");
  }
  if (grad) grad->assign(logits.size(), 0.0);

  double total = 0.0;
  for (std::int64_t n = 0; n < rows; ++n) {
    const double* row = logits.data() + n * classes;
    const std::int64_t label = labels[static_cast<std::size_t>(n)];
    if (label < 0 || label >= classes) {
      throw IndexError("label " + std::to_string(label) + " out of range [0, " +
                       std::to_string(classes) + ")");
    }
    const double m = *std::max_element(row, row + classes);
    double z = 0.0;
    for (std::int64_t k = 0; k < classes; ++k) z += std::exp(row[k] - m);
    total += std::log(z) - (row[label] - m);
    if (grad) {
      double* g_row = grad->data() + n * classes;
      for (std::int64_t k = 0; k < classes; ++k) {
        const double p = std::exp(row[k] - m) / z;
        g_row[k] = (p - (k == label ? 1.0 : 0.0)) / static_cast<double>(rows);
      }
    }
  }
  return total / static_cast<double>(rows);
}

double evaluate_accuracy(const Network& net, const LabeledDataset& data,
                         std::int64_t batch_size) {
  const std::int64_t samples = data.images.n();
  const std::int64_t classes = net.classes();
  std::int64_t hits = 0;
  for (std::int64_t begin = 0; begin < samples; begin += batch_size) {
    const std::int64_t end = std::min(samples, begin + batch_size);
    std::vector<std::int64_t> indices(static_cast<std::size_t>(end - begin));
    std::iota(indices.begin(), indices.end(), begin);
    const std::vector<double> logits = net.forward(gather_samples(data.images, indices));
    for (std::int64_t i = 0; i < end - begin; ++i) {
      const double* row = logits.data() + i * classes;
      const std::int64_t pred =
          std::max_element(row, row + classes) - row;  // first max on ties
      if (pred == data.labels[static_cast<std::size_t>(begin + i)]) ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

std::vector<EpochStats> train(Network& net, const LabeledDataset& data,
                              const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw ArgumentError("epochs must be >= 1");
  if (cfg.batch_size < 1) throw ArgumentError("batch_size must be >= 1");
  if (cfg.learning_rate < 0.0) throw ArgumentError("learning_rate must be >= 0");
  if (net.classes() != data.classes) {
    throw ConfigError("network outputs " + std::to_string(net.classes()) +
                      " classes, dataset has " + std::to_string(data.classes));
  }

  const std::int64_t samples = data.images.n();
  std::vector<std::int64_t> order(static_cast<std::size_t>(samples));
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(cfg.seed);

  std::vector<EpochStats> history;
  history.reserve(static_cast<std::size_t>(cfg.epochs));
  for (std::int64_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates on the seeded stream; one stream across all epochs.
    for (std::int64_t i = samples - 1; i >= 1; --i) {
      std::swap(order[static_cast<std::size_t>(i)],
                order[static_cast<std::size_t>(shuffle_rng.index(i + 1))]);
    }

    double loss_sum = 0.0;
    std::int64_t batch_index = 0;
    for (std::int64_t begin = 0; begin < samples; begin += cfg.batch_size) {
      const std::int64_t end = std::min(samples, begin + cfg.batch_size);
      const std::vector<std::int64_t> batch_ids(order.begin() + begin,
                                                order.begin() + end);
      std::vector<std::int64_t> batch_labels(batch_ids.size());
      for (std::size_t i = 0; i < batch_ids.size(); ++i) {
        batch_labels[i] = data.labels[static_cast<std::size_t>(batch_ids[i])];
      }
      const Tensor4 batch = gather_samples(data.images, batch_ids);

      NetworkTrace trace;
      const std::vector<double> logits = net.forward(batch, &trace);
      std::vector<double> grad_logits;
      const double loss =
          softmax_cross_entropy(logits, batch_labels, net.classes(), &grad_logits);
      if (!std::isfinite(loss)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) +
                           ", batch " + std::to_string(batch_index));
      }
      const NetworkGradients grads = net.backward(trace, grad_logits);
      net.apply_sgd(grads, cfg.learning_rate);

      loss_sum += loss * static_cast<double>(end - begin);
      ++batch_index;
    }

    EpochStats stats;
    stats.epoch = epoch;
    stats.loss = loss_sum / static_cast<double>(samples);
    stats.accuracy = evaluate_accuracy(net, data);
    history.push_back(stats);
  }
  return history;
}

}  // namespace sccl
