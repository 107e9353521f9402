#pragma once

#include <cstdint>
#include <vector>

#include "sccl/dataset.hpp"
#include "sccl/model.hpp"

namespace sccl {

/// SGD settings. learning_rate 0 is accepted (parameters stay frozen, which
/// makes per-epoch loss exactly constant — useful as a determinism probe);
/// negative rates are rejected.
struct TrainConfig {
  std::int64_t epochs = 1;
  std::int64_t batch_size = 32;
  double learning_rate = 0.01;
  std::uint64_t seed = 1;
};

/// One epoch of history: mean training loss over the epoch's batches and
/// full-set accuracy measured after the epoch's updates.
struct EpochStats {
  std::int64_t epoch = 0;
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Mean softmax cross-entropy over logit rows (row-major [n][classes]); when
/// grad is non-null it receives ∂(mean loss)/∂logits in the same layout.
double softmax_cross_entropy(const std::vector<double>& logits,
                             const std::vector<std::int64_t>& labels,
                             std::int64_t classes, std::vector<double>* grad);

/// Fraction of samples whose argmax logit equals their label; evaluated in
/// fixed-size batches, deterministically.
double evaluate_accuracy(const Network& net, const LabeledDataset& data,
                         std::int64_t batch_size = 64);

/// Minibatch SGD: per epoch, a seeded Fisher-Yates shuffle partitions the
/// samples into consecutive batches (last one may be short). Fixed seed ⇒
/// bit-identical history. Throws NumericError naming the epoch/batch if the
/// loss goes non-finite, ConfigError when network and dataset disagree on
/// class count, ArgumentError on non-positive counts or a negative rate.
std::vector<EpochStats> train(Network& net, const LabeledDataset& data,
                              const TrainConfig& cfg);

}  // namespace sccl
