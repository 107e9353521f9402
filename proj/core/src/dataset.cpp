#include "sccl/dataset.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "sccl/errors.hpp"
#include "sccl/fixture.hpp"
#include "sccl/rng.hpp"

namespace sccl {

namespace {

constexpr double kTemplateAmplitude = 3.0;  // 3× the unit noise std

}  // namespace

LabeledDataset synth_dataset(std::uint64_t seed, std::int64_t samples,
                             std::int64_t classes, std::int64_t c, std::int64_t hw) {
  if (classes < 2) throw ArgumentError("synthetic dataset needs >= 2 classes");
  if (samples < classes) {
    throw ArgumentError("synthetic dataset needs at least one sample per class");
  }
  if (c < 1 || hw < 1) throw ArgumentError("channel and spatial extents must be >= 1");
  if (c < 63 && classes > (std::int64_t{1} << c)) {
    throw ArgumentError("more classes than distinct ±1 channel patterns (2^c)");
  }

  LabeledDataset data;
  data.classes = classes;
  data.templates.resize(static_cast<std::size_t>(classes));
  for (std::int64_t k = 0; k < classes; ++k) {
    std::vector<double>& pattern = data.templates[static_cast<std::size_t>(k)];
    pattern.resize(static_cast<std::size_t>(c));
    for (std::int64_t ch = 0; ch < c; ++ch) {
      pattern[static_cast<std::size_t>(ch)] =
          ((k >> ch) & 1) ? -kTemplateAmplitude : kTemplateAmplitude;
    }
  }

  Rng rng(seed);
  data.images = Tensor4(samples, c, hw, hw);
  data.labels.resize(static_cast<std::size_t>(samples));
  const std::int64_t plane = hw * hw;
  for (std::int64_t i = 0; i < samples; ++i) {
    const std::int64_t label = i % classes;
    data.labels[static_cast<std::size_t>(i)] = label;
    const std::vector<double>& pattern = data.templates[static_cast<std::size_t>(label)];
    for (std::int64_t ch = 0; ch < c; ++ch) {
      double* p = data.images.data() + data.images.index(i, ch, 0, 0);
      const double base = pattern[static_cast<std::size_t>(ch)];
      for (std::int64_t q = 0; q < plane; ++q) p[q] = base + rng.normal();
    }
  }
  return data;
}

double nearest_template_accuracy(const LabeledDataset& data) {
  const std::int64_t samples = data.images.n();
  const std::int64_t c = data.images.c();
  const std::int64_t plane = data.images.h() * data.images.w();
  std::int64_t hits = 0;
  for (std::int64_t i = 0; i < samples; ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::int64_t best_k = -1;
    for (std::int64_t k = 0; k < data.classes; ++k) {
      const std::vector<double>& pattern = data.templates[static_cast<std::size_t>(k)];
      double dist = 0.0;
      for (std::int64_t ch = 0; ch < c; ++ch) {
        const double* p = data.images.data() + data.images.index(i, ch, 0, 0);
        const double t = pattern[static_cast<std::size_t>(ch)];
        for (std::int64_t q = 0; q < plane; ++q) {
          const double d = p[q] - t;
          dist += d * d;
        }
      }
      if (dist < best) {
        best = dist;
        best_k = k;
      }
    }
    if (best_k == data.labels[static_cast<std::size_t>(i)]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

LabeledDataset load_fixture_dataset(const std::string& dir) {
  LabeledDataset data;
  data.images = fixture_read(dir + "/images.dsx");
  const Tensor4 labels = fixture_read(dir + "/labels.dsx");
  if (labels.c() != 1 || labels.h() != 1 || labels.w() != 1 ||
      labels.n() != data.images.n()) {
    throw FormatError("labels.dsx must be an n×1×1×1 tensor matching images.dsx");
  }
  data.labels.resize(static_cast<std::size_t>(labels.n()));
  std::int64_t max_label = 0;
  for (std::int64_t i = 0; i < labels.n(); ++i) {
    const double v = labels.data()[i];
    const double r = std::nearbyint(v);
    if (v != r || r < 0.0) {
      throw FormatError("labels.dsx entry " + std::to_string(i) +
                        " is not a non-negative whole number");
    }
    data.labels[static_cast<std::size_t>(i)] = static_cast<std::int64_t>(r);
    if (data.labels[static_cast<std::size_t>(i)] > max_label) {
      max_label = data.labels[static_cast<std::size_t>(i)];
    }
  }
  data.classes = max_label + 1;
  return data;
}

void save_fixture_dataset(const LabeledDataset& data, const std::string& dir) {
  fixture_write(data.images, dir + "/images.dsx");
  Tensor4 labels(data.images.n(), 1, 1, 1);
  for (std::int64_t i = 0; i < labels.n(); ++i) {
    labels.data()[i] = static_cast<double>(data.labels[static_cast<std::size_t>(i)]);
  }
  fixture_write(labels, dir + "/labels.dsx");
}

Tensor4 gather_samples(const Tensor4& images, const std::vector<std::int64_t>& indices) {
  if (indices.empty()) throw ArgumentError("gather_samples needs at least one index");
  Tensor4 batch(static_cast<std::int64_t>(indices.size()), images.c(), images.h(),
                images.w());
  const std::int64_t sample_len = images.c() * images.h() * images.w();
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::int64_t src = indices[i];
    if (src < 0 || src >= images.n()) {
      throw IndexError("sample index " + std::to_string(src) + " out of range");
    }
    std::memcpy(batch.data() + batch.index(static_cast<std::int64_t>(i), 0, 0, 0),
                images.data() + images.index(src, 0, 0, 0),
                static_cast<std::size_t>(sample_len) * sizeof(double));
  }
  return batch;
}

}  // namespace sccl
