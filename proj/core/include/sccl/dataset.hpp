#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sccl/tensor.hpp"

namespace sccl {

/// A labeled image set. images holds one sample per batch slot; labels are
/// class indices in [0, classes). templates (one per class, length = channel
/// count) records the clean per-channel pattern each synthetic class was
/// built from, for nearest-template sanity checks.
struct LabeledDataset {
  Tensor4 images;
  std::vector<std::int64_t> labels;
  std::int64_t classes = 0;
  std::vector<std::vector<double>> templates;
};

/// Deterministic synthetic classification data: class k's template assigns
/// channel ch the value ±amplitude by bit ch of k, broadcast spatially;
/// samples are template + unit-variance Gaussian noise, labels round-robin
/// (sample i gets class i mod classes). The amplitude (3.0) is 3× the noise
/// std, so a nearest-template classifier is error-free for desk-scale sets.
/// Throws ArgumentError when classes < 2, samples < classes, or classes
/// exceed 2^c (templates would collide).
LabeledDataset synth_dataset(std::uint64_t seed, std::int64_t samples,
                             std::int64_t classes, std::int64_t c, std::int64_t hw);

/// Classifies by nearest template (L2 over the spatially-broadcast pattern);
/// returns the fraction of samples whose nearest template is their label.
double nearest_template_accuracy(const LabeledDataset& data);

/// Reads a dataset from dir/images.dsx and dir/labels.dsx (labels stored as
/// an n×1×1×1 tensor of class indices). Throws FormatError on missing or
/// malformed files, or when label values are not whole numbers in range.
LabeledDataset load_fixture_dataset(const std::string& dir);

/// Writes the matching pair of fixture files into dir (which must exist).
void save_fixture_dataset(const LabeledDataset& data, const std::string& dir);

/// The rows of images selected by indices, stacked in order.
Tensor4 gather_samples(const Tensor4& images, const std::vector<std::int64_t>& indices);

}  // namespace sccl
