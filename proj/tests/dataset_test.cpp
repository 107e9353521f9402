#include <cstring>
#include <filesystem>
#include <vector>

#include <doctest.h>

#include "sccl/dataset.hpp"
#include "sccl/errors.hpp"
#include "sccl/tensor.hpp"

namespace fs = std::filesystem;

TEST_CASE("synthetic dataset is deterministic in the seed") {
  const sccl::LabeledDataset a = sccl::synth_dataset(7, 64, 4, 4, 8);
  const sccl::LabeledDataset b = sccl::synth_dataset(7, 64, 4, 4, 8);
  REQUIRE(a.images.same_shape(b.images));
  CHECK(std::memcmp(a.images.data(), b.images.data(),
                    sizeof(double) * static_cast<std::size_t>(a.images.size())) == 0);
  CHECK(a.labels == b.labels);

  const sccl::LabeledDataset c = sccl::synth_dataset(8, 64, 4, 4, 8);
  CHECK(std::memcmp(a.images.data(), c.images.data(),
                    sizeof(double) * static_cast<std::size_t>(a.images.size())) != 0);
}

TEST_CASE("labels cycle through the classes evenly") {
  const sccl::LabeledDataset d = sccl::synth_dataset(1, 100, 2, 2, 4);
  std::vector<int> counts(2, 0);
  for (const std::int64_t label : d.labels) {
    counts[static_cast<std::size_t>(label)]++;
  }
  CHECK(counts[0] == 50);
  CHECK(counts[1] == 50);
}

TEST_CASE("classes are separable by their template signs") {
  const sccl::LabeledDataset d = sccl::synth_dataset(7, 512, 4, 4, 8);
  CHECK(sccl::nearest_template_accuracy(d) == 1.0);
}

TEST_CASE("dataset construction guards") {
  CHECK_THROWS_AS(sccl::synth_dataset(1, 10, 1, 2, 4), sccl::ArgumentError);
  CHECK_THROWS_AS(sccl::synth_dataset(1, 3, 4, 2, 4), sccl::ArgumentError);
  CHECK_THROWS_AS(sccl::synth_dataset(1, 10, 5, 2, 4), sccl::ArgumentError);
}

TEST_CASE("dataset fixture round trip") {
  const sccl::LabeledDataset d = sccl::synth_dataset(3, 12, 3, 3, 4);
  const fs::path dir = fs::temp_directory_path() / "sccl_dataset_test";
  fs::create_directories(dir);
  sccl::save_fixture_dataset(d, dir.string());
  const sccl::LabeledDataset back = sccl::load_fixture_dataset(dir.string());
  REQUIRE(back.images.same_shape(d.images));
  CHECK(std::memcmp(back.images.data(), d.images.data(),
                    sizeof(double) * static_cast<std::size_t>(d.images.size())) == 0);
  CHECK(back.labels == d.labels);
  CHECK(back.classes == d.classes);
}

TEST_CASE("gather picks whole sample rows") {
  const sccl::LabeledDataset d = sccl::synth_dataset(5, 10, 2, 2, 3);
  const std::vector<std::int64_t> idx = {7, 0, 3};
  const sccl::Tensor4 picked = sccl::gather_samples(d.images, idx);
  REQUIRE(picked.n() == 3);
  for (std::int64_t row = 0; row < 3; ++row) {
    for (std::int64_t c = 0; c < d.images.c(); ++c) {
      for (std::int64_t y = 0; y < d.images.h(); ++y) {
        for (std::int64_t x = 0; x < d.images.w(); ++x) {
          CHECK(picked.at(row, c, y, x) ==
                d.images.at(idx[static_cast<std::size_t>(row)], c, y, x));
        }
      }
    }
  }
  CHECK_THROWS_AS(sccl::gather_samples(d.images, {10}), sccl::IndexError);
  CHECK_THROWS_AS(sccl::gather_samples(d.images, {-1}), sccl::IndexError);
}
