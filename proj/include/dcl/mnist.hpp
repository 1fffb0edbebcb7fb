#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dcl/matrix.hpp"

namespace dcl::mnist {

inline constexpr std::size_t kPixels = 784;
inline constexpr std::size_t kTasks = 5;

/// Images as columns (784 x N) scaled into [0, 1], with digit labels.
struct ImageSet {
  Matrix images;
  std::vector<int> labels;

  std::size_t size() const noexcept { return labels.size(); }
};

struct Dataset {
  ImageSet train;
  ImageSet test;
};

/// Reads one IDX image file and its label file. Gzipped files are accepted.
/// Throws IoError naming the offending path on missing or corrupt input.
ImageSet load_idx(const std::string& images_path, const std::string& labels_path);

/// Loads train-* and t10k-* IDX files from `dir`, preferring raw files and
/// falling back to the ".gz" variants.
Dataset load_mnist(const std::string& dir);

/// Digit pairs (0,1), (2,3), (4,5), (6,7), (8,9) map to tasks 0..4.
constexpr std::size_t task_of_label(int label) { return static_cast<std::size_t>(label) / 2; }

/// Indices of the samples of `set` belonging to each of the five tasks.
std::array<std::vector<std::size_t>, kTasks> split_by_task(const ImageSet& set);

}  // namespace dcl::mnist
