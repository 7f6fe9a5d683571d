// dataset.hpp
// Labeled image collections: loading from disk, seeded train/test splits,
// and vectorization into the data matrix.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "penmf/image.hpp"
#include "penmf/matrix.hpp"

namespace penmf {

struct ImageDataset {
  std::string name;
  std::vector<GrayImage> images;
  std::vector<std::string> labels;  // subject id per image, same length

  std::size_t size() const { return images.size(); }
  // Shared dimensions; throws ShapeError if images disagree.
  int width() const;
  int height() const;
};

struct SplitSpec {
  int train_per_subject = 1;
  std::uint64_t seed = 0;
};

// Loads PGM images. A directory is scanned as one subdirectory per subject
// (subject label = subdirectory name, files sorted bytewise); a regular file
// is read as a manifest of "relative-path,label" lines (UTF-8, LF).
ImageDataset load_dataset(const std::filesystem::path& path, const std::string& name = "");

// Downsamples every image to target_w x target_h.
ImageDataset resize_dataset(const ImageDataset& ds, int target_w, int target_h);

// n x p matrix; column j is image j vectorized row-major, n = width*height.
DenseMatrix build_matrix(const ImageDataset& ds);

// Per subject, draws exactly train_per_subject images uniformly without
// replacement (subjects visited in sorted label order, one shared stream);
// the remainder goes to test. Original dataset order is preserved within
// each half.
std::pair<ImageDataset, ImageDataset> split(const ImageDataset& ds, const SplitSpec& spec);

}  // namespace penmf
