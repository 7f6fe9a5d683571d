// dataset.cpp
#include "penmf/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "penmf/rng.hpp"

namespace penmf {

namespace fs = std::filesystem;

int ImageDataset::width() const {
  if (images.empty()) throw ParameterError("dataset '" + name + "' is empty");
  return images.front().width;
}

int ImageDataset::height() const {
  if (images.empty()) throw ParameterError("dataset '" + name + "' is empty");
  return images.front().height;
}

namespace {

void check_consistent(const ImageDataset& ds) {
  if (ds.images.size() != ds.labels.size()) {
    throw ShapeError("dataset '" + ds.name + "': " + std::to_string(ds.images.size()) +
                     " images but " + std::to_string(ds.labels.size()) + " labels");
  }
  if (ds.images.empty()) throw ParameterError("dataset '" + ds.name + "' is empty");
  const int w = ds.images.front().width;
  const int h = ds.images.front().height;
  for (std::size_t i = 1; i < ds.images.size(); ++i) {
    if (ds.images[i].width != w || ds.images[i].height != h) {
      throw ShapeError("dataset '" + ds.name + "': image " + std::to_string(i) + " is " +
                       std::to_string(ds.images[i].width) + "x" +
                       std::to_string(ds.images[i].height) + ", expected " + std::to_string(w) +
                       "x" + std::to_string(h));
    }
  }
}

bool has_pgm_extension(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".pgm";
}

ImageDataset load_directory(const fs::path& dir, const std::string& name) {
  ImageDataset ds;
  ds.name = name;
  std::vector<fs::path> subjects;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory()) subjects.push_back(entry.path());
  }
  std::sort(subjects.begin(), subjects.end());
  if (subjects.empty()) {
    throw IoError("dataset directory " + dir.string() + " has no subject subdirectories");
  }
  for (const auto& subject : subjects) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(subject)) {
      if (entry.is_regular_file() && has_pgm_extension(entry.path())) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      ds.images.push_back(load_pgm(file));
      ds.labels.push_back(subject.filename().string());
    }
  }
  check_consistent(ds);
  return ds;
}

ImageDataset load_manifest(const fs::path& manifest, const std::string& name) {
  std::ifstream in(manifest);
  if (!in) throw IoError("cannot open manifest " + manifest.string());
  const fs::path base = manifest.parent_path();
  ImageDataset ds;
  ds.name = name;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.rfind(',');
    if (comma == std::string::npos || comma == 0 || comma + 1 == line.size()) {
      throw ParseError(manifest.string() + ":" + std::to_string(lineno) +
                       ": expected 'relative-path,label'");
    }
    const std::string rel = line.substr(0, comma);
    ds.images.push_back(load_pgm(base / rel));
    ds.labels.push_back(line.substr(comma + 1));
  }
  check_consistent(ds);
  return ds;
}

}  // namespace

ImageDataset load_dataset(const fs::path& path, const std::string& name) {
  const std::string tag = name.empty() ? path.filename().string() : name;
  if (fs::is_directory(path)) return load_directory(path, tag);
  if (fs::is_regular_file(path)) return load_manifest(path, tag);
  throw IoError("dataset path " + path.string() + " does not exist");
}

ImageDataset resize_dataset(const ImageDataset& ds, int target_w, int target_h) {
  ImageDataset out;
  out.name = ds.name;
  out.labels = ds.labels;
  out.images.reserve(ds.images.size());
  for (const auto& img : ds.images) out.images.push_back(downsample(img, target_w, target_h));
  return out;
}

DenseMatrix build_matrix(const ImageDataset& ds) {
  check_consistent(ds);
  const Index n = static_cast<Index>(ds.width()) * ds.height();
  const Index p = static_cast<Index>(ds.size());
  DenseMatrix x(n, p);
  for (Index j = 0; j < p; ++j) {
    const auto& pix = ds.images[static_cast<std::size_t>(j)].intensities;
    for (Index i = 0; i < n; ++i) x(i, j) = pix[static_cast<std::size_t>(i)];
  }
  return x;
}

std::pair<ImageDataset, ImageDataset> split(const ImageDataset& ds, const SplitSpec& spec) {
  check_consistent(ds);
  if (spec.train_per_subject < 1) {
    throw ParameterError("split: train_per_subject must be at least 1");
  }

  // Subjects visited in sorted label order so the draw sequence is
  // independent of filesystem enumeration quirks.
  std::map<std::string, std::vector<std::size_t>> by_subject;
  for (std::size_t i = 0; i < ds.size(); ++i) by_subject[ds.labels[i]].push_back(i);

  std::vector<bool> in_train(ds.size(), false);
  Rng rng(spec.seed);
  for (auto& [subject, indices] : by_subject) {
    if (indices.size() <= static_cast<std::size_t>(spec.train_per_subject)) {
      throw ParameterError("split: subject '" + subject + "' has " +
                           std::to_string(indices.size()) + " images, need more than " +
                           std::to_string(spec.train_per_subject));
    }
    // Partial Fisher-Yates: the first train_per_subject slots are the draw.
    for (int t = 0; t < spec.train_per_subject; ++t) {
      const std::size_t j =
          t + static_cast<std::size_t>(rng.uniform_index(indices.size() - t));
      std::swap(indices[t], indices[j]);
      in_train[indices[t]] = true;
    }
  }

  ImageDataset train, test;
  train.name = ds.name;
  test.name = ds.name;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    auto& half = in_train[i] ? train : test;
    half.images.push_back(ds.images[i]);
    half.labels.push_back(ds.labels[i]);
  }
  return {std::move(train), std::move(test)};
}

}  // namespace penmf
