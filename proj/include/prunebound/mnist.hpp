#pragma once

#include "prunebound/model.hpp"

#include <cstddef>
#include <filesystem>
#include <optional>

namespace prunebound {

// Reads an IDX image/label pair (big-endian headers, magic 2051 / 2049).
// Pixels are scaled to [0, 1] and flattened row-major. Errors:
//   FormatError        bad magic or mismatched counts
//   TruncatedFileError payload shorter than the header declares
//   LabelRangeError    label outside [0, 9]
Dataset load_mnist_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                       std::optional<std::size_t> limit = std::nullopt);

}  // namespace prunebound
