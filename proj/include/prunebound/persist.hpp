#pragma once

#include "prunebound/matrix.hpp"
#include "prunebound/model.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace prunebound {

// Model container, all integers little-endian:
//   "PBMODEL\0"  u8 version  u32 input_dim  u32 num_classes  u32 num_layers
//   per layer:   u32 rows  u32 cols  u8 activation  f64 lipschitz  f64[rows*cols] row-major
//   u32 crc32 of every preceding byte
inline constexpr std::uint8_t kModelFormatVersion = 1;

std::vector<std::uint8_t> encode_model(const ModelStack& model);
ModelStack decode_model(const std::vector<std::uint8_t>& bytes);

// Writes the container to `path` and metadata to `path` + ".json".
void save_model(const std::filesystem::path& path, const ModelStack& model, const nlohmann::json& metadata = {});
ModelStack load_model(const std::filesystem::path& path);

// Named matrices in the same framing ("PBMATRX\0", u32 count, then per entry
// u32 name length, name bytes, u32 rows, u32 cols, f64 payload, trailing crc32).
using NamedMatrices = std::vector<std::pair<std::string, Matrix>>;
std::vector<std::uint8_t> encode_matrices(const NamedMatrices& items);
NamedMatrices decode_matrices(const std::vector<std::uint8_t>& bytes);
void save_matrices(const std::filesystem::path& path, const NamedMatrices& items,
                   const nlohmann::json& metadata = {});
NamedMatrices load_matrices(const std::filesystem::path& path);
const Matrix& find_matrix(const NamedMatrices& items, const std::string& name);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes);
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::filesystem::path sidecar_path(const std::filesystem::path& path);

}  // namespace prunebound
