#include "prunebound/mnist.hpp"

#include "prunebound/errors.hpp"

#include <cstdint>
#include <fstream>
#include <iterator>
#include <vector>

namespace prunebound {

namespace {

constexpr std::uint32_t kImageMagic = 2051;
constexpr std::uint32_t kLabelMagic = 2049;

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t read_be32(const std::vector<unsigned char>& buf, std::size_t off, const std::filesystem::path& path) {
    if (off + 4 > buf.size()) throw TruncatedFileError("'" + path.string() + "': header truncated");
    return (std::uint32_t{buf[off]} << 24) | (std::uint32_t{buf[off + 1]} << 16) |
           (std::uint32_t{buf[off + 2]} << 8) | std::uint32_t{buf[off + 3]};
}

}  // namespace

Dataset load_mnist_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path,
                       std::optional<std::size_t> limit) {
    const auto img = read_file(images_path);
    const auto lab = read_file(labels_path);

    const auto img_magic = read_be32(img, 0, images_path);
    if (img_magic != kImageMagic)
        throw FormatError("'" + images_path.string() + "': bad magic " + std::to_string(img_magic) +
                          " (expected 2051)");
    const auto lab_magic = read_be32(lab, 0, labels_path);
    if (lab_magic != kLabelMagic)
        throw FormatError("'" + labels_path.string() + "': bad magic " + std::to_string(lab_magic) +
                          " (expected 2049)");

    const std::size_t n_img = read_be32(img, 4, images_path);
    const std::size_t rows = read_be32(img, 8, images_path);
    const std::size_t cols = read_be32(img, 12, images_path);
    const std::size_t n_lab = read_be32(lab, 4, labels_path);
    if (n_img != n_lab)
        throw FormatError("image count " + std::to_string(n_img) + " != label count " + std::to_string(n_lab));

    const std::size_t pixels = rows * cols;
    if (img.size() < 16 + n_img * pixels)
        throw TruncatedFileError("'" + images_path.string() + "': expected " + std::to_string(n_img) +
                                 " images, file is truncated");
    if (lab.size() < 8 + n_lab) throw TruncatedFileError("'" + labels_path.string() + "': file is truncated");

    const std::size_t n = limit ? std::min(*limit, n_img) : n_img;
    std::vector<double> data(n * pixels);
    std::vector<std::int32_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
        const unsigned char y = lab[8 + i];
        if (y > 9) throw LabelRangeError("label " + std::to_string(int{y}) + " at index " + std::to_string(i));
        labels[i] = y;
        const unsigned char* src = img.data() + 16 + i * pixels;
        for (std::size_t p = 0; p < pixels; ++p) data[i * pixels + p] = src[p] / 255.0;
    }
    return Dataset{Matrix(n, pixels, std::move(data)), std::move(labels)};
}

}  // namespace prunebound
