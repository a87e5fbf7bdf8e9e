#include "prunebound/persist.hpp"

#include "prunebound/errors.hpp"

#include <zlib.h>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

namespace prunebound {

namespace {

constexpr std::array<char, 8> kModelMagic{'P', 'B', 'M', 'O', 'D', 'E', 'L', '\0'};
constexpr std::array<char, 8> kBundleMagic{'P', 'B', 'M', 'A', 'T', 'R', 'X', '\0'};

class Writer {
public:
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        out_.insert(out_.end(), b, b + n);
    }
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u32(std::uint64_t v) {
        if (v > 0xffffffffu) throw ValidationError("value does not fit the container's u32 field");
        for (int s = 0; s < 32; s += 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
    }
    void f64(double v) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        for (int s = 0; s < 64; s += 8) out_.push_back(static_cast<std::uint8_t>(bits >> s));
    }
    void matrix(const Matrix& m) {
        u32(m.rows());
        u32(m.cols());
        for (double v : m.data()) f64(v);
    }
    std::vector<std::uint8_t> finish() {
        const auto crc = ::crc32(0L, out_.data(), static_cast<uInt>(out_.size()));
        u32(crc);
        return std::move(out_);
    }

private:
    std::vector<std::uint8_t> out_;
};

class Reader {
public:
    explicit Reader(const std::vector<std::uint8_t>& b, std::size_t end) : b_(b), end_(end) {}
    void need(std::size_t n) const {
        if (pos_ + n > end_) throw ChecksumError("container payload is shorter than its header declares");
    }
    std::uint8_t u8() {
        need(1);
        return b_[pos_++];
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b_[pos_++]) << (8 * i);
        return v;
    }
    double f64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b_[pos_++]) << (8 * i);
        return std::bit_cast<double>(v);
    }
    std::string str(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(b_.data() + pos_), n);
        pos_ += n;
        return s;
    }
    Matrix matrix() {
        const std::size_t rows = u32();
        const std::size_t cols = u32();
        if (rows == 0 || cols == 0) throw FormatError("container holds an empty matrix");
        need(rows * cols * 8);
        std::vector<double> data(rows * cols);
        for (auto& v : data) v = f64();
        return Matrix(rows, cols, std::move(data));
    }
    std::size_t pos() const { return pos_; }
    void seek(std::size_t p) { pos_ = p; }

private:
    const std::vector<std::uint8_t>& b_;
    std::size_t end_;
    std::size_t pos_ = 0;
};

// Checks magic, version and trailing CRC; returns the payload end offset.
std::size_t check_frame(const std::vector<std::uint8_t>& bytes, const std::array<char, 8>& magic, const char* what) {
    if (bytes.size() < magic.size() || std::memcmp(bytes.data(), magic.data(), magic.size()) != 0) {
        if (bytes.size() < magic.size() && std::memcmp(bytes.data(), magic.data(), bytes.size()) == 0)
            throw ChecksumError(std::string(what) + ": file truncated");
        throw FormatError(std::string(what) + ": bad magic");
    }
    if (bytes.size() < magic.size() + 1) throw ChecksumError(std::string(what) + ": file truncated");
    const auto version = bytes[magic.size()];
    if (version != kModelFormatVersion)
        throw VersionError(std::string(what) + ": unsupported format version " + std::to_string(version));
    if (bytes.size() < magic.size() + 1 + 4) throw ChecksumError(std::string(what) + ": file truncated");
    const std::size_t end = bytes.size() - 4;
    std::uint32_t stored = 0;
    for (int i = 0; i < 4; ++i) stored |= static_cast<std::uint32_t>(bytes[end + i]) << (8 * i);
    const auto actual = static_cast<std::uint32_t>(::crc32(0L, bytes.data(), static_cast<uInt>(end)));
    if (stored != actual) throw ChecksumError(std::string(what) + ": checksum mismatch (truncated or corrupted)");
    return end;
}

}  // namespace

std::vector<std::uint8_t> encode_model(const ModelStack& model) {
    Writer w;
    w.bytes(kModelMagic.data(), kModelMagic.size());
    w.u8(kModelFormatVersion);
    w.u32(model.input_dim());
    w.u32(model.num_classes());
    w.u32(model.depth());
    for (const auto& layer : model.layers()) {
        w.u32(layer.weights.rows());
        w.u32(layer.weights.cols());
        w.u8(static_cast<std::uint8_t>(layer.activation));
        w.f64(layer.lipschitz);
        for (double v : layer.weights.data()) w.f64(v);
    }
    return w.finish();
}

ModelStack decode_model(const std::vector<std::uint8_t>& bytes) {
    const std::size_t end = check_frame(bytes, kModelMagic, "model");
    Reader r(bytes, end);
    r.seek(kModelMagic.size() + 1);
    const std::size_t input_dim = r.u32();
    const std::size_t num_classes = r.u32();
    const std::size_t depth = r.u32();
    std::vector<LayerSpec> layers;
    for (std::size_t l = 0; l < depth; ++l) {
        const std::size_t rows = r.u32();
        const std::size_t cols = r.u32();
        const auto act = r.u8();
        if (act > 1) throw FormatError("model: unknown activation code " + std::to_string(act));
        const double lip = r.f64();
        r.need(rows * cols * 8);
        std::vector<double> data(rows * cols);
        for (auto& v : data) v = r.f64();
        layers.push_back({Matrix(rows, cols, std::move(data)), static_cast<Activation>(act), lip});
    }
    if (r.pos() != end) throw FormatError("model: trailing bytes after last layer");
    return ModelStack(std::move(layers), input_dim, num_classes);
}

std::vector<std::uint8_t> encode_matrices(const NamedMatrices& items) {
    Writer w;
    w.bytes(kBundleMagic.data(), kBundleMagic.size());
    w.u8(kModelFormatVersion);
    w.u32(items.size());
    for (const auto& [name, m] : items) {
        w.u32(name.size());
        w.bytes(name.data(), name.size());
        w.matrix(m);
    }
    return w.finish();
}

NamedMatrices decode_matrices(const std::vector<std::uint8_t>& bytes) {
    const std::size_t end = check_frame(bytes, kBundleMagic, "matrix bundle");
    Reader r(bytes, end);
    r.seek(kBundleMagic.size() + 1);
    const std::size_t count = r.u32();
    NamedMatrices out;
    for (std::size_t i = 0; i < count; ++i) {
        std::string name = r.str(r.u32());
        out.emplace_back(std::move(name), r.matrix());
    }
    if (r.pos() != end) throw FormatError("matrix bundle: trailing bytes");
    return out;
}

const Matrix& find_matrix(const NamedMatrices& items, const std::string& name) {
    for (const auto& [n, m] : items)
        if (n == name) return m;
    throw FormatError("matrix bundle has no entry '" + name + "'");
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
    return std::filesystem::path(path.string() + ".json");
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open '" + path.string() + "'");
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot write '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw ValidationError("write failed for '" + path.string() + "'");
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    write_file_bytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

void save_model(const std::filesystem::path& path, const ModelStack& model, const nlohmann::json& metadata) {
    write_file_bytes(path, encode_model(model));
    nlohmann::json side = metadata.is_object() ? metadata : nlohmann::json::object();
    side["format"] = "PBMODEL";
    side["format_version"] = kModelFormatVersion;
    side["input_dim"] = model.input_dim();
    side["num_classes"] = model.num_classes();
    nlohmann::json shapes = nlohmann::json::array();
    for (const auto& layer : model.layers())
        shapes.push_back({{"rows", layer.weights.rows()},
                          {"cols", layer.weights.cols()},
                          {"activation", to_string(layer.activation)}});
    side["layers"] = shapes;
    write_text_file(sidecar_path(path), side.dump(2) + "\n");
}

ModelStack load_model(const std::filesystem::path& path) { return decode_model(read_file_bytes(path)); }

void save_matrices(const std::filesystem::path& path, const NamedMatrices& items, const nlohmann::json& metadata) {
    write_file_bytes(path, encode_matrices(items));
    nlohmann::json side = metadata.is_object() ? metadata : nlohmann::json::object();
    side["format"] = "PBMATRX";
    side["format_version"] = kModelFormatVersion;
    nlohmann::json names = nlohmann::json::array();
    for (const auto& [n, m] : items) names.push_back({{"name", n}, {"rows", m.rows()}, {"cols", m.cols()}});
    side["matrices"] = names;
    write_text_file(sidecar_path(path), side.dump(2) + "\n");
}

NamedMatrices load_matrices(const std::filesystem::path& path) { return decode_matrices(read_file_bytes(path)); }

}  // namespace prunebound
