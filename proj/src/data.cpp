#include "initlab/data.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace initlab {

namespace {

std::vector<unsigned char> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open file: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    // gzip magic 0x1f 0x8b -> inflate
    if (bytes.size() >= 2 && bytes[0] == 0x1f && bytes[1] == 0x8b) {
        std::vector<unsigned char> out;
        z_stream zs{};
        if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK)
            throw FormatError("gzip init failed: " + path);
        zs.next_in = bytes.data();
        zs.avail_in = static_cast<uInt>(bytes.size());
        std::vector<unsigned char> buf(1 << 16);
        int ret = Z_OK;
        do {
            zs.next_out = buf.data();
            zs.avail_out = static_cast<uInt>(buf.size());
            ret = inflate(&zs, Z_NO_FLUSH);
            if (ret != Z_OK && ret != Z_STREAM_END) {
                inflateEnd(&zs);
                throw FormatError("gzip decompression failed: " + path);
            }
            out.insert(out.end(), buf.data(), buf.data() + (buf.size() - zs.avail_out));
        } while (ret != Z_STREAM_END);
        inflateEnd(&zs);
        return out;
    }
    return bytes;
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset,
                        const std::string& path) {
    if (offset + 4 > bytes.size())
        throw FormatError("truncated IDX file " + path + ": expected at least " +
                          std::to_string(offset + 4) + " bytes, got " +
                          std::to_string(bytes.size()));
    return (std::uint32_t(bytes[offset]) << 24) | (std::uint32_t(bytes[offset + 1]) << 16) |
           (std::uint32_t(bytes[offset + 2]) << 8) | std::uint32_t(bytes[offset + 3]);
}

void write_be32(std::ofstream& out, std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v >> 24),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

std::string hex32(std::uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "0x%08x", v);
    return buf;
}

}  // namespace

Matrix load_idx_images(const std::string& path) {
    const std::vector<unsigned char> bytes = read_file_bytes(path);
    const std::uint32_t magic = read_be32(bytes, 0, path);
    if (magic != 0x00000803u)
        throw FormatError("bad IDX image magic in " + path + ": read " + hex32(magic) +
                          ", expected 0x00000803");
    const std::uint32_t n = read_be32(bytes, 4, path);
    const std::uint32_t rows = read_be32(bytes, 8, path);
    const std::uint32_t cols = read_be32(bytes, 12, path);
    const std::size_t expected = 16 + static_cast<std::size_t>(n) * rows * cols;
    if (bytes.size() != expected)
        throw FormatError("truncated IDX image file " + path + ": expected " +
                          std::to_string(expected) + " bytes, got " +
                          std::to_string(bytes.size()));
    Matrix images(static_cast<int>(n), static_cast<int>(rows * cols));
    for (std::size_t i = 0; i < images.data.size(); ++i)
        images.data[i] = bytes[16 + i] / 255.0;
    return images;
}

std::vector<int> load_idx_labels(const std::string& path) {
    const std::vector<unsigned char> bytes = read_file_bytes(path);
    const std::uint32_t magic = read_be32(bytes, 0, path);
    if (magic != 0x00000801u)
        throw FormatError("bad IDX label magic in " + path + ": read " + hex32(magic) +
                          ", expected 0x00000801");
    const std::uint32_t n = read_be32(bytes, 4, path);
    const std::size_t expected = 8 + static_cast<std::size_t>(n);
    if (bytes.size() != expected)
        throw FormatError("truncated IDX label file " + path + ": expected " +
                          std::to_string(expected) + " bytes, got " +
                          std::to_string(bytes.size()));
    std::vector<int> labels(n);
    for (std::uint32_t i = 0; i < n; ++i) labels[i] = bytes[8 + i];
    return labels;
}

Dataset load_idx_dataset(const std::string& images_path, const std::string& labels_path,
                         int num_classes, const std::string& name) {
    Dataset ds;
    ds.inputs = load_idx_images(images_path);
    ds.labels = load_idx_labels(labels_path);
    ds.num_classes = num_classes;
    ds.name = name;
    if (static_cast<int>(ds.labels.size()) != ds.inputs.rows)
        throw FormatError("image/label count mismatch: " + std::to_string(ds.inputs.rows) +
                          " images vs " + std::to_string(ds.labels.size()) + " labels");
    for (int y : ds.labels)
        if (y < 0 || y >= num_classes)
            throw FormatError("label " + std::to_string(y) + " out of range [0, " +
                              std::to_string(num_classes) + ")");
    return ds;
}

void write_idx_images(const std::string& path, const Matrix& images, int rows, int cols) {
    if (rows * cols != images.cols)
        throw std::invalid_argument("write_idx_images: rows*cols must equal image width");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path);
    write_be32(out, 0x00000803u);
    write_be32(out, static_cast<std::uint32_t>(images.rows));
    write_be32(out, static_cast<std::uint32_t>(rows));
    write_be32(out, static_cast<std::uint32_t>(cols));
    for (double v : images.data) {
        const int byte = static_cast<int>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
        out.put(static_cast<char>(byte));
    }
}

void write_idx_labels(const std::string& path, const std::vector<int>& labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open for writing: " + path);
    write_be32(out, 0x00000801u);
    write_be32(out, static_cast<std::uint32_t>(labels.size()));
    for (int y : labels) out.put(static_cast<char>(y));
}

Dataset synthetic_blobs(int d, int num_classes, int n_per_class, double separation, double sigma,
                        RngState& rng) {
    if (d < 1 || num_classes < 2 || n_per_class < 1)
        throw std::invalid_argument("synthetic_blobs: need d >= 1, M >= 2, n_per_class >= 1");
    const int n = num_classes * n_per_class;
    Matrix raw(n, d);
    std::vector<int> labels(n);
    for (int m = 0; m < num_classes; ++m) {
        const int axis = m % d;  // centers cycle through axis-aligned unit vectors
        for (int i = 0; i < n_per_class; ++i) {
            const int row = m * n_per_class + i;
            labels[row] = m;
            for (int j = 0; j < d; ++j)
                raw(row, j) = (j == axis ? separation : 0.0) + sigma * rng.next_gaussian();
        }
    }
    // Affine squash to [0,1]^d using the global value range.
    double lo = raw.data[0], hi = raw.data[0];
    for (double v : raw.data) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (double& v : raw.data) v = (v - lo) / span;

    Dataset ds;
    ds.inputs = std::move(raw);
    ds.labels = std::move(labels);
    ds.num_classes = num_classes;
    ds.name = "blobs";
    return ds;
}

std::pair<Dataset, Dataset> split_dataset(const Dataset& full, double val_fraction, RngState& rng) {
    const int n = full.size();
    const int n_val = static_cast<int>(val_fraction * n);
    if (n_val < 1 || n_val >= n)
        throw std::invalid_argument("split_dataset: fraction leaves an empty side");
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[i], perm[j]);
    }
    auto gather = [&](int begin, int count) {
        Dataset out;
        out.inputs = Matrix(count, full.dim());
        out.labels.resize(count);
        out.num_classes = full.num_classes;
        out.name = full.name;
        for (int i = 0; i < count; ++i) {
            const int src = perm[begin + i];
            for (int j = 0; j < full.dim(); ++j) out.inputs(i, j) = full.inputs(src, j);
            out.labels[i] = full.labels[src];
        }
        return out;
    };
    return {gather(0, n - n_val), gather(n - n_val, n_val)};
}

Dataset subset(const Dataset& full, int n) {
    if (n < 1 || n > full.size()) throw std::invalid_argument("subset: bad size");
    Dataset out;
    out.inputs = Matrix(n, full.dim());
    out.labels.assign(full.labels.begin(), full.labels.begin() + n);
    out.num_classes = full.num_classes;
    out.name = full.name;
    std::copy(full.inputs.data.begin(),
              full.inputs.data.begin() + static_cast<std::size_t>(n) * full.dim(),
              out.inputs.data.begin());
    return out;
}

}  // namespace initlab
