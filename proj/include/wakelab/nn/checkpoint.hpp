// Checkpoint format: a versioned binary header, a string metadata map and
// an ordered list of (name, shape, little-endian float64 blob) records.
// Save/load round trips are bit-exact.
#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "wakelab/nn/autodiff.hpp"

namespace wakelab::nn {

inline constexpr char kCheckpointMagic[8] = {'W', 'A', 'K', 'E', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {
inline void write_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline void write_u64(std::ostream& out, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    out.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
}

inline std::uint64_t read_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

inline void write_string(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline std::string read_string(std::istream& in) {
    const std::uint32_t n = read_u32(in);
    std::string s(n, '\0');
    in.read(s.data(), n);
    return s;
}

inline void write_f64_blob(std::ostream& out, const Mat& m) {
    // Row-major traversal; bytes are the IEEE-754 little-endian encoding.
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            std::uint64_t bits;
            const double v = m(r, c);
            std::memcpy(&bits, &v, 8);
            write_u64(out, bits);
        }
    }
}

inline void read_f64_blob(std::istream& in, Mat& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            const std::uint64_t bits = read_u64(in);
            double v;
            std::memcpy(&v, &bits, 8);
            m(r, c) = v;
        }
    }
}
}  // namespace detail

inline void save_checkpoint(const std::string& path,
                            const std::map<std::string, std::string>& metadata,
                            const std::vector<Tensor*>& tensors) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_checkpoint: cannot open " + path);
    out.write(kCheckpointMagic, 8);
    detail::write_u32(out, kCheckpointVersion);
    detail::write_u32(out, static_cast<std::uint32_t>(metadata.size()));
    for (const auto& [k, v] : metadata) {
        detail::write_string(out, k);
        detail::write_string(out, v);
    }
    detail::write_u64(out, tensors.size());
    for (const Tensor* t : tensors) {
        detail::write_string(out, t->name);
        detail::write_u32(out, 2);
        detail::write_u64(out, static_cast<std::uint64_t>(t->value.rows()));
        detail::write_u64(out, static_cast<std::uint64_t>(t->value.cols()));
        detail::write_f64_blob(out, t->value);
    }
    if (!out) throw std::runtime_error("save_checkpoint: write failed for " + path);
}

/// Reads metadata only (no tensor payload).
inline std::map<std::string, std::string> read_checkpoint_metadata(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_checkpoint_metadata: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (std::memcmp(magic, kCheckpointMagic, 8) != 0) {
        throw std::runtime_error("read_checkpoint_metadata: bad magic in " + path);
    }
    const std::uint32_t version = detail::read_u32(in);
    if (version != kCheckpointVersion) {
        throw std::runtime_error("read_checkpoint_metadata: unsupported version");
    }
    std::map<std::string, std::string> metadata;
    const std::uint32_t n = detail::read_u32(in);
    for (std::uint32_t i = 0; i < n; ++i) {
        std::string k = detail::read_string(in);
        metadata[k] = detail::read_string(in);
    }
    if (!in) throw std::runtime_error("read_checkpoint_metadata: truncated " + path);
    return metadata;
}

/// Loads tensor values into the given (already constructed) tensors,
/// matching strictly by order, name and shape.
inline std::map<std::string, std::string> load_checkpoint(
    const std::string& path, const std::vector<Tensor*>& tensors) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (std::memcmp(magic, kCheckpointMagic, 8) != 0) {
        throw std::runtime_error("load_checkpoint: bad magic in " + path);
    }
    if (detail::read_u32(in) != kCheckpointVersion) {
        throw std::runtime_error("load_checkpoint: unsupported version");
    }
    std::map<std::string, std::string> metadata;
    const std::uint32_t n_meta = detail::read_u32(in);
    for (std::uint32_t i = 0; i < n_meta; ++i) {
        std::string k = detail::read_string(in);
        metadata[k] = detail::read_string(in);
    }
    const std::uint64_t count = detail::read_u64(in);
    if (count != tensors.size()) {
        throw std::runtime_error("load_checkpoint: tensor count mismatch in " + path);
    }
    for (Tensor* t : tensors) {
        const std::string name = detail::read_string(in);
        if (name != t->name) {
            throw std::runtime_error("load_checkpoint: expected tensor " + t->name + ", found " +
                                     name);
        }
        if (detail::read_u32(in) != 2) {
            throw std::runtime_error("load_checkpoint: unsupported rank for " + name);
        }
        const std::uint64_t rows = detail::read_u64(in);
        const std::uint64_t cols = detail::read_u64(in);
        if (rows != static_cast<std::uint64_t>(t->value.rows()) ||
            cols != static_cast<std::uint64_t>(t->value.cols())) {
            throw std::runtime_error("load_checkpoint: shape mismatch for " + name);
        }
        detail::read_f64_blob(in, t->value);
    }
    if (!in) throw std::runtime_error("load_checkpoint: truncated " + path);
    return metadata;
}

}  // namespace wakelab::nn
