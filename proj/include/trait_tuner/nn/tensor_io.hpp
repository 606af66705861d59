#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "../errors.hpp"
#include "ops.hpp"

namespace trait_tuner::nn {

static_assert(std::endian::native == std::endian::little, "tensor files are little-endian");

// Layout: "TTWT" | u32 version | u64 count | count x (u32 name_len | name |
// u64 rows | u64 cols | rows*cols f64, row-major).
inline constexpr char tensor_magic[4] = {'T', 'T', 'W', 'T'};
inline constexpr std::uint32_t tensor_format_version = 1;

using TensorMap = std::map<std::string, Matrix>;

namespace detail {

template <typename T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <typename T>
T get(std::ifstream& in, const std::filesystem::path& path) {
    T v{};
    if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ParseError("truncated tensor file " + path.string());
    return v;
}

} // namespace detail

inline void save_tensors(const std::filesystem::path& path, const std::vector<const Param*>& params) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw LoadError("cannot write " + tmp.string());
        out.write(tensor_magic, 4);
        detail::put(out, tensor_format_version);
        detail::put(out, static_cast<std::uint64_t>(params.size()));
        for (const Param* p : params) {
            detail::put(out, static_cast<std::uint32_t>(p->name.size()));
            out.write(p->name.data(), static_cast<std::streamsize>(p->name.size()));
            detail::put(out, static_cast<std::uint64_t>(p->value.rows()));
            detail::put(out, static_cast<std::uint64_t>(p->value.cols()));
            out.write(reinterpret_cast<const char*>(p->value.data()),
                      static_cast<std::streamsize>(p->value.size() * sizeof(double)));
        }
        if (!out) throw LoadError("short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

inline TensorMap load_tensors(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw LoadError("missing tensor file " + path.string());
    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, tensor_magic, 4) != 0)
        throw ParseError("not a tensor file: " + path.string());
    if (detail::get<std::uint32_t>(in, path) != tensor_format_version)
        throw ParseError("unsupported tensor file version: " + path.string());
    const auto count = detail::get<std::uint64_t>(in, path);
    TensorMap tensors;
    for (std::uint64_t i = 0; i < count; ++i) {
        const auto len = detail::get<std::uint32_t>(in, path);
        std::string name(len, '\0');
        if (!in.read(name.data(), len)) throw ParseError("truncated tensor file " + path.string());
        const auto rows = detail::get<std::uint64_t>(in, path);
        const auto cols = detail::get<std::uint64_t>(in, path);
        Matrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        if (!in.read(reinterpret_cast<char*>(m.data()), static_cast<std::streamsize>(m.size() * sizeof(double))))
            throw ParseError("truncated tensor file " + path.string());
        tensors.emplace(std::move(name), std::move(m));
    }
    return tensors;
}

/// Copies tensors into matching parameters. Every parameter must be present
/// with the right shape.
inline void assign_tensors(const TensorMap& tensors, const std::vector<Param*>& params, const std::string& source) {
    for (Param* p : params) {
        auto it = tensors.find(p->name);
        if (it == tensors.end()) throw LoadError(source + ": missing tensor '" + p->name + "'");
        if (it->second.rows() != p->value.rows() || it->second.cols() != p->value.cols())
            throw LoadError(source + ": shape mismatch for tensor '" + p->name + "'");
        p->value = it->second;
    }
}

} // namespace trait_tuner::nn
