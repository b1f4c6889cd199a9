#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <map>
#include <string>

#include "compreg/types.hpp"

static_assert(std::endian::native == std::endian::little,
              "binary formats are little-endian; big-endian hosts are unsupported");

namespace compreg {

/// Byte-offset-tracking reader for the fixed-width binary formats.
class BinaryReader {
public:
    explicit BinaryReader(const std::string& path) : path_(path), in_(path, std::ios::binary) {
        if (!in_) throw FormatError("cannot open '" + path + "' for reading");
    }

    std::uint32_t read_u32() { return read_pod<std::uint32_t>("u32"); }
    std::uint64_t read_u64() { return read_pod<std::uint64_t>("u64"); }
    double read_f64() { return read_pod<double>("f64"); }

    void read_magic(const char expected[4]) {
        char m[4];
        read_bytes(m, 4, "magic");
        if (std::memcmp(m, expected, 4) != 0) {
            throw FormatError(path_ + ": bad magic, expected '" + std::string(expected, 4) + "'",
                              offset_ - 4);
        }
    }

    void read_f64_array(double* dst, std::size_t n) {
        read_bytes(reinterpret_cast<char*>(dst), n * sizeof(double), "f64 array");
    }

    std::size_t offset() const { return offset_; }
    const std::string& path() const { return path_; }

    [[noreturn]] void fail(const std::string& what, std::size_t at) const {
        throw FormatError(path_ + ": " + what, at);
    }

private:
    template <typename T>
    T read_pod(const char* what) {
        T v;
        read_bytes(reinterpret_cast<char*>(&v), sizeof(T), what);
        return v;
    }

    void read_bytes(char* dst, std::size_t n, const char* what) {
        in_.read(dst, static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n) {
            throw FormatError(path_ + ": truncated file while reading " + std::string(what),
                              offset_ + static_cast<std::size_t>(in_.gcount()));
        }
        offset_ += n;
    }

    std::string path_;
    std::ifstream in_;
    std::size_t offset_ = 0;
};

class BinaryWriter {
public:
    explicit BinaryWriter(const std::string& path) : path_(path), out_(path, std::ios::binary) {
        if (!out_) throw FormatError("cannot open '" + path + "' for writing");
    }

    void write_u32(std::uint32_t v) { write_pod(v); }
    void write_u64(std::uint64_t v) { write_pod(v); }
    void write_f64(double v) { write_pod(v); }
    void write_magic(const char m[4]) { out_.write(m, 4); }
    void write_f64_array(const double* src, std::size_t n) {
        out_.write(reinterpret_cast<const char*>(src), static_cast<std::streamsize>(n * sizeof(double)));
    }

    void close() {
        out_.close();
        if (!out_) throw FormatError("write failure on '" + path_ + "'");
    }

private:
    template <typename T>
    void write_pod(T v) {
        out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }

    std::string path_;
    std::ofstream out_;
};

// ---- VEC1: raw f64 vector with length prefix --------------------------------

void write_vector(const DenseVector& v, const std::string& path);
DenseVector read_vector(const std::string& path);

// ---- run manifest: flat key=value text -------------------------------------

/// Ordered key=value manifest written alongside every CLI output.
class Manifest {
public:
    void set(const std::string& key, const std::string& value) {
        for (auto& kv : entries_)
            if (kv.first == key) {
                kv.second = value;
                return;
            }
        entries_.emplace_back(key, value);
    }
    void set(const std::string& key, double value);
    void set(const std::string& key, std::uint64_t value) { set(key, std::to_string(value)); }
    void write(const std::string& path) const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

/// Deterministic formatting used for all CSV/manifest numeric output.
std::string format_double(double v);

}  // namespace compreg
