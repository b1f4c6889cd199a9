#include "compreg/io.hpp"

#include <cstdio>

namespace compreg {

void write_vector(const DenseVector& v, const std::string& path) {
    BinaryWriter w(path);
    w.write_magic("VEC1");
    w.write_u64(v.size());
    w.write_f64_array(v.data(), v.size());
    w.close();
}

DenseVector read_vector(const std::string& path) {
    BinaryReader r(path);
    r.read_magic("VEC1");
    const std::uint64_t n = r.read_u64();
    DenseVector v(n);
    r.read_f64_array(v.data(), n);
    return v;
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void Manifest::set(const std::string& key, double value) { set(key, format_double(value)); }

void Manifest::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw FormatError("cannot open '" + path + "' for writing");
    for (const auto& [k, v] : entries_) out << k << "=" << v << "\n";
    if (!out) throw FormatError("write failure on '" + path + "'");
}

}  // namespace compreg
