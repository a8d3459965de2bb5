// vpf_io.hpp - plain-text field files: magic line, grid line, then the cell
// values bottom row first. The writer's formatting is canonical (17
// significant digits), so write-read-write is byte-stable and values survive
// the trip exactly.
#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

#include "vortexpair/domain.hpp"

namespace vortexpair {

namespace detail {

inline std::string canonical(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

inline void write_vpf(std::ostream& os, const Field& f) {
    f.validate();
    os << "VPF 1\n";
    os << f.domain.nx << ' ' << f.domain.ny << ' ' << detail::canonical(f.domain.half_width)
       << ' ' << detail::canonical(f.domain.strip_height) << '\n';
    for (int j = 0; j < f.domain.ny; ++j) {
        for (int i = 0; i < f.domain.nx; ++i) {
            if (i) os << ' ';
            os << detail::canonical(f.at(i, j));
        }
        os << '\n';
    }
}

inline Field read_vpf(std::istream& is) {
    std::string magic;
    int version = 0;
    if (!(is >> magic >> version) || magic != "VPF" || version != 1)
        throw std::runtime_error("vpf: bad magic, expected 'VPF 1'");
    int nx = 0, ny = 0;
    double L = 0.0, Z = 0.0;
    if (!(is >> nx >> ny >> L >> Z)) throw std::runtime_error("vpf: malformed grid line");
    Domain d;
    try {
        d = Domain(L, Z, nx, ny);
    } catch (const std::invalid_argument& e) {
        throw std::runtime_error(std::string("vpf: ") + e.what());
    }
    Field f(d);
    for (std::size_t k = 0; k < f.values.size(); ++k) {
        if (!(is >> f.values[k]))
            throw std::runtime_error("vpf: expected " + std::to_string(f.values.size()) +
                                     " values, got " + std::to_string(k));
        if (!std::isfinite(f.values[k]))
            throw std::runtime_error("vpf: non-finite value at position " + std::to_string(k));
    }
    std::string extra;
    if (is >> extra) throw std::runtime_error("vpf: trailing content after the value block");
    return f;
}

inline Field read_vpf_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
    try {
        return read_vpf(in);
    } catch (const std::runtime_error& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

inline void write_vpf_file(const std::string& path, const Field& f) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_vpf(out, f);
    out.flush();
    if (!out) throw std::runtime_error("failed while writing '" + path + "'");
}

} // namespace vortexpair
