// domain.hpp - uniform cell grid on a truncated half-plane strip, scalar
// fields living on it, and the integral quantities everything else is
// built from (mass, impulse, Lp norms).
#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace vortexpair {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Exact accumulation of doubles (Shewchuk-style expansion).  The running
// sum is kept as a list of non-overlapping components, so the result does
// not depend on the order terms arrive in.  That makes reductions over a
// permuted grid bit-identical, which several invariants rely on.
class ExactSum {
public:
    void add(double x) {
        std::size_t keep = 0;
        for (std::size_t i = 0; i < parts_.size(); ++i) {
            double p = parts_[i];
            double s = x + p;
            double bv = s - x;
            double err = (x - (s - bv)) + (p - bv);
            if (err != 0.0) parts_[keep++] = err;
            x = s;
        }
        parts_.resize(keep);
        parts_.push_back(x);
    }
    double value() const {
        double s = 0.0;
        for (double p : parts_) s += p;  // components ordered small to large
        return s;
    }

private:
    std::vector<double> parts_;
};

// Grid of nx-by-ny equal cells covering [-L, L] x (0, Z).  Cells are
// addressed row-major from the bottom row; values are sampled at centers.
struct Domain {
    double half_width = 1.0;   // L
    double strip_height = 1.0; // Z
    int nx = 2;
    int ny = 2;

    Domain() = default;
    Domain(double L, double Z, int nx_, int ny_)
        : half_width(L), strip_height(Z), nx(nx_), ny(ny_) {
        if (!(L > 0.0) || !(Z > 0.0))
            throw std::invalid_argument("Domain: extents must be positive");
        if (nx < 2 || ny < 2)
            throw std::invalid_argument("Domain: need at least 2 cells per direction");
    }

    double dx() const { return 2.0 * half_width / nx; }
    double dy() const { return strip_height / ny; }
    double cell_area() const { return dx() * dy(); }
    double x_center(int i) const { return -half_width + (i + 0.5) * dx(); }
    double y_center(int j) const { return (j + 0.5) * dy(); }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }

    bool operator==(const Domain&) const = default;
};

struct Field {
    Domain domain;
    std::vector<double> values; // size nx*ny, bottom row first
    bool nonneg = false;

    Field() = default;
    explicit Field(const Domain& d, double fill = 0.0, bool nonneg_ = false)
        : domain(d), values(d.size(), fill), nonneg(nonneg_) {}

    double& at(int i, int j) { return values[domain.index(i, j)]; }
    double at(int i, int j) const { return values[domain.index(i, j)]; }
    double& operator[](std::size_t k) { return values[k]; }
    double operator[](std::size_t k) const { return values[k]; }

    void validate() const {
        if (values.size() != domain.size())
            throw std::invalid_argument("Field: value count does not match grid");
        for (double v : values) {
            if (!std::isfinite(v))
                throw std::invalid_argument("Field: non-finite value");
            if (nonneg && v < 0.0)
                throw std::invalid_argument("Field: negative value in nonneg field");
        }
    }
};

inline void require_same_grid(const Field& a, const Field& b, const char* who) {
    if (!(a.domain == b.domain))
        throw std::invalid_argument(std::string(who) + ": fields live on different grids");
}

inline bool is_nonnegative(const Field& f) {
    for (double v : f.values)
        if (v < 0.0) return false;
    return true;
}

// integral of f over the strip (midpoint rule; exact summation)
inline double integrate(const Field& f) {
    ExactSum s;
    for (double v : f.values) s.add(v);
    return f.domain.cell_area() * s.value();
}

// vertical first moment of f; cells in a row share one height weight
inline double impulse(const Field& f) {
    const int nx = f.domain.nx, ny = f.domain.ny;
    ExactSum s;
    for (int j = 0; j < ny; ++j) {
        const double y = f.domain.y_center(j);
        for (int i = 0; i < nx; ++i) s.add(f.values[f.domain.index(i, j)] * y);
    }
    return f.domain.cell_area() * s.value();
}

inline double lp_norm(const Field& f, double p) {
    if (!(p >= 1.0))
        throw std::invalid_argument("lp_norm: p must be >= 1");
    ExactSum s;
    for (double v : f.values) s.add(std::pow(std::fabs(v), p));
    return std::pow(f.domain.cell_area() * s.value(), 1.0 / p);
}

// |impulse| + L1 + Lp; the norm perturbations are measured in
inline double xp_norm(const Field& f, double p) {
    if (!(p > 2.0))
        throw std::invalid_argument("xp_norm: p must be > 2");
    return std::fabs(impulse(f)) + lp_norm(f, 1.0) + lp_norm(f, p);
}

// whole-cell horizontal translation, zero fill at the edges
inline Field shift_columns(const Field& f, int k) {
    Field g(f.domain, 0.0, f.nonneg);
    const int nx = f.domain.nx, ny = f.domain.ny;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            int src = i - k;
            if (src >= 0 && src < nx) g.at(i, j) = f.at(src, j);
        }
    return g;
}

inline Field reflect_x1(const Field& f) {
    Field g(f.domain, 0.0, f.nonneg);
    const int nx = f.domain.nx, ny = f.domain.ny;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) g.at(i, j) = f.at(nx - 1 - i, j);
    return g;
}

inline Field operator-(const Field& a, const Field& b) {
    require_same_grid(a, b, "operator-");
    Field d(a.domain);
    for (std::size_t k = 0; k < d.values.size(); ++k) d.values[k] = a.values[k] - b.values[k];
    return d;
}

inline Field operator+(const Field& a, const Field& b) {
    require_same_grid(a, b, "operator+");
    Field d(a.domain, 0.0, a.nonneg && b.nonneg);
    for (std::size_t k = 0; k < d.values.size(); ++k) d.values[k] = a.values[k] + b.values[k];
    return d;
}

inline Field operator*(double c, const Field& a) {
    Field d(a.domain, 0.0, a.nonneg && c >= 0.0);
    for (std::size_t k = 0; k < d.values.size(); ++k) d.values[k] = c * a.values[k];
    return d;
}

} // namespace vortexpair
