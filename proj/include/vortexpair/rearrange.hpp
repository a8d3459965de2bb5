// rearrange.hpp - decreasing rearrangements of grid fields, the rearrangement
// preorder, Steiner symmetrization, curtailment, and optimal placement of a
// profile onto an ordered active set.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "vortexpair/domain.hpp"

namespace vortexpair {

// a field reduced to its sorted value multiset on equal-area cells
struct Profile {
    std::vector<double> values; // sorted descending, all >= 0
    double cell_area = 0.0;
    std::size_t support_cells = 0; // count of strictly positive entries

    void validate() const {
        if (!(cell_area > 0.0))
            throw std::invalid_argument("Profile: cell_area must be positive");
        for (std::size_t k = 0; k < values.size(); ++k) {
            if (values[k] < 0.0)
                throw std::invalid_argument("Profile: negative value");
            if (k > 0 && values[k] > values[k - 1])
                throw std::invalid_argument("Profile: values not sorted descending");
        }
    }
};

inline Profile decreasing_rearrangement(const Field& f) {
    if (!is_nonnegative(f))
        throw std::invalid_argument("decreasing_rearrangement: field must be nonnegative");
    Profile p;
    p.values = f.values;
    std::sort(p.values.begin(), p.values.end(), std::greater<double>());
    p.cell_area = f.domain.cell_area();
    p.support_cells = 0;
    while (p.support_cells < p.values.size() && p.values[p.support_cells] > 0.0)
        ++p.support_cells;
    return p;
}

inline Profile profile_of(std::vector<double> vals, double area) {
    std::sort(vals.begin(), vals.end(), std::greater<double>());
    Profile p;
    p.values = std::move(vals);
    p.cell_area = area;
    p.support_cells = 0;
    while (p.support_cells < p.values.size() && p.values[p.support_cells] > 0.0)
        ++p.support_cells;
    p.validate();
    return p;
}

namespace detail {

// integral of (f - alpha)_+ from the sorted values and their prefix sums
inline double excess(const std::vector<double>& sorted_desc,
                     const std::vector<double>& prefix, double area, double alpha) {
    // count of entries strictly above alpha
    std::size_t m = std::upper_bound(sorted_desc.begin(), sorted_desc.end(), alpha,
                                     std::greater<double>()) -
                    sorted_desc.begin();
    return area * (prefix[m] - static_cast<double>(m) * alpha);
}

inline std::vector<double> prefix_sums(const std::vector<double>& v) {
    std::vector<double> p(v.size() + 1, 0.0);
    for (std::size_t k = 0; k < v.size(); ++k) p[k + 1] = p[k] + v[k];
    return p;
}

} // namespace detail

// true when the cut integrals of f stay below those of g at every positive
// level.  Both sides are piecewise linear in the level, so checking the
// distinct values of f and g (and the limit toward level zero) is enough.
inline bool precedes(const Profile& f, const Profile& g, double tol = 0.0) {
    std::vector<double> fs = f.values, gs = g.values;
    std::sort(fs.begin(), fs.end(), std::greater<double>());
    std::sort(gs.begin(), gs.end(), std::greater<double>());
    const std::vector<double> fp = detail::prefix_sums(fs);
    const std::vector<double> gp = detail::prefix_sums(gs);

    std::vector<double> levels;
    levels.reserve(fs.size() + gs.size() + 1);
    levels.push_back(0.0);
    for (double v : fs)
        if (v > 0.0) levels.push_back(v);
    for (double v : gs)
        if (v > 0.0) levels.push_back(v);

    for (double a : levels) {
        const double ef = detail::excess(fs, fp, f.cell_area, a);
        const double eg = detail::excess(gs, gp, g.cell_area, a);
        if (ef > eg + tol) return false;
    }
    return true;
}

inline bool precedes(const Field& f, const Field& g, double tol = 0.0) {
    return precedes(decreasing_rearrangement(f), decreasing_rearrangement(g), tol);
}

inline bool precedes(const Field& f, const Profile& g, double tol = 0.0) {
    return precedes(decreasing_rearrangement(f), g, tol);
}

// equality of the value multisets on equal-area cells; zero tolerance by
// default, an explicit tolerance compares entrywise after sorting
inline bool is_rearrangement(const Profile& f, const Profile& g, double tol = 0.0) {
    if (f.cell_area != g.cell_area)
        return precedes(f, g, tol) && precedes(g, f, tol);
    std::vector<double> fs = f.values, gs = g.values;
    // pad the shorter list with zeros so grids of unequal size compare
    if (fs.size() < gs.size()) fs.resize(gs.size(), 0.0);
    if (gs.size() < fs.size()) gs.resize(fs.size(), 0.0);
    std::sort(fs.begin(), fs.end());
    std::sort(gs.begin(), gs.end());
    for (std::size_t k = 0; k < fs.size(); ++k)
        if (std::fabs(fs[k] - gs[k]) > tol) return false;
    return true;
}

inline bool is_rearrangement(const Field& f, const Field& g, double tol = 0.0) {
    return is_rearrangement(decreasing_rearrangement(f), decreasing_rearrangement(g), tol);
}

inline bool is_rearrangement(const Field& f, const Profile& g, double tol = 0.0) {
    return is_rearrangement(decreasing_rearrangement(f), g, tol);
}

// keep the largest values up to total measure ell: whole cells first,
// one fractional cell scaled, the rest zeroed
inline Profile curtail(const Profile& p, double ell) {
    if (ell < 0.0)
        throw std::invalid_argument("curtail: negative measure");
    Profile q = p;
    const double cells = ell / p.cell_area;
    for (std::size_t k = 0; k < q.values.size(); ++k) {
        const double kd = static_cast<double>(k);
        if (kd + 1.0 <= cells) continue;                    // fully kept
        if (kd < cells) q.values[k] *= (cells - kd);        // fractional cell
        else q.values[k] = 0.0;
    }
    q.support_cells = 0;
    while (q.support_cells < q.values.size() && q.values[q.support_cells] > 0.0)
        ++q.support_cells;
    return q;
}

struct SteinerSpec {
    int center_col = -1; // -1 means nx/2
};

// row by row: sort the row multiset descending and lay it out around the
// center column in the order 0, +1, -1, +2, -2, ...; offsets falling off
// the grid are skipped so every value keeps a cell
inline Field steiner_symmetrize(const Field& f, const SteinerSpec& spec = {}) {
    if (!is_nonnegative(f))
        throw std::invalid_argument("steiner_symmetrize: field must be nonnegative");
    const int nx = f.domain.nx, ny = f.domain.ny;
    const int c = spec.center_col < 0 ? nx / 2 : spec.center_col;
    if (c < 0 || c >= nx)
        throw std::invalid_argument("steiner_symmetrize: center column outside grid");

    std::vector<int> cols;
    cols.reserve(nx);
    cols.push_back(c);
    for (int off = 1; static_cast<int>(cols.size()) < nx; ++off) {
        if (c + off < nx) cols.push_back(c + off);
        if (c - off >= 0) cols.push_back(c - off);
    }

    Field g(f.domain, 0.0, true);
    std::vector<double> row(nx);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) row[i] = f.at(i, j);
        std::sort(row.begin(), row.end(), std::greater<double>());
        for (int k = 0; k < nx; ++k) g.at(cols[k], j) = row[k];
    }
    return g;
}

// place profile values, largest first, onto the active cells sorted by
// (order value descending, then lower row, then smaller x1).  Values that
// do not fit are dropped, smallest first.
inline Field rearrange_onto(const Profile& p, const Field& order,
                            const std::vector<std::uint8_t>& active) {
    if (active.size() != order.domain.size())
        throw std::invalid_argument("rearrange_onto: active mask size mismatch");
    const int nx = order.domain.nx, ny = order.domain.ny;

    std::vector<std::size_t> cells;
    cells.reserve(order.domain.size());
    for (std::size_t k = 0; k < active.size(); ++k)
        if (active[k]) cells.push_back(k);

    std::sort(cells.begin(), cells.end(), [&](std::size_t a, std::size_t b) {
        if (order.values[a] != order.values[b]) return order.values[a] > order.values[b];
        const int ja = static_cast<int>(a) / nx, jb = static_cast<int>(b) / nx;
        if (ja != jb) return ja < jb;
        return static_cast<int>(a) % nx < static_cast<int>(b) % nx;
    });
    (void)ny;

    Field out(order.domain, 0.0, true);
    const std::size_t n = std::min(cells.size(), p.values.size());
    for (std::size_t k = 0; k < n; ++k) {
        if (p.values[k] == 0.0) break;
        out.values[cells[k]] = p.values[k];
    }
    return out;
}

} // namespace vortexpair
