// greens.hpp - half-plane Green's function, the tabulated cell-pair kernel,
// and the induced stream function / velocity / kinetic energy on the grid.
#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "vortexpair/domain.hpp"

namespace vortexpair {

// G(x,y) = (1/4pi) log(1 + 4 x2 y2 / |x-y|^2), written via log1p so the
// far field does not cancel.  Symmetric, positive, zero on the axis.
inline double half_plane_green(const Point& x, const Point& y) {
    const double dx = x.x - y.x;
    const double dy = x.y - y.y;
    const double r2 = dx * dx + dy * dy;
    if (r2 == 0.0)
        throw std::invalid_argument("half_plane_green: coincident points");
    return 0.25 / std::numbers::pi * std::log1p(4.0 * x.y * y.y / r2);
}

// Precomputed interaction weights for one grid.  Far cell pairs use the
// kernel at cell centers; pairs within near_radius cells (and the self
// cell, whose kernel average is finite despite the log singularity) carry
// a correction from a 16x16 subcell average, symmetrized so that
// w(t,s) == w(s,t) holds exactly.
class KernelTable {
public:
    static constexpr int near_radius = 2;
    static constexpr int subcells = 16;

    explicit KernelTable(const Domain& d) : dom_(d) {
        build_row_kernels();
        build_near_corrections();
    }

    const Domain& domain() const { return dom_; }

    // stream function psi = integral of G(x,.) f at every cell center
    Field stream(const Field& f) const {
        check(f);
        const int nx = dom_.nx, ny = dom_.ny;
        Field psi(dom_);

        std::vector<char> row_used(ny, 0);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i)
                if (f.at(i, j) != 0.0) { row_used[j] = 1; break; }

        for (int jt = 0; jt < ny; ++jt) {
            double* out = &psi.values[dom_.index(0, jt)];
            for (int js = 0; js < ny; ++js) {
                if (!row_used[js]) continue;
                const double* g = row_kernel(jt, js);
                const double* fr = &f.values[dom_.index(0, js)];
                for (int it = 0; it < nx; ++it) {
                    double s = 0.0;
                    for (int is = 0; is <= it; ++is) s += g[it - is] * fr[is];
                    for (int is = it + 1; is < nx; ++is) s += g[is - it] * fr[is];
                    out[it] += s;
                }
            }
        }
        apply_near_corrections(f, psi);
        const double a = dom_.cell_area();
        for (double& v : psi.values) v *= a;
        return psi;
    }

    // plain cell-by-cell summation; the tiled path must agree with this
    Field stream_reference(const Field& f) const {
        check(f);
        const int nx = dom_.nx, ny = dom_.ny;
        Field psi(dom_);
        for (int jt = 0; jt < ny; ++jt)
            for (int it = 0; it < nx; ++it) {
                double s = 0.0;
                for (int js = 0; js < ny; ++js)
                    for (int is = 0; is < nx; ++is) {
                        const double fv = f.at(is, js);
                        if (fv == 0.0) continue;
                        s += pair_weight(it, jt, is, js) * fv;
                    }
                psi.at(it, jt) = dom_.cell_area() * s;
            }
        return psi;
    }

    // weight of one source cell as seen from one target cell
    double pair_weight(int it, int jt, int is, int js) const {
        const int di = std::abs(is - it), dj = js - jt;
        if (di <= near_radius && std::abs(dj) <= near_radius)
            return near_weight(jt, dj, di);
        return row_kernel(jt, js)[di];
    }

    // pointwise stream evaluation anywhere in the closed half plane
    double stream_at(const Field& f, const Point& p) const {
        check(f);
        if (p.y < 0.0)
            throw std::invalid_argument("stream_at: point below the axis");
        const int nx = dom_.nx, ny = dom_.ny;
        const double h1 = dom_.dx(), h2 = dom_.dy();
        double s = 0.0;
        for (int js = 0; js < ny; ++js)
            for (int is = 0; is < nx; ++is) {
                const double fv = f.at(is, js);
                if (fv == 0.0) continue;
                const Point c{dom_.x_center(is), dom_.y_center(js)};
                double w;
                if (std::fabs(p.x - c.x) <= (near_radius + 0.5) * h1 &&
                    std::fabs(p.y - c.y) <= (near_radius + 0.5) * h2) {
                    w = subcell_average(p, c);
                } else {
                    w = half_plane_green(p, c);
                }
                s += w * fv;
            }
        return dom_.cell_area() * s;
    }

    // u = (d2 psi, -d1 psi); centered differences inside, one sided at the
    // strip edges, odd image of psi below the axis for the bottom row
    void velocity(const Field& f, Field& u1, Field& u2) const {
        const Field psi = stream(f);
        velocity_from_stream(psi, u1, u2);
    }

    void velocity_from_stream(const Field& psi, Field& u1, Field& u2) const {
        const int nx = dom_.nx, ny = dom_.ny;
        const double h1 = dom_.dx(), h2 = dom_.dy();
        u1 = Field(dom_);
        u2 = Field(dom_);
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                double dpsi_dy;
                if (j == 0) {
                    // ghost value below the axis is -psi(i,0)
                    dpsi_dy = (psi.at(i, 1) + psi.at(i, 0)) / (2.0 * h2);
                } else if (j == ny - 1) {
                    dpsi_dy = (psi.at(i, j) - psi.at(i, j - 1)) / h2;
                } else {
                    dpsi_dy = (psi.at(i, j + 1) - psi.at(i, j - 1)) / (2.0 * h2);
                }
                double dpsi_dx;
                if (i == 0) {
                    dpsi_dx = (psi.at(1, j) - psi.at(0, j)) / h1;
                } else if (i == nx - 1) {
                    dpsi_dx = (psi.at(i, j) - psi.at(i - 1, j)) / h1;
                } else {
                    dpsi_dx = (psi.at(i + 1, j) - psi.at(i - 1, j)) / (2.0 * h1);
                }
                u1.at(i, j) = dpsi_dy;
                u2.at(i, j) = -dpsi_dx;
            }
    }

    // vertical velocity along the axis line y = 0, from pointwise stream values
    std::vector<double> axis_vertical_velocity(const Field& f) const {
        const int nx = dom_.nx;
        const double h1 = dom_.dx();
        std::vector<double> psi0(nx), u2(nx);
        for (int i = 0; i < nx; ++i) psi0[i] = stream_at(f, {dom_.x_center(i), 0.0});
        for (int i = 0; i < nx; ++i) {
            double d;
            if (i == 0) d = (psi0[1] - psi0[0]) / h1;
            else if (i == nx - 1) d = (psi0[i] - psi0[i - 1]) / h1;
            else d = (psi0[i + 1] - psi0[i - 1]) / (2.0 * h1);
            u2[i] = -d;
        }
        return u2;
    }

    // E = 1/2 <f, G f>
    double energy(const Field& f) const {
        const Field psi = stream(f);
        return energy_with(f, psi);
    }

    double energy_with(const Field& f, const Field& psi) const {
        check(f);
        ExactSum s;
        for (std::size_t k = 0; k < f.values.size(); ++k) s.add(f.values[k] * psi.values[k]);
        return 0.5 * dom_.cell_area() * s.value();
    }

    double inner_stream(const Field& f, const Field& g) const {
        const Field psi = stream(g);
        ExactSum s;
        for (std::size_t k = 0; k < f.values.size(); ++k) s.add(f.values[k] * psi.values[k]);
        return dom_.cell_area() * s.value();
    }

private:
    Domain dom_;
    // one kernel vector per unordered row pair: value at column offset di
    std::vector<double> row_kernels_;
    // corrections for |dj|<=2, di in [0,2]: tabulated minus the center value
    std::vector<double> near_corr_;

    void check(const Field& f) const {
        if (!(f.domain == dom_))
            throw std::invalid_argument("KernelTable: field grid does not match table");
    }

    std::size_t pair_id(int ja, int jb) const {
        if (ja > jb) std::swap(ja, jb);
        return static_cast<std::size_t>(jb) * (jb + 1) / 2 + ja;
    }

    const double* row_kernel(int jt, int js) const {
        return &row_kernels_[pair_id(jt, js) * dom_.nx];
    }

    double near_weight(int jt, int dj, int adi) const {
        return row_kernel(jt, jt + dj)[adi] + near_correction(jt, dj, adi);
    }

    double near_correction(int jt, int dj, int adi) const {
        const std::size_t w = 2 * near_radius + 1;
        return near_corr_[(static_cast<std::size_t>(jt) * w + (dj + near_radius)) * (near_radius + 1) + adi];
    }

    void build_row_kernels() {
        const int nx = dom_.nx, ny = dom_.ny;
        const double h1 = dom_.dx();
        row_kernels_.assign((pair_id(ny - 1, ny - 1) + 1) * nx, 0.0);
        for (int jb = 0; jb < ny; ++jb) {
            const double yb = dom_.y_center(jb);
            for (int ja = 0; ja <= jb; ++ja) {
                const double ya = dom_.y_center(ja);
                double* g = &row_kernels_[pair_id(ja, jb) * nx];
                const double dy = yb - ya;
                for (int di = 0; di < nx; ++di) {
                    if (di == 0 && ja == jb) {
                        g[0] = 0.0; // self weight carried by the near correction
                        continue;
                    }
                    const double dx = di * h1;
                    const double r2 = dx * dx + dy * dy;
                    g[di] = 0.25 / std::numbers::pi * std::log1p(4.0 * ya * yb / r2);
                }
            }
        }
    }

    // average of G(p, .) over the source cell centered at c, for pointwise
    // evaluation when p sits close to (or inside) that cell
    double subcell_average(const Point& p, const Point& c) const {
        const double h1 = dom_.dx(), h2 = dom_.dy();
        double acc = 0.0;
        for (int a = 0; a < subcells; ++a) {
            const double ox = ((a + 0.5) / subcells - 0.5) * h1;
            for (int b = 0; b < subcells; ++b) {
                const double oy = ((b + 0.5) / subcells - 0.5) * h2;
                acc += half_plane_green(p, {c.x + ox, c.y + oy});
            }
        }
        return acc / (subcells * subcells);
    }

    // average of G(target, .) over the source cell by subcell midpoints;
    // the target sits at a cell center, offset (di,dj) cells away
    double offset_average(int jt, int dj, int di) const {
        const double h1 = dom_.dx(), h2 = dom_.dy();
        const Point t{0.0, dom_.y_center(jt)};
        const double cx = di * h1;
        const double cy = dom_.y_center(jt + dj);
        double acc = 0.0;
        for (int a = 0; a < subcells; ++a) {
            const double ox = ((a + 0.5) / subcells - 0.5) * h1;
            for (int b = 0; b < subcells; ++b) {
                const double oy = ((b + 0.5) / subcells - 0.5) * h2;
                acc += half_plane_green(t, {cx + ox, cy + oy});
            }
        }
        return acc / (subcells * subcells);
    }

    void build_near_corrections() {
        const int ny = dom_.ny, nx = dom_.nx;
        const std::size_t w = 2 * near_radius + 1;
        near_corr_.assign(static_cast<std::size_t>(ny) * w * (near_radius + 1), 0.0);
        for (int jt = 0; jt < ny; ++jt)
            for (int dj = -near_radius; dj <= near_radius; ++dj) {
                const int js = jt + dj;
                if (js < 0 || js >= ny) continue;
                for (int adi = 0; adi <= near_radius && adi < nx; ++adi) {
                    // symmetrize the one-sided averages so swapping target
                    // and source leaves the weight bit identical
                    const double q_ts = offset_average(jt, dj, adi);
                    const double q_st = (dj == 0 && adi == 0) ? q_ts : offset_average(js, -dj, adi);
                    const double tabulated = 0.5 * (q_ts + q_st);
                    const double center = row_kernel(jt, js)[adi]; // 0 for the self cell
                    const std::size_t at =
                        (static_cast<std::size_t>(jt) * w + (dj + near_radius)) * (near_radius + 1) + adi;
                    near_corr_[at] = tabulated - center;
                }
            }
    }

    void apply_near_corrections(const Field& f, Field& psi) const {
        const int nx = dom_.nx, ny = dom_.ny;
        for (int jt = 0; jt < ny; ++jt)
            for (int dj = -near_radius; dj <= near_radius; ++dj) {
                const int js = jt + dj;
                if (js < 0 || js >= ny) continue;
                for (int adi = 0; adi <= near_radius && adi < nx; ++adi) {
                    const double c = near_correction(jt, dj, adi);
                    for (int it = 0; it < nx; ++it) {
                        double acc = 0.0;
                        if (it - adi >= 0) acc += f.at(it - adi, js);
                        if (adi != 0 && it + adi < nx) acc += f.at(it + adi, js);
                        if (acc != 0.0) psi.at(it, jt) += c * acc;
                    }
                }
            }
    }
};

} // namespace vortexpair
