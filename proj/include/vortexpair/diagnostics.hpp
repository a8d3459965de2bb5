// diagnostics.hpp - concentration analysis of field sequences and empirical
// constants for the stream-function growth and decay bounds.  The
// concentration function Q(R) asks how much mass the best half-plane disc of
// radius R can capture; sequences are classified by how Q behaves along them
// (stays full, drains away, or plateaus at a strict fraction while the
// remainder recedes).
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "vortexpair/domain.hpp"
#include "vortexpair/greens.hpp"

namespace vortexpair {

namespace detail {

struct SupportCell {
    double x, y, mass;
};

inline std::vector<SupportCell> support_cells(const Field& f) {
    std::vector<SupportCell> out;
    const int nx = f.domain.nx, ny = f.domain.ny;
    const double area = f.domain.cell_area();
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            if (f.at(i, j) != 0.0)
                out.push_back({f.domain.x_center(i), f.domain.y_center(j), f.at(i, j) * area});
    return out;
}

struct DiscPick {
    double mass = 0.0;
    double cx = 0.0, cy = 0.0;
};

// best closed disc of radius R over candidate centers: every cell center plus
// the points (x_i, 0) on the axis.  Cells count when their centers fall in
// the disc, so growing R only ever adds terms and Q stays exactly monotone.
inline DiscPick best_disc(const Domain& d, const std::vector<SupportCell>& sup, double R) {
    DiscPick best;
    const double r2 = R * R;
    auto visit = [&](double cx, double cy) {
        double m = 0.0;
        for (const auto& c : sup) {
            const double dx = c.x - cx, dy = c.y - cy;
            if (dx * dx + dy * dy <= r2) m += c.mass;
        }
        if (m > best.mass) best = {m, cx, cy};
    };
    for (int i = 0; i < d.nx; ++i) visit(d.x_center(i), 0.0);
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i) visit(d.x_center(i), d.y_center(j));
    return best;
}

inline std::vector<double> clean_radii(std::vector<double> radii) {
    if (radii.empty()) throw std::invalid_argument("concentration analysis: no radii given");
    for (double r : radii)
        if (!(r > 0.0)) throw std::invalid_argument("concentration analysis: radii must be positive");
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    return radii;
}

}  // namespace detail

inline std::map<double, double> concentration_profile(const Field& f,
                                                      const std::vector<double>& radii) {
    if (!is_nonnegative(f))
        throw std::invalid_argument("concentration_profile: field must be nonnegative");
    const std::vector<double> ladder = detail::clean_radii(radii);
    const std::vector<detail::SupportCell> sup = detail::support_cells(f);
    std::map<double, double> out;
    for (double r : ladder) out[r] = detail::best_disc(f.domain, sup, r).mass;
    return out;
}

enum class CCLabel { compactness, vanishing, dichotomy, undetermined };

inline const char* to_string(CCLabel l) {
    switch (l) {
        case CCLabel::compactness: return "compactness";
        case CCLabel::vanishing: return "vanishing";
        case CCLabel::dichotomy: return "dichotomy";
        default: return "undetermined";
    }
}

struct CCThresholds {
    double vanish = 0.05;   // Q(R_max)/mass below this reads as mass escaping every disc
    double compact = 0.95;  // Q(R*)/mass above this at one fixed R* reads as concentration
    double theta = 0.1;     // a dichotomy split must keep at least this fraction on each side
    double plateau = 0.05;  // ladder step growth below this fraction of the mass counts as flat

    void validate() const {
        if (!(vanish > 0.0 && vanish < 1.0) || !(compact > 0.0 && compact < 1.0) ||
            !(theta > 0.0 && theta < 0.5) || !(plateau > 0.0 && plateau < 1.0))
            throw std::invalid_argument("CCThresholds: fractions out of range");
    }
};

struct CCReport {
    std::vector<double> radii;
    std::vector<double> beta;             // total mass per element
    std::vector<std::vector<double>> q;   // q[n][k] = best disc mass at radii[k]
    CCLabel label = CCLabel::undetermined;
    // dichotomy summary, taken from the last element; NaN otherwise
    double alpha = std::numeric_limits<double>::quiet_NaN();
    double residual = std::numeric_limits<double>::quiet_NaN();
    double separation = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> separations;      // per element, NaN where no split was found
};

inline CCReport cc_classify(const std::vector<Field>& seq, const std::vector<double>& radii,
                            CCThresholds t = {}) {
    t.validate();
    CCReport rep;
    rep.radii = detail::clean_radii(radii);
    const std::size_t n = seq.size(), m = rep.radii.size();

    std::vector<std::vector<detail::SupportCell>> sup(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!is_nonnegative(seq[k]))
            throw std::invalid_argument("cc_classify: fields must be nonnegative");
        if (k > 0) require_same_grid(seq[k], seq[0], "cc_classify");
        sup[k] = detail::support_cells(seq[k]);
        const double beta = integrate(seq[k]);
        if (!(beta > 0.0)) throw std::invalid_argument("cc_classify: element with zero mass");
        rep.beta.push_back(beta);
        rep.q.emplace_back();
        for (double r : rep.radii) rep.q.back().push_back(detail::best_disc(seq[k].domain, sup[k], r).mass);
    }
    if (n < 3) return rep;

    const std::size_t first = 2 * n / 3;  // classify on the tail of the sequence

    for (std::size_t k = 0; k < m; ++k) {
        bool all = true;
        for (std::size_t e = first; e < n; ++e) all = all && rep.q[e][k] >= t.compact * rep.beta[e];
        if (all) {
            rep.label = CCLabel::compactness;
            return rep;
        }
    }
    {
        bool all = true;
        for (std::size_t e = first; e < n; ++e) all = all && rep.q[e][m - 1] < t.vanish * rep.beta[e];
        if (all) {
            rep.label = CCLabel::vanishing;
            return rep;
        }
    }

    // dichotomy probe: find the first flat ladder step whose level is a strict
    // fraction of the mass, then locate the remainder with a second disc
    rep.separations.assign(n, std::numeric_limits<double>::quiet_NaN());
    std::vector<double> levels(n, std::numeric_limits<double>::quiet_NaN());
    double plateau_radius = 0.0;
    bool tail_ok = true;
    for (std::size_t e = 0; e < n; ++e) {
        const double beta = rep.beta[e];
        int pick = -1;
        for (std::size_t k = 0; k + 1 < m; ++k) {
            const double level = rep.q[e][k];
            if (rep.q[e][k + 1] - level <= t.plateau * beta && level >= t.theta * beta &&
                level <= (1.0 - t.theta) * beta) {
                pick = static_cast<int>(k);
                break;
            }
        }
        if (pick < 0) {
            if (e >= first) tail_ok = false;
            continue;
        }
        const double rp = rep.radii[pick];
        const detail::DiscPick one = detail::best_disc(seq[e].domain, sup[e], rp);
        std::vector<detail::SupportCell> rest;
        for (const auto& c : sup[e]) {
            const double dx = c.x - one.cx, dy = c.y - one.cy;
            if (dx * dx + dy * dy > rp * rp) rest.push_back(c);
        }
        const detail::DiscPick two = detail::best_disc(seq[e].domain, rest, rp);
        if (!(two.mass > 0.0)) {
            if (e >= first) tail_ok = false;
            continue;
        }
        levels[e] = one.mass;
        rep.separations[e] = std::hypot(one.cx - two.cx, one.cy - two.cy);
        if (e == n - 1) plateau_radius = rp;
    }
    if (tail_ok) {
        bool growing = true;
        for (std::size_t e = first; e + 1 < n; ++e)
            growing = growing && rep.separations[e + 1] > rep.separations[e];
        if (growing && rep.separations[n - 1] > 2.0 * plateau_radius) {
            rep.label = CCLabel::dichotomy;
            rep.alpha = levels[n - 1];
            rep.residual = rep.beta[n - 1] - rep.alpha;
            rep.separation = rep.separations[n - 1];
            return rep;
        }
    }
    rep.separations.clear();
    return rep;
}

// empirical constants for the stream bounds.  Each constant is the supremum
// of psi against the bound's shape; a correct implementation keeps them
// finite, and refining the grid should keep them stable.
struct BoundReport {
    double high_altitude = 0.0;      // psi vs x2^{-1}(1+log x2) I + x2^{-1/alpha} |z|_p^{1-1/alpha} I^{1/alpha}, rows x2 >= 1
    double global_growth = 0.0;      // psi vs (|z|_1 + |z|_p)(x2^{1/q} + x2^2)
    double stream_over_height = 0.0; // sup psi / x2
    double gradient_sup = 0.0;       // sup |grad psi|
    bool tail_applicable = false;    // rows decay outward from a common center and tail data exists
    double tail_start = std::numeric_limits<double>::quiet_NaN();     // twice the support radius
    double tail_constant = std::numeric_limits<double>::quiet_NaN();  // sup psi |x1|^{1/(2p)} / x2 beyond tail_start
    double tail_exponent = std::numeric_limits<double>::quiet_NaN();  // log-log slope of sup_y psi/x2 out there
    double alpha = 2.0;              // exponent used in the high-altitude shape
};

namespace detail {

inline int peak_column(const Field& f) {
    std::size_t arg = 0;
    for (std::size_t k = 1; k < f.values.size(); ++k)
        if (f.values[k] > f.values[arg]) arg = k;
    return static_cast<int>(arg % f.domain.nx);
}

inline bool decays_from_center(const Field& f, int c, double tol) {
    const int nx = f.domain.nx, ny = f.domain.ny;
    double scale = 0.0;
    for (double v : f.values) scale = std::max(scale, std::fabs(v));
    const double slack = tol * std::max(scale, 1.0);
    for (int j = 0; j < ny; ++j) {
        double prev = f.at(c, j);
        for (int off = 1; c + off < nx || c - off >= 0; ++off) {
            if (c + off < nx) {
                if (f.at(c + off, j) > prev + slack) return false;
                prev = f.at(c + off, j);
            }
            if (c - off >= 0) {
                if (f.at(c - off, j) > prev + slack) return false;
                prev = f.at(c - off, j);
            }
        }
    }
    return true;
}

// the largest value can be shared by a block of columns, in which case the
// column holding it first is not necessarily the axis the rows decay from;
// search outward from the peak until a working center turns up
inline int find_decay_center(const Field& f, double tol) {
    const int nx = f.domain.nx;
    const int c0 = peak_column(f);
    if (decays_from_center(f, c0, tol)) return c0;
    for (int off = 1; off < nx; ++off) {
        if (c0 + off < nx && decays_from_center(f, c0 + off, tol)) return c0 + off;
        if (c0 - off >= 0 && decays_from_center(f, c0 - off, tol)) return c0 - off;
    }
    return -1;
}

}  // namespace detail

inline BoundReport bound_report(const KernelTable& kernel, const Field& zeta, double p,
                                double alpha = 2.0) {
    if (!is_nonnegative(zeta))
        throw std::invalid_argument("bound_report: field must be nonnegative");
    if (!(p > 2.0)) throw std::invalid_argument("bound_report: p must be > 2");
    if (!(alpha > 1.0)) throw std::invalid_argument("bound_report: alpha must be > 1");
    if (!(zeta.domain == kernel.domain()))
        throw std::invalid_argument("bound_report: field and kernel grids differ");

    BoundReport rep;
    rep.alpha = alpha;
    const Domain& d = zeta.domain;
    const double q = p / (p - 1.0);
    const double l1 = lp_norm(zeta, 1.0), lp = lp_norm(zeta, p), imp = impulse(zeta);

    const Field psi = kernel.stream(zeta);
    Field u1, u2;
    kernel.velocity_from_stream(psi, u1, u2);

    const double high_scale = std::pow(lp, 1.0 - 1.0 / alpha) * std::pow(imp, 1.0 / alpha);
    for (int j = 0; j < d.ny; ++j) {
        const double y = d.y_center(j);
        for (int i = 0; i < d.nx; ++i) {
            const double v = psi.at(i, j);
            rep.stream_over_height = std::max(rep.stream_over_height, v / y);
            rep.gradient_sup = std::max(rep.gradient_sup, std::hypot(u1.at(i, j), u2.at(i, j)));
            if (l1 + lp > 0.0)
                rep.global_growth = std::max(
                    rep.global_growth, v / ((l1 + lp) * (std::pow(y, 1.0 / q) + y * y)));
            if (y >= 1.0 && imp > 0.0) {
                const double shape =
                    (1.0 + std::log(y)) / y * imp + std::pow(y, -1.0 / alpha) * high_scale;
                rep.high_altitude = std::max(rep.high_altitude, v / shape);
            }
        }
    }

    const int c = detail::find_decay_center(zeta, 1e-12);
    if (c < 0) return rep;

    const double x_axis = d.x_center(c);
    double radius = 0.0;
    bool any = false;
    for (int j = 0; j < d.ny; ++j)
        for (int i = 0; i < d.nx; ++i)
            if (zeta.at(i, j) != 0.0) {
                radius = std::max(radius, std::fabs(d.x_center(i) - x_axis));
                any = true;
            }
    if (!any) return rep;
    rep.tail_start = 2.0 * radius;

    // profile of sup_y psi/x2 per column, fitted beyond twice the support radius
    double cbest = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int fitn = 0;
    for (int i = 0; i < d.nx; ++i) {
        const double xi = std::fabs(d.x_center(i) - x_axis);
        if (!(xi > rep.tail_start)) continue;
        double t = 0.0;
        for (int j = 0; j < d.ny; ++j) t = std::max(t, psi.at(i, j) / d.y_center(j));
        if (!(t > 0.0)) continue;
        cbest = std::max(cbest, t * std::pow(xi, 1.0 / (2.0 * p)));
        if (d.x_center(i) > x_axis) {
            const double lx = std::log(xi), ly = std::log(t);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
            ++fitn;
        }
    }
    if (fitn >= 3) {
        rep.tail_applicable = true;
        rep.tail_constant = cbest;
        rep.tail_exponent = (fitn * sxy - sx * sy) / (fitn * sxx - sx * sx);
    }
    return rep;
}

inline BoundReport bound_report(const Field& zeta, double p, double alpha = 2.0) {
    return bound_report(KernelTable(zeta.domain), zeta, p, alpha);
}

}  // namespace vortexpair
