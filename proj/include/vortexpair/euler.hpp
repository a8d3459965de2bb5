// euler.hpp - half-plane Euler evolution in vorticity form via semi-Lagrangian
// advection, plus the orbital-stability experiment around a computed maximizer.
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "vortexpair/domain.hpp"
#include "vortexpair/greens.hpp"

namespace vortexpair {

struct EvolutionState {
    Field omega;
    double t = 0.0;
    double dt = 0.0;
    double energy0 = 0.0; // conserved references recorded at t = 0
    double impulse0 = 0.0;
    double mass0 = 0.0;
    double clamped_mass = 0.0; // total mass removed by the nonnegativity clamp
    bool cfl_warning = false;  // some step moved faster than one cell per dt
};

struct ConservationSample {
    double t = 0.0;
    double energy = 0.0;
    double impulse_value = 0.0;
    double mass = 0.0;
    double xp = 0.0;
};

struct Trajectory {
    EvolutionState state; // final state
    std::vector<ConservationSample> series;
};

struct StabilityReport {
    double delta = 0.0;   // requested perturbation size in the solution norm
    double epsilon = 0.0; // row-blend weight that realizes it
    double max_distance = 0.0;
    std::vector<double> distances; // orbit distance at each recorded time
    std::vector<ConservationSample> series;
    bool cfl_warning = false;
};

// values move up k rows (down for negative k), vacated rows are zero
inline Field shift_rows(const Field& f, int k) {
    Field r(f.domain, 0.0, f.nonneg);
    for (int j = 0; j < f.domain.ny; ++j) {
        const int src = j - k;
        if (src < 0 || src >= f.domain.ny) continue;
        for (int i = 0; i < f.domain.nx; ++i) r.at(i, j) = f.at(i, src);
    }
    return r;
}

// smallest solution-norm distance to the x1-translate family of rep
inline double orbit_distance(const Field& omega, const Field& rep, double p) {
    require_same_grid(omega, rep, "orbit_distance");
    double best = std::numeric_limits<double>::infinity();
    for (int k = -(omega.domain.nx - 1); k < omega.domain.nx; ++k)
        best = std::min(best, xp_norm(omega - shift_columns(rep, k), p));
    return best;
}

class EulerAdvector {
public:
    explicit EulerAdvector(const Domain& d) : kernel_(d) {}

    const KernelTable& kernel() const { return kernel_; }
    const Domain& domain() const { return kernel_.domain(); }

    EvolutionState make_state(Field omega, double dt) const {
        if (!(omega.domain == domain()))
            throw std::invalid_argument("EulerAdvector: field grid does not match");
        if (!is_nonnegative(omega))
            throw std::invalid_argument("EulerAdvector: vorticity must be nonnegative");
        if (!(dt > 0.0)) throw std::invalid_argument("EulerAdvector: dt must be positive");
        EvolutionState s;
        s.omega = std::move(omega);
        s.omega.nonneg = true;
        s.dt = dt;
        s.energy0 = kernel_.energy(s.omega);
        s.impulse0 = impulse(s.omega);
        s.mass0 = integrate(s.omega);
        return s;
    }

    // one semi-Lagrangian step: freeze the velocity, trace each cell center
    // backward with four explicit stages, sample the old vorticity there
    EvolutionState step(const EvolutionState& s) const {
        const Domain& d = domain();
        Field u1, u2;
        kernel_.velocity(s.omega, u1, u2);

        double umax2 = 0.0;
        for (std::size_t k = 0; k < u1.values.size(); ++k)
            umax2 = std::max(umax2,
                             u1.values[k] * u1.values[k] + u2.values[k] * u2.values[k]);
        const double h = std::min(d.dx(), d.dy());

        EvolutionState out;
        out.t = s.t + s.dt;
        out.dt = s.dt;
        out.energy0 = s.energy0;
        out.impulse0 = s.impulse0;
        out.mass0 = s.mass0;
        out.clamped_mass = s.clamped_mass;
        out.cfl_warning = s.cfl_warning || std::sqrt(umax2) * s.dt > h;
        out.omega = Field(d, 0.0, true);

        const double dt = s.dt;
        double clamped = 0.0;
        for (int j = 0; j < d.ny; ++j)
            for (int i = 0; i < d.nx; ++i) {
                const double x0 = d.x_center(i), y0 = d.y_center(j);
                const Point k1 = point_velocity(u1, u2, x0, y0);
                const Point k2 = point_velocity(u1, u2, x0 - 0.5 * dt * k1.x, y0 - 0.5 * dt * k1.y);
                const Point k3 = point_velocity(u1, u2, x0 - 0.5 * dt * k2.x, y0 - 0.5 * dt * k2.y);
                const Point k4 = point_velocity(u1, u2, x0 - dt * k3.x, y0 - dt * k3.y);
                const double fx = x0 - dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
                const double fy = y0 - dt / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
                double v = sample_omega(s.omega, fx, fy);
                if (v < 0.0) {
                    clamped -= v;
                    v = 0.0;
                }
                out.omega.at(i, j) = v;
            }
        out.clamped_mass += clamped * d.cell_area();
        return out;
    }

    // march to time T, sampling the conservation series every record_every
    // steps (plus start and end); on_record sees each sampled state
    Trajectory evolve(EvolutionState s, double T, int record_every, double p = 3.0,
                      const std::function<void(const EvolutionState&)>& on_record = {}) const {
        if (!(T > 0.0)) throw std::invalid_argument("evolve: horizon must be positive");
        if (record_every < 1) throw std::invalid_argument("evolve: record_every must be >= 1");
        Trajectory out;
        const long nsteps = std::lround(std::ceil(T / s.dt - 1e-9));
        record(out, s, p, on_record);
        for (long n = 1; n <= nsteps; ++n) {
            s = step(s);
            if (n % record_every == 0 || n == nsteps) record(out, s, p, on_record);
        }
        out.state = std::move(s);
        return out;
    }

    // perturb a maximizer by blending toward its one-row raise, sized so the
    // solution-norm distance is exactly delta, then watch the orbit distance
    StabilityReport stability_experiment(const Field& rep, double delta, double T, double dt,
                                         int record_every, double p = 3.0) const {
        if (!is_nonnegative(rep))
            throw std::invalid_argument(
                "stability_experiment: reference must be nonnegative (two-signed data is outside "
                "the supported regime)");
        if (delta < 0.0) throw std::invalid_argument("stability_experiment: delta must be >= 0");

        StabilityReport rep_out;
        rep_out.delta = delta;
        Field omega0 = rep;
        if (delta > 0.0) {
            const Field raised = shift_rows(rep, 1);
            const double unit = xp_norm(raised - rep, p);
            if (!(unit > 0.0))
                throw std::invalid_argument("stability_experiment: reference field is empty");
            const double eps = delta / unit;
            if (eps > 1.0)
                throw std::invalid_argument(
                    "stability_experiment: delta too large to realize as a nonnegative "
                    "perturbation");
            rep_out.epsilon = eps;
            omega0 = (1.0 - eps) * rep + eps * raised;
        }

        const Trajectory traj =
            evolve(make_state(std::move(omega0), dt), T, record_every, p,
                   [&](const EvolutionState& st) {
                       const double dist = orbit_distance(st.omega, rep, p);
                       rep_out.distances.push_back(dist);
                       rep_out.max_distance = std::max(rep_out.max_distance, dist);
                   });
        rep_out.series = traj.series;
        rep_out.cfl_warning = traj.state.cfl_warning;
        return rep_out;
    }

private:
    void record(Trajectory& out, const EvolutionState& s, double p,
                const std::function<void(const EvolutionState&)>& on_record) const {
        ConservationSample c;
        c.t = s.t;
        c.energy = kernel_.energy(s.omega);
        c.impulse_value = impulse(s.omega);
        c.mass = integrate(s.omega);
        c.xp = xp_norm(s.omega, p);
        out.series.push_back(c);
        if (on_record) on_record(s);
    }

    // cubic-convolution sample with zero padding beyond the strip; rows below
    // the axis are the signed mirror image, so the interpolant honors the wall.
    // The result is clipped to the range of the four surrounding cells, which
    // keeps the scheme from minting new extrema at sharp fronts.
    double sample(const Field& F, double x, double y, double bottom_sign) const {
        const Domain& d = domain();
        const double gx = (x - d.x_center(0)) / d.dx();
        const double gy = (y - d.y_center(0)) / d.dy();
        if (!(gx > -3.0) || !(gx < d.nx + 2.0) || !(gy > -3.0) || !(gy < d.ny + 2.0))
            return 0.0;
        const double fi = std::floor(gx), fj = std::floor(gy);
        const int i0 = static_cast<int>(fi), j0 = static_cast<int>(fj);
        const double ax = gx - fi, ay = gy - fj;
        auto cell = [&](int i, int j) -> double {
            if (i < 0 || i >= d.nx) return 0.0;
            if (j >= 0) return j < d.ny ? F.at(i, j) : 0.0;
            const int m = -1 - j;
            return m < d.ny ? bottom_sign * F.at(i, m) : 0.0;
        };
        auto weights = [](double t, double w[4]) {
            w[0] = 0.5 * (-t + 2.0 * t * t - t * t * t);
            w[1] = 0.5 * (2.0 - 5.0 * t * t + 3.0 * t * t * t);
            w[2] = 0.5 * (t + 4.0 * t * t - 3.0 * t * t * t);
            w[3] = 0.5 * (-t * t + t * t * t);
        };
        double wx[4], wy[4];
        weights(ax, wx);
        weights(ay, wy);
        double v = 0.0;
        for (int b = 0; b < 4; ++b) {
            if (wy[b] == 0.0) continue;
            double row = 0.0;
            for (int a = 0; a < 4; ++a) row += wx[a] * cell(i0 - 1 + a, j0 - 1 + b);
            v += wy[b] * row;
        }
        const double c00 = cell(i0, j0), c10 = cell(i0 + 1, j0);
        const double c01 = cell(i0, j0 + 1), c11 = cell(i0 + 1, j0 + 1);
        const double lo = std::min(std::min(c00, c10), std::min(c01, c11));
        const double hi = std::max(std::max(c00, c10), std::max(c01, c11));
        return std::min(std::max(v, lo), hi);
    }

    // velocity at an arbitrary point; below the axis the flow mirrors, with
    // the vertical component flipping sign
    Point point_velocity(const Field& u1, const Field& u2, double x, double y) const {
        double sign = 1.0;
        if (y < 0.0) {
            y = -y;
            sign = -1.0;
        }
        return {sample(u1, x, y, 1.0), sign * sample(u2, x, y, -1.0)};
    }

    // vorticity at a departure point, reflected into the half plane
    double sample_omega(const Field& w, double x, double y) const {
        if (y < 0.0) y = -y;
        return sample(w, x, y, -1.0);
    }

    KernelTable kernel_;
};

} // namespace vortexpair
