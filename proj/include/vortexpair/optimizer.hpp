// optimizer.hpp - kinetic-energy ascent over the relaxed rearrangement class
// with an impulse budget.  The inner step places the profile greedily on the
// cells ranked by the moving-frame stream; the travel speed lambda is found
// by bisection; exact impulse is restored by blending the two bracketing
// placements, which stays feasible because the relaxed class is convex.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "vortexpair/domain.hpp"
#include "vortexpair/greens.hpp"
#include "vortexpair/rearrange.hpp"

namespace vortexpair {

struct SolverConfig {
    double p = 3.0;             // norm exponent carried into diagnostics
    double impulse = 1.0;       // impulse budget i0
    double energy_tol = 1e-8;   // relative energy stall threshold
    double impulse_tol = 1e-10; // relative slack allowed on the budget
    double lambda_tol = 1e-12;  // relative bisection width
    int max_iters = 500;
    bool symmetrize = true;     // row-symmetrize every iterate
    bool blend = true;          // blend bracketing placements to exact impulse

    void validate() const {
        if (!(p > 2.0)) throw std::invalid_argument("SolverConfig: p must be > 2");
        if (!(impulse > 0.0)) throw std::invalid_argument("SolverConfig: impulse must be positive");
        if (!(energy_tol > 0.0) || !(impulse_tol > 0.0) || !(lambda_tol > 0.0))
            throw std::invalid_argument("SolverConfig: tolerances must be positive");
        if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
    }
};

// stream seen from the frame travelling at speed lambda
inline Field moving_frame_stream(const Field& psi, double lambda) {
    Field r(psi.domain);
    for (int j = 0; j < psi.domain.ny; ++j) {
        const double ly = lambda * psi.domain.y_center(j);
        for (int i = 0; i < psi.domain.nx; ++i) r.at(i, j) = psi.at(i, j) - ly;
    }
    return r;
}

// maximizer of sum(Psi * xi) over curtailed rearrangements of p0, where
// Psi = psi - lambda*x2: place the profile on the cells with positive Psi,
// largest values on largest Psi, dropping whatever does not fit
inline Field linearized_max(const Profile& p0, const Field& psi, double lambda) {
    const Field rel = moving_frame_stream(psi, lambda);
    std::vector<std::uint8_t> active(rel.values.size());
    for (std::size_t k = 0; k < rel.values.size(); ++k) active[k] = rel.values[k] > 0.0;
    return rearrange_onto(p0, rel, active);
}

struct LambdaSplit {
    double lambda_lo = 0.0;  // reported multiplier; support lies in {psi - lambda_lo*x2 > 0}
    double lambda_hi = 0.0;
    double theta = 1.0;      // weight of the lambda_lo placement in the blend
    double impulse_lo = 0.0;
    double impulse_hi = 0.0;
    bool constrained = false; // false: budget inactive, xi is the lambda=0 placement
    Field xi;
};

// choose lambda so the placed field meets the impulse budget: if the
// unconstrained placement already fits, lambda = 0; otherwise bisect (the
// placed impulse is nonincreasing in lambda) and blend the bracketing
// placements to land on the budget exactly
inline LambdaSplit solve_lambda(const Profile& p0, const Field& psi, double i0,
                                const SolverConfig& cfg = {}) {
    if (!(i0 > 0.0)) throw std::invalid_argument("solve_lambda: impulse budget must be positive");
    LambdaSplit out;

    out.xi = linearized_max(p0, psi, 0.0);
    out.impulse_lo = impulse(out.xi);
    if (out.impulse_lo <= i0 * (1.0 + cfg.impulse_tol)) {
        out.impulse_hi = out.impulse_lo;
        return out;
    }
    out.constrained = true;

    double lo = 0.0, hi = 0.0;
    for (int j = 0; j < psi.domain.ny; ++j) {
        const double y = psi.domain.y_center(j);
        for (int i = 0; i < psi.domain.nx; ++i) hi = std::max(hi, psi.at(i, j) / y);
    }
    // nudge past the exact ratio so rounding cannot leave one cell active
    hi *= 1.0 + 1e-13;
    Field xi_lo = out.xi;
    double imp_lo = out.impulse_lo;
    Field xi_hi = linearized_max(p0, psi, hi);
    double imp_hi = impulse(xi_hi);
    if (imp_hi > i0) {
        // the active set at the top of the bracket is empty, so this
        // cannot happen unless the impulse curve is non-monotone
        throw std::runtime_error(
            "solve_lambda: bracket failed, impulse " + std::to_string(imp_hi) +
            " above budget " + std::to_string(i0) + " at lambda " + std::to_string(hi));
    }

    const double width_goal = cfg.lambda_tol * std::max(1.0, hi);
    while (hi - lo > width_goal) {
        const double mid = 0.5 * (lo + hi);
        Field xi_mid = linearized_max(p0, psi, mid);
        const double imp_mid = impulse(xi_mid);
        if (imp_mid >= i0) {
            lo = mid;
            xi_lo = std::move(xi_mid);
            imp_lo = imp_mid;
        } else {
            hi = mid;
            xi_hi = std::move(xi_mid);
            imp_hi = imp_mid;
        }
    }

    out.lambda_lo = lo;
    out.lambda_hi = hi;
    out.impulse_lo = imp_lo;
    out.impulse_hi = imp_hi;
    if (!cfg.blend || imp_lo <= i0 * (1.0 + cfg.impulse_tol)) {
        out.theta = 1.0;
        out.xi = std::move(xi_lo);
        return out;
    }
    out.theta = (i0 - imp_hi) / (imp_lo - imp_hi);
    out.xi = Field(psi.domain, 0.0, true);
    for (std::size_t k = 0; k < out.xi.values.size(); ++k) {
        const double a = xi_lo.values[k], b = xi_hi.values[k];
        // cells common to both placements keep their exact profile value
        out.xi.values[k] = (a == b) ? a : out.theta * a + (1.0 - out.theta) * b;
    }
    return out;
}

struct IterationRecord {
    int iteration = 0;
    double energy = 0.0;
    double impulse_value = 0.0;
    double lambda = 0.0;
    double energy_delta = 0.0; // relative to the previous energy
    double residual = 0.0;     // discordant-pair fraction at this iterate
    double theta = 1.0;
    std::size_t support = 0;
};

struct SolverState {
    Field zeta;
    Field psi; // stream of zeta, recomputed after the final update
    double lambda = 0.0;
    double energy = 0.0;
    double impulse_value = 0.0;
    double best_energy = -std::numeric_limits<double>::infinity();
    double last_energy_delta = 0.0;
    int iterations = 0;
    bool converged = false;
    bool fixed_point = false;
    bool constrained = false;
    bool full_rearrangement = false;
    int profile_mismatches = 0; // unmatched multiset entries against the profile
    std::vector<IterationRecord> trace;
};

struct FirstVariationFit {
    std::vector<double> knot_psi;  // pooled moving-frame stream values, ascending
    std::vector<double> knot_zeta; // fitted vorticity, nondecreasing
    double residual = 0.0;         // discordant-pair fraction on the support
    double rms_residual = 0.0;     // isotonic misfit relative to max zeta
    std::size_t support = 0;
    std::size_t zero_set_violations = 0; // support cells with Psi <= 0
    // largest stream value on an empty cell: the vorticity function must
    // vanish up to here, which pins down where the fitted ramp starts
    double empty_psi_max = -std::numeric_limits<double>::infinity();
    double virial_lhs = 0.0;
    double virial_rhs = 0.0;
    double virial_gap_value = 0.0;
    bool virial_defined = false;
};

// fit of vorticity against the moving-frame stream on the support: pool
// equal stream values, run pool-adjacent-violators for the best
// nondecreasing fit, and count order violations pairwise
inline FirstVariationFit first_variation_residual(const Field& zeta, const Field& Psi) {
    require_same_grid(zeta, Psi, "first_variation_residual");
    FirstVariationFit fit;

    std::vector<std::pair<double, double>> pts; // (Psi, zeta) on the support
    for (std::size_t k = 0; k < zeta.values.size(); ++k)
        if (zeta.values[k] > 0.0) {
            pts.emplace_back(Psi.values[k], zeta.values[k]);
            if (Psi.values[k] <= 0.0) ++fit.zero_set_violations;
        } else {
            fit.empty_psi_max = std::max(fit.empty_psi_max, Psi.values[k]);
        }
    fit.support = pts.size();
    if (pts.empty()) return fit;
    std::sort(pts.begin(), pts.end());

    // discordant pairs: stream strictly increases while vorticity strictly drops
    std::size_t discordant = 0, comparable = 0;
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b) {
            if (pts[a].first == pts[b].first) continue;
            ++comparable;
            if (pts[a].second > pts[b].second) ++discordant;
        }
    fit.residual = comparable ? static_cast<double>(discordant) / comparable : 0.0;

    // pool ties, then pool adjacent violators
    struct Block {
        double s, sum, n;
    };
    std::vector<Block> blocks;
    for (std::size_t k = 0; k < pts.size();) {
        std::size_t e = k;
        double sum = 0.0;
        while (e < pts.size() && pts[e].first == pts[k].first) sum += pts[e++].second;
        blocks.push_back({pts[k].first, sum, static_cast<double>(e - k)});
        k = e;
    }
    std::vector<Block> st;
    for (Block b : blocks) {
        st.push_back(b);
        while (st.size() >= 2) {
            Block& top = st[st.size() - 1];
            Block& under = st[st.size() - 2];
            if (under.sum / under.n <= top.sum / top.n) break;
            under.sum += top.sum;
            under.n += top.n;
            st.pop_back();
        }
    }
    double ss = 0.0, zmax = 0.0;
    std::size_t k = 0;
    for (const Block& b : st) {
        const double m = b.sum / b.n;
        // the pooled average keeps the original knot position of each tie group
        std::size_t members = 0;
        while (k < pts.size() && members < static_cast<std::size_t>(b.n + 0.5)) {
            const double r = pts[k].second - m;
            ss += r * r;
            zmax = std::max(zmax, pts[k].second);
            ++k;
            ++members;
        }
        fit.knot_psi.push_back(b.s);
        fit.knot_zeta.push_back(m);
    }
    fit.rms_residual = zmax > 0.0 ? std::sqrt(ss / pts.size()) / zmax : 0.0;
    return fit;
}

namespace detail {

// integral of the piecewise-linear interpolant that vanishes up to s0,
// passes through (knot_psi[i], knot_zeta[i]) and stays constant beyond the
// last knot
class FittedAntiderivative {
public:
    FittedAntiderivative(const std::vector<double>& s, const std::vector<double>& m, double s0)
        : s_(s), m_(m), acc_(s.size(), 0.0), s0_(s0) {
        if (!s_.empty()) s0_ = std::min(s0_, s_.front());
        double run = 0.0, ps = s0_, pm = 0.0;
        for (std::size_t k = 0; k < s_.size(); ++k) {
            run += 0.5 * (pm + m_[k]) * (s_[k] - ps);
            acc_[k] = run;
            ps = s_[k];
            pm = m_[k];
        }
    }
    double operator()(double s) const {
        if (s <= s0_ || s_.empty()) return 0.0;
        const std::size_t k =
            std::lower_bound(s_.begin(), s_.end(), s) - s_.begin();
        if (k == s_.size()) return acc_.back() + m_.back() * (s - s_.back());
        const double ps = k ? s_[k - 1] : s0_;
        const double pm = k ? m_[k - 1] : 0.0;
        const double pa = k ? acc_[k - 1] : 0.0;
        const double t = (s - ps) / (s_[k] - ps);
        const double mid = pm + t * (m_[k] - pm);
        return pa + 0.5 * (pm + mid) * (s - ps);
    }

private:
    std::vector<double> s_, m_, acc_;
    double s0_;
};

} // namespace detail

// residual of the scaling identity relating the integrated vorticity
// function to lambda times the impulse; fills the virial fields of the fit
inline double virial_gap(FirstVariationFit& fit, const Field& Psi, double lambda,
                         double impulse_value) {
    const double ramp_start = std::max(fit.empty_psi_max, 0.0);
    const detail::FittedAntiderivative Phi(fit.knot_psi, fit.knot_zeta, ramp_start);
    ExactSum s;
    for (double v : Psi.values)
        if (v > 0.0) s.add(Phi(v));
    fit.virial_lhs = 2.0 * Psi.domain.cell_area() * s.value();
    fit.virial_rhs = lambda * impulse_value;
    if (fit.support == 0 && fit.virial_lhs == 0.0) {
        fit.virial_defined = true;
        fit.virial_gap_value = 0.0;
        return 0.0;
    }
    if (!(lambda > 0.0) || !(impulse_value > 0.0)) {
        fit.virial_defined = false;
        fit.virial_gap_value = std::numeric_limits<double>::quiet_NaN();
        return fit.virial_gap_value;
    }
    fit.virial_defined = true;
    fit.virial_gap_value = std::fabs(fit.virial_lhs - fit.virial_rhs) / fit.virial_rhs;
    return fit.virial_gap_value;
}

// count profile entries the field's value multiset fails to reproduce
// (tolerance relative per entry); a blend leaves one or two of these
inline int mismatched_cells(const Field& zeta, const Profile& p0, double rel_tol = 1e-9) {
    std::vector<double> a, b;
    for (double v : zeta.values)
        if (v > 0.0) a.push_back(v);
    for (double v : p0.values)
        if (v > 0.0) b.push_back(v);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t ia = 0, ib = 0, miss = 0;
    while (ia < a.size() && ib < b.size()) {
        const double tol = rel_tol * std::max(a[ia], b[ib]);
        if (std::fabs(a[ia] - b[ib]) <= tol) {
            ++ia;
            ++ib;
        } else if (a[ia] < b[ib]) {
            ++miss;
            ++ia;
        } else {
            ++miss;
            ++ib;
        }
    }
    miss += (a.size() - ia) + (b.size() - ib);
    return static_cast<int>(miss);
}

class AscentSolver {
public:
    AscentSolver(const Domain& d, Profile p0, SolverConfig cfg)
        : kernel_(d), profile_(std::move(p0)), cfg_(cfg) {
        cfg_.validate();
        profile_.validate();
        if (profile_.support_cells == 0)
            throw std::invalid_argument("AscentSolver: profile is identically zero");
        if (profile_.cell_area != d.cell_area())
            throw std::invalid_argument("AscentSolver: profile cell area does not match grid");
    }

    const KernelTable& kernel() const { return kernel_; }
    const Profile& profile() const { return profile_; }
    const SolverConfig& config() const { return cfg_; }

    // symmetric block placed so its impulse comes out near the budget
    Field initial_guess() const {
        const Domain& d = kernel_.domain();
        const double mass = std::accumulate(profile_.values.begin(), profile_.values.end(), 0.0) *
                            profile_.cell_area;
        const double target = std::min(cfg_.impulse / mass, d.strip_height - 0.5 * d.dy());
        Field order(d);
        for (int j = 0; j < d.ny; ++j) {
            const double dy = d.y_center(j) - target;
            for (int i = 0; i < d.nx; ++i) order.at(i, j) = -dy * dy;
        }
        std::vector<std::uint8_t> active(d.size(), 1);
        return steiner_symmetrize(rearrange_onto(profile_, order, active));
    }

    SolverState run() const { return run(initial_guess()); }

    SolverState run(const Field& start) const {
        if (!(start.domain == kernel_.domain()))
            throw std::invalid_argument("AscentSolver: start field grid does not match");
        if (!is_nonnegative(start))
            throw std::invalid_argument("AscentSolver: start field must be nonnegative");
        SolverState st;
        st.zeta = start;
        st.psi = kernel_.stream(st.zeta);
        st.energy = kernel_.energy_with(st.zeta, st.psi);
        st.impulse_value = impulse(st.zeta);
        st.best_energy = st.energy;

        for (int it = 1; it <= cfg_.max_iters; ++it) {
            const LambdaSplit split = solve_lambda(profile_, st.psi, cfg_.impulse, cfg_);
            Field next = cfg_.symmetrize ? steiner_symmetrize(split.xi) : split.xi;
            const bool same = next.values == st.zeta.values;
            const Field psi_next = same ? st.psi : kernel_.stream(next);
            const double e_next = kernel_.energy_with(next, psi_next);
            const double delta = (e_next - st.energy) / std::max(std::fabs(st.energy),
                                                                 std::numeric_limits<double>::min());

            st.zeta = std::move(next);
            st.psi = psi_next;
            st.energy = e_next;
            st.impulse_value = impulse(st.zeta);
            st.best_energy = std::max(st.best_energy, st.energy);
            st.lambda = split.constrained ? split.lambda_lo : 0.0;
            st.constrained = split.constrained;
            st.last_energy_delta = delta;
            st.iterations = it;

            IterationRecord rec;
            rec.iteration = it;
            rec.energy = st.energy;
            rec.impulse_value = st.impulse_value;
            rec.lambda = st.lambda;
            rec.energy_delta = delta;
            rec.theta = split.theta;
            std::size_t sup = 0;
            for (double v : st.zeta.values) sup += v > 0.0;
            rec.support = sup;
            rec.residual =
                first_variation_residual(st.zeta, moving_frame_stream(st.psi, st.lambda)).residual;
            st.trace.push_back(rec);

            if (same) {
                st.converged = true;
                st.fixed_point = true;
                break;
            }
            if (it > 1 && std::fabs(delta) < cfg_.energy_tol) {
                st.converged = true;
                break;
            }
        }

        st.profile_mismatches = mismatched_cells(st.zeta, profile_);
        st.full_rearrangement = st.profile_mismatches == 0;
        return st;
    }

private:
    KernelTable kernel_;
    Profile profile_;
    SolverConfig cfg_;
};

} // namespace vortexpair
