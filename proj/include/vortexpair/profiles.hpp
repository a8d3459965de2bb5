// profiles.hpp - bundled starting vorticities for runs that do not load a
// field from disk, sampled at cell centers.
#pragma once

#include <stdexcept>
#include <string>

#include "vortexpair/domain.hpp"

namespace vortexpair {

// "patch" is the unit-strength disc of radius 0.5 centered at (0, 0.75);
// "annulus" hollows out the inner half of the same disc
inline Field builtin_profile(const Domain& d, const std::string& name) {
    double inner = 0.0;
    if (name == "annulus")
        inner = 0.25;
    else if (name != "patch")
        throw std::invalid_argument("builtin_profile: unknown profile '" + name +
                                    "' (have: patch, annulus)");
    const double cx = 0.0, cy = 0.75, outer = 0.5;
    Field f(d, 0.0, true);
    for (int j = 0; j < d.ny; ++j) {
        const double dy = d.y_center(j) - cy;
        for (int i = 0; i < d.nx; ++i) {
            const double dx = d.x_center(i) - cx;
            const double r2 = dx * dx + dy * dy;
            if (r2 <= outer * outer && r2 >= inner * inner) f.at(i, j) = 1.0;
        }
    }
    return f;
}

} // namespace vortexpair
