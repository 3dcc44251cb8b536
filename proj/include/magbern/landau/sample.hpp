#pragma once

#include <cmath>
#include <numbers>

#include "magbern/core/errors.hpp"
#include "magbern/core/rng.hpp"
#include "magbern/landau/landau_form.hpp"

namespace magbern::landau {

/// Random element of the span of levels 0..max_level: `terms` level terms
/// with centers uniform in the disk of radius `center_radius` and complex
/// Gaussian coefficients normalized by the level norm.
inline LevelExpansion random_expansion(double B, int max_level, int terms, double center_radius, SplitStream& rng) {
    require(B > 0.0 && max_level >= 0 && terms >= 1 && center_radius >= 0.0, "bad random expansion parameters");
    LevelExpansion f{B, {}};
    for (int i = 0; i < terms; ++i) {
        LevelTerm t;
        t.level = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(max_level + 1));
        const double r = center_radius * std::sqrt(rng.uniform());
        const double th = 2.0 * std::numbers::pi * rng.uniform();
        t.center = {r * std::cos(th), r * std::sin(th)};
        const double a = rng.normal();
        const double b = rng.normal();
        t.coefficient = cplx(a, b) / std::sqrt(level_state_norm2(t.level, B));
        f.terms.push_back(t);
    }
    return f;
}

}  // namespace magbern::landau
