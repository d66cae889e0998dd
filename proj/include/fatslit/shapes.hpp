#pragma once

#include "fatslit/cut_density.hpp"
#include "fatslit/explicit_solution.hpp"

namespace fatslit {
namespace shapes {

// Tall acute blob with profile q = 1 + 0.2 s and endpoint exponents 0.35.
// The cut [-3, 3] is shifted so the base is centered on the origin
// (x(p±) = ±0.2139); shorter cuts with this profile fail to embed.
inline CutDensity acute_blob(int m) {
    const double shift = 0.327779;
    return CutDensity::from_profile(-3.0 + shift, 3.0 + shift, 0.35, 0.35, m,
                                    [](double s) { return 1.0 + 0.2 * s; });
}

// Mild asymmetric state, star-shaped about the origin; base ~ [-0.70, 0.76].
inline CutDensity mild_blob(int m) {
    return CutDensity::from_profile(-1.0, 1.2, 0.35, 0.3, m,
                                    [](double s) { return 0.25 * (1.0 + 0.2 * s); });
}

}  // namespace shapes
}  // namespace fatslit
