#include "qbsg/rng.hpp"

#include <cmath>
#include <numbers>

namespace qbsg {

double RngStream::normal(double mean, double sigma) {
    // Box-Muller.  u1 is forced away from zero so log(u1) is finite; the
    // second variate of the pair is discarded to keep the draws-per-call
    // count fixed at two, which makes replay offsets easy to reason about.
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + sigma * r * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace qbsg
