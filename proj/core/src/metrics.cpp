#include "ctoed/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "ctoed/errors.hpp"

namespace ctoed {

QualityScore psnr(const Image& estimate, const Image& reference) {
    if (!estimate.same_shape(reference) || estimate.n == 0)
        throw ShapeMismatch("psnr: image shapes differ");

    double peak = 0.0;
    bool any_nonzero = false;
    for (double r : reference.v) {
        peak = std::max(peak, r);
        any_nonzero |= (r != 0.0);
    }
    if (!any_nonzero) throw ZeroReference("psnr: reference is identically zero");

    double sq = 0.0;
    // iterate via raw vectors to keep the reduction order fixed
    for (size_t i = 0; i < reference.v.size(); ++i) {
        double d = estimate.v[i] - reference.v[i];
        sq += d * d;
    }
    QualityScore q;
    q.mse = sq / static_cast<double>(reference.v.size());
    q.peak = peak;
    q.psnr = (q.mse == 0.0) ? kPsnrCap
                            : 10.0 * std::log10(peak * peak / q.mse);
    return q;
}

}  // namespace ctoed
