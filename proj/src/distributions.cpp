#include "gridsynth/distributions.hpp"

#include <cmath>
#include <limits>

#include <boost/math/distributions/normal.hpp>

namespace gridsynth {

namespace {
const boost::math::normal_distribution<double> kStdNormal{0.0, 1.0};
}

double normal_cdf(double z) { return boost::math::cdf(kStdNormal, z); }

double normal_quantile(double p) { return boost::math::quantile(kStdNormal, p); }

double standard_normal(RngStream& rng) { return normal_quantile(rng.uniform_open()); }

double gamma_variate(double shape, RngStream& rng) {
    if (shape < 1.0) {
        const double g = gamma_variate(shape + 1.0, rng);
        return g * std::pow(rng.uniform_open(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        const double x = standard_normal(rng);
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = rng.uniform_open();
        const double x2 = x * x;
        if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
        if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
    }
}

PhaseTriple dirichlet(const PhaseTriple& alpha, RngStream& rng) {
    PhaseTriple g;
    for (std::size_t i = 0; i < 3; ++i) g.v[i] = gamma_variate(alpha.v[i], rng);
    const double total = g.sum();
    for (double& x : g.v) x /= total;
    return g;
}

double positive_truncated_normal(double mu, double sigma, RngStream& rng) {
    if (sigma == 0.0) return mu;
    // Mirror the standard variable so the inversion runs in the lower tail:
    // z > -mu/sigma  <=>  -z < mu/sigma, and -z = Q(v * Phi(mu/sigma)).
    const double upper_mass = normal_cdf(mu / sigma);
    const double z = -normal_quantile(rng.uniform_open() * upper_mass);
    const double x = mu + sigma * z;
    return x > 0.0 ? x : std::numeric_limits<double>::denorm_min();
}

}  // namespace gridsynth
