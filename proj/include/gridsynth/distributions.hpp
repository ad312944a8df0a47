#pragma once

#include "gridsynth/phase.hpp"
#include "gridsynth/rng.hpp"

namespace gridsynth {

double normal_cdf(double z);
double normal_quantile(double p);

/// Standard normal by inversion of one open-interval uniform.
double standard_normal(RngStream& rng);

/// Unit-scale gamma variate. Marsaglia-Tsang squeeze for shape >= 1; for
/// shape < 1 the boost G(a) = G(a + 1) * U^(1/a) is applied.
double gamma_variate(double shape, RngStream& rng);

/// Dirichlet(alpha) as normalized independent gamma draws.
PhaseTriple dirichlet(const PhaseTriple& alpha, RngStream& rng);

/// Normal(mu, sigma) conditioned on x > 0, drawn by inversion with exactly
/// one uniform. sigma == 0 returns mu.
double positive_truncated_normal(double mu, double sigma, RngStream& rng);

}  // namespace gridsynth
