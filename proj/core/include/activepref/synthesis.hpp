#pragma once

#include "activepref/link_model.hpp"
#include "activepref/posterior.hpp"
#include "activepref/types.hpp"

namespace activepref {

// Continuous optimal query: p = mu + r v1, q = mu - r v1.
struct SynthesizedQuery {
  QueryPair pair;
  double r_tilde = 0.0;
  Vector direction;  // v1
  Vector a_tilde;    // 4 r v1, the hyperplane normal
};

// Expected conditional response entropy (bits) of the pair mu +- r v1 over the
// state's samples; the quantity minimised by optimize_magnitude.
double expected_conditional_entropy(const PosteriorState& state,
                                    const ResponseModel& model, double r);

struct MagnitudeSearch {
  double lo_factor = 0.01;  // bracket [r0 * lo_factor, r0 * hi_factor]
  double hi_factor = 100.0;
  int coarse_points = 41;   // log-spaced scan locating the basin
  double rel_tol = 1e-4;    // golden-section tolerance on r
};

// argmin_r of expected_conditional_entropy, with r0 = sqrt(Tr(Sigma)).
double optimize_magnitude(const PosteriorState& state,
                          const ResponseModel& model,
                          const MagnitudeSearch& search = {});

SynthesizedQuery synthesize(const PosteriorState& state,
                            const ResponseModel& model,
                            const MagnitudeSearch& search = {});

}  // namespace activepref
