#include "activepref/types.hpp"

#include <algorithm>

namespace activepref {

QueryPair::QueryPair(Vector p_in, Vector q_in)
    : p(std::move(p_in)), q(std::move(q_in)) {
  if (p.size() != q.size()) {
    throw DimensionMismatch("query items have different dimensions");
  }
  if (p.size() < 1) {
    throw DimensionMismatch("query items must have dimension >= 1");
  }
}

Vector QueryPair::stacked() const {
  Vector z(2 * p.size());
  z << p, q;
  return z;
}

Hyperplane Hyperplane::from_pair(const QueryPair& pair) {
  Hyperplane h;
  h.a = 2.0 * (pair.p - pair.q);
  h.tau = pair.p.squaredNorm() - pair.q.squaredNorm();
  h.b = 0.5 * (pair.p + pair.q);
  return h;
}

Box::Box(Vector lo_in, Vector hi_in) : lo(std::move(lo_in)), hi(std::move(hi_in)) {
  if (lo.size() != hi.size() || lo.size() == 0) {
    throw ConfigError("box bounds must be non-empty and of equal dimension",
                      "continuous_bounds");
  }
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i])) {
      throw ConfigError("box requires lo < hi componentwise",
                        "continuous_bounds");
    }
  }
}

Box Box::cube(Eigen::Index dim, double lo, double hi) {
  return Box(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

bool Box::contains(const Vector& x) const {
  if (x.size() != lo.size()) return false;
  return ((x.array() >= lo.array()) && (x.array() <= hi.array())).all();
}

Vector Box::clamp(const Vector& x) const {
  return x.cwiseMax(lo).cwiseMin(hi);
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace activepref
