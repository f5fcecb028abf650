#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace activepref {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
// One Monte Carlo sample per row.
using SampleMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// p = q = w: the response model's denominator vanishes.
class DegenerateQuery : public Error {
 public:
  using Error::Error;
};

// Bad user-supplied configuration; `field` names the offending key if known.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, std::string field = {})
      : Error(message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

// A pairwise comparison query: is `p` preferred to `q`?
struct QueryPair {
  Vector p;
  Vector q;

  QueryPair() = default;
  QueryPair(Vector p_in, Vector q_in);

  Eigen::Index dim() const { return p.size(); }
  QueryPair swapped() const { return QueryPair(q, p); }
  // Concatenation z = (p, q) used by the second-order metric.
  Vector stacked() const;
};

// Bisecting hyperplane a^T m - tau = 0 with midpoint b.
struct Hyperplane {
  Vector a;
  double tau = 0.0;
  Vector b;

  static Hyperplane from_pair(const QueryPair& pair);
};

// Axis-aligned box, lo < hi componentwise.
struct Box {
  Vector lo;
  Vector hi;

  Box() = default;
  Box(Vector lo_in, Vector hi_in);
  static Box cube(Eigen::Index dim, double lo, double hi);

  Eigen::Index dim() const { return lo.size(); }
  bool contains(const Vector& x) const;
  Vector clamp(const Vector& x) const;
  Vector center() const { return 0.5 * (lo + hi); }
};

// Stateless seed mixing (splitmix64 finalizer) so that independent streams
// can be derived from a base seed and a tag without sharing generator state.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace activepref
