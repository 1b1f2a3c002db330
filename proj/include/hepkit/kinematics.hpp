#pragma once

#include <cmath>
#include <sstream>
#include <type_traits>

#include "hepkit/error.hpp"

namespace hepkit {

/// Relative tolerance below zero accepted for e^2 - |p|^2 before a vector
/// is declared non-physical.
inline constexpr double kOnShellTolerance = 1e-9;
/// Absolute slack applied to mass-threshold preconditions.
inline constexpr double kThresholdSlack = 1e-12;

/// Energy-momentum four-vector, metric (+,-,-,-), GeV.
template <typename Scalar>
struct FourVector {
  static_assert(std::is_floating_point_v<Scalar>);

  Scalar e{0};
  Scalar px{0};
  Scalar py{0};
  Scalar pz{0};

  FourVector& operator+=(const FourVector& o) {
    e += o.e;
    px += o.px;
    py += o.py;
    pz += o.pz;
    return *this;
  }
  FourVector& operator-=(const FourVector& o) {
    e -= o.e;
    px -= o.px;
    py -= o.py;
    pz -= o.pz;
    return *this;
  }
  friend FourVector operator+(FourVector a, const FourVector& b) { return a += b; }
  friend FourVector operator-(FourVector a, const FourVector& b) { return a -= b; }
  friend bool operator==(const FourVector&, const FourVector&) = default;
};

using FourVectorD = FourVector<double>;

template <typename Scalar>
Scalar momentum_squared(const FourVector<Scalar>& v) {
  return v.px * v.px + v.py * v.py + v.pz * v.pz;
}

template <typename Scalar>
Scalar mass_squared(const FourVector<Scalar>& v) {
  return v.e * v.e - momentum_squared(v);
}

template <typename Scalar>
Scalar invariant_mass(const FourVector<Scalar>& v) {
  const Scalar m2 = mass_squared(v);
  if (m2 < -Scalar(kOnShellTolerance) * v.e * v.e) {
    std::ostringstream os;
    os << "space-like four-vector (" << v.e << ", " << v.px << ", " << v.py
       << ", " << v.pz << "): m^2 = " << m2;
    throw KinematicsError(KinematicsError::Kind::NonPhysical, os.str());
  }
  return std::sqrt(std::max(Scalar(0), m2));
}

/// Triangle function x^2 + y^2 + z^2 - 2xy - 2yz - 2zx.
template <typename Scalar>
constexpr Scalar kallen(Scalar x, Scalar y, Scalar z) {
  return x * x + y * y + z * z - 2 * x * y - 2 * y * z - 2 * z * x;
}

/// Daughter momentum in the rest frame of a two-body decay M -> m1 m2.
template <typename Scalar>
Scalar breakup_momentum(Scalar mother, Scalar m1, Scalar m2) {
  if (!(mother > 0) || mother < m1 + m2 - Scalar(kThresholdSlack)) {
    std::ostringstream os;
    os << "two-body decay below threshold: M = " << mother << " < " << m1
       << " + " << m2;
    throw KinematicsError(KinematicsError::Kind::BelowThreshold, os.str());
  }
  // (M^2 - (m1+m2)^2)(M^2 - (m1-m2)^2) is the factored triangle function;
  // it vanishes cleanly at threshold.
  const Scalar sum = m1 + m2;
  const Scalar diff = m1 - m2;
  const Scalar lam = (mother - sum) * (mother + sum) * (mother - diff) * (mother + diff);
  if (lam <= 0) return Scalar(0);
  return std::sqrt(lam) / (2 * mother);
}

/// Boosts `v`, given in the rest frame of `frame`, into the frame in which
/// `frame` carries its stated momentum.
template <typename Scalar>
FourVector<Scalar> boost_into(const FourVector<Scalar>& v, const FourVector<Scalar>& frame) {
  const Scalar m2 = mass_squared(frame);
  if (!(m2 > 0) || !(frame.e > 0)) {
    throw KinematicsError(KinematicsError::Kind::NonPhysical,
                          "boost frame must be time-like with positive energy");
  }
  const Scalar mass = std::sqrt(m2);
  const Scalar p2 = momentum_squared(frame);
  if (p2 == 0) return v;

  // Lambda^mu_nu for velocity beta = p/E, written with gamma = E/m so the
  // massive rest-frame case never divides by (1 - beta^2).
  const Scalar gamma = frame.e / mass;
  const Scalar bp = (frame.px * v.px + frame.py * v.py + frame.pz * v.pz) / frame.e;
  const Scalar coef = (gamma - 1) * bp * frame.e / p2 + gamma * v.e / frame.e;
  FourVector<Scalar> out;
  out.e = gamma * (v.e + bp);
  out.px = v.px + coef * frame.px;
  out.py = v.py + coef * frame.py;
  out.pz = v.pz + coef * frame.pz;
  return out;
}

}  // namespace hepkit
