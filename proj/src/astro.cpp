// Copyright 2026 The flyby-dp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "flyby/astro.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "flyby/errors.hpp"

namespace flyby {

namespace {

using constants::kPi;
using constants::kTwoPi;

double wrap_two_pi(double angle) {
  double w = std::fmod(angle, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

// Solves E - e sin E = M for M in [0, pi]. The root lies in [M, min(pi, M + e)].
double kepler_upper_half(double m, double e) {
  double lo = m;
  double hi = std::min(kPi, m + e);
  double ecc_anom = m + e * std::sin(m);
  ecc_anom = std::clamp(ecc_anom, lo, hi);
  for (int iter = 0; iter < 50; ++iter) {
    const double s = std::sin(ecc_anom);
    const double c = std::cos(ecc_anom);
    const double f = ecc_anom - e * s - m;
    if (std::abs(f) <= 1e-15) return ecc_anom;
    if (f > 0.0) {
      hi = ecc_anom;
    } else {
      lo = ecc_anom;
    }
    const double fp = 1.0 - e * c;
    double next = ecc_anom - f / fp;
    if (!(next > lo && next < hi)) {
      // Halley fallback, then bisection.
      const double fpp = e * s;
      next = ecc_anom - f / (fp - 0.5 * f * fpp / fp);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    }
    if (std::abs(next - ecc_anom) <= 4e-16 * std::max(1.0, std::abs(ecc_anom))) {
      return next;
    }
    ecc_anom = next;
  }
  const double residual = ecc_anom - e * std::sin(ecc_anom) - m;
  if (std::abs(residual) < 1e-12) return ecc_anom;
  std::ostringstream msg;
  msg.precision(17);
  msg << "Kepler solver did not converge (M=" << m << ", e=" << e << ", residual=" << residual
      << ")";
  throw NumericalError(msg.str());
}

// Stumpff functions C(z), S(z).
template <class Real>
void stumpff(Real z, Real& c, Real& s) {
  if (std::abs(z) < Real(0.1)) {
    // Alternating series: C = sum (-z)^k/(2k+2)!, S = sum (-z)^k/(2k+3)!
    Real term_c = 0.5L;
    Real term_s = 1.0L / 6.0L;
    c = 0;
    s = 0;
    for (int k = 0; k < 12; ++k) {
      c += term_c;
      s += term_s;
      term_c *= -z / ((2 * k + 3) * (2 * k + 4));
      term_s *= -z / ((2 * k + 4) * (2 * k + 5));
    }
    return;
  }
  if (z > 0) {
    const Real sz = std::sqrt(z);
    const Real h = std::sin(sz / 2);
    c = 2 * h * h / z;
    s = (sz - std::sin(sz)) / (z * sz);
  } else {
    const Real sz = std::sqrt(-z);
    const Real h = std::sinh(sz / 2);
    c = 2 * h * h / (-z);
    s = (std::sinh(sz) - sz) / (-z * sz);
  }
}

}  // namespace

double solve_kepler(double mean_anomaly, double e) {
  if (!(e >= 0.0 && e < 1.0)) {
    throw UnsupportedOrbitError("solve_kepler requires 0 <= e < 1");
  }
  if (!std::isfinite(mean_anomaly)) throw InputError("solve_kepler: non-finite mean anomaly");
  const double reduced = std::remainder(mean_anomaly, kTwoPi);  // [-pi, pi]
  const double offset = mean_anomaly - reduced;
  const double ecc = reduced >= 0.0 ? kepler_upper_half(reduced, e)
                                    : -kepler_upper_half(-reduced, e);
  return ecc + offset;
}

void validate_elements(const OrbitalElements& el) {
  const bool finite = std::isfinite(el.a) && std::isfinite(el.e) && std::isfinite(el.i) &&
                      std::isfinite(el.raan) && std::isfinite(el.argp) &&
                      std::isfinite(el.m0) && std::isfinite(el.epoch.mjd2000);
  if (!finite) throw InputError("non-finite orbital element");
  if (!(el.a > 0.0)) throw InputError("semimajor axis must be positive");
  if (!(el.e >= 0.0 && el.e < 1.0)) throw UnsupportedOrbitError("eccentricity out of range");
}

CartesianState elements_to_state(const OrbitalElements& el, Epoch t, double mu) {
  validate_elements(el);
  const double n = std::sqrt(mu / (el.a * el.a * el.a));
  const double dt = (t.mjd2000 - el.epoch.mjd2000) * constants::kSecondsPerDay;
  const double mean = wrap_two_pi(el.m0 + n * dt);
  const double ecc_anom = solve_kepler(mean, el.e);
  const double ce = std::cos(ecc_anom);
  const double se = std::sin(ecc_anom);
  const double b = std::sqrt(1.0 - el.e * el.e);

  const double xp = el.a * (ce - el.e);
  const double yp = el.a * b * se;
  const double rdot = n * el.a / (1.0 - el.e * ce);
  const double vxp = -rdot * se;
  const double vyp = rdot * b * ce;

  const double cO = std::cos(el.raan), sO = std::sin(el.raan);
  const double cw = std::cos(el.argp), sw = std::sin(el.argp);
  const double ci = std::cos(el.i), si = std::sin(el.i);

  const Vec3 p{cO * cw - sO * sw * ci, sO * cw + cO * sw * ci, sw * si};
  const Vec3 q{-cO * sw - sO * cw * ci, -sO * sw + cO * cw * ci, cw * si};

  return {p * xp + q * yp, p * vxp + q * vyp, t};
}

double specific_energy(const Vec3& r, const Vec3& v, double mu) {
  return 0.5 * dot(v, v) - mu / norm(r);
}

Vec3 angular_momentum(const Vec3& r, const Vec3& v) { return cross(r, v); }

double eccentricity(const Vec3& r, const Vec3& v, double mu) {
  const Vec3 h = cross(r, v);
  const Vec3 e_vec = cross(v, h) / mu - r / norm(r);
  return norm(e_vec);
}

double inclination(const Vec3& r, const Vec3& v) {
  const Vec3 h = cross(r, v);
  const double hn = norm(h);
  if (hn == 0.0) return 0.0;
  return std::acos(std::clamp(h.z / hn, -1.0, 1.0));
}

double orbital_period(double a, double mu) {
  return constants::kTwoPi * std::sqrt(a * a * a / mu);
}

OrbitalElements state_to_elements(const CartesianState& s, double mu) {
  const Vec3& r = s.r;
  const Vec3& v = s.v;
  const double rn = norm(r);
  const Vec3 h = cross(r, v);
  const double hn = norm(h);
  const double energy = specific_energy(r, v, mu);
  if (!(energy < 0.0)) throw UnsupportedOrbitError("state_to_elements: orbit is not elliptic");

  OrbitalElements el;
  el.epoch = s.epoch;
  el.a = -mu / (2.0 * energy);
  const Vec3 e_vec = cross(v, h) / mu - r / rn;
  el.e = norm(e_vec);
  el.i = std::acos(std::clamp(h.z / hn, -1.0, 1.0));

  const Vec3 node{-h.y, h.x, 0.0};
  const double node_n = norm(node);
  constexpr double kSmall = 1e-11;
  const bool equatorial = node_n < kSmall * hn;
  const bool circular = el.e < kSmall;

  el.raan = equatorial ? 0.0 : wrap_two_pi(std::atan2(node.y, node.x));

  // Reference direction for argument of periapsis / true anomaly.
  const Vec3 ref = equatorial ? Vec3{1.0, 0.0, 0.0} : node / node_n;
  const Vec3 ref_perp = cross(h / hn, ref);

  double true_anom;
  if (circular) {
    el.argp = 0.0;
    true_anom = std::atan2(dot(r, ref_perp), dot(r, ref));
  } else {
    el.argp = wrap_two_pi(std::atan2(dot(e_vec, ref_perp), dot(e_vec, ref)));
    const Vec3 e_hat = e_vec / el.e;
    const Vec3 e_perp = cross(h / hn, e_hat);
    true_anom = std::atan2(dot(r, e_perp), dot(r, e_hat));
  }
  const double ecc_anom =
      2.0 * std::atan2(std::sqrt(1.0 - el.e) * std::sin(0.5 * true_anom),
                       std::sqrt(1.0 + el.e) * std::cos(0.5 * true_anom));
  el.m0 = wrap_two_pi(ecc_anom - el.e * std::sin(ecc_anom));
  return el;
}

Propagation propagate(const CartesianState& s, double dt, double mu, double min_radius) {
  Propagation out;
  out.state = s;
  out.state.epoch.mjd2000 = s.epoch.mjd2000 + dt / constants::kSecondsPerDay;
  if (dt == 0.0) {
    out.feasible = norm(s.r) >= min_radius;
    return out;
  }

  // Strongly hyperbolic arcs lose many digits to cancellation in the universal
  // Kepler equation, so the solve runs in extended precision.
  using Real = long double;
  const Real r_in[3] = {s.r.x, s.r.y, s.r.z};
  const Real v_in[3] = {s.v.x, s.v.y, s.v.z};
  const Real r0 = std::sqrt(r_in[0] * r_in[0] + r_in[1] * r_in[1] + r_in[2] * r_in[2]);
  const Real v2 = v_in[0] * v_in[0] + v_in[1] * v_in[1] + v_in[2] * v_in[2];
  const Real mu_l = mu;
  const Real sqrt_mu = std::sqrt(mu_l);
  const Real alpha = 2 / r0 - v2 / mu_l;  // 1/a
  const Real rv = r_in[0] * v_in[0] + r_in[1] * v_in[1] + r_in[2] * v_in[2];
  const Real sigma0 = rv / sqrt_mu;

  // Elliptic arcs: strip whole periods so chi stays moderate.
  Real dt_eff = dt;
  bool whole_period_elapsed = false;
  if (alpha > 0) {
    const Real period = 2 * std::acos(Real(-1)) / (sqrt_mu * alpha * std::sqrt(alpha));
    if (std::abs(dt_eff) >= period) whole_period_elapsed = true;
    dt_eff = std::fmod(dt_eff, period);
  }

  auto kepler = [&](Real chi, Real& f, Real& fp) {
    const Real z = alpha * chi * chi;
    Real c, sz;
    stumpff(z, c, sz);
    f = sigma0 * chi * chi * c + (1 - alpha * r0) * chi * chi * chi * sz + r0 * chi - sqrt_mu * dt_eff;
    fp = sigma0 * chi * (1 - z * sz) + (1 - alpha * r0) * chi * chi * c + r0;
  };

  // F(chi) is strictly increasing (F' = r > 0); bracket then safeguarded Newton.
  Real chi = alpha > 0 ? sqrt_mu * alpha * dt_eff : sqrt_mu * dt_eff / r0;
  Real lo = 0, hi = 0;
  {
    Real step = std::max(std::abs(chi), sqrt_mu * std::abs(dt_eff) / (10 * r0));
    if (step == 0) step = 1;
    Real f, fp;
    if (dt_eff > 0) {
      hi = step;
      kepler(hi, f, fp);
      for (int k = 0; f < 0 && k < 200; ++k) {
        lo = hi;
        hi *= 2;
        kepler(hi, f, fp);
      }
    } else {
      lo = -step;
      kepler(lo, f, fp);
      for (int k = 0; f > 0 && k < 200; ++k) {
        hi = lo;
        lo *= 2;
        kepler(lo, f, fp);
      }
    }
    chi = std::clamp(chi, lo, hi);
    if (chi == lo || chi == hi) chi = (lo + hi) / 2;
  }

  const Real eps = std::numeric_limits<Real>::epsilon();
  bool converged = false;
  for (int iter = 0; iter < 300; ++iter) {
    Real f, fp;
    kepler(chi, f, fp);
    if (f == 0) {
      converged = true;
      break;
    }
    if (f > 0) {
      hi = chi;
    } else {
      lo = chi;
    }
    Real next = chi - f / fp;
    if (!(next > lo && next < hi)) next = (lo + hi) / 2;
    if (std::abs(next - chi) <= 4 * eps * std::max(Real(1), std::abs(chi)) || !(lo < hi)) {
      chi = next;
      converged = true;
      break;
    }
    chi = next;
  }
  if (!converged) throw NumericalError("universal-variable propagation did not converge");

  const Real z = alpha * chi * chi;
  Real c, sz;
  stumpff(z, c, sz);
  const Real f = 1 - chi * chi / r0 * c;
  const Real g = (sigma0 * chi * chi * c + r0 * chi * (1 - z * sz)) / sqrt_mu;
  Real r_out[3];
  for (int k = 0; k < 3; ++k) r_out[k] = r_in[k] * f + v_in[k] * g;
  const Real rn = std::sqrt(r_out[0] * r_out[0] + r_out[1] * r_out[1] + r_out[2] * r_out[2]);
  const Real fdot = sqrt_mu / (rn * r0) * (alpha * chi * chi * chi * sz - chi);
  const Real gdot = 1 - chi * chi / rn * c;
  Real v_out[3];
  for (int k = 0; k < 3; ++k) v_out[k] = v_in[k] * gdot + r_in[k] * fdot;
  out.state.r = {static_cast<double>(r_out[0]), static_cast<double>(r_out[1]), static_cast<double>(r_out[2])};
  out.state.v = {static_cast<double>(v_out[0]), static_cast<double>(v_out[1]), static_cast<double>(v_out[2])};

  if (min_radius > 0.0) {
    double rmin = std::min(norm(s.r), norm(out.state.r));
    const double rv1 = dot(out.state.r, out.state.v);
    // Periapsis is crossed if the radial velocity changes sign in the travel direction.
    const bool passes_periapsis =
        whole_period_elapsed || (dt > 0.0 ? (rv < 0.0 && rv1 > 0.0) : (rv > 0.0 && rv1 < 0.0));
    if (passes_periapsis) {
      const Vec3 h = cross(s.r, s.v);
      const double p = dot(h, h) / mu;
      rmin = std::min(rmin, p / (1.0 + eccentricity(s.r, s.v, mu)));
    }
    out.feasible = rmin >= min_radius;
  }
  return out;
}

}  // namespace flyby
