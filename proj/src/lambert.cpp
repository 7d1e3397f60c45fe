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

#include "flyby/lambert.hpp"

#include <algorithm>
#include <cmath>

namespace flyby {

namespace {

using constants::kPi;

constexpr double kHalfDegreeTolerance = 0.1 * constants::kDeg;

// Nondimensional Lambert geometry shared by the solver and the min-tof bound.
struct Geometry {
  double lambda = 0.0;
  double s = 0.0;
  double c = 0.0;
  double r1n = 0.0;
  double r2n = 0.0;
  Vec3 ir1, ir2, it1, it2;
};

Geometry make_geometry(const Vec3& r1, const Vec3& r2, Direction direction) {
  Geometry g;
  g.r1n = norm(r1);
  g.r2n = norm(r2);
  if (!(g.r1n > 0.0 && g.r2n > 0.0)) throw InputError("Lambert: zero position vector");
  g.c = norm(r2 - r1);
  g.s = 0.5 * (g.c + g.r1n + g.r2n);
  g.ir1 = r1 / g.r1n;
  g.ir2 = r2 / g.r2n;

  const Vec3 h = cross(g.ir1, g.ir2);
  const double sin_theta = norm(h);
  const double cos_theta = std::clamp(dot(g.ir1, g.ir2), -1.0, 1.0);
  const double theta = std::atan2(sin_theta, cos_theta);  // in [0, pi]
  if (kPi - theta < kHalfDegreeTolerance) {
    throw IllConditionedGeometry("Lambert: transfer angle within 0.1 deg of 180 deg");
  }
  if (sin_theta < 1e-12) {
    throw IllConditionedGeometry("Lambert: coincident position directions");
  }
  const Vec3 ih = h / sin_theta;

  const double lambda2 = std::max(0.0, 1.0 - g.c / g.s);
  g.lambda = std::sqrt(lambda2);
  if (ih.z < 0.0) {
    g.lambda = -g.lambda;
    g.it1 = normalized(cross(g.ir1, ih));
    g.it2 = normalized(cross(g.ir2, ih));
  } else {
    g.it1 = normalized(cross(ih, g.ir1));
    g.it2 = normalized(cross(ih, g.ir2));
  }
  if (direction == Direction::kRetrograde) {
    g.lambda = -g.lambda;
    g.it1 = -g.it1;
    g.it2 = -g.it2;
  }
  return g;
}

class TofFunction {
 public:
  explicit TofFunction(double lambda) : lambda_(lambda) {}

  // Gauss hypergeometric 2F1(3, 1, 5/2, z) by series.
  static double hypergeometric(double z, double tol) {
    double sj = 1.0, cj = 1.0, err = 1.0;
    for (int j = 0; err > tol && j < 1000; ++j) {
      const double cj1 = cj * (3.0 + j) * (1.0 + j) / (2.5 + j) * z / (j + 1.0);
      sj += cj1;
      err = std::abs(cj1);
      cj = cj1;
    }
    return sj;
  }

  double lagrange(double x, int n) const {
    const double a = 1.0 / (1.0 - x * x);
    const double l2 = lambda_ * lambda_;
    if (a > 0.0) {
      const double alfa = 2.0 * std::acos(x);
      double beta = 2.0 * std::asin(std::sqrt(l2 / a));
      if (lambda_ < 0.0) beta = -beta;
      return a * std::sqrt(a) * ((alfa - std::sin(alfa)) - (beta - std::sin(beta)) +
                                 2.0 * kPi * n) / 2.0;
    }
    const double alfa = 2.0 * std::acosh(x);
    double beta = 2.0 * std::asinh(std::sqrt(-l2 / a));
    if (lambda_ < 0.0) beta = -beta;
    return -a * std::sqrt(-a) * ((beta - std::sinh(beta)) - (alfa - std::sinh(alfa))) / 2.0;
  }

  double operator()(double x, int n) const {
    constexpr double kBattin = 0.01;
    constexpr double kLagrange = 0.2;
    const double dist = std::abs(x - 1.0);
    if (dist < kLagrange && dist > kBattin) return lagrange(x, n);
    const double k = lambda_ * lambda_;
    const double e = x * x - 1.0;
    const double rho = std::abs(e);
    const double z = std::sqrt(1.0 + k * e);
    if (dist < kBattin) {
      const double eta = z - lambda_ * x;
      const double s1 = 0.5 * (1.0 - lambda_ - x * eta);
      const double q = 4.0 / 3.0 * hypergeometric(s1, 1e-11);
      return (eta * eta * eta * q + 4.0 * lambda_ * eta) / 2.0 + n * kPi / std::pow(rho, 1.5);
    }
    const double y = std::sqrt(rho);
    const double g = x * z - lambda_ * e;
    double d;
    if (e < 0.0) {
      d = n * kPi + std::acos(std::clamp(g, -1.0, 1.0));
    } else {
      const double f = y * (z - lambda_ * x);
      d = std::log(f + g);
    }
    return (x - lambda_ * z - d / y) / e;
  }

  // First three derivatives of T with respect to x at (x, T).
  void derivatives(double x, double t, double& dt, double& ddt, double& dddt) const {
    const double l2 = lambda_ * lambda_;
    const double l3 = l2 * lambda_;
    const double umx2 = 1.0 - x * x;
    const double y = std::sqrt(1.0 - l2 * umx2);
    const double y2 = y * y;
    const double y3 = y2 * y;
    dt = 1.0 / umx2 * (3.0 * t * x - 2.0 + 2.0 * l3 * x / y);
    ddt = 1.0 / umx2 * (3.0 * t + 5.0 * x * dt + 2.0 * (1.0 - l2) * l3 / y3);
    dddt = 1.0 / umx2 * (7.0 * x * ddt + 8.0 * dt - 6.0 * (1.0 - l2) * l2 * l3 * x / y3 / y2);
  }

  // Householder iterations for T(x) = target.
  double householder(double target, double x0, int n, double eps, int max_iter) const {
    double x = x0;
    for (int it = 0; it < max_iter; ++it) {
      const double tof = (*this)(x, n);
      double dt, ddt, dddt;
      derivatives(x, tof, dt, ddt, dddt);
      const double delta = tof - target;
      const double dt2 = dt * dt;
      const double xnew =
          x - delta * (dt2 - delta * ddt / 2.0) / (dt * (dt2 - delta * ddt) + dddt * delta * delta / 6.0);
      const double err = std::abs(x - xnew);
      x = xnew;
      if (err <= eps) break;
    }
    return x;
  }

  // Minimum nondimensional tof for n >= 1 revolutions (Halley on dT/dx = 0).
  double minimum_tof(int n, double& x_min) const {
    double x_old = 0.0;
    double t_min = (*this)(x_old, n);
    for (int it = 0; it < 30; ++it) {
      double dt, ddt, dddt;
      derivatives(x_old, t_min, dt, ddt, dddt);
      if (dt == 0.0) break;
      const double x_new = x_old - dt * ddt / (ddt * ddt - dt * dddt / 2.0);
      const double err = std::abs(x_old - x_new);
      x_old = x_new;
      t_min = (*this)(x_old, n);
      if (err < 1e-13) break;
    }
    x_min = x_old;
    return t_min;
  }

 private:
  double lambda_;
};

}  // namespace

std::vector<LambertArc> solve_lambert(const LambertQuery& q, double mu) {
  if (!(q.tof > 0.0) || !std::isfinite(q.tof)) throw InputError("Lambert: tof must be positive");
  if (q.revolutions < 0) throw InputError("Lambert: negative revolution count");
  if (!is_finite(q.r1) || !is_finite(q.r2)) throw InputError("Lambert: non-finite position");

  const Geometry g = make_geometry(q.r1, q.r2, q.direction);
  const double lambda = g.lambda;
  const double lambda2 = lambda * lambda;
  const double lambda3 = lambda2 * lambda;
  const TofFunction tof_of(lambda);

  const double t = std::sqrt(2.0 * mu / (g.s * g.s * g.s)) * q.tof;

  const double t00 = std::acos(lambda) + lambda * std::sqrt(1.0 - lambda2);
  const double t1 = 2.0 / 3.0 * (1.0 - lambda3);

  std::vector<double> xs;
  std::vector<int> revs;
  std::vector<Branch> branches;

  const int n = q.revolutions;
  if (n == 0) {
    double x0;
    if (t >= t00) {
      x0 = -(t - t00) / (t - t00 + 4.0);
    } else if (t <= t1) {
      x0 = t1 * (t1 - t) / (2.0 / 5.0 * (1.0 - lambda2 * lambda3) * t) + 1.0;
    } else {
      x0 = std::pow(t / t00, 0.69314718055994529 / std::log(t1 / t00)) - 1.0;
    }
    xs.push_back(tof_of.householder(t, x0, 0, 1e-11, 30));
    revs.push_back(0);
    branches.push_back(Branch::kSingle);
  } else {
    if (t < n * kPi) return {};
    double x_min;
    const double t_min = tof_of.minimum_tof(n, x_min);
    if (t < t_min) return {};
    double tmp = std::pow((n * kPi + kPi) / (8.0 * t), 2.0 / 3.0);
    xs.push_back(tof_of.householder(t, (tmp - 1.0) / (tmp + 1.0), n, 1e-11, 30));
    revs.push_back(n);
    branches.push_back(Branch::kLongPeriod);
    tmp = std::pow(8.0 * t / (n * kPi), 2.0 / 3.0);
    xs.push_back(tof_of.householder(t, (tmp - 1.0) / (tmp + 1.0), n, 1e-11, 30));
    revs.push_back(n);
    branches.push_back(Branch::kShortPeriod);
  }

  const double gamma = std::sqrt(mu * g.s / 2.0);
  const double rho = (g.r1n - g.r2n) / g.c;
  const double sigma = std::sqrt(std::max(0.0, 1.0 - rho * rho));

  std::vector<LambertArc> arcs;
  arcs.reserve(xs.size());
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double x = xs[k];
    if (!std::isfinite(x)) continue;
    const double y = std::sqrt(1.0 - lambda2 + lambda2 * x * x);
    const double vr1 = gamma * ((lambda * y - x) - rho * (lambda * y + x)) / g.r1n;
    const double vr2 = -gamma * ((lambda * y - x) + rho * (lambda * y + x)) / g.r2n;
    const double vt = gamma * sigma * (y + lambda * x);
    LambertArc arc;
    arc.v1 = g.ir1 * vr1 + g.it1 * (vt / g.r1n);
    arc.v2 = g.ir2 * vr2 + g.it2 * (vt / g.r2n);
    arc.revolutions = revs[k];
    arc.branch = branches[k];
    if (is_finite(arc.v1) && is_finite(arc.v2)) arcs.push_back(arc);
  }
  return arcs;
}

double min_energy_tof(const Vec3& r1, const Vec3& r2, int revolutions, Direction direction,
                      double mu) {
  if (revolutions < 0) throw InputError("min_energy_tof: negative revolution count");
  const Geometry g = make_geometry(r1, r2, direction);
  const double scale = std::sqrt(2.0 * mu / (g.s * g.s * g.s));
  if (revolutions == 0) {
    const double lambda3 = g.lambda * g.lambda * g.lambda;
    return 2.0 / 3.0 * (1.0 - lambda3) / scale;
  }
  const TofFunction tof_of(g.lambda);
  double x_min;
  return tof_of.minimum_tof(revolutions, x_min) / scale;
}

}  // namespace flyby
