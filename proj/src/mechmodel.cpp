#include "brakeopt/mechmodel.hpp"

#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "brakeopt/error.hpp"

namespace brakeopt::mech {
namespace {

void require(bool ok, const char* invariant, const std::string& detail) {
  if (!ok) throw ValidationError(invariant, std::string(invariant) + ": " + detail);
}

bool unit_open(double x) { return x > 0.0 && x < 1.0; }

// Fills the friction forces, braking force and validity flag from the normals.
void complete(const BrakeGeometry& geom, const FrictionSet& fric, EquilibriumSolution& s) {
  const NormalForces& nf = s.normals;
  s.t1 = fric.mu1 * nf.n1;
  s.t2 = fric.mu2 * nf.n2;
  s.t3 = (geom.f / geom.R) * nf.n3;
  s.t4 = fric.mu4 * nf.n4;
  s.fh = s.t1 + s.t2 + s.t3 + s.t4;
  s.valid = nf.n1 >= 0.0 && nf.n2 >= 0.0 && nf.n3 >= 0.0 && nf.n4 >= 0.0;
}

}  // namespace

void validate(const BrakeGeometry& g) {
  const std::pair<const char*, double> dims[] = {{"a", g.a}, {"b", g.b}, {"c", g.c}, {"d", g.d},
                                                 {"e", g.e}, {"f", g.f}, {"l", g.l}, {"m", g.m},
                                                 {"n", g.n}, {"R", g.R}};
  for (const auto& [name, value] : dims) {
    require(std::isfinite(value) && value > 0.0, "geometry length must be positive",
            std::string(name) + " = " + std::to_string(value));
  }
  require(g.f < g.R, "rolling ratio f/R must be below 1",
          "f = " + std::to_string(g.f) + ", R = " + std::to_string(g.R));
}

void validate(const FrictionSet& fr) {
  const std::pair<const char*, double> coeffs[] = {{"mu1", fr.mu1}, {"mu2", fr.mu2},
                                                   {"mu4", fr.mu4}};
  for (const auto& [name, value] : coeffs) {
    require(unit_open(value), "friction coefficient out of (0,1)",
            std::string(name) + " = " + std::to_string(value));
  }
}

void validate(const LoadCase& ld) {
  require(ld.fg_kn >= 0.0, "load must be non-negative", "Fg = " + std::to_string(ld.fg_kn));
  require(ld.fb_kn >= 0.0, "load must be non-negative", "Fb = " + std::to_string(ld.fb_kn));
  require(ld.fs_kn >= 0.0, "load must be non-negative", "Fs = " + std::to_string(ld.fs_kn));
  require(ld.alpha_rad >= 0.0 && ld.alpha_rad < std::numbers::pi / 2,
          "cam angle out of [0, pi/2)", "alpha = " + std::to_string(ld.alpha_rad));
}

NormalForces normal_forces(const BrakeGeometry& g, const FrictionSet& fr, const LoadCase& ld) {
  const double weight = ld.fg_kn + ld.fb_kn;

  const double body_den = fr.mu4 * (g.n + g.l) - g.m;
  if (!(std::abs(body_den) > kSingularTolerance)) {
    throw SingularDenominator("mu4*(n+l)-m", body_den);
  }
  const double n4 = (weight * g.l / 2.0 - ld.fs_kn * g.a) / body_den;

  // d + e*mu2 is a sum of positives for validated inputs.
  const double wedge_den = g.d + g.e * fr.mu2;
  const double lever = g.b * fr.mu1 - g.c;
  const double sin_a = std::sin(ld.alpha_rad);
  const double cos_a = std::cos(ld.alpha_rad);
  const double cam = fr.mu1 * sin_a + cos_a;

  const double n1_den = cam + fr.mu2 * lever / wedge_den;
  if (!(std::abs(n1_den) > kSingularTolerance)) {
    throw SingularDenominator("mu1*sin(alpha)+cos(alpha)+mu2*(b*mu1-c)/(d+e*mu2)", n1_den);
  }
  const double n1 = (n4 - g.a * fr.mu2 * ld.fs_kn / wedge_den) / n1_den;
  const double n2 = (g.a * ld.fs_kn + lever * n1) / wedge_den;
  const double n3 = fr.mu2 * n2 + cam * n1;
  return {n1, n2, n3, n4};
}

EquilibriumSolution braking_force(const BrakeGeometry& g, const FrictionSet& fr,
                                  const LoadCase& ld) {
  EquilibriumSolution s;
  s.normals = normal_forces(g, fr, ld);
  complete(g, fr, s);
  s.rx = s.normals.n4 - ld.fs_kn;
  s.ry = s.t4 - (ld.fg_kn + ld.fb_kn) / 2.0;
  return s;
}

EquilibriumSolution equilibrium_oracle(const BrakeGeometry& g, const FrictionSet& fr,
                                       const LoadCase& ld) {
  const double sin_a = std::sin(ld.alpha_rad);
  const double cos_a = std::cos(ld.alpha_rad);
  const double fs = ld.fs_kn;
  const double weight = ld.fg_kn + ld.fb_kn;

  // Columns: N1, N2, N3, N4, Rx, Ry.
  Eigen::Matrix<double, 6, 6> A = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 1> rhs;

  // Body x:  -N4 + Fs + Rx = 0
  A(0, 3) = -1.0;
  A(0, 4) = 1.0;
  rhs(0) = -fs;
  // Body y:  mu4 N4 - Ry - (Fg+Fb)/2 = 0
  A(1, 3) = fr.mu4;
  A(1, 5) = -1.0;
  rhs(1) = weight / 2.0;
  // Body moment:  -Fs a - Ry l + N4 m - mu4 N4 n = 0
  A(2, 3) = g.m - fr.mu4 * g.n;
  A(2, 5) = -g.l;
  rhs(2) = fs * g.a;
  // Wedge x:  mu2 N2 + N1 cos + mu1 N1 sin - Fs - Rx = 0
  A(3, 0) = cos_a + fr.mu1 * sin_a;
  A(3, 1) = fr.mu2;
  A(3, 4) = -1.0;
  rhs(3) = fs;
  // Wedge moment:  Fs a + mu1 N1 b - N1 c - N2 d - mu2 N2 e = 0
  A(4, 0) = fr.mu1 * g.b - g.c;
  A(4, 1) = -g.d - fr.mu2 * g.e;
  rhs(4) = -fs * g.a;
  // Roller x:  N3 - mu2 N2 - N1 cos - mu1 N1 sin = 0
  A(5, 0) = -(cos_a + fr.mu1 * sin_a);
  A(5, 1) = -fr.mu2;
  A(5, 2) = 1.0;
  rhs(5) = 0.0;

  Eigen::FullPivLU<Eigen::Matrix<double, 6, 6>> lu(A);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw SingularSystem("equilibrium system is rank deficient (rank " +
                         std::to_string(lu.rank()) + " of 6)");
  }
  const Eigen::Matrix<double, 6, 1> x = lu.solve(rhs);

  EquilibriumSolution s;
  s.normals = {x(0), x(1), x(2), x(3)};
  s.rx = x(4);
  s.ry = x(5);
  complete(g, fr, s);
  return s;
}

}  // namespace brakeopt::mech
