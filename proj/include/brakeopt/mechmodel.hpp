// Static equilibrium model of the safety-gear brake.
//
// Units are fixed: lengths in mm, forces in kN, angles in radians. Callers
// holding degrees convert with deg_to_rad() once at the boundary.
//
// Two independent routes compute the same solution:
//   - braking_force()       closed-form normals N4 -> N1 -> N2 -> N3
//   - equilibrium_oracle()  dense solve of the six balance equations
// Agreement between them is the primary correctness check of the model.
#pragma once

#include <numbers>

namespace brakeopt::mech {

inline constexpr double kSingularTolerance = 1e-9;

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Dimensions of steel body, wedge and roller (mm).
struct BrakeGeometry {
  double a = 55.0;
  double b = 16.6;
  double c = 52.7;
  double d = 34.5;
  double e = 60.7;
  double f = 0.005;
  double l = 49.0;
  double m = 40.0;
  double n = 17.5;
  double R = 29.0;

  bool operator==(const BrakeGeometry&) const = default;
};

struct FrictionSet {
  double mu1 = 0.10;
  double mu2 = 0.10;
  double mu4 = 0.15;

  bool operator==(const FrictionSet&) const = default;
};

struct LoadCase {
  double fg_kn = 50.0;   // cabin + capacity weight
  double fb_kn = 30.0;   // inertial force
  double fs_kn = 42.0;   // spring reaction
  double alpha_rad = deg_to_rad(6.0);

  bool operator==(const LoadCase&) const = default;
};

struct NormalForces {
  double n1 = 0.0;
  double n2 = 0.0;
  double n3 = 0.0;
  double n4 = 0.0;
};

struct EquilibriumSolution {
  NormalForces normals;
  double t1 = 0.0;
  double t2 = 0.0;
  double t3 = 0.0;
  double t4 = 0.0;
  double rx = 0.0;
  double ry = 0.0;
  double fh = 0.0;
  /// All four normals are non-negative (physically admissible contact).
  bool valid = true;
};

// Throw ValidationError naming the violated invariant.
void validate(const BrakeGeometry& geom);
void validate(const FrictionSet& fric);
void validate(const LoadCase& load);

/// Closed-form normals. Throws SingularDenominator when either pivot
/// denominator has magnitude <= kSingularTolerance.
NormalForces normal_forces(const BrakeGeometry& geom, const FrictionSet& fric,
                           const LoadCase& load);

/// Full solution from the closed forms. Negative normals are reported through
/// `valid`, never clamped.
EquilibriumSolution braking_force(const BrakeGeometry& geom, const FrictionSet& fric,
                                  const LoadCase& load);

/// Same solution obtained by assembling the body, wedge and roller balances
/// as a 6x6 linear system in (N1, N2, N3, N4, Rx, Ry) and solving it by
/// pivoted LU. The roller y-balance is not part of the system. Throws
/// SingularSystem on rank deficiency.
EquilibriumSolution equilibrium_oracle(const BrakeGeometry& geom, const FrictionSet& fric,
                                       const LoadCase& load);

}  // namespace brakeopt::mech
