#pragma once

// Manufactured-solution harness: closed-form fields with exact sources, a
// high-order finite-difference guard on those sources, and grid-refinement
// studies for each sub-solver and for the coupled map.

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "bifluid/fixed_point.hpp"
#include "bifluid/jet.hpp"

namespace bifluid {

struct JetState {
  std::array<Jet, 2> rho;
  std::array<std::array<Jet, 3>, 2> u;
  Jet s;
};

struct ManufacturedCase {
  std::string name;
  int dim = 3;
  Vec3 extents{1.0, 1.0, 1.0};
  MixtureParams params;  ///< masses equal the integrals of the densities; no forcing
  ViscosityMatrices visc;
  double eps = 0.5;
  /// Exact fields at the seeded coordinates. Velocities vanish on the boundary
  /// and densities have zero normal derivative there.
  std::function<JetState(const std::array<Jet, 3>&)> fields;
  /// Coefficient of the scalar Robin study.
  std::function<Jet(const std::array<Jet, 3>&)> robin_coefficient;

  JetState at(const Vec3& x) const;
};

/// "trig2d", "trig3d" or "poly3d"; throws std::invalid_argument otherwise.
ManufacturedCase manufactured_case(const std::string& name);
std::vector<std::string> manufactured_case_names();

// Residuals of the regularized equations evaluated on the exact fields; these
// are the sources that make the fields an exact solution.

double continuity_source(const ManufacturedCase& mc, const Vec3& x, int i);
Vec3 momentum_source(const ManufacturedCase& mc, const Vec3& x, int i);
double energy_source(const ManufacturedCase& mc, const Vec3& x);
/// On a boundary point with outward normal n.
double boundary_source(const ManufacturedCase& mc, const Vec3& x, const Vec3& n);
/// sum_j L_ij u^(j) of the exact velocities.
Vec3 lame_image(const ManufacturedCase& mc, const Vec3& x, int i);
/// -div(b grad s) and b grad s . n + eps s for the Robin study.
double robin_volume_data(const ManufacturedCase& mc, const Vec3& x);
double robin_boundary_data(const ManufacturedCase& mc, const Vec3& x, const Vec3& n);

struct SpotCheck {
  double max_relative_error = 0.0;  ///< relative to max(1, |source|)
  int points = 0;
};

/// Compares every source against eighth-order central differences of the
/// field values at `points` random interior and boundary points.
SpotCheck spot_check_sources(const ManufacturedCase& mc, int points = 20, unsigned seed = 12345);

inline constexpr double kSpotCheckTolerance = 1e-8;

enum class StudyTarget { R, U, S, Coupled };
std::string to_string(StudyTarget t);

struct GridErrors {
  int cells = 0;
  double h = 0.0;
  std::map<std::string, double> l2_error;
};

struct StudyReport {
  std::string case_name;
  StudyTarget target = StudyTarget::S;
  std::vector<GridErrors> grids;
  /// log2(e_h / e_{h/2}) for each consecutive pair, per field.
  std::map<std::string, std::vector<double>> orders;
  /// Fields reproduced to round-off on every grid (orders are meaningless).
  std::map<std::string, bool> exact;

  std::string to_json() const;
};

/// Runs the targeted solve with manufactured data on n^dim grids for each n in
/// `cells` (at least two, each doubling the previous). Errors are midpoint L2
/// norms against the exact fields sampled at cell centers.
StudyReport convergence_study(const ManufacturedCase& mc, StudyTarget target, const std::vector<int>& cells);

struct OrderCheck {
  std::string case_name, target, field;
  double order = 0.0;     ///< finest-pair order
  double threshold = 0.0;
  bool exact = false;
  bool passed = false;
};

struct VerificationSummary {
  std::vector<StudyReport> reports;
  std::vector<OrderCheck> checks;
  bool spot_checks_passed = false;
  bool passed = false;

  std::string to_json() const;
};

/// Source spot checks, then S and U (order >= 1.9), R densities (>= 0.9) and
/// the coupled u, s fields (>= 1.5) on 8/16/32 in 2D and 8/16 in 3D.
VerificationSummary run_verification_suite();

}  // namespace bifluid
