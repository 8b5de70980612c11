#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ellab/grid.hpp"
#include "ellab/system_model.hpp"

namespace ellab {

/// Deformation parameters: the t-family adds t*A to a and b and
/// A*t*(1+u), A*t*(1+v) to the lower-order terms.
struct HomotopyConfig {
  double t = 0.0;
  double A = 1.0;
  double C1 = 0.0;               // h1 >= -C1 u, h2 >= -C1 v
  Domain omega;                  // strict subdomain
  double lambda1_omega = 0.0;    // lambda1(-Delta, omega)

  double required_A(double sup_c, double sup_d) const;
  bool admissible(double sup_c, double sup_d) const { return A >= required_A(sup_c, sup_d); }
};

struct Residual {
  std::vector<double> ru, rv;
  double max_abs = 0.0;          // max over nodes and components
  double reaction_scale = 0.0;   // max |F|, |G| over interior nodes
  std::size_t argmax = 0;
  int component = 0;             // 0 for u, 1 for v
  bool on_boundary_ring = false;

  /// max_abs / (1 + reaction_scale): the quantity Newton drives below tol.
  double normalized() const { return max_abs / (1.0 + reaction_scale); }
};

/// Delta_h u + F(t,x,u+,v+) and Delta_h v + G(t,x,u+,v+) at interior nodes,
/// u and v themselves at boundary nodes. Without hcfg this is the plain
/// system (t = 0).
Residual assemble_residual(const GridField& field, const ProblemInstance& inst,
                           const HomotopyConfig* hcfg = nullptr);

struct NewtonOptions {
  double tol = 1e-10;
  int max_iterations = 100;
  int max_backtracks = 30;
  double negativity_slack = 1e-12;
};

struct SolveReport {
  bool converged = false;
  int iterations = 0;
  double residual_inf = 0.0;   // normalized residual, see Residual::normalized
  double residual_abs = 0.0;
  double sup_u = 0.0, sup_v = 0.0;
  double min_interior_u = 0.0, min_interior_v = 0.0;
  double K = 0.0;                      // 0 when not defined
  double proportionality_defect = 0.0; // max |u - K v|
  double h = 0.0;
  bool nonnegative = true;
  std::string message;
};

struct SolveResult {
  GridField field;
  SolveReport report;
};

/// Damped Newton (halving line search on the max-norm residual). The
/// nonlinearity is evaluated at positive parts; nonnegativity of the result
/// is checked afterwards, not enforced.
SolveResult newton_solve(const GridField& init, const ProblemInstance& inst,
                         const HomotopyConfig* hcfg = nullptr, const NewtonOptions& opts = {});

void fill_report_diagnostics(const GridField& field, const ProblemInstance& inst, SolveReport& rep,
                             double negativity_slack = 1e-12);

/// (K V, V) with V the scalar ground state of -Delta V = c1 V^sigma on the
/// ball (or on the disk inscribed in a box). Needs constant coefficients
/// with ab > cd.
GridField scalar_reduction_initializer(const ProblemInstance& inst, const Grid& grid);

using InstancePath = std::function<ProblemInstance(double)>;

struct ContinuationStep {
  double s = 0.0;
  GridField field;
  SolveReport report;
};

struct ContinuationResult {
  std::vector<ContinuationStep> steps;
  std::optional<std::size_t> failure_index;  // station that could not be reached
  double sup_bound = 0.0;                    // max of sup norms over completed stations
  bool sup_decreasing = false;               // sup norms strictly decrease along the path
  double min_step = 0.0;                     // smallest sub-step taken
};

/// Predictor-corrector continuation through the given stations of the
/// path parameter. Failed corrections halve the sub-step down to 1e-4 of
/// the path length.
ContinuationResult continuation_solve(const InstancePath& path, const std::vector<double>& stations,
                                      const GridField& anchor_init, const NewtonOptions& opts = {});

struct RescaleResult {
  double alpha = 0.0;
  double lambda = 1.0;
  std::size_t center = 0;
  double h_scaled = 0.0;
  std::vector<std::vector<double>> y;  // scaled coordinates (x - x0)/lambda per node
  std::vector<double> u, v;            // lambda^alpha u(x), lambda^alpha v(x)
  double max_scaled = 0.0;
  double center_value = 0.0;           // dominant component at the center
  bool bound_ok = false;               // scaled values <= 1
  bool center_ok = false;              // center value >= 2^-alpha

  /// Linear interpolation of the scaled u along the radial axis (radial meshes only).
  double u_at(double y_radius) const;
};

/// Blow-up rescaling about a mesh node. With check_center the node
/// must be an argmax of the component with the larger sup.
RescaleResult blowup_rescale(const GridField& field, const ProblemInstance& inst, std::size_t center,
                             bool check_center = true);

}  // namespace ellab
