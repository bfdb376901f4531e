#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "common.hpp"
#include "doe.hpp"

namespace hds::iga {

// ---- B-spline / NURBS primitives ----

struct BSplineBasis {
  int span = 0;                 // knot span index containing u
  std::vector<double> N;        // degree+1 nonzero basis values
  std::vector<double> dN;       // their first derivatives
};

// Cox-de Boor evaluation of all nonzero basis functions at u.
BSplineBasis bspline_basis(std::span<const double> knots, int degree, double u);

// Gauss-Legendre rule on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

struct NurbsPatch {
  int p = 0, q = 0;    // degrees
  int nu = 0, nv = 0;  // control counts per direction
  std::vector<double> ku, kv;      // clamped knot vectors
  std::vector<double> px, py, w;   // control net, index cp(i,j); weights > 0

  int cp(int i, int j) const { return i * nv + j; }
  int n_cp() const { return nu * nv; }
  std::pair<double, double> domain_u() const { return {ku[p], ku[nu]}; }
  std::pair<double, double> domain_v() const { return {kv[q], kv[nv]}; }
  void validate() const;
};

struct Nurbs2D {
  int ibase = 0, jbase = 0;  // first active control index per direction
  // (p+1)*(q+1) entries, local index a*(q+1)+b for control point (ibase+a, jbase+b)
  std::vector<double> R, dRdu, dRdv;
};

Nurbs2D nurbs_basis_2d(const NurbsPatch& patch, double u, double v);
std::pair<double, double> surface_point(const NurbsPatch& patch, double u, double v);

// Knot insertion (homogeneous coordinates); geometry is unchanged.
NurbsPatch insert_knot_u(const NurbsPatch& patch, double ubar);
NurbsPatch insert_knot_v(const NurbsPatch& patch, double vbar);
// Uniformly fills each direction with interior knots until the control counts
// are reached.
NurbsPatch refine_to(const NurbsPatch& patch, int nu_target, int nv_target);

// ---- plane-stress model ----

struct Material {
  double E = 210e9;
  double nu = 0.3;
};

struct IgaModel {
  NurbsPatch patch;
  Material mat;
  std::vector<int> fixed_dofs;       // sorted, unique
  std::vector<double> fixed_values;  // one per fixed dof
  std::vector<double> loads;         // 2*n_cp control-point point loads
  int quad_order = 0;                // 0 = degree+1 per direction

  int n_dofs() const { return 2 * patch.n_cp(); }
  void validate() const;
};

struct LinearSystem {
  int n = 0;
  std::vector<double> K;  // dense row-major n x n
  std::vector<double> F;
};

// Geometry-independent quadrature tables for one patch discretization: basis
// values/derivatives and scatter indices at every Gauss point. Reused across
// designs that only move control points.
struct QuadCache {
  int n_loc = 0;
  struct Point {
    double u, v, gw;  // parametric location and combined Gauss weight
    int element;
    std::vector<int> cps;  // n_loc global control indices
    std::vector<double> R, dRdu, dRdv;
  };
  std::vector<Point> pts;
};

QuadCache build_quad_cache(const NurbsPatch& patch, int quad_order);

LinearSystem assemble(const IgaModel& model);
LinearSystem assemble(const IgaModel& model, const QuadCache& cache);

// Direct solve of the Dirichlet-constrained system.
std::vector<double> solve_constrained(const LinearSystem& sys, const IgaModel& model);
std::vector<double> solve_full(const IgaModel& model);

// ---- reduced-basis re-analysis ----

struct ReducedBasis {
  int n_free = 0, nd = 0;
  std::vector<int> free_dofs;  // size n_free
  std::vector<double> v;       // column k at v[k*n_free ... (k+1)*n_free)
};

ReducedBasis build_reduced_basis(const IgaModel& base, std::span<const IgaModel> snapshots,
                                 double drop_tol = 1e-10);

struct ReducedSolve {
  std::vector<double> d;
  double residual_rel = 0.0;  // over free dofs, relative to the load norm
  bool fallback = false;
};

ReducedSolve solve_reduced(const IgaModel& m1, std::span<const double> d0,
                           const ReducedBasis& basis, double fallback_tol = 1e-3);
ReducedSolve solve_reduced(const IgaModel& m1, const LinearSystem& sys,
                           std::span<const double> d0, const ReducedBasis& basis,
                           double fallback_tol = 1e-3);

// ---- stress recovery ----

struct QuadStress {
  double u, v, x, y;
  double sxx, syy, txy, vm;
};

std::vector<QuadStress> stress_field(const IgaModel& model, std::span<const double> d);
std::vector<QuadStress> stress_field(const IgaModel& model, const QuadCache& cache,
                                     std::span<const double> d);
double max_stress(const IgaModel& model, std::span<const double> d);
void write_stress_csv(std::span<const QuadStress> field, const std::string& path);

// ---- the desk-scale design problem ----

// Quarter annulus (inner radius 1, outer 1.5), degree 2x2, refined to the
// requested control net. Bottom edge (theta = 0) fixed, every top-edge control
// point loaded with (0, -3e5) N. Steel-like material.
IgaModel build_tube_analog(int n_ctrl_u = 18, int n_ctrl_v = 18);

// Deterministic design -> max von Mises stress map. Designs are control-point
// y-targets inside [0.8, 1.2] of the initial values; they reach the geometry
// through a damping gain chosen (once, from an exact bound - the Jacobian is
// linear in the design) so every design in the box keeps detJ positive.
// Evaluations run the reduced path with fallback to the full solve.
class StressResponse {
 public:
  StressResponse(const IgaModel& base, int n_snapshots, std::uint64_t seed,
                 double fallback_tol = 1e-3, bool force_full = false);

  double operator()(std::span<const double> y_design);

  const IgaModel& base() const { return base_; }
  const std::vector<double>& y_init() const { return y_init_; }
  std::vector<std::pair<double, double>> design_bounds() const;
  IgaModel apply_design(std::span<const double> y_design) const;
  double geometry_gain() const { return gain_; }
  int basis_size() const { return basis_.nd; }
  std::int64_t evals() const { return evals_; }
  std::int64_t fallbacks() const { return fallbacks_; }

 private:
  IgaModel base_;
  QuadCache cache_;
  std::vector<double> y_init_, d0_;
  ReducedBasis basis_;
  double tol_;
  bool force_full_;
  double gain_ = 1.0;
  std::int64_t evals_ = 0, fallbacks_ = 0;
};

// Two datasets (train, test) of (design vector, max stress) rows drawn from
// independent streams of one seed.
std::pair<doe::Dataset, doe::Dataset> generate_iga_dataset(StressResponse& response, int n_train,
                                                           int n_test, std::uint64_t seed);

// ---- model files ----

std::string model_to_json(const IgaModel& model);
IgaModel model_from_json(const std::string& text);
void save_model(const IgaModel& model, const std::string& path);
IgaModel load_model(const std::string& path);

}  // namespace hds::iga
