#include "iga.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <numbers>
#include <sstream>

namespace hds::iga {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

int find_span(std::span<const double> knots, int degree, double u, int n_ctrl) {
  if (u >= knots[n_ctrl]) return n_ctrl - 1;
  if (u <= knots[degree]) return degree;
  int lo = degree, hi = n_ctrl;
  while (hi - lo > 1) {
    const int mid = (lo + hi) / 2;
    (u < knots[mid] ? hi : lo) = mid;
  }
  return lo;
}

}  // namespace

BSplineBasis bspline_basis(std::span<const double> knots, int degree, double u) {
  const int p = degree;
  require(p >= 0, Errc::invalid_argument, "bspline: negative degree");
  const int n_ctrl = static_cast<int>(knots.size()) - p - 1;
  require(n_ctrl >= p + 1, Errc::invalid_argument, "bspline: too few knots for the degree");
  require(u >= knots[p] && u <= knots[n_ctrl], Errc::domain_error,
          "bspline: parameter outside the knot domain");

  BSplineBasis out;
  out.span = find_span(knots, p, u, n_ctrl);
  out.N.assign(p + 1, 0.0);
  out.dN.assign(p + 1, 0.0);

  // Cox-de Boor triangle; ndu's lower triangle keeps the knot differences so
  // first derivatives come out of the same table.
  std::vector<double> left(p + 1), right(p + 1);
  std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1, 0.0));
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = u - knots[out.span + 1 - j];
    right[j] = knots[out.span + j] - u;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }
  for (int r = 0; r <= p; ++r) out.N[r] = ndu[r][p];
  for (int r = 0; r <= p; ++r) {
    double d = 0.0;
    if (r >= 1) d += ndu[r - 1][p - 1] / ndu[p][r - 1];
    if (r <= p - 1) d -= ndu[r][p - 1] / ndu[p][r];
    out.dN[r] = d * p;
  }
  return out;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  require(n >= 1 && n <= 64, Errc::invalid_argument, "gauss_legendre: order out of range");
  nodes.assign(n, 0.0);
  weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
  if (n == 1) {
    nodes[0] = 0.0;
    weights[0] = 2.0;
  }
}

void NurbsPatch::validate() const {
  require(p >= 1 && q >= 1, Errc::invalid_argument, "patch: degrees must be >= 1");
  require(nu >= p + 1 && nv >= q + 1, Errc::invalid_argument,
          "patch: too few control points for the degree");
  require(static_cast<int>(ku.size()) == nu + p + 1 && static_cast<int>(kv.size()) == nv + q + 1,
          Errc::invalid_argument, "patch: knot count mismatch");
  for (size_t k = 1; k < ku.size(); ++k)
    require(ku[k] >= ku[k - 1], Errc::invalid_argument, "patch: knots must be non-decreasing");
  for (size_t k = 1; k < kv.size(); ++k)
    require(kv[k] >= kv[k - 1], Errc::invalid_argument, "patch: knots must be non-decreasing");
  for (int k = 0; k <= p; ++k)
    require(ku[k] == ku[0] && ku[nu + p - k] == ku[nu + p], Errc::invalid_argument,
            "patch: knot vectors must be clamped");
  for (int k = 0; k <= q; ++k)
    require(kv[k] == kv[0] && kv[nv + q - k] == kv[nv + q], Errc::invalid_argument,
            "patch: knot vectors must be clamped");
  require(ku[p] < ku[nu] && kv[q] < kv[nv], Errc::invalid_argument, "patch: empty domain");
  const size_t ncp = static_cast<size_t>(nu) * nv;
  require(px.size() == ncp && py.size() == ncp && w.size() == ncp, Errc::invalid_argument,
          "patch: control net size mismatch");
  for (double wi : w)
    require(wi > 0.0, Errc::invalid_argument, "patch: weights must be positive");
}

Nurbs2D nurbs_basis_2d(const NurbsPatch& patch, double u, double v) {
  const BSplineBasis bu = bspline_basis(patch.ku, patch.p, u);
  const BSplineBasis bv = bspline_basis(patch.kv, patch.q, v);
  const int pu = patch.p, qv = patch.q;
  Nurbs2D out;
  out.ibase = bu.span - pu;
  out.jbase = bv.span - qv;
  const int nloc = (pu + 1) * (qv + 1);
  out.R.assign(nloc, 0.0);
  out.dRdu.assign(nloc, 0.0);
  out.dRdv.assign(nloc, 0.0);

  double A = 0.0, Au = 0.0, Av = 0.0;
  for (int a = 0; a <= pu; ++a) {
    for (int b = 0; b <= qv; ++b) {
      const double wk = patch.w[patch.cp(out.ibase + a, out.jbase + b)];
      const int k = a * (qv + 1) + b;
      out.R[k] = bu.N[a] * bv.N[b] * wk;       // numerators for now
      out.dRdu[k] = bu.dN[a] * bv.N[b] * wk;
      out.dRdv[k] = bu.N[a] * bv.dN[b] * wk;
      A += out.R[k];
      Au += out.dRdu[k];
      Av += out.dRdv[k];
    }
  }
  require(A > 0.0, Errc::numeric_error, "nurbs: zero basis normalizer");
  for (int k = 0; k < nloc; ++k) {
    out.R[k] /= A;
    out.dRdu[k] = (out.dRdu[k] - out.R[k] * Au) / A;
    out.dRdv[k] = (out.dRdv[k] - out.R[k] * Av) / A;
  }
  return out;
}

std::pair<double, double> surface_point(const NurbsPatch& patch, double u, double v) {
  const Nurbs2D b = nurbs_basis_2d(patch, u, v);
  double x = 0.0, y = 0.0;
  int k = 0;
  for (int a = 0; a <= patch.p; ++a)
    for (int bb = 0; bb <= patch.q; ++bb, ++k) {
      const int cp = patch.cp(b.ibase + a, b.jbase + bb);
      x += b.R[k] * patch.px[cp];
      y += b.R[k] * patch.py[cp];
    }
  return {x, y};
}

namespace {

struct Homog {
  double wx, wy, w;
};

Homog homog(const NurbsPatch& p, int i, int j) {
  const int k = p.cp(i, j);
  return {p.w[k] * p.px[k], p.w[k] * p.py[k], p.w[k]};
}

}  // namespace

NurbsPatch insert_knot_u(const NurbsPatch& patch, double ubar) {
  patch.validate();
  require(ubar > patch.ku[patch.p] && ubar < patch.ku[patch.nu], Errc::invalid_argument,
          "knot insertion: value outside the open domain");
  const int p = patch.p;
  const int span = find_span(patch.ku, p, ubar, patch.nu);

  NurbsPatch out;
  out.p = p;
  out.q = patch.q;
  out.nu = patch.nu + 1;
  out.nv = patch.nv;
  out.kv = patch.kv;
  out.ku.reserve(patch.ku.size() + 1);
  out.ku.assign(patch.ku.begin(), patch.ku.begin() + span + 1);
  out.ku.push_back(ubar);
  out.ku.insert(out.ku.end(), patch.ku.begin() + span + 1, patch.ku.end());

  const size_t ncp = static_cast<size_t>(out.nu) * out.nv;
  out.px.resize(ncp);
  out.py.resize(ncp);
  out.w.resize(ncp);
  for (int j = 0; j < out.nv; ++j) {
    for (int i = 0; i < out.nu; ++i) {
      Homog h;
      if (i <= span - p) {
        h = homog(patch, i, j);
      } else if (i > span) {
        h = homog(patch, i - 1, j);
      } else {
        const double alpha = (ubar - patch.ku[i]) / (patch.ku[i + p] - patch.ku[i]);
        const Homog a = homog(patch, i, j), b = homog(patch, i - 1, j);
        h = {alpha * a.wx + (1.0 - alpha) * b.wx, alpha * a.wy + (1.0 - alpha) * b.wy,
             alpha * a.w + (1.0 - alpha) * b.w};
      }
      const int k = out.cp(i, j);
      out.w[k] = h.w;
      out.px[k] = h.wx / h.w;
      out.py[k] = h.wy / h.w;
    }
  }
  return out;
}

NurbsPatch insert_knot_v(const NurbsPatch& patch, double vbar) {
  patch.validate();
  require(vbar > patch.kv[patch.q] && vbar < patch.kv[patch.nv], Errc::invalid_argument,
          "knot insertion: value outside the open domain");
  const int q = patch.q;
  const int span = find_span(patch.kv, q, vbar, patch.nv);

  NurbsPatch out;
  out.p = patch.p;
  out.q = q;
  out.nu = patch.nu;
  out.nv = patch.nv + 1;
  out.ku = patch.ku;
  out.kv.reserve(patch.kv.size() + 1);
  out.kv.assign(patch.kv.begin(), patch.kv.begin() + span + 1);
  out.kv.push_back(vbar);
  out.kv.insert(out.kv.end(), patch.kv.begin() + span + 1, patch.kv.end());

  const size_t ncp = static_cast<size_t>(out.nu) * out.nv;
  out.px.resize(ncp);
  out.py.resize(ncp);
  out.w.resize(ncp);
  for (int i = 0; i < out.nu; ++i) {
    for (int j = 0; j < out.nv; ++j) {
      Homog h;
      if (j <= span - q) {
        h = homog(patch, i, j);
      } else if (j > span) {
        h = homog(patch, i, j - 1);
      } else {
        const double alpha = (vbar - patch.kv[j]) / (patch.kv[j + q] - patch.kv[j]);
        const Homog a = homog(patch, i, j), b = homog(patch, i, j - 1);
        h = {alpha * a.wx + (1.0 - alpha) * b.wx, alpha * a.wy + (1.0 - alpha) * b.wy,
             alpha * a.w + (1.0 - alpha) * b.w};
      }
      const int k = out.cp(i, j);
      out.w[k] = h.w;
      out.px[k] = h.wx / h.w;
      out.py[k] = h.wy / h.w;
    }
  }
  return out;
}

NurbsPatch refine_to(const NurbsPatch& patch, int nu_target, int nv_target) {
  require(nu_target >= patch.nu && nv_target >= patch.nv, Errc::invalid_argument,
          "refine_to: target below the current control count");
  NurbsPatch out = patch;
  const auto [ulo, uhi] = patch.domain_u();
  const int add_u = nu_target - patch.nu;
  for (int k = 1; k <= add_u; ++k)
    out = insert_knot_u(out, ulo + (uhi - ulo) * k / (add_u + 1));
  const auto [vlo, vhi] = patch.domain_v();
  const int add_v = nv_target - patch.nv;
  for (int k = 1; k <= add_v; ++k)
    out = insert_knot_v(out, vlo + (vhi - vlo) * k / (add_v + 1));
  return out;
}

void IgaModel::validate() const {
  patch.validate();
  require(mat.E > 0.0 && mat.nu > -1.0 && mat.nu < 0.5, Errc::invalid_argument,
          "model: material constants out of range");
  require(fixed_dofs.size() == fixed_values.size(), Errc::invalid_argument,
          "model: one prescribed value per fixed dof");
  const int n = n_dofs();
  for (size_t k = 0; k < fixed_dofs.size(); ++k) {
    require(fixed_dofs[k] >= 0 && fixed_dofs[k] < n, Errc::invalid_argument,
            "model: fixed dof out of range");
    if (k > 0)
      require(fixed_dofs[k] > fixed_dofs[k - 1], Errc::invalid_argument,
              "model: fixed dofs must be sorted and unique");
  }
  require(static_cast<int>(loads.size()) == n, Errc::invalid_argument,
          "model: load vector must cover every dof");
  for (double f : loads)
    require(std::isfinite(f), Errc::invalid_argument, "model: non-finite load");
  require(quad_order >= 0 && quad_order <= 64, Errc::invalid_argument,
          "model: bad quadrature order");
}

QuadCache build_quad_cache(const NurbsPatch& patch, int quad_order) {
  patch.validate();
  const int gu = quad_order > 0 ? quad_order : patch.p + 1;
  const int gv = quad_order > 0 ? quad_order : patch.q + 1;
  std::vector<double> xu, wu, xv, wv;
  gauss_legendre(gu, xu, wu);
  gauss_legendre(gv, xv, wv);

  QuadCache cache;
  cache.n_loc = (patch.p + 1) * (patch.q + 1);
  int element = 0;
  for (int su = patch.p; su < patch.nu; ++su) {
    if (patch.ku[su + 1] <= patch.ku[su]) continue;
    const double umid = 0.5 * (patch.ku[su] + patch.ku[su + 1]);
    const double uhal = 0.5 * (patch.ku[su + 1] - patch.ku[su]);
    for (int sv = patch.q; sv < patch.nv; ++sv) {
      if (patch.kv[sv + 1] <= patch.kv[sv]) continue;
      const double vmid = 0.5 * (patch.kv[sv] + patch.kv[sv + 1]);
      const double vhal = 0.5 * (patch.kv[sv + 1] - patch.kv[sv]);
      for (int a = 0; a < gu; ++a) {
        for (int b = 0; b < gv; ++b) {
          QuadCache::Point pt;
          pt.u = umid + uhal * xu[a];
          pt.v = vmid + vhal * xv[b];
          pt.gw = wu[a] * wv[b] * uhal * vhal;
          pt.element = element;
          Nurbs2D basis = nurbs_basis_2d(patch, pt.u, pt.v);
          pt.R = std::move(basis.R);
          pt.dRdu = std::move(basis.dRdu);
          pt.dRdv = std::move(basis.dRdv);
          pt.cps.reserve(cache.n_loc);
          for (int aa = 0; aa <= patch.p; ++aa)
            for (int bb = 0; bb <= patch.q; ++bb)
              pt.cps.push_back(patch.cp(basis.ibase + aa, basis.jbase + bb));
          cache.pts.push_back(std::move(pt));
        }
      }
      ++element;
    }
  }
  return cache;
}

namespace {

struct Elasticity {
  double d11, d12, d33;
};

Elasticity plane_stress(const Material& m) {
  const double c = m.E / (1.0 - m.nu * m.nu);
  return {c, m.nu * c, 0.5 * m.E / (1.0 + m.nu)};
}

struct QuadGeom {
  double det;
  std::vector<double> gx, gy;  // physical basis gradients
};

void quad_geometry(const IgaModel& model, const QuadCache::Point& pt, QuadGeom& g) {
  const int nloc = static_cast<int>(pt.cps.size());
  double xu = 0.0, xv = 0.0, yu = 0.0, yv = 0.0;
  for (int k = 0; k < nloc; ++k) {
    const double cx = model.patch.px[pt.cps[k]];
    const double cy = model.patch.py[pt.cps[k]];
    xu += pt.dRdu[k] * cx;
    xv += pt.dRdv[k] * cx;
    yu += pt.dRdu[k] * cy;
    yv += pt.dRdv[k] * cy;
  }
  g.det = xu * yv - xv * yu;
  require(g.det > 0.0, Errc::geometry_error,
          "assemble: non-positive Jacobian in element " + std::to_string(pt.element));
  g.gx.resize(nloc);
  g.gy.resize(nloc);
  for (int k = 0; k < nloc; ++k) {
    g.gx[k] = (pt.dRdu[k] * yv - pt.dRdv[k] * yu) / g.det;
    g.gy[k] = (pt.dRdv[k] * xu - pt.dRdu[k] * xv) / g.det;
  }
}

}  // namespace

LinearSystem assemble(const IgaModel& model, const QuadCache& cache) {
  model.validate();
  const int n = model.n_dofs();
  LinearSystem sys;
  sys.n = n;
  sys.K.assign(static_cast<size_t>(n) * n, 0.0);
  sys.F = model.loads;
  const Elasticity D = plane_stress(model.mat);

  QuadGeom g;
  for (const QuadCache::Point& pt : cache.pts) {
    quad_geometry(model, pt, g);
    const double scale = pt.gw * g.det;
    const int nloc = static_cast<int>(pt.cps.size());
    for (int k = 0; k < nloc; ++k) {
      const double axs = g.gx[k] * scale, ays = g.gy[k] * scale;
      const int rk = 2 * pt.cps[k];
      for (int l = 0; l < nloc; ++l) {
        const double bx = g.gx[l], by = g.gy[l];
        const int cl = 2 * pt.cps[l];
        double* row0 = sys.K.data() + static_cast<size_t>(rk) * n + cl;
        double* row1 = sys.K.data() + static_cast<size_t>(rk + 1) * n + cl;
        row0[0] += D.d11 * axs * bx + D.d33 * ays * by;
        row0[1] += D.d12 * axs * by + D.d33 * ays * bx;
        row1[0] += D.d12 * ays * bx + D.d33 * axs * by;
        row1[1] += D.d11 * ays * by + D.d33 * axs * bx;
      }
    }
  }
  return sys;
}

LinearSystem assemble(const IgaModel& model) {
  return assemble(model, build_quad_cache(model.patch, model.quad_order));
}

namespace {

std::vector<int> free_dof_list(const IgaModel& model) {
  std::vector<int> free;
  free.reserve(model.n_dofs() - model.fixed_dofs.size());
  size_t k = 0;
  for (int d = 0; d < model.n_dofs(); ++d) {
    if (k < model.fixed_dofs.size() && model.fixed_dofs[k] == d)
      ++k;
    else
      free.push_back(d);
  }
  return free;
}

}  // namespace

std::vector<double> solve_constrained(const LinearSystem& sys, const IgaModel& model) {
  require(sys.n == model.n_dofs(), Errc::shape_mismatch,
          "solve: system size does not match the model");
  require(!model.fixed_dofs.empty(), Errc::invalid_argument,
          "solve: no constraints; rigid modes present");
  const std::vector<int> free = free_dof_list(model);
  const int nf = static_cast<int>(free.size());
  Eigen::Map<const RowMat> K(sys.K.data(), sys.n, sys.n);

  MatrixXd Kff(nf, nf);
  VectorXd rhs(nf);
  for (int r = 0; r < nf; ++r) {
    rhs[r] = sys.F[free[r]];
    for (int c = 0; c < nf; ++c) Kff(r, c) = K(free[r], free[c]);
    for (size_t k = 0; k < model.fixed_dofs.size(); ++k)
      if (model.fixed_values[k] != 0.0) rhs[r] -= K(free[r], model.fixed_dofs[k]) * model.fixed_values[k];
  }
  Eigen::LLT<MatrixXd> llt(Kff);
  require(llt.info() == Eigen::Success, Errc::numeric_error,
          "solve: constrained stiffness is not positive definite");
  const VectorXd x = llt.solve(rhs);

  std::vector<double> d(sys.n, 0.0);
  for (size_t k = 0; k < model.fixed_dofs.size(); ++k) d[model.fixed_dofs[k]] = model.fixed_values[k];
  for (int r = 0; r < nf; ++r) d[free[r]] = x[r];
  return d;
}

std::vector<double> solve_full(const IgaModel& model) {
  return solve_constrained(assemble(model), model);
}

namespace {

// Modified Gram-Schmidt (two passes) appending unit vectors to basis.v.
void append_orthonormal(ReducedBasis& basis, std::vector<double> delta, double drop_tol) {
  const int nf = basis.n_free;
  Eigen::Map<VectorXd> w(delta.data(), nf);
  const double norm0 = w.norm();
  if (norm0 == 0.0) return;
  for (int pass = 0; pass < 2; ++pass)
    for (int k = 0; k < basis.nd; ++k) {
      Eigen::Map<const VectorXd> vk(basis.v.data() + static_cast<size_t>(k) * nf, nf);
      w -= vk.dot(w) * vk;
    }
  const double norm1 = w.norm();
  if (norm1 <= drop_tol * norm0) return;
  w /= norm1;
  basis.v.insert(basis.v.end(), delta.begin(), delta.end());
  ++basis.nd;
}

}  // namespace

ReducedBasis build_reduced_basis(const IgaModel& base, std::span<const IgaModel> snapshots,
                                 double drop_tol) {
  require(!snapshots.empty(), Errc::invalid_argument, "reduced basis: no snapshots");
  const std::vector<double> d0 = solve_full(base);
  ReducedBasis basis;
  basis.free_dofs = free_dof_list(base);
  basis.n_free = static_cast<int>(basis.free_dofs.size());
  for (const IgaModel& snap : snapshots) {
    require(snap.n_dofs() == base.n_dofs() && snap.fixed_dofs == base.fixed_dofs,
            Errc::invalid_argument, "reduced basis: snapshot layout differs from the base");
    const std::vector<double> ds = solve_full(snap);
    std::vector<double> delta(basis.n_free);
    for (int r = 0; r < basis.n_free; ++r)
      delta[r] = ds[basis.free_dofs[r]] - d0[basis.free_dofs[r]];
    append_orthonormal(basis, std::move(delta), drop_tol);
  }
  require(basis.nd >= 1, Errc::invalid_argument,
          "reduced basis: every snapshot coincides with the base solution");
  return basis;
}

ReducedSolve solve_reduced(const IgaModel& m1, const LinearSystem& sys,
                           std::span<const double> d0, const ReducedBasis& basis,
                           double fallback_tol) {
  require(basis.nd >= 1, Errc::invalid_argument, "solve_reduced: empty basis");
  require(sys.n == m1.n_dofs() && static_cast<int>(d0.size()) == sys.n, Errc::shape_mismatch,
          "solve_reduced: size mismatch");
  require(free_dof_list(m1) == basis.free_dofs, Errc::invalid_argument,
          "solve_reduced: constraint layout differs from the basis");
  const int n = sys.n, nf = basis.n_free, nd = basis.nd;

  Eigen::Map<const RowMat> K(sys.K.data(), n, n);
  Eigen::Map<const VectorXd> F(sys.F.data(), n);
  Eigen::Map<const VectorXd> d0v(d0.data(), n);

  // basis columns scattered to full length (zeros at fixed dofs)
  MatrixXd R = MatrixXd::Zero(n, nd);
  for (int k = 0; k < nd; ++k)
    for (int r = 0; r < nf; ++r)
      R(basis.free_dofs[r], k) = basis.v[static_cast<size_t>(k) * nf + r];

  double fnorm = 0.0;
  for (int r = 0; r < nf; ++r) fnorm += sys.F[basis.free_dofs[r]] * sys.F[basis.free_dofs[r]];
  fnorm = std::sqrt(fnorm);

  auto free_residual = [&](const VectorXd& d) {
    const VectorXd r = F - K * d;
    double s = 0.0;
    for (int k = 0; k < nf; ++k) s += r[basis.free_dofs[k]] * r[basis.free_dofs[k]];
    return std::sqrt(s);
  };

  ReducedSolve out;
  const VectorXd delta = F - K * d0v;
  const MatrixXd T = K * R;
  const MatrixXd KR = R.transpose() * T;
  const VectorXd FR = R.transpose() * delta;
  Eigen::LLT<MatrixXd> llt(KR);
  bool ok = llt.info() == Eigen::Success;
  VectorXd d1;
  if (ok) {
    d1 = d0v + R * llt.solve(FR);
    out.residual_rel = fnorm > 0.0 ? free_residual(d1) / fnorm : free_residual(d1);
    ok = out.residual_rel <= fallback_tol;
  }
  if (!ok) {
    out.fallback = true;
    const std::vector<double> df = solve_constrained(sys, m1);
    d1 = Eigen::Map<const VectorXd>(df.data(), n);
    out.residual_rel = fnorm > 0.0 ? free_residual(d1) / fnorm : free_residual(d1);
  }
  out.d.assign(d1.data(), d1.data() + n);
  return out;
}

ReducedSolve solve_reduced(const IgaModel& m1, std::span<const double> d0,
                           const ReducedBasis& basis, double fallback_tol) {
  return solve_reduced(m1, assemble(m1), d0, basis, fallback_tol);
}

std::vector<QuadStress> stress_field(const IgaModel& model, const QuadCache& cache,
                                     std::span<const double> d) {
  model.validate();
  require(static_cast<int>(d.size()) == model.n_dofs(), Errc::shape_mismatch,
          "stress: displacement size mismatch");
  const Elasticity D = plane_stress(model.mat);
  std::vector<QuadStress> field;
  field.reserve(cache.pts.size());
  QuadGeom g;
  for (const QuadCache::Point& pt : cache.pts) {
    quad_geometry(model, pt, g);
    const int nloc = static_cast<int>(pt.cps.size());
    double exx = 0.0, eyy = 0.0, gxy = 0.0, x = 0.0, y = 0.0;
    for (int k = 0; k < nloc; ++k) {
      const double dx = d[2 * pt.cps[k]], dy = d[2 * pt.cps[k] + 1];
      exx += g.gx[k] * dx;
      eyy += g.gy[k] * dy;
      gxy += g.gy[k] * dx + g.gx[k] * dy;
      x += pt.R[k] * model.patch.px[pt.cps[k]];
      y += pt.R[k] * model.patch.py[pt.cps[k]];
    }
    QuadStress s;
    s.u = pt.u;
    s.v = pt.v;
    s.x = x;
    s.y = y;
    s.sxx = D.d11 * exx + D.d12 * eyy;
    s.syy = D.d12 * exx + D.d11 * eyy;
    s.txy = D.d33 * gxy;
    s.vm = std::sqrt(s.sxx * s.sxx - s.sxx * s.syy + s.syy * s.syy + 3.0 * s.txy * s.txy);
    field.push_back(s);
  }
  return field;
}

std::vector<QuadStress> stress_field(const IgaModel& model, std::span<const double> d) {
  return stress_field(model, build_quad_cache(model.patch, model.quad_order), d);
}

double max_stress(const IgaModel& model, std::span<const double> d) {
  double m = 0.0;
  for (const QuadStress& s : stress_field(model, d)) m = std::max(m, s.vm);
  return m;
}

void write_stress_csv(std::span<const QuadStress> field, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "w");
  require(f != nullptr, Errc::io_error, "cannot open for writing: " + path);
  std::fprintf(f, "u,v,x,y,sxx,syy,txy,von_mises\n");
  for (const QuadStress& s : field)
    std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", s.u, s.v, s.x, s.y,
                 s.sxx, s.syy, s.txy, s.vm);
  const bool ok = std::fflush(f) == 0;
  std::fclose(f);
  require(ok, Errc::io_error, "short write: " + path);
}

IgaModel build_tube_analog(int n_ctrl_u, int n_ctrl_v) {
  require(n_ctrl_u >= 3 && n_ctrl_v >= 3, Errc::invalid_argument,
          "tube analog: need at least 3 control points per direction");
  NurbsPatch base;
  base.p = base.q = 2;
  base.nu = base.nv = 3;
  base.ku = base.kv = {0.0, 0.0, 0.0, 1.0, 1.0, 1.0};
  const double r[3] = {1.0, 1.25, 1.5};
  const double dirx[3] = {1.0, 1.0, 0.0};  // exact quarter arc: ends + tangent corner
  const double diry[3] = {0.0, 1.0, 1.0};
  const double wj[3] = {1.0, std::sqrt(0.5), 1.0};
  base.px.resize(9);
  base.py.resize(9);
  base.w.resize(9);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const int k = base.cp(i, j);
      base.px[k] = r[i] * dirx[j];
      base.py[k] = r[i] * diry[j];
      base.w[k] = wj[j];
    }

  IgaModel model;
  model.patch = refine_to(base, n_ctrl_u, n_ctrl_v);
  model.mat = {210e9, 0.3};
  model.loads.assign(model.n_dofs(), 0.0);
  for (int i = 0; i < model.patch.nu; ++i) {
    const int bottom = model.patch.cp(i, 0);
    model.fixed_dofs.push_back(2 * bottom);
    model.fixed_dofs.push_back(2 * bottom + 1);
    const int top = model.patch.cp(i, model.patch.nv - 1);
    model.loads[2 * top + 1] = -3e5;
  }
  std::sort(model.fixed_dofs.begin(), model.fixed_dofs.end());
  model.fixed_values.assign(model.fixed_dofs.size(), 0.0);
  return model;
}

StressResponse::StressResponse(const IgaModel& base, int n_snapshots, std::uint64_t seed,
                               double fallback_tol, bool force_full)
    : base_(base), tol_(fallback_tol), force_full_(force_full) {
  base_.validate();
  require(n_snapshots >= 1, Errc::invalid_argument, "stress response: need >= 1 snapshots");
  cache_ = build_quad_cache(base_.patch, base_.quad_order);
  y_init_ = base_.patch.py;

  // The Jacobian determinant is linear in the design, so the worst case over
  // the box is exact: shrink the design-to-geometry gain until every quadrature
  // point keeps at least 20% of its unperturbed determinant.
  QuadGeom g;
  double gain = 1.0;
  for (const QuadCache::Point& pt : cache_.pts) {
    quad_geometry(base_, pt, g);
    double xu = 0.0, xv = 0.0, au = 0.0, av = 0.0;
    for (size_t k = 0; k < pt.cps.size(); ++k) {
      xu += pt.dRdu[k] * base_.patch.px[pt.cps[k]];
      xv += pt.dRdv[k] * base_.patch.px[pt.cps[k]];
      const double amp = 0.2 * std::fabs(y_init_[pt.cps[k]]);
      au += std::fabs(pt.dRdu[k]) * amp;
      av += std::fabs(pt.dRdv[k]) * amp;
    }
    const double worst = std::fabs(xu) * av + std::fabs(xv) * au;
    if (worst > 0.0) gain = std::min(gain, 0.8 * g.det / worst);
  }
  gain_ = gain;

  d0_ = solve_constrained(assemble(base_, cache_), base_);

  basis_.free_dofs = free_dof_list(base_);
  basis_.n_free = static_cast<int>(basis_.free_dofs.size());
  std::mt19937_64 gen = rng::make_stream(seed, rng::Stream::snapshots);
  const int n_cp = base_.patch.n_cp();
  std::vector<double> design(n_cp);
  for (int s = 0; s < n_snapshots; ++s) {
    for (int k = 0; k < n_cp; ++k) design[k] = y_init_[k] * rng::uniform(gen, 0.8, 1.2);
    const IgaModel snap = apply_design(design);
    const std::vector<double> ds = solve_constrained(assemble(snap, cache_), snap);
    std::vector<double> delta(basis_.n_free);
    for (int r = 0; r < basis_.n_free; ++r)
      delta[r] = ds[basis_.free_dofs[r]] - d0_[basis_.free_dofs[r]];
    append_orthonormal(basis_, std::move(delta), 1e-10);
  }
  require(basis_.nd >= 1, Errc::invalid_argument,
          "stress response: snapshot solves produced no basis directions");
}

std::vector<std::pair<double, double>> StressResponse::design_bounds() const {
  std::vector<std::pair<double, double>> b;
  b.reserve(y_init_.size());
  for (double y : y_init_) b.emplace_back(std::min(0.8 * y, 1.2 * y), std::max(0.8 * y, 1.2 * y));
  return b;
}

IgaModel StressResponse::apply_design(std::span<const double> y_design) const {
  require(y_design.size() == y_init_.size(), Errc::shape_mismatch,
          "design: wrong number of variables");
  IgaModel m = base_;
  for (size_t k = 0; k < y_init_.size(); ++k) {
    const double lo = std::min(0.8 * y_init_[k], 1.2 * y_init_[k]);
    const double hi = std::max(0.8 * y_init_[k], 1.2 * y_init_[k]);
    const double tol = 1e-9 * (std::fabs(y_init_[k]) + 1.0);
    require(y_design[k] >= lo - tol && y_design[k] <= hi + tol, Errc::invalid_argument,
            "design: variable " + std::to_string(k + 1) + " outside its box");
    m.patch.py[k] = y_init_[k] + gain_ * (y_design[k] - y_init_[k]);
  }
  return m;
}

double StressResponse::operator()(std::span<const double> y_design) {
  const IgaModel m1 = apply_design(y_design);
  const LinearSystem sys = assemble(m1, cache_);
  std::vector<double> d;
  if (force_full_) {
    d = solve_constrained(sys, m1);
  } else {
    ReducedSolve rs = solve_reduced(m1, sys, d0_, basis_, tol_);
    if (rs.fallback) ++fallbacks_;
    d = std::move(rs.d);
  }
  ++evals_;
  double vm = 0.0;
  for (const QuadStress& s : stress_field(m1, cache_, d)) vm = std::max(vm, s.vm);
  return vm;
}

std::pair<doe::Dataset, doe::Dataset> generate_iga_dataset(StressResponse& response, int n_train,
                                                           int n_test, std::uint64_t seed) {
  require(n_train >= 1 && n_test >= 1, Errc::invalid_argument,
          "iga dataset: sample counts must be >= 1");
  const std::vector<double>& y0 = response.y_init();
  const int d = static_cast<int>(y0.size());
  auto make = [&](int n, std::uint64_t stream_index, std::uint64_t tag) {
    doe::Dataset ds;
    ds.n = n;
    ds.d = d;
    ds.seed = tag;
    ds.fn_id = "iga_max_stress";
    for (double y : y0) ds.bounds.emplace_back(std::min(0.8 * y, 1.2 * y), std::max(0.8 * y, 1.2 * y));
    std::tie(ds.grid_h, ds.grid_w) = doe::grid_shape(d);
    ds.X.resize(static_cast<size_t>(n) * d);
    ds.y.resize(n);
    std::mt19937_64 g = rng::make_stream(seed, rng::Stream::sampling, stream_index);
    for (int i = 0; i < n; ++i) {
      double* row = ds.X.data() + static_cast<size_t>(i) * d;
      for (int j = 0; j < d; ++j) row[j] = y0[j] * rng::uniform(g, 0.8, 1.2);
      ds.y[i] = response({row, static_cast<size_t>(d)});
    }
    return ds;
  };
  doe::Dataset train = make(n_train, 0, seed);
  doe::Dataset test = make(n_test, 1, rng::mix(seed));
  return {std::move(train), std::move(test)};
}

// ---- model files ----

std::string model_to_json(const IgaModel& model) {
  nlohmann::json j;
  j["format"] = "hdsurr-iga-v1";
  j["degrees"] = {model.patch.p, model.patch.q};
  j["counts"] = {model.patch.nu, model.patch.nv};
  j["knots_u"] = model.patch.ku;
  j["knots_v"] = model.patch.kv;
  j["px"] = model.patch.px;
  j["py"] = model.patch.py;
  j["weights"] = model.patch.w;
  j["material"] = {{"E", model.mat.E}, {"nu", model.mat.nu}};
  j["fixed_dofs"] = model.fixed_dofs;
  j["fixed_values"] = model.fixed_values;
  j["loads"] = model.loads;
  j["quad_order"] = model.quad_order;
  return j.dump();
}

IgaModel model_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::io_error, std::string("iga model: bad JSON: ") + e.what());
  }
  try {
    require(j.at("format").get<std::string>() == "hdsurr-iga-v1", Errc::io_error,
            "iga model: unknown format");
    IgaModel m;
    const auto deg = j.at("degrees").get<std::vector<int>>();
    const auto cnt = j.at("counts").get<std::vector<int>>();
    require(deg.size() == 2 && cnt.size() == 2, Errc::io_error, "iga model: bad shape fields");
    m.patch.p = deg[0];
    m.patch.q = deg[1];
    m.patch.nu = cnt[0];
    m.patch.nv = cnt[1];
    m.patch.ku = j.at("knots_u").get<std::vector<double>>();
    m.patch.kv = j.at("knots_v").get<std::vector<double>>();
    m.patch.px = j.at("px").get<std::vector<double>>();
    m.patch.py = j.at("py").get<std::vector<double>>();
    m.patch.w = j.at("weights").get<std::vector<double>>();
    m.mat.E = j.at("material").at("E").get<double>();
    m.mat.nu = j.at("material").at("nu").get<double>();
    m.fixed_dofs = j.at("fixed_dofs").get<std::vector<int>>();
    m.fixed_values = j.at("fixed_values").get<std::vector<double>>();
    m.loads = j.at("loads").get<std::vector<double>>();
    m.quad_order = j.at("quad_order").get<int>();
    m.validate();
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::io_error, std::string("iga model: missing field: ") + e.what());
  }
}

void save_model(const IgaModel& model, const std::string& path) {
  std::ofstream f(path);
  require(f.good(), Errc::io_error, "cannot open for writing: " + path);
  f << model_to_json(model) << '\n';
  require(f.good(), Errc::io_error, "short write: " + path);
}

IgaModel load_model(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), Errc::io_error, "cannot open: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return model_from_json(ss.str());
}

}  // namespace hds::iga
