#include "bifluid/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bifluid/kernels.hpp"

namespace bifluid {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ratio(double num, double den) { return den > 0.0 ? std::abs(num) / den : 0.0; }

/// Face values of s for the state's problem; cell values when the trace
/// cannot be formed (overflow on a diverging iterate).
BoundaryField safe_trace(const Problem& pb, const Field& s, double eps, double lam) {
  try {
    return entropy_trace(pb, s, eps, lam);
  } catch (const std::exception&) {
    return cell_trace(s);
  }
}

Field exp_field(const Field& s) {
  Field t(s.grid());
  for (std::size_t c = 0; c < s.size(); ++c) t[c] = std::exp(s[c]);
  return t;
}

BoundaryField exp_boundary(const BoundaryField& y) {
  BoundaryField t(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) t[k] = std::exp(y[k]);
  return t;
}

Tensor3 tensor_at(const TensorField& t, std::size_t c, int dim) {
  Tensor3 out{};
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) out[a][b] = t.comp(a, b)[c];
  return out;
}

double sq_norm(const Vec3& v) { return v[0] * v[0] + v[1] * v[1] + v[2] * v[2]; }
double dot3(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

/// Per-cell quantities shared by the residual passes.
struct CellData {
  std::array<TensorField, 2> grad_u;
  std::array<Field, 2> div_u;
  std::array<VectorField, 2> grad_rho;
  Field theta;
  BoundaryField trace;  ///< s at boundary faces
  VectorField grad_s;   ///< uses the trace
  VectorField grad_theta;
};

CellData cell_data(const MixtureState& st, const Problem& pb) {
  CellData d;
  for (int i = 0; i < 2; ++i) {
    d.grad_u[i] = grad_vector(st.u[i]);
    d.div_u[i] = divergence(st.u[i]);
    d.grad_rho[i] = gradient(st.rho[i]);
  }
  d.theta = exp_field(st.s);
  d.trace = safe_trace(pb, st.s, st.eps, st.lam);
  d.grad_s = gradient_with_trace(st.s, d.trace);
  d.grad_theta = gradient_with_trace(d.theta, exp_boundary(d.trace));
  return d;
}

std::array<Tensor3, 2> stresses(const CellData& d, const ViscosityMatrices& visc, std::size_t c, int dim,
                                std::array<Tensor3, 2>* grads = nullptr) {
  const Tensor3 g1 = tensor_at(d.grad_u[0], c, dim);
  const Tensor3 g2 = tensor_at(d.grad_u[1], c, dim);
  if (grads) *grads = {g1, g2};
  return {viscous_stress(g1, g2, visc, 1, dim), viscous_stress(g1, g2, visc, 2, dim)};
}

}  // namespace

// ---------------------------------------------------------------------------

const std::vector<std::string>& monitor_columns() {
  static const std::vector<std::string> cols{
      "eps",        "rho1_L2gamma", "rho2_L2gamma",  "u1_W12",      "u2_W12",         "eps_grad_rho1",
      "eps_grad_rho2", "theta_L3m", "grad_theta_L2", "bnd_exp_s",   "grad_s_L2",      "theta_bnd_L2m",
      "weak_H1",    "weak_H2",      "weak_H3",       "energy_identity",  "entropy_identity",     "kirchhoff_residual",
      "renorm_1",   "renorm_2",     "fp_iterations", "converged"};
  return cols;
}

std::vector<double> monitor_values(const MonitorRow& r) {
  return {r.eps,
          r.rho_L2gamma[0],
          r.rho_L2gamma[1],
          r.u_W12[0],
          r.u_W12[1],
          r.eps_grad_rho[0],
          r.eps_grad_rho[1],
          r.theta_L3m,
          r.grad_theta_L2,
          r.boundary_exp_s,
          r.grad_s_L2,
          r.theta_boundary_L2m,
          r.weak_H1,
          r.weak_H2,
          r.weak_H3,
          r.energy_identity,
          r.entropy_identity,
          r.kirchhoff_residual,
          r.renorm[0],
          r.renorm[1],
          static_cast<double>(r.fp_iterations),
          r.converged ? 1.0 : 0.0};
}

// ---------------------------------------------------------------------------

namespace {

/// (1 - t^2)^4 on |t| < 1: vanishes with three derivatives at t = +-1.
double bump(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  const double q = 1.0 - t * t;
  return q * q * q * q;
}
double bump_derivative(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  const double q = 1.0 - t * t;
  return -8.0 * t * q * q * q;
}

constexpr int kBumpPositions = 3;
constexpr int kBumpWidths = 2;

}  // namespace

TestFunctionFamily::TestFunctionFamily(TestFamilyKind kind, const Grid& g, int degree)
    : kind_(kind), grid_(g), degree_(degree) {
  if (degree < 1) throw std::invalid_argument("test family degree must be at least 1");
  std::size_t per_axis = kind == TestFamilyKind::SmoothBumpInterior ? kBumpPositions : degree + 1;
  count_ = 1;
  for (int a = 0; a < g.dim; ++a) count_ *= per_axis;
  if (kind == TestFamilyKind::SmoothBumpInterior) count_ *= kBumpWidths;
}

TestFunction TestFunctionFamily::eval(std::size_t n, const Vec3& x) const {
  if (n >= count_) throw std::out_of_range("test function index out of range");
  const int dim = grid_.dim;
  std::array<double, 3> val{1.0, 1.0, 1.0}, der{0.0, 0.0, 0.0};
  if (kind_ == TestFamilyKind::SmoothBumpInterior) {
    const int width = static_cast<int>(n % kBumpWidths);
    n /= kBumpWidths;
    for (int a = 0; a < dim; ++a) {
      const int pos = static_cast<int>(n % kBumpPositions);
      n /= kBumpPositions;
      const double L = grid_.extents[a];
      const double centre = L * (pos + 1) / 4.0;
      const double w = width == 0 ? L / 4.0 : L / 8.0;
      const double t = (x[a] - centre) / w;
      val[a] = bump(t);
      der[a] = bump_derivative(t) / w;
    }
  } else {
    for (int a = 0; a < dim; ++a) {
      const int k = static_cast<int>(n % (degree_ + 1));
      n /= degree_ + 1;
      const double L = grid_.extents[a];
      const double t = x[a] / L;
      val[a] = std::pow(t, k);
      der[a] = k == 0 ? 0.0 : k * std::pow(t, k - 1) / L;
    }
  }
  TestFunction out;
  out.value = val[0] * val[1] * val[2];
  for (int a = 0; a < dim; ++a) {
    double p = der[a];
    for (int b = 0; b < dim; ++b)
      if (b != a) p *= val[b];
    out.grad[a] = p;
  }
  return out;
}

Field TestFunctionFamily::sample(std::size_t n) const {
  Field f(grid_);
  for (std::size_t c = 0; c < grid_.size(); ++c) f[c] = eval(n, grid_.center(c)).value;
  return f;
}

// ---------------------------------------------------------------------------

MonitorRow estimate_monitor(const MixtureState& st, const Problem& pb) {
  const Grid& g = pb.grid();
  const auto& prm = pb.params();
  MonitorRow row;
  row.eps = st.eps;
  const double p_grad = 6.0 * prm.gamma / (prm.gamma + 3.0);
  for (int i = 0; i < 2; ++i) {
    row.rho_L2gamma[i] = lp_norm(st.rho[i], 2.0 * prm.gamma);
    row.u_W12[i] = w12_norm(st.u[i]);
    row.eps_grad_rho[i] = st.eps * lp_norm(gradient(st.rho[i]), p_grad);
  }
  const Field theta = exp_field(st.s);
  const BoundaryField trace = safe_trace(pb, st.s, st.eps, st.lam);
  const BoundaryField theta_f = exp_boundary(trace);
  row.theta_L3m = lp_norm(theta, 3.0 * prm.m);
  row.grad_theta_L2 = lp_norm(gradient_with_trace(theta, theta_f), 2.0);
  BoundaryField both(trace.size());
  for (std::size_t k = 0; k < trace.size(); ++k) both[k] = theta_f[k] + std::exp(-trace[k]);
  row.boundary_exp_s = boundary_integral(both, g);
  row.grad_s_L2 = lp_norm(gradient_with_trace(st.s, trace), 2.0);
  row.theta_boundary_L2m = boundary_lp_norm(theta_f, g, 2.0 * prm.m);
  return row;
}

MonitorRow full_monitor(const MixtureState& st, const Problem& pb, int fp_iterations, bool converged) {
  MonitorRow row = estimate_monitor(st, pb);
  const WeakResiduals w = weak_residuals(st, pb);
  row.weak_H1 = w.h1;
  row.weak_H2 = w.h2;
  row.weak_H3 = w.h3;
  const IdentityResiduals id = identity_residuals(st, pb);
  row.energy_identity = id.energy_identity;
  row.entropy_identity = id.entropy_identity;
  row.kirchhoff_residual = id.kirchhoff_residual;
  for (int i = 0; i < 2; ++i) row.renorm[i] = renormalized_integral(st, i + 1);
  row.fp_iterations = fp_iterations;
  row.converged = converged;
  return row;
}

// ---------------------------------------------------------------------------

WeakResiduals weak_residuals(const MixtureState& st, const Problem& pb) {
  const Grid& g = pb.grid();
  const int dim = g.dim;
  const std::size_t n = g.size();
  const double vol = g.cell_volume();
  const auto& prm = pb.params();
  const auto& visc = pb.visc();
  const auto& faces = pb.faces();
  WeakResiduals out;
  const CellData d = cell_data(st, pb);

  // H1 over the polynomial family.
  const TestFunctionFamily poly(TestFamilyKind::PolynomialGlobal, g);
  std::vector<TestFunction> tf(n);
  for (std::size_t k = 0; k < poly.size(); ++k) {
    for (std::size_t c = 0; c < n; ++c) tf[c] = poly.eval(k, g.center(c));
    for (int i = 0; i < 2; ++i) {
      double sum = 0.0, mag = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        const double v = st.rho[i][c] * dot3(st.u[i].at(c), tf[c].grad) * vol;
        sum += v;
        mag += std::abs(v);
      }
      out.h1 = std::max(out.h1, ratio(sum, mag));
    }
  }

  // H3 over the polynomial family.
  {
    std::vector<std::array<Tensor3, 2>> P(n);
    for (std::size_t c = 0; c < n; ++c) P[c] = stresses(d, visc, c, dim);
    const BoundaryField theta_f = exp_boundary(d.trace);
    for (std::size_t k = 0; k < poly.size(); ++k) {
      double sum = 0.0, mag = 0.0;
      for (std::size_t c = 0; c < n; ++c) {
        const TestFunction t = poly.eval(k, g.center(c));
        const double th = d.theta[c];
        double terms[6] = {};
        for (int i = 0; i < 2; ++i) {
          const Vec3 u = st.u[i].at(c);
          const double r = std::max(st.rho[i][c], 0.0);
          const double ug = dot3(u, t.grad);
          terms[0] -= r * total_energy(r, sq_norm(u), th, prm.gamma) * ug;
          terms[1] -= pressure(r, th, prm.gamma) * ug;
          double pw = 0.0;
          for (int a = 0; a < dim; ++a)
            for (int b = 0; b < dim; ++b) pw += P[c][i][a][b] * u[a] * t.grad[b];
          terms[2] += pw;
          terms[3] -= r * dot3(pb.forcing(i + 1).at(c), u) * t.value;
        }
        // + 2 k grad theta . grad eta moves q = -k grad theta to the left side.
        terms[4] = 2.0 * thermal_coefficients(th, prm.m).k * dot3(d.grad_theta.at(c), t.grad);
        for (double v : terms) {
          sum += v * vol;
          mag += std::abs(v) * vol;
        }
      }
      for (std::size_t f = 0; f < faces.size(); ++f) {
        const double tf_val = poly.eval(k, faces[f].center).value;
        const double th = theta_f[f];
        const double v = thermal_coefficients(th, prm.m).L * (th - pb.theta_hat()[f]) * tf_val * faces[f].area;
        sum += v;
        mag += std::abs(v);
      }
      out.h3 = std::max(out.h3, ratio(sum, mag));
    }
  }

  // H2 over bumps times unit vectors; derivatives of the bump are discrete so
  // that constant pressures integrate to zero exactly.
  const TestFunctionFamily bumps(TestFamilyKind::SmoothBumpInterior, g);
  std::array<Field, 2> pr{Field(g), Field(g)};
  std::array<VectorField, 2> force{VectorField(g), VectorField(g)};
  for (int i = 0; i < 2; ++i)
    for (std::size_t c = 0; c < n; ++c) {
      const double r = std::max(st.rho[i][c], 0.0);
      pr[i][c] = pressure(r, d.theta[c], prm.gamma);
      const Vec3 J = momentum_exchange(st.u[0].at(c), st.u[1].at(c), prm.a, i + 1);
      const Vec3 f = pb.forcing(i + 1).at(c);
      Vec3 v{};
      for (int a = 0; a < dim; ++a) v[a] = r * f[a] + J[a];
      force[i].set(c, v);
    }
  const Mat2 bulk{{{visc.lambda[0][0] + visc.mu[0][0], visc.lambda[0][1] + visc.mu[0][1]},
                   {visc.lambda[1][0] + visc.mu[1][0], visc.lambda[1][1] + visc.mu[1][1]}}};
  for (std::size_t k = 0; k < bumps.size(); ++k) {
    const Field beta = bumps.sample(k);
    const VectorField gb = gradient(beta, Ghost::DirichletZero);
    for (int i = 0; i < 2; ++i)
      for (int comp = 0; comp < dim; ++comp) {
        double sum = 0.0, mag = 0.0;
        for (std::size_t c = 0; c < n; ++c) {
          bool outside = beta[c] == 0.0;
          for (int a = 0; a < dim; ++a) outside = outside && gb.comp(a)[c] == 0.0;
          if (outside) continue;
          const double divphi = gb.comp(comp)[c];
          double terms[6] = {};
          for (int j = 0; j < 2; ++j) {
            double gg = 0.0;
            for (int a = 0; a < dim; ++a) gg += d.grad_u[j].comp(a, comp)[c] * gb.comp(a)[c];
            terms[0] += visc.mu[i][j] * gg;
            terms[1] += bulk[i][j] * d.div_u[j][c] * divphi;
          }
          double conv = 0.0;
          for (int a = 0; a < dim; ++a) conv += st.u[i].comp(a)[c] * gb.comp(a)[c];
          terms[2] = -st.rho[i][c] * conv * st.u[i].comp(comp)[c];
          terms[3] = -pr[i][c] * divphi;
          terms[4] = -force[i].comp(comp)[c] * beta[c];
          for (double v : terms) {
            sum += v * vol;
            mag += std::abs(v) * vol;
          }
        }
        out.h2 = std::max(out.h2, ratio(sum, mag));
      }
  }
  return out;
}

// ---------------------------------------------------------------------------

double IdentityTerms::residual() const {
  double l = 0.0, r = 0.0, mag = 0.0;
  for (const auto& [name, v] : lhs) {
    l += v;
    mag += std::abs(v);
  }
  for (const auto& [name, v] : rhs) {
    r += v;
    mag += std::abs(v);
  }
  return ratio(l - r, mag);
}

namespace {

/// Integrals shared by both identities, evaluated with lam = 1.
struct CommonTerms {
  double eps_rho_u2 = 0.0, eps_M_u2 = 0.0, eps_rho_gamma = 0.0, eps_M_rho = 0.0, forcing = 0.0;
};

CommonTerms common_terms(const MixtureState& st, const Problem& pb) {
  const Grid& g = pb.grid();
  const auto& prm = pb.params();
  const double vol = g.cell_volume(), eps = st.eps, gam = prm.gamma;
  CommonTerms t;
  for (int i = 0; i < 2; ++i) {
    const double M = prm.masses[i];
    for (std::size_t c = 0; c < g.size(); ++c) {
      const double r = std::max(st.rho[i][c], 0.0);
      const Vec3 u = st.u[i].at(c);
      t.eps_rho_u2 += 0.5 * eps * r * sq_norm(u) * vol;
      t.eps_M_u2 += 0.5 * eps * M / g.volume() * sq_norm(u) * vol;
      t.eps_rho_gamma += eps * gam / (gam - 1.0) * std::pow(r, gam) * vol;
      t.eps_M_rho += eps / g.volume() * gam / (gam - 1.0) * M * std::pow(r, gam - 1.0) * vol;
      t.forcing += r * dot3(pb.forcing(i + 1).at(c), u) * vol;
    }
  }
  return t;
}

}  // namespace

IdentityTerms energy_identity_terms(const MixtureState& st, const Problem& pb) {
  const Grid& g = pb.grid();
  const int dim = g.dim;
  const auto& prm = pb.params();
  const double vol = g.cell_volume(), eps = st.eps, gam = prm.gamma;
  const CellData d = cell_data(st, pb);
  double stress = 0.0, grad_rho = 0.0, friction = 0.0, pressure_work = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    std::array<Tensor3, 2> gu;
    const auto P = stresses(d, pb.visc(), c, dim, &gu);
    const Vec3 du{st.u[0].at(c)[0] - st.u[1].at(c)[0], st.u[0].at(c)[1] - st.u[1].at(c)[1],
                  st.u[0].at(c)[2] - st.u[1].at(c)[2]};
    friction += prm.a * sq_norm(du) * vol;
    for (int i = 0; i < 2; ++i) {
      const double r = std::max(st.rho[i][c], 0.0);
      stress += contract(P[i], gu[i]) * vol;
      if (r > 0.0) grad_rho += eps * gam * std::pow(r, gam - 2.0) * sq_norm(d.grad_rho[i].at(c)) * vol;
      pressure_work += r * d.theta[c] * d.div_u[i][c] * vol;
    }
  }
  const CommonTerms ct = common_terms(st, pb);
  IdentityTerms t;
  t.lhs = {{"stress", stress},
           {"eps_rho_u2", ct.eps_rho_u2},
           {"eps_M_u2", ct.eps_M_u2},
           {"eps_rho_gamma", ct.eps_rho_gamma},
           {"eps_grad_rho", grad_rho},
           {"friction", friction}};
  t.rhs = {{"eps_M_rho", ct.eps_M_rho}, {"pressure_work", pressure_work}, {"forcing", ct.forcing}};
  return t;
}

IdentityTerms entropy_identity_terms(const MixtureState& st, const Problem& pb) {
  const Grid& g = pb.grid();
  const int dim = g.dim;
  const auto& prm = pb.params();
  const double vol = g.cell_volume(), eps = st.eps, gam = prm.gamma;
  const CellData d = cell_data(st, pb);
  double stress = 0.0, conduction = 0.0, friction = 0.0, grad_rho = 0.0, transport = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    std::array<Tensor3, 2> gu;
    const auto P = stresses(d, pb.visc(), c, dim, &gu);
    const double th = d.theta[c];
    const Vec3 du{st.u[0].at(c)[0] - st.u[1].at(c)[0], st.u[0].at(c)[1] - st.u[1].at(c)[1],
                  st.u[0].at(c)[2] - st.u[1].at(c)[2]};
    friction += prm.a * sq_norm(du) / th * vol;
    conduction += 2.0 * thermal_coefficients(th, prm.m).k * (eps + th) / th * sq_norm(d.grad_s.at(c)) * vol;
    for (int i = 0; i < 2; ++i) {
      const double r = std::max(st.rho[i][c], 0.0);
      stress += contract(P[i], gu[i]) / th * vol;
      if (r > 0.0) grad_rho += eps * gam * std::pow(r, gam - 2.0) * sq_norm(d.grad_rho[i].at(c)) / th * vol;
      const Vec3 u = st.u[i].at(c);
      transport += (r * dot3(u, d.grad_s.at(c)) - dot3(u, d.grad_rho[i].at(c))) * vol;
    }
  }
  double b_hat = 0.0, b_theta = 0.0, b_exchange = 0.0, b_neg = 0.0, b_pos = 0.0;
  const auto& faces = pb.faces();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const double y = d.trace[f], th = std::exp(y), A = faces[f].area;
    const double L = thermal_coefficients(th, prm.m).L;
    const double that = pb.theta_hat()[f];
    const double sp = std::max(y, 0.0), sm = std::max(-y, 0.0);
    b_hat += L * that / th * A;
    b_theta += L * th * A;
    b_exchange += L * (1.0 + that) * A;
    b_neg += eps * (sm * std::exp(sm) + sp) * A;
    b_pos += eps * (sp * std::exp(-sp) + sm) * A;
  }
  const CommonTerms ct = common_terms(st, pb);
  IdentityTerms t;
  t.lhs = {{"stress_over_theta", stress},
           {"conduction", conduction},
           {"bnd_L_theta_hat_over_theta", b_hat},
           {"bnd_L_theta", b_theta},
           {"friction_over_theta", friction},
           {"eps_rho_u2", ct.eps_rho_u2},
           {"eps_M_u2", ct.eps_M_u2},
           {"eps_rho_gamma", ct.eps_rho_gamma},
           {"eps_grad_rho_over_theta", grad_rho},
           {"eps_bnd_split_left", b_neg}};
  t.rhs = {{"transport", transport},
           {"bnd_L_exchange", b_exchange},
           {"eps_M_rho", ct.eps_M_rho},
           {"forcing", ct.forcing},
           {"eps_bnd_split_right", b_pos}};
  return t;
}

namespace {

/// Cellwise -2 div_h grad Phi(s) = lam D with Neumann data Pi_hat / 2 at
/// boundary faces; normalized by the summed magnitudes of the separate parts.
double kirchhoff_residual(const MixtureState& st, const Problem& pb) {
  const Grid& g = pb.grid();
  const auto& prm = pb.params();
  const double eps = st.eps, lam = st.lam, vol = g.cell_volume();
  Field phi(g);
  for (std::size_t c = 0; c < g.size(); ++c) phi[c] = kirchhoff_potential(st.s[c], eps, prm.m);
  const Field D = assemble_D(pb, st);
  const BoundaryField y = safe_trace(pb, st.s, eps, lam);

  std::vector<double> flux(g.size(), 0.0), flux_mag(g.size(), 0.0);
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto p = g.ijk(c);
    for (int a = 0; a < g.dim; ++a) {
      const std::size_t s = g.stride(a);
      const double coef = 2.0 / (g.h[a] * g.h[a]);
      if (p[a] + 1 < g.cells[a]) {
        flux[c] -= coef * (phi[c + s] - phi[c]);
        flux_mag[c] += std::abs(coef * (phi[c + s] - phi[c]));
      }
      if (p[a] > 0) {
        flux[c] -= coef * (phi[c - s] - phi[c]);
        flux_mag[c] += std::abs(coef * (phi[c - s] - phi[c]));
      }
    }
  }
  const auto& faces = pb.faces();
  for (std::size_t f = 0; f < faces.size(); ++f) {
    const auto& fc = faces[f];
    const double src = pb.sources.boundary ? (*pb.sources.boundary)[f] : 0.0;
    const double reg = -eps * y[f];
    const double exch = lam * (boundary_T(y[f], pb.theta_hat()[f], prm.m) + src);
    // -2/V * A * Pi_hat / 2 with A / V = 1 / h.
    const double w = 1.0 / g.h[fc.axis];
    flux[fc.cell] -= w * (reg + exch);
    flux_mag[fc.cell] += w * (std::abs(reg) + std::abs(exch));
  }
  double sum = 0.0, mag = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    sum += std::abs(flux[c] - lam * D[c]) * vol;
    mag += (flux_mag[c] + std::abs(lam * D[c])) * vol;
  }
  return ratio(sum, mag);
}

}  // namespace

IdentityResiduals identity_residuals(const MixtureState& st, const Problem& pb) {
  IdentityResiduals r;
  auto guarded = [](auto&& fn) {
    try {
      const double v = fn();
      return std::isfinite(v) ? v : kInf;
    } catch (const std::exception&) {
      return kInf;
    }
  };
  r.energy_identity = guarded([&] { return energy_identity_terms(st, pb).residual(); });
  r.entropy_identity = guarded([&] { return entropy_identity_terms(st, pb).residual(); });
  r.kirchhoff_residual = guarded([&] { return kirchhoff_residual(st, pb); });
  return r;
}

// ---------------------------------------------------------------------------

Field effective_viscous_flux(const MixtureState& st, const ViscosityMatrices& visc, double gamma, int i) {
  if (i != 1 && i != 2) throw std::invalid_argument("species index must be 1 or 2");
  const Grid& g = st.rho[0].grid();
  const Mat2 nu = visc.nu();
  Field F(g);
  for (std::size_t c = 0; c < g.size(); ++c) F[c] = pressure(std::max(st.rho[i - 1][c], 0.0), std::exp(st.s[c]), gamma);
  for (int j = 0; j < 2; ++j) {
    if (nu[i - 1][j] == 0.0) continue;
    const Field div = divergence(st.u[j]);
    kernels::axpy(-nu[i - 1][j], div.values(), F.values());
  }
  return F;
}

double interior_l2_difference(const Field& a, const Field& b, int layers) {
  require_same_grid(a.grid(), b.grid());
  const Grid& g = a.grid();
  double sum = 0.0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const auto p = g.ijk(c);
    bool inside = true;
    for (int ax = 0; ax < g.dim; ++ax) inside = inside && p[ax] >= layers && p[ax] < g.cells[ax] - layers;
    if (!inside) continue;
    const double d = a[c] - b[c];
    sum += d * d;
  }
  return std::sqrt(sum * g.cell_volume());
}

double renormalized_integral(const MixtureState& st, int i) {
  if (i != 1 && i != 2) throw std::invalid_argument("species index must be 1 or 2");
  const Field div = divergence(st.u[i - 1]);
  Field prod(div.grid());
  for (std::size_t c = 0; c < div.size(); ++c) prod[c] = st.rho[i - 1][c] * div[c];
  return integral(prod);
}

double min_entropy_production(const MixtureState& st, const ViscosityMatrices& visc) {
  const Grid& g = st.s.grid();
  const TensorField g1 = grad_vector(st.u[0]);
  const TensorField g2 = grad_vector(st.u[1]);
  double lo = kInf;
  for (std::size_t c = 0; c < g.size(); ++c)
    lo = std::min(lo, entropy_production_density(tensor_at(g1, c, g.dim), tensor_at(g2, c, g.dim), visc, g.dim));
  return lo;
}

}  // namespace bifluid
