#include "bifluid/verification.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "bifluid/elliptic.hpp"

namespace bifluid {

namespace {

constexpr double kPi = std::numbers::pi;

std::array<Jet, 3> seed(const Vec3& x) { return {Jet::coordinate(x, 0), Jet::coordinate(x, 1), Jet::coordinate(x, 2)}; }

/// t^2 (3 - 2 t) - 1/2: zero slope at t = 0, 1 and zero mean on [0, 1].
Jet smooth_step(const Jet& t) { return t * t * (Jet(3.0) - 2.0 * t) - 0.5; }
Jet parabola(const Jet& t) { return t * (Jet(1.0) - t); }

ManufacturedCase base_case(const std::string& name, int dim, const std::string& preset) {
  ManufacturedCase mc;
  mc.name = name;
  mc.dim = dim;
  mc.params.masses = {1.0, 1.0};  // densities below have unit mean on the unit box
  for (const auto& p : viscosity_presets())
    if (p.name == preset) mc.visc = p.visc;
  mc.robin_coefficient = [](const std::array<Jet, 3>& X) { return Jet(1.0) + X[0] * X[0]; };
  return mc;
}

}  // namespace

JetState ManufacturedCase::at(const Vec3& x) const { return fields(seed(x)); }

std::vector<std::string> manufactured_case_names() { return {"trig2d", "trig3d", "poly3d"}; }

ManufacturedCase manufactured_case(const std::string& name) {
  if (name == "trig2d") {
    ManufacturedCase mc = base_case(name, 2, "weak coupling");
    mc.fields = [](const std::array<Jet, 3>& X) {
      const Jet px = kPi * X[0], py = kPi * X[1];
      JetState f;
      f.rho[0] = Jet(1.0) + 0.5 * cos(px) * cos(py);
      f.rho[1] = Jet(1.0) + 0.3 * cos(2.0 * px) * cos(py);
      f.u[0] = {0.1 * sin(px) * sin(2.0 * py), -0.05 * sin(2.0 * px) * sin(py), Jet(0.0)};
      f.u[1] = {0.05 * sin(2.0 * px) * sin(py), 0.1 * sin(px) * sin(py), Jet(0.0)};
      f.s = Jet(0.1) + 0.2 * sin(px) * cos(py);
      return f;
    };
    return mc;
  }
  if (name == "trig3d") {
    ManufacturedCase mc = base_case(name, 3, "nonsymmetric");
    mc.fields = [](const std::array<Jet, 3>& X) {
      const Jet px = kPi * X[0], py = kPi * X[1], pz = kPi * X[2];
      const Jet bubble = sin(px) * sin(py) * sin(pz);
      JetState f;
      f.rho[0] = Jet(1.0) + 0.5 * cos(px) * cos(py) * cos(pz);
      f.rho[1] = Jet(1.0) + 0.3 * cos(px) * cos(2.0 * pz);
      f.u[0] = {0.1 * bubble, 0.05 * sin(2.0 * px) * sin(py) * sin(pz), -0.1 * sin(px) * sin(py) * sin(2.0 * pz)};
      f.u[1] = {0.05 * sin(px) * sin(2.0 * py) * sin(pz), -0.1 * bubble, 0.1 * bubble};
      f.s = 0.2 * sin(px) * cos(py) * cos(pz);
      return f;
    };
    return mc;
  }
  if (name == "poly3d") {
    ManufacturedCase mc = base_case(name, 3, "strong coupling");
    mc.fields = [](const std::array<Jet, 3>& X) {
      const Jet bubble = 4.0 * parabola(X[0]) * parabola(X[1]) * parabola(X[2]);
      JetState f;
      f.rho[0] = Jet(1.0) + 2.4 * smooth_step(X[0]) * smooth_step(X[1]) * smooth_step(X[2]);
      f.rho[1] = Jet(1.0) + 0.4 * smooth_step(X[1]);
      f.u[0] = {bubble, bubble * X[0], -1.0 * bubble * X[1]};
      f.u[1] = {bubble * X[1], bubble, bubble * X[2]};
      f.s = 0.1 * (X[0] + X[1] * X[1] - X[2]);
      return f;
    };
    return mc;
  }
  throw std::invalid_argument("unknown manufactured case '" + name + "'");
}

// ---------------------------------------------------------------------------
// Exact sources through jets.

namespace {

double mean_density(const ManufacturedCase& mc, int i) {
  double vol = 1.0;
  for (int a = 0; a < mc.dim; ++a) vol *= mc.extents[a];
  return mc.params.masses[i] / vol;
}

Jet robin_b(const Jet& s, double eps, double m) {
  return 2.0 * (Jet(1.0) + exp(m * s)) * (Jet(eps) + exp(s));
}

Tensor3 grad_tensor(const std::array<Jet, 3>& u, int dim) {
  Tensor3 t{};
  for (int a = 0; a < dim; ++a)
    for (int b = 0; b < dim; ++b) t[a][b] = u[b].g[a];
  return t;
}

}  // namespace

double continuity_source(const ManufacturedCase& mc, const Vec3& x, int i) {
  const JetState f = mc.at(x);
  const Jet& r = f.rho[i - 1];
  double div_flux = 0.0;
  for (int a = 0; a < mc.dim; ++a) div_flux += (r * f.u[i - 1][a]).g[a];
  return -mc.eps * laplacian(r, mc.dim) + div_flux + mc.eps * r.v - mc.eps * mean_density(mc, i - 1);
}

Vec3 lame_image(const ManufacturedCase& mc, const Vec3& x, int i) {
  const JetState f = mc.at(x);
  Vec3 out{};
  for (int j = 0; j < 2; ++j) {
    const double bulk = mc.visc.lambda[i - 1][j] + mc.visc.mu[i - 1][j];
    const double shear = mc.visc.mu[i - 1][j];
    for (int b = 0; b < mc.dim; ++b) {
      double grad_div = 0.0;
      for (int a = 0; a < mc.dim; ++a) grad_div += f.u[j][a].H[a][b];
      out[b] += -bulk * grad_div - shear * laplacian(f.u[j][b], mc.dim);
    }
  }
  return out;
}

Vec3 momentum_source(const ManufacturedCase& mc, const Vec3& x, int i) {
  const JetState f = mc.at(x);
  const auto& prm = mc.params;
  const int r = i - 1;
  const double sign = i == 1 ? -1.0 : 1.0;
  const Jet& rho = f.rho[r];
  const auto& u = f.u[r];
  const Jet pg = pow(rho, prm.gamma);
  const Jet pt = rho * exp(f.s);
  Vec3 out = lame_image(mc, x, i);
  for (int b = 0; b < mc.dim; ++b) {
    double adv = 0.0, div_flux = 0.0;
    for (int a = 0; a < mc.dim; ++a) {
      adv += u[a].v * u[b].g[a];
      div_flux += (rho * u[a] * u[b]).g[a];
    }
    const double G = -0.5 * mc.eps * rho.v * u[b].v - 0.5 * mc.eps * mean_density(mc, r) * u[b].v -
                     0.5 * rho.v * adv - 0.5 * div_flux - pg.g[b] - pt.g[b] +
                     sign * prm.a * (f.u[0][b].v - f.u[1][b].v);
    out[b] -= G;
  }
  return out;
}

double energy_source(const ManufacturedCase& mc, const Vec3& x) {
  const JetState f = mc.at(x);
  const auto& prm = mc.params;
  const int dim = mc.dim;
  const Jet B = robin_b(f.s, mc.eps, prm.m);
  double div_flux = 0.0;
  for (int a = 0; a < dim; ++a) div_flux += (B * partial(f.s, a)).g[a];
  const Jet es = exp(f.s);
  double D = 0.0;
  for (int a = 0; a < dim; ++a) {
    const double d = f.u[0][a].v - f.u[1][a].v;
    D += prm.a * d * d;
  }
  for (int i = 0; i < 2; ++i) {
    const Jet& rho = f.rho[i];
    double div_q = 0.0, div_u = 0.0, grad_r2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      div_q += (rho * es * f.u[i][a]).g[a];
      div_u += f.u[i][a].g[a];
      grad_r2 += rho.g[a] * rho.g[a];
    }
    D += -div_q - rho.v * es.v * div_u + mc.eps * prm.gamma * std::pow(rho.v, prm.gamma - 2.0) * grad_r2;
  }
  D += entropy_production_density(grad_tensor(f.u[0], dim), grad_tensor(f.u[1], dim), mc.visc, dim);
  return -div_flux - D;
}

double boundary_source(const ManufacturedCase& mc, const Vec3& x, const Vec3& n) {
  const JetState f = mc.at(x);
  const double B = robin_b(f.s, mc.eps, mc.params.m).v;
  double flux = 0.0;
  for (int a = 0; a < mc.dim; ++a) flux += B * f.s.g[a] * n[a];
  return flux + mc.eps * f.s.v - boundary_T(f.s.v, 1.0, mc.params.m);
}

double robin_volume_data(const ManufacturedCase& mc, const Vec3& x) {
  const auto X = seed(x);
  const Jet z = mc.fields(X).s;
  const Jet b = mc.robin_coefficient(X);
  double div_flux = 0.0;
  for (int a = 0; a < mc.dim; ++a) div_flux += (b * partial(z, a)).g[a];
  return -div_flux;
}

double robin_boundary_data(const ManufacturedCase& mc, const Vec3& x, const Vec3& n) {
  const auto X = seed(x);
  const Jet z = mc.fields(X).s;
  const double b = mc.robin_coefficient(X).v;
  double flux = 0.0;
  for (int a = 0; a < mc.dim; ++a) flux += b * z.g[a] * n[a];
  return flux + mc.eps * z.v;
}

// ---------------------------------------------------------------------------
// Finite-difference guard. Works on field values only.

namespace {

using Scalar = std::function<double(const Vec3&)>;

constexpr double kStep = 1e-2;
constexpr std::array<double, 4> kD1{4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
constexpr std::array<double, 5> kD2{-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};

Vec3 shifted(Vec3 x, int a, double d) {
  x[a] += d;
  return x;
}

double d1(const Scalar& f, const Vec3& x, int a) {
  double s = 0.0;
  for (int k = 1; k <= 4; ++k) s += kD1[k - 1] * (f(shifted(x, a, k * kStep)) - f(shifted(x, a, -k * kStep)));
  return s / kStep;
}

double d2(const Scalar& f, const Vec3& x, int a) {
  double s = kD2[0] * f(x);
  for (int k = 1; k <= 4; ++k) s += kD2[k] * (f(shifted(x, a, k * kStep)) + f(shifted(x, a, -k * kStep)));
  return s / (kStep * kStep);
}

struct ValueFields {
  const ManufacturedCase& mc;
  double rho(const Vec3& x, int i) const { return mc.at(x).rho[i].v; }
  double u(const Vec3& x, int i, int a) const { return mc.at(x).u[i][a].v; }
  double s(const Vec3& x) const { return mc.at(x).s.v; }
};

double fd_continuity(const ManufacturedCase& mc, const Vec3& x, int i) {
  const ValueFields v{mc};
  const int r = i - 1;
  double lap = 0.0, div_flux = 0.0;
  for (int a = 0; a < mc.dim; ++a) {
    lap += d2([&](const Vec3& y) { return v.rho(y, r); }, x, a);
    div_flux += d1([&](const Vec3& y) { return v.rho(y, r) * v.u(y, r, a); }, x, a);
  }
  return -mc.eps * lap + div_flux + mc.eps * v.rho(x, r) - mc.eps * mean_density(mc, r);
}

Vec3 fd_momentum(const ManufacturedCase& mc, const Vec3& x, int i) {
  const ValueFields v{mc};
  const auto& prm = mc.params;
  const int r = i - 1;
  const int dim = mc.dim;
  const double sign = i == 1 ? -1.0 : 1.0;
  Vec3 out{};
  for (int b = 0; b < dim; ++b) {
    double Lu = 0.0;
    for (int j = 0; j < 2; ++j) {
      const Scalar div_u = [&, j](const Vec3& y) {
        double d = 0.0;
        for (int a = 0; a < dim; ++a) d += d1([&](const Vec3& z) { return v.u(z, j, a); }, y, a);
        return d;
      };
      double lap = 0.0;
      for (int a = 0; a < dim; ++a) lap += d2([&](const Vec3& y) { return v.u(y, j, b); }, x, a);
      Lu += -(mc.visc.lambda[r][j] + mc.visc.mu[r][j]) * d1(div_u, x, b) - mc.visc.mu[r][j] * lap;
    }
    double adv = 0.0, div_flux = 0.0;
    for (int a = 0; a < dim; ++a) {
      adv += v.u(x, r, a) * d1([&](const Vec3& y) { return v.u(y, r, b); }, x, a);
      div_flux += d1([&](const Vec3& y) { return v.rho(y, r) * v.u(y, r, a) * v.u(y, r, b); }, x, a);
    }
    const double rho = v.rho(x, r);
    const double G = -0.5 * mc.eps * rho * v.u(x, r, b) - 0.5 * mc.eps * mean_density(mc, r) * v.u(x, r, b) -
                     0.5 * rho * adv - 0.5 * div_flux -
                     d1([&](const Vec3& y) { return std::pow(v.rho(y, r), prm.gamma); }, x, b) -
                     d1([&](const Vec3& y) { return v.rho(y, r) * std::exp(v.s(y)); }, x, b) +
                     sign * prm.a * (v.u(x, 0, b) - v.u(x, 1, b));
    out[b] = Lu - G;
  }
  return out;
}

double fd_b(double s, double eps, double m) { return 2.0 * (1.0 + std::exp(m * s)) * (eps + std::exp(s)); }

double fd_energy(const ManufacturedCase& mc, const Vec3& x) {
  const ValueFields v{mc};
  const auto& prm = mc.params;
  const int dim = mc.dim;
  const Scalar s = [&](const Vec3& y) { return v.s(y); };
  double div_flux = 0.0;
  for (int a = 0; a < dim; ++a)
    div_flux += d1([&](const Vec3& y) { return fd_b(v.s(y), mc.eps, prm.m) * d1(s, y, a); }, x, a);
  double D = 0.0;
  for (int a = 0; a < dim; ++a) {
    const double d = v.u(x, 0, a) - v.u(x, 1, a);
    D += prm.a * d * d;
  }
  std::array<Tensor3, 2> grads{};
  for (int i = 0; i < 2; ++i) {
    double div_q = 0.0, div_u = 0.0, grad_r2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      div_q += d1([&](const Vec3& y) { return v.rho(y, i) * std::exp(v.s(y)) * v.u(y, i, a); }, x, a);
      const double gr = d1([&](const Vec3& y) { return v.rho(y, i); }, x, a);
      grad_r2 += gr * gr;
      for (int b = 0; b < dim; ++b) grads[i][a][b] = d1([&](const Vec3& y) { return v.u(y, i, b); }, x, a);
      div_u += grads[i][a][a];
    }
    const double rho = v.rho(x, i);
    D += -div_q - rho * std::exp(v.s(x)) * div_u + mc.eps * prm.gamma * std::pow(rho, prm.gamma - 2.0) * grad_r2;
  }
  D += entropy_production_density(grads[0], grads[1], mc.visc, dim);
  return -div_flux - D;
}

double fd_boundary(const ManufacturedCase& mc, const Vec3& x, const Vec3& n) {
  const ValueFields v{mc};
  const Scalar s = [&](const Vec3& y) { return v.s(y); };
  double flux = 0.0;
  for (int a = 0; a < mc.dim; ++a) flux += d1(s, x, a) * n[a];
  const double sv = v.s(x);
  return fd_b(sv, mc.eps, mc.params.m) * flux + mc.eps * sv - boundary_T(sv, 1.0, mc.params.m);
}

double rel(double exact, double approx) { return std::abs(exact - approx) / std::max(1.0, std::abs(exact)); }

}  // namespace

SpotCheck spot_check_sources(const ManufacturedCase& mc, int points, unsigned seed_value) {
  std::mt19937 gen(seed_value);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SpotCheck out;
  for (int p = 0; p < points; ++p) {
    Vec3 x{0.0, 0.0, 0.0};
    for (int a = 0; a < mc.dim; ++a) x[a] = mc.extents[a] * unit(gen);
    double err = 0.0;
    for (int i = 1; i <= 2; ++i) {
      err = std::max(err, rel(continuity_source(mc, x, i), fd_continuity(mc, x, i)));
      const Vec3 m = momentum_source(mc, x, i);
      const Vec3 fm = fd_momentum(mc, x, i);
      for (int a = 0; a < mc.dim; ++a) err = std::max(err, rel(m[a], fm[a]));
    }
    err = std::max(err, rel(energy_source(mc, x), fd_energy(mc, x)));

    // A boundary point on a random face.
    const int axis = static_cast<int>(unit(gen) * mc.dim) % mc.dim;
    const bool upper = unit(gen) < 0.5;
    Vec3 xb = x, n{0.0, 0.0, 0.0};
    xb[axis] = upper ? mc.extents[axis] : 0.0;
    n[axis] = upper ? 1.0 : -1.0;
    err = std::max(err, rel(boundary_source(mc, xb, n), fd_boundary(mc, xb, n)));
    out.max_relative_error = std::max(out.max_relative_error, err);
    ++out.points;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string to_string(StudyTarget t) {
  switch (t) {
    case StudyTarget::R: return "R";
    case StudyTarget::U: return "U";
    case StudyTarget::S: return "S";
    case StudyTarget::Coupled: return "coupled";
  }
  return "?";
}

namespace {

Grid case_grid(const ManufacturedCase& mc, int n) {
  const std::array<int, 3> cells{n, n, n};
  return build_grid(mc.dim, std::span<const double>(mc.extents.data(), mc.dim),
                    std::span<const int>(cells.data(), mc.dim));
}

Field sample_scalar(const Grid& g, const std::function<double(const Vec3&)>& f) {
  Field out(g);
  for (std::size_t c = 0; c < g.size(); ++c) out[c] = f(g.center(c));
  return out;
}

VectorField sample_vector(const Grid& g, const std::function<Vec3(const Vec3&)>& f) {
  VectorField out(g);
  for (std::size_t c = 0; c < g.size(); ++c) out.set(c, f(g.center(c)));
  return out;
}

double l2_diff(const Field& a, const Field& b) {
  double s = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) s += (a[c] - b[c]) * (a[c] - b[c]);
  return std::sqrt(s * a.grid().cell_volume());
}

double l2_diff(const VectorField& a, const VectorField& b) {
  double s = 0.0;
  for (int k = 0; k < a.dim(); ++k)
    for (std::size_t c = 0; c < a.size(); ++c) {
      const double d = a.comp(k)[c] - b.comp(k)[c];
      s += d * d;
    }
  return std::sqrt(s * a.grid().cell_volume());
}

struct ExactFields {
  std::array<Field, 2> rho;
  std::array<VectorField, 2> u;
  Field s;
};

ExactFields sample_exact(const ManufacturedCase& mc, const Grid& g) {
  ExactFields e;
  for (int i = 0; i < 2; ++i) {
    e.rho[i] = sample_scalar(g, [&](const Vec3& x) { return mc.at(x).rho[i].v; });
    e.u[i] = sample_vector(g, [&](const Vec3& x) {
      const JetState f = mc.at(x);
      return Vec3{f.u[i][0].v, f.u[i][1].v, f.u[i][2].v};
    });
  }
  e.s = sample_scalar(g, [&](const Vec3& x) { return mc.at(x).s.v; });
  return e;
}

LinearSolveSpec study_spec() {
  LinearSolveSpec s;
  s.rel_tol = 1e-12;
  s.max_iters = 20000;
  return s;
}

GridErrors run_target(const ManufacturedCase& mc, StudyTarget target, int n) {
  const Grid g = case_grid(mc, n);
  const ExactFields ex = sample_exact(mc, g);
  GridErrors ge;
  ge.cells = n;
  ge.h = g.h[0];
  switch (target) {
    case StudyTarget::R: {
      for (int i = 0; i < 2; ++i) {
        const Field src = sample_scalar(g, [&](const Vec3& x) { return continuity_source(mc, x, i + 1); });
        const auto sol = solve_continuity_R(ex.u[i], mc.eps, mc.params.masses[i], study_spec(), &src);
        ge.l2_error["rho" + std::to_string(i + 1)] = l2_diff(sol.r, ex.rho[i]);
      }
      break;
    }
    case StudyTarget::U: {
      const VectorField g1 = sample_vector(g, [&](const Vec3& x) { return lame_image(mc, x, 1); });
      const VectorField g2 = sample_vector(g, [&](const Vec3& x) { return lame_image(mc, x, 2); });
      const auto sol = solve_lame_U(g1, g2, mc.visc, study_spec());
      ge.l2_error["u1"] = l2_diff(sol.h1, ex.u[0]);
      ge.l2_error["u2"] = l2_diff(sol.h2, ex.u[1]);
      break;
    }
    case StudyTarget::S: {
      const Field d = sample_scalar(g, [&](const Vec3& x) { return robin_volume_data(mc, x); });
      const Field b = sample_scalar(g, [&](const Vec3& x) { return mc.robin_coefficient(seed(x)).v; });
      const auto faces = boundary_faces(g);
      BoundaryField t(faces.size());
      for (std::size_t k = 0; k < faces.size(); ++k) t[k] = robin_boundary_data(mc, faces[k].center, faces[k].normal());
      const auto sol = solve_robin_S(d, b, t, mc.eps, study_spec());
      ge.l2_error["z"] = l2_diff(sol.z, ex.s);
      break;
    }
    case StudyTarget::Coupled: {
      Problem pb(g, mc.params, mc.visc);
      pb.linear = study_spec();
      std::array<Field, 2> cont;
      std::array<VectorField, 2> mom;
      for (int i = 0; i < 2; ++i) {
        cont[i] = sample_scalar(g, [&](const Vec3& x) { return continuity_source(mc, x, i + 1); });
        mom[i] = sample_vector(g, [&](const Vec3& x) { return momentum_source(mc, x, i + 1); });
      }
      pb.sources.continuity = cont;
      pb.sources.momentum = mom;
      pb.sources.energy = sample_scalar(g, [&](const Vec3& x) { return energy_source(mc, x); });
      BoundaryField bs(pb.faces().size());
      for (std::size_t k = 0; k < bs.size(); ++k) bs[k] = boundary_source(mc, pb.faces()[k].center, pb.faces()[k].normal());
      pb.sources.boundary = bs;

      ContinuationConfig cfg;
      cfg.lambda_schedule = {0.5, 1.0};
      cfg.fp_tol = 1e-10;
      cfg.fp_max_iters = 2000;
      const MixtureState init = equilibrium_state(g, mc.params, mc.eps);
      const HomotopyResult res = solve_lambda_homotopy(pb, init, cfg, mc.eps);
      if (!res.converged) {
        std::string why = res.stages.empty() ? "no stages" : res.stages.back().failure;
        throw SolverError("coupled manufactured solve did not converge on " + std::to_string(n) + " cells: " + why, {});
      }
      for (int i = 0; i < 2; ++i) {
        ge.l2_error["rho" + std::to_string(i + 1)] = l2_diff(res.state.rho[i], ex.rho[i]);
        ge.l2_error["u" + std::to_string(i + 1)] = l2_diff(res.state.u[i], ex.u[i]);
      }
      ge.l2_error["s"] = l2_diff(res.state.s, ex.s);
      break;
    }
  }
  return ge;
}

constexpr double kExactError = 1e-12;

}  // namespace

StudyReport convergence_study(const ManufacturedCase& mc, StudyTarget target, const std::vector<int>& cells) {
  if (cells.size() < 2) throw std::invalid_argument("a convergence study needs at least two grids");
  for (std::size_t k = 1; k < cells.size(); ++k)
    if (cells[k] != 2 * cells[k - 1]) throw std::invalid_argument("study grids must double in resolution");
  StudyReport rep;
  rep.case_name = mc.name;
  rep.target = target;
  for (int n : cells) rep.grids.push_back(run_target(mc, target, n));
  for (const auto& [field, unused] : rep.grids.front().l2_error) {
    bool exact = true;
    std::vector<double> orders;
    for (std::size_t k = 0; k < rep.grids.size(); ++k) {
      const double e = rep.grids[k].l2_error.at(field);
      exact = exact && e <= kExactError;
      if (k > 0) orders.push_back(std::log2(rep.grids[k - 1].l2_error.at(field) / e));
    }
    rep.orders[field] = orders;
    rep.exact[field] = exact;
  }
  return rep;
}

namespace {

nlohmann::json report_json(const StudyReport& r) {
  nlohmann::json j;
  j["case"] = r.case_name;
  j["target"] = to_string(r.target);
  for (const auto& g : r.grids) {
    nlohmann::json gj;
    gj["cells"] = g.cells;
    gj["h"] = g.h;
    for (const auto& [f, e] : g.l2_error) gj["l2_error"][f] = e;
    j["grids"].push_back(gj);
  }
  for (const auto& [f, o] : r.orders) {
    j["orders"][f] = o;
    j["exact"][f] = r.exact.at(f);
  }
  return j;
}

}  // namespace

std::string StudyReport::to_json() const { return report_json(*this).dump(2); }

std::string VerificationSummary::to_json() const {
  nlohmann::json j;
  j["spot_checks_passed"] = spot_checks_passed;
  j["passed"] = passed;
  for (const auto& r : reports) j["studies"].push_back(report_json(r));
  for (const auto& c : checks)
    j["checks"].push_back({{"case", c.case_name},
                           {"target", c.target},
                           {"field", c.field},
                           {"order", c.order},
                           {"threshold", c.threshold},
                           {"exact", c.exact},
                           {"passed", c.passed}});
  return j.dump(2);
}

VerificationSummary run_verification_suite() {
  VerificationSummary sum;
  sum.spot_checks_passed = true;
  for (const auto& name : manufactured_case_names())
    sum.spot_checks_passed =
        sum.spot_checks_passed && spot_check_sources(manufactured_case(name)).max_relative_error <= kSpotCheckTolerance;

  struct Plan {
    std::string case_name;
    StudyTarget target;
    std::vector<std::pair<std::string, double>> fields;
  };
  const std::vector<std::pair<std::string, double>> rho{{"rho1", 0.9}, {"rho2", 0.9}};
  const std::vector<std::pair<std::string, double>> u{{"u1", 1.9}, {"u2", 1.9}};
  const std::vector<std::pair<std::string, double>> z{{"z", 1.9}};
  const std::vector<std::pair<std::string, double>> coupled{{"u1", 1.5}, {"u2", 1.5}, {"s", 1.5}};
  std::vector<Plan> plans;
  for (const auto& name : manufactured_case_names()) {
    plans.push_back({name, StudyTarget::S, z});
    plans.push_back({name, StudyTarget::U, u});
    plans.push_back({name, StudyTarget::R, rho});
    plans.push_back({name, StudyTarget::Coupled, coupled});
  }
  sum.passed = sum.spot_checks_passed;
  for (const auto& p : plans) {
    const ManufacturedCase mc = manufactured_case(p.case_name);
    const std::vector<int> cells = mc.dim == 2 ? std::vector<int>{8, 16, 32} : std::vector<int>{8, 16};
    StudyReport rep;
    try {
      rep = convergence_study(mc, p.target, cells);
    } catch (const std::exception& e) {
      for (const auto& [field, thr] : p.fields) {
        sum.checks.push_back({p.case_name, to_string(p.target), field, 0.0, thr, false, false});
      }
      sum.passed = false;
      continue;
    }
    for (const auto& [field, thr] : p.fields) {
      OrderCheck c{p.case_name, to_string(p.target), field, rep.orders.at(field).back(), thr, rep.exact.at(field), false};
      c.passed = c.exact || c.order >= thr;
      sum.passed = sum.passed && c.passed;
      sum.checks.push_back(c);
    }
    sum.reports.push_back(std::move(rep));
  }
  return sum;
}

}  // namespace bifluid
