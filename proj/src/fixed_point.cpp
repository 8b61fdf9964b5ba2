#include "bifluid/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bifluid/kernels.hpp"
#include "bifluid/lame.hpp"

namespace bifluid {

namespace {

constexpr double kMaxExponent = 709.0;

double checked_exp(double x) {
  if (x > kMaxExponent) {
    std::ostringstream os;
    os << "exponential overflow (argument " << x << ")";
    throw DivergenceError(os.str());
  }
  return std::exp(x);
}

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw DivergenceError(std::string("non-finite value in ") + what);
}

}  // namespace

MixtureState equilibrium_state(const Grid& g, const MixtureParams& params, double eps, double lam) {
  MixtureState st;
  for (int i = 0; i < 2; ++i) {
    st.rho[i] = Field(g, params.masses[i] / g.volume());
    st.u[i] = VectorField(g);
  }
  st.s = Field(g, 0.0);
  st.eps = eps;
  st.lam = lam;
  return st;
}

Problem::Problem(const Grid& g, MixtureParams params, ViscosityMatrices visc)
    : grid_(g), params_(std::move(params)), visc_(visc), faces_(boundary_faces(g)) {
  for (int i = 0; i < 2; ++i) {
    forcing_[i] = VectorField(g);
    for (std::size_t c = 0; c < g.size(); ++c) forcing_[i].set(c, params_.forcing[i](g.center(c)));
  }
  theta_hat_.resize(faces_.size());
  for (std::size_t k = 0; k < faces_.size(); ++k) {
    theta_hat_[k] = params_.theta_hat(faces_[k].center);
    if (!(theta_hat_[k] > 0.0)) throw std::invalid_argument("boundary temperature must be positive");
  }
}

// ---------------------------------------------------------------------------

VectorField assemble_G(int i, const Problem& pb, const MixtureState& st) {
  const Grid& g = pb.grid();
  const int dim = g.dim;
  const auto& prm = pb.params();
  const double eps = st.eps;
  const double mean = prm.masses[i - 1] / g.volume();
  const Field& r = st.rho[i - 1];
  const VectorField& w = st.u[i - 1];
  const VectorField& f = pb.forcing(i);
  const double sign = i == 1 ? -1.0 : 1.0;

  const TensorField gw = grad_vector(w);
  TensorField flux(g);
  Field pr(g), pt(g);
  for (std::size_t c = 0; c < g.size(); ++c) {
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) flux.comp(a, b)[c] = r[c] * w.comp(a)[c] * w.comp(b)[c];
    pr[c] = std::pow(r[c], prm.gamma);
    pt[c] = r[c] * checked_exp(st.s[c]);
  }
  const VectorField div_flux = tensor_divergence(flux);
  const VectorField grad_pr = gradient(pr);
  const VectorField grad_pt = gradient(pt);

  VectorField out(g);
  for (int b = 0; b < dim; ++b) {
    auto& o = out.comp(b);
    const auto& wb = w.comp(b);
    const auto& w1 = st.u[0].comp(b);
    const auto& w2 = st.u[1].comp(b);
    for (std::size_t c = 0; c < g.size(); ++c) {
      double adv = 0.0;
      for (int a = 0; a < dim; ++a) adv += w.comp(a)[c] * gw.comp(a, b)[c];
      o[c] = -0.5 * eps * r[c] * wb[c] - 0.5 * eps * mean * wb[c] - 0.5 * r[c] * adv - 0.5 * div_flux.comp(b)[c] -
             grad_pr.comp(b)[c] - grad_pt.comp(b)[c] + sign * prm.a * (w1[c] - w2[c]) + r[c] * f.comp(b)[c];
    }
  }
  if (pb.sources.momentum)
    for (int b = 0; b < dim; ++b) kernels::axpy(1.0, (*pb.sources.momentum)[i - 1].comp(b), out.comp(b));
  return out;
}

Field assemble_D(const Problem& pb, const MixtureState& st) {
  const Grid& g = pb.grid();
  const int dim = g.dim;
  const auto& prm = pb.params();
  Field out(g);
  Field ey(g);
  for (std::size_t c = 0; c < g.size(); ++c) ey[c] = checked_exp(st.s[c]);

  std::array<TensorField, 2> gw;
  for (int i = 0; i < 2; ++i) {
    const Field& r = st.rho[i];
    const VectorField& w = st.u[i];
    VectorField q(g);
    for (int a = 0; a < dim; ++a)
      for (std::size_t c = 0; c < g.size(); ++c) q.comp(a)[c] = r[c] * ey[c] * w.comp(a)[c];
    const Field div_q = divergence(q);
    const Field div_w = divergence(w);
    const VectorField grad_r = gradient(r);
    for (std::size_t c = 0; c < g.size(); ++c) {
      double gr2 = 0.0;
      for (int a = 0; a < dim; ++a) gr2 += grad_r.comp(a)[c] * grad_r.comp(a)[c];
      const double dissip = r[c] > 0.0 ? st.eps * prm.gamma * std::pow(r[c], prm.gamma - 2.0) * gr2 : 0.0;
      out[c] += -div_q[c] - r[c] * ey[c] * div_w[c] + dissip;
    }
    gw[i] = grad_vector(w);
  }
  for (std::size_t c = 0; c < g.size(); ++c) {
    Tensor3 t1{}, t2{};
    double rel = 0.0;
    for (int a = 0; a < dim; ++a) {
      for (int b = 0; b < dim; ++b) {
        t1[a][b] = gw[0].comp(a, b)[c];
        t2[a][b] = gw[1].comp(a, b)[c];
      }
      const double d = st.u[0].comp(a)[c] - st.u[1].comp(a)[c];
      rel += d * d;
    }
    out[c] += prm.a * rel + entropy_production_density(t1, t2, pb.visc(), dim);
  }
  if (pb.sources.energy) kernels::axpy(1.0, pb.sources.energy->values(), out.values());
  return out;
}

Field assemble_B(const Field& y, double eps, double m) {
  Field b(y.grid());
  for (std::size_t c = 0; c < y.size(); ++c) b[c] = 2.0 * (1.0 + checked_exp(m * y[c])) * (eps + checked_exp(y[c]));
  return b;
}

double boundary_T(double y, double theta_hat, double m) {
  return -(1.0 + checked_exp((m - 1.0) * y)) * (checked_exp(y) - theta_hat);
}

double boundary_T_derivative(double y, double theta_hat, double m) {
  const double e = checked_exp(y);
  const double em = checked_exp((m - 1.0) * y);
  return -((m - 1.0) * em * (e - theta_hat) + (1.0 + em) * e);
}

BoundaryField assemble_T(const BoundaryField& y_trace, const BoundaryField& theta_hat, double m) {
  BoundaryField t(y_trace.size());
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = boundary_T(y_trace[k], theta_hat[k], m);
  return t;
}

namespace {

/// Root of kap (y - yc) + eps y - lam (T(y) + src) on the real line. The
/// function tends to -inf / +inf at -inf / +inf; bracket, then Newton with
/// bisection fallback.
double trace_root(double yc, double kap, double eps, double lam, double theta_hat, double m, double src) {
  const double cap = kMaxExponent / std::max(m, 1.0) - 1.0;
  auto f = [&](double y) {
    if (y > cap) return std::numeric_limits<double>::infinity();
    return kap * (y - yc) + eps * y - lam * (boundary_T(y, theta_hat, m) + src);
  };
  auto df = [&](double y) { return kap + eps - lam * boundary_T_derivative(y, theta_hat, m); };
  double lo = std::min(yc, cap), hi = std::min(yc, cap);
  double step = 0.25;
  while (f(lo) > 0.0) {
    lo -= step;
    step *= 2.0;
    if (step > 1e8) throw DivergenceError("boundary trace bracket failed");
  }
  step = 0.25;
  while (f(hi) < 0.0) {
    hi = std::min(hi + step, cap + 1.0);
    step *= 2.0;
    if (hi > cap) break;
  }
  double y = std::clamp(yc, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double fy = f(y);
    if (fy == 0.0) return y;
    if (fy < 0.0) lo = y;
    else hi = y;
    const double d = df(y);
    double next = y - fy / d;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::abs(next - y) <= 1e-15 * (1.0 + std::abs(y))) return next;
    y = next;
  }
  return y;
}

}  // namespace

BoundaryField entropy_trace(const Problem& pb, const Field& s, double eps, double lam) {
  const Grid& g = pb.grid();
  const double m = pb.params().m;
  const auto& faces = pb.faces();
  BoundaryField y(faces.size());
  for (std::size_t k = 0; k < faces.size(); ++k) {
    const auto& f = faces[k];
    const double yc = s[f.cell];
    const double b = 2.0 * (1.0 + checked_exp(m * yc)) * (eps + checked_exp(yc));
    const double kap = 2.0 * b / g.h[f.axis];
    const double src = pb.sources.boundary ? (*pb.sources.boundary)[k] : 0.0;
    y[k] = trace_root(yc, kap, eps, lam, pb.theta_hat()[k], m, src);
  }
  return y;
}

std::array<Field, 2> solve_densities(const Problem& pb, const std::array<VectorField, 2>& u, double eps,
                                     const std::array<Field, 2>* initial) {
  std::array<Field, 2> rho;
  for (int i = 0; i < 2; ++i) {
    const Field* src = pb.sources.continuity ? &(*pb.sources.continuity)[i] : nullptr;
    const Field* init = initial && (*initial)[i].size() == pb.grid().size() ? &(*initial)[i] : nullptr;
    rho[i] = solve_continuity_R(u[i], eps, pb.params().masses[i], pb.linear, src, init).r;
  }
  return rho;
}

PsiResult apply_Psi(const Problem& pb, const MixtureState& state) {
  PsiResult res;
  MixtureState ctx = state;
  for (int i = 0; i < 2; ++i) {
    const Field* src = pb.sources.continuity ? &(*pb.sources.continuity)[i] : nullptr;
    auto sol = solve_continuity_R(state.u[i], state.eps, pb.params().masses[i], pb.linear, src);
    res.stats[i] = sol.stats;
    ctx.rho[i] = std::move(sol.r);
  }
  const VectorField g1 = assemble_G(1, pb, ctx);
  const VectorField g2 = assemble_G(2, pb, ctx);
  auto lame = solve_lame_U(g1, g2, pb.visc(), pb.linear);
  res.stats[2] = lame.stats;
  res.h = {std::move(lame.h1), std::move(lame.h2)};

  const Field d = assemble_D(pb, ctx);
  const Field b = assemble_B(state.s, state.eps, pb.params().m);
  const BoundaryField trace = entropy_trace(pb, state.s, state.eps, state.lam);
  BoundaryField t = assemble_T(trace, pb.theta_hat(), pb.params().m);
  if (pb.sources.boundary) kernels::axpy(1.0, *pb.sources.boundary, t);
  auto rob = solve_robin_S(d, b, t, state.eps, pb.linear);
  res.stats[3] = rob.stats;
  res.z = std::move(rob.z);
  res.rho = std::move(ctx.rho);
  return res;
}

// ---------------------------------------------------------------------------

std::vector<std::string> ContinuationConfig::violations() const {
  std::vector<std::string> v;
  if (lambda_schedule.empty()) v.push_back("lambda schedule is empty");
  for (std::size_t k = 0; k < lambda_schedule.size(); ++k) {
    if (!(lambda_schedule[k] > 0.0 && lambda_schedule[k] <= 1.0)) v.push_back("lambda values must lie in (0, 1]");
    if (k > 0 && !(lambda_schedule[k] > lambda_schedule[k - 1])) v.push_back("lambda schedule must increase");
  }
  if (!lambda_schedule.empty() && lambda_schedule.back() != 1.0) v.push_back("lambda schedule must end at 1");
  if (eps_schedule.empty()) v.push_back("eps schedule is empty");
  for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
    if (!(eps_schedule[k] > 0.0 && eps_schedule[k] <= 1.0)) v.push_back("eps values must lie in (0, 1]");
    if (k > 0 && !(eps_schedule[k] < eps_schedule[k - 1])) v.push_back("eps schedule must decrease");
  }
  if (!(damping > 0.0 && damping <= 1.0)) v.push_back("damping must lie in (0, 1]");
  if (!(fp_tol > 0.0 && fp_tol < 1.0)) v.push_back("fp_tol must lie in (0, 1)");
  if (fp_max_iters < 1) v.push_back("fp_max_iters must be at least 1");
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

double fixed_point_norm(const std::array<VectorField, 2>& u, const Field& s) {
  const double a = w12_norm(u[0]);
  const double b = w12_norm(u[1]);
  const double l2 = lp_norm(s, 2.0);
  const double h1 = h1_seminorm(s, Ghost::NeumannZero);
  return std::sqrt(a * a + b * b + l2 * l2 + h1 * h1);
}

namespace {

struct MapOutput {
  std::array<VectorField, 2> u;
  Field s;
  std::array<Field, 2> rho;
};

/// lam Psi(x) evaluated with warm starts.
MapOutput plain_map(const Problem& pb, const MixtureState& x) {
  PsiResult r = apply_Psi(pb, x);
  MapOutput out{std::move(r.h), std::move(r.z), std::move(r.rho)};
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < pb.grid().dim; ++a)
      for (double& v : out.u[i].comp(a)) v *= x.lam;
  for (double& v : out.s.values()) v *= x.lam;
  return out;
}

/// Same fixed points as lam Psi, with two feedback loops damped:
///  - velocity: grad-div augmentation kappa (h - w) on both sides, which
///    absorbs the pressure response to compression through R;
///  - temperature: the boundary term linearized at the current trace.
MapOutput stabilized_map(const Problem& pb, const MixtureState& x) {
  const Grid& g = pb.grid();
  const auto& prm = pb.params();
  const double lam = x.lam, eps = x.eps;
  MapOutput out;
  out.rho = solve_densities(pb, x.u, eps, &x.rho);
  MixtureState ctx = x;
  ctx.rho = out.rho;

  double theta_mean = 0.0;
  for (double v : x.s.values()) theta_mean += checked_exp(v);
  theta_mean /= static_cast<double>(g.size());
  double lmax = 0.0;
  for (int a = 0; a < g.dim; ++a) lmax = std::max(lmax, g.extents[a]);
  const double lowest_mode = 1.0 + std::numbers::pi * std::numbers::pi / (lmax * lmax);

  std::array<VectorField, 2> rhs;
  std::array<double, 2> kappa{};
  for (int i = 0; i < 2; ++i) {
    const double rbar = prm.masses[i] / g.volume();
    const double c2 = prm.gamma * std::pow(rbar, prm.gamma - 1.0) + theta_mean;
    kappa[i] = lam * rbar * c2 / (2.0 * eps * lowest_mode);
    rhs[i] = assemble_G(i + 1, pb, ctx);
    const VectorField gd = apply_grad_div(x.u[i]);
    for (int a = 0; a < g.dim; ++a) {
      auto& r = rhs[i].comp(a);
      for (std::size_t c = 0; c < g.size(); ++c) r[c] = lam * r[c] + kappa[i] * gd.comp(a)[c];
    }
  }
  LameSolution warm{x.u[0], x.u[1], {}};
  auto lame = solve_lame_U(rhs[0], rhs[1], pb.visc(), pb.linear, kappa, &warm);
  out.u = {std::move(lame.h1), std::move(lame.h2)};

  Field d = assemble_D(pb, ctx);
  for (double& v : d.values()) v *= lam;
  const Field b = assemble_B(x.s, eps, prm.m);
  const BoundaryField y = entropy_trace(pb, x.s, eps, lam);
  BoundaryField alpha(y.size()), t(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double th = pb.theta_hat()[k];
    const double beta = std::max(0.0, -boundary_T_derivative(y[k], th, prm.m));
    const double src = pb.sources.boundary ? (*pb.sources.boundary)[k] : 0.0;
    alpha[k] = eps + lam * beta;
    t[k] = lam * (boundary_T(y[k], th, prm.m) + beta * y[k] + src);
  }
  out.s = solve_robin_S(d, b, t, alpha, pb.linear, &x.s).z;
  return out;
}

}  // namespace

double fixed_point_step(const Problem& pb, MixtureState& x, const ContinuationConfig& cfg) {
  MapOutput target = cfg.stabilize ? stabilized_map(pb, x) : plain_map(pb, x);
  const double w = cfg.damping;
  std::array<VectorField, 2> du{VectorField(pb.grid()), VectorField(pb.grid())};
  Field ds(pb.grid());
  for (int i = 0; i < 2; ++i)
    for (int a = 0; a < pb.grid().dim; ++a) {
      auto& u = x.u[i].comp(a);
      const auto& t = target.u[i].comp(a);
      for (std::size_t c = 0; c < u.size(); ++c) {
        du[i].comp(a)[c] = w * (t[c] - u[c]);
        u[c] += du[i].comp(a)[c];
      }
      require_finite(u, "velocity iterate");
    }
  for (std::size_t c = 0; c < x.s.size(); ++c) {
    ds[c] = w * (target.s[c] - x.s[c]);
    x.s[c] += ds[c];
  }
  require_finite(x.s.values(), "entropy iterate");
  x.rho = std::move(target.rho);
  return fixed_point_norm(du, ds) / std::max(fixed_point_norm(x.u, x.s), 1.0);
}

HomotopyResult solve_lambda_homotopy(const Problem& pb, const MixtureState& init, const ContinuationConfig& cfg,
                                     double eps) {
  const auto bad = cfg.violations();
  if (!bad.empty()) throw std::invalid_argument("invalid continuation config: " + bad.front());
  if (!(pb.visc().c0() > 0.0)) throw std::invalid_argument("viscosity matrices are not coercive (c0 <= 0)");

  HomotopyResult res;
  res.state = init;
  res.state.eps = eps;
  res.converged = true;
  for (double lam : cfg.lambda_schedule) {
    LambdaStage stage;
    stage.lam = lam;
    MixtureState x = res.state;
    x.lam = lam;
    try {
      for (int it = 1; it <= cfg.fp_max_iters; ++it) {
        stage.last_update = fixed_point_step(pb, x, cfg);
        stage.iterations = it;
        if (stage.last_update < cfg.fp_tol) {
          stage.converged = true;
          break;
        }
      }
      x.rho = solve_densities(pb, x.u, eps, &x.rho);
      res.state = std::move(x);
    } catch (const DivergenceError& e) {
      stage.failure = e.what();
    } catch (const SolverError& e) {
      stage.failure = e.what();
    }
    res.stages.push_back(stage);
    if (!stage.converged) {
      res.converged = false;
      if (!stage.failure.empty()) break;
    }
  }
  return res;
}

}  // namespace bifluid
