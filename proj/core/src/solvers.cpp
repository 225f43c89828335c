#include "phsdcs/solvers.hpp"

#include <cmath>

#include "phsdcs/error.hpp"
#include "phsdcs/random.hpp"

namespace phsdcs {

namespace {

constexpr double kOrthonormalityTol = 1e-8;

double norm2(std::span<const cplx> v) {
  double acc = 0.0;
  for (const auto& z : v) acc += std::norm(z);
  return std::sqrt(acc);
}

double norm1(std::span<const cplx> v) {
  double acc = 0.0;
  for (const auto& z : v) acc += std::abs(z);
  return acc;
}

double distance(std::span<const cplx> a, std::span<const cplx> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::norm(a[i] - b[i]);
  return std::sqrt(acc);
}

std::vector<cplx> random_vector(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<cplx> v(n);
  for (auto& z : v) z = {rng.normal(), rng.normal()};
  return v;
}

void check_sizes(const LinearOperator& op, std::span<const cplx> y) {
  if (y.size() != op.rows()) {
    throw DataError("solver: " + std::to_string(y.size()) + " measurements for an operator with " +
                    std::to_string(op.rows()) + " rows");
  }
}

}  // namespace

std::string to_string(SolverMethod m) { return m == SolverMethod::bp ? "bp" : "lasso"; }

SolverMethod parse_solver_method(const std::string& s) {
  if (s == "bp") return SolverMethod::bp;
  if (s == "lasso") return SolverMethod::lasso;
  throw DataError("unknown solver '" + s + "'");
}

void SolverConfig::validate() const {
  if (iterations < 1) throw DataError("iterations must be >= 1");
  if (!(mu > 0.0)) throw DataError("mu must be positive");
  if (!(gamma > 0.0)) throw DataError("gamma must be positive");
  if (!(tol >= 0.0)) throw DataError("tol must be nonnegative");
  if (power_iterations < 1) throw DataError("power iterations must be >= 1");
  if (step_override && !(*step_override > 0.0)) throw DataError("step must be positive");
}

cplx soft_threshold(cplx z, double tau) {
  const double m = std::abs(z);
  if (m <= tau) return {0.0, 0.0};
  return z * ((m - tau) / m);
}

double operator_norm(const LinearOperator& op, int iters, std::uint64_t seed,
                     std::vector<double>* trace) {
  if (iters < 1) throw DataError("operator_norm: iterations must be >= 1");
  auto v = random_vector(op.cols(), seed);
  double nv = norm2(v);
  if (nv == 0.0) return 0.0;
  for (auto& z : v) z /= nv;
  double estimate = 0.0;
  std::vector<cplx> u(op.rows());
  for (int i = 0; i < iters; ++i) {
    op.apply(v, u);
    estimate = norm2(u);
    if (trace) trace->push_back(estimate);
    op.apply_adjoint(u, v);
    nv = norm2(v);
    if (nv == 0.0) break;
    for (auto& z : v) z /= nv;
  }
  return estimate;
}

double row_orthonormality_defect(const LinearOperator& op, std::uint64_t seed) {
  const auto v = random_vector(op.rows(), seed);
  const auto back = op(op.adjoint(v));
  return distance(back, v) / norm2(v);
}

SolveResult lasso_fista(const LinearOperator& op, std::span<const cplx> y,
                        const SolverConfig& cfg) {
  cfg.validate();
  check_sizes(op, y);
  const std::size_t n = op.cols();
  const std::size_t m = op.rows();

  SolveResult res;
  double step = 0.0;
  if (cfg.step_override) {
    step = *cfg.step_override;
    res.operator_norm = 1.0 / std::sqrt(step);
  } else {
    res.operator_norm = operator_norm(op, cfg.power_iterations, cfg.seed);
    if (!(res.operator_norm > 0.0)) throw NumericalError("lasso: operator norm is zero");
    step = 1.0 / (res.operator_norm * res.operator_norm);
  }

  std::vector<cplx> beta(n), beta_prev(n), w(n), grad(n), trial(n);
  std::vector<cplx> a_beta(m), a_beta_prev(m), a_w(m), r(m);
  double t = 1.0;
  for (int k = 0; k < cfg.iterations; ++k) {
    for (std::size_t i = 0; i < m; ++i) r[i] = a_w[i] - y[i];
    op.apply_adjoint(r, grad);
    for (std::size_t i = 0; i < n; ++i) {
      beta[i] = soft_threshold(w[i] - step * grad[i], step * cfg.mu);
    }
    op.apply(beta, a_beta);
    for (std::size_t i = 0; i < m; ++i) r[i] = a_beta[i] - y[i];
    const double resid = norm2(r);
    const double objective = 0.5 * resid * resid + cfg.mu * norm1(beta);
    if (!std::isfinite(objective)) {
      throw NumericalError("lasso diverged at iteration " + std::to_string(k + 1) +
                           " (check the step size)");
    }
    res.objective_trace.push_back(objective);
    res.residual_trace.push_back(resid);
    res.iterations_run = k + 1;

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double c = (t - 1.0) / t_next;
    for (std::size_t i = 0; i < n; ++i) w[i] = beta[i] + c * (beta[i] - beta_prev[i]);
    for (std::size_t i = 0; i < m; ++i) a_w[i] = a_beta[i] + c * (a_beta[i] - a_beta_prev[i]);
    t = t_next;

    const bool converged = cfg.tol > 0.0 && distance(beta, beta_prev) <= cfg.tol * norm2(beta);
    std::swap(beta, beta_prev);
    std::swap(a_beta, a_beta_prev);
    if (converged) break;
  }
  // After the final swap the latest iterate lives in beta_prev.
  res.beta = std::move(beta_prev);
  res.residual = res.residual_trace.back();
  res.kkt_residual = kkt_residual(op, y, res.beta, cfg.mu);
  return res;
}

SolveResult bp_douglas_rachford(const LinearOperator& op, std::span<const cplx> y,
                                const SolverConfig& cfg) {
  cfg.validate();
  check_sizes(op, y);
  const double defect = row_orthonormality_defect(op, cfg.seed);
  if (!(defect <= kOrthonormalityTol)) {
    throw NumericalError("basis pursuit needs A A^H = I; probe defect " + std::to_string(defect));
  }
  const std::size_t n = op.cols();
  const std::size_t m = op.rows();

  SolveResult res;
  res.operator_norm = 1.0;
  // z starts at A^H y, so A z = A A^H y = y. A z is then carried along using
  // A P(v) = y, valid because A A^H = I.
  std::vector<cplx> z = op.adjoint(y);
  std::vector<cplx> a_z(y.begin(), y.end());
  std::vector<cplx> x(n), x_prev(n), a_x(m), r(m), corr(n);
  for (int k = 0; k < cfg.iterations; ++k) {
    for (std::size_t i = 0; i < n; ++i) x[i] = soft_threshold(z[i], cfg.gamma);
    op.apply(x, a_x);
    // P(2x - z) = (2x - z) + A^H (y - (2 A x - A z))
    for (std::size_t i = 0; i < m; ++i) r[i] = y[i] - (2.0 * a_x[i] - a_z[i]);
    op.apply_adjoint(r, corr);
    for (std::size_t i = 0; i < n; ++i) z[i] = z[i] + (2.0 * x[i] - z[i] + corr[i]) - x[i];
    for (std::size_t i = 0; i < m; ++i) a_z[i] = a_z[i] + y[i] - a_x[i];

    double resid = 0.0;
    for (std::size_t i = 0; i < m; ++i) resid += std::norm(a_x[i] - y[i]);
    resid = std::sqrt(resid);
    const double objective = norm1(x);
    if (!std::isfinite(objective) || !std::isfinite(resid)) {
      throw NumericalError("basis pursuit diverged at iteration " + std::to_string(k + 1));
    }
    res.objective_trace.push_back(objective);
    res.residual_trace.push_back(resid);
    res.iterations_run = k + 1;
    const bool converged = cfg.tol > 0.0 && k > 0 && distance(x, x_prev) <= cfg.tol * norm2(x);
    x_prev = x;
    if (converged) break;
  }
  for (std::size_t i = 0; i < n; ++i) x[i] = soft_threshold(z[i], cfg.gamma);
  op.apply(x, a_x);
  for (std::size_t i = 0; i < m; ++i) r[i] = y[i] - a_x[i];
  op.apply_adjoint(r, corr);
  res.beta.resize(n);
  for (std::size_t i = 0; i < n; ++i) res.beta[i] = x[i] + corr[i];
  const auto a_beta = op(res.beta);
  for (std::size_t i = 0; i < m; ++i) r[i] = a_beta[i] - y[i];
  res.residual = norm2(r);
  return res;
}

SolveResult solve(const LinearOperator& op, std::span<const cplx> y, const SolverConfig& cfg) {
  return cfg.method == SolverMethod::bp ? bp_douglas_rachford(op, y, cfg)
                                        : lasso_fista(op, y, cfg);
}

double kkt_residual(const LinearOperator& op, std::span<const cplx> y,
                    std::span<const cplx> beta, double mu) {
  check_sizes(op, y);
  if (beta.size() != op.cols()) throw DataError("kkt_residual: coefficient size mismatch");
  auto r = op(beta);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= y[i];
  const auto g = op.adjoint(r);
  double worst = 0.0;
  for (std::size_t i = 0; i < beta.size(); ++i) {
    const double mb = std::abs(beta[i]);
    const double v = mb == 0.0 ? std::max(std::abs(g[i]) - mu, 0.0)
                               : std::abs(g[i] + mu * beta[i] / mb);
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace phsdcs
