#include "phsdcs/filters.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "phsdcs/core.hpp"
#include "phsdcs/error.hpp"

namespace phsdcs {

namespace {

constexpr double kMaxCondition = 1e12;
constexpr double kNonnegativityTol = 1e-12;
constexpr int kCircleGrid = 4096;
constexpr double kInsideTol = 1e-9;
constexpr double kClusterTol = 1e-7;
constexpr double kResidualTol = 1e-8;

void check_spec(const FilterSpec& spec) {
  if (spec.order < 1) throw DataError("filter order must be >= 1");
  if (!std::isfinite(spec.lambda_eff) || spec.lambda_eff < 0.0) {
    throw DataError("lambda_eff must be finite and nonnegative");
  }
  if (spec.lambda_eff > kLambdaMax) {
    throw DataError("lambda_eff " + std::to_string(spec.lambda_eff) + " exceeds lambda_max " +
                    std::to_string(kLambdaMax));
  }
}

// Lagrange weights for evaluating the degree 2p-1 interpolant at 0.
std::vector<double> polynomial_weights(const std::vector<double>& nodes) {
  std::vector<double> w(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    double num = 1.0;
    double den = 1.0;
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      if (j == i) continue;
      num *= -nodes[j];
      den *= nodes[i] - nodes[j];
    }
    w[i] = num / den;
  }
  return w;
}

// Exponential-polynomial weights. The space span{t^j e^{+-lambda t}} is
// spanned by the divided differences of mu -> e^{mu t} over the exponent
// multiset {lambda, -lambda, lambda, ...}; these tend to t^m / m! as
// lambda -> 0, so the system stays well conditioned for small lambda. Row 0
// of exp(t J), J bidiagonal with the exponents on the diagonal, holds them.
std::vector<double> exponential_weights(const std::vector<double>& nodes, double lambda) {
  const auto n = static_cast<Eigen::Index>(nodes.size());
  Eigen::MatrixXd jordan = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index m = 0; m < n; ++m) {
    jordan(m, m) = (m % 2 == 0) ? lambda : -lambda;
    if (m + 1 < n) jordan(m, m + 1) = 1.0;
  }
  Eigen::MatrixXd system(n, n);  // system(m, i) = g_m(x_i)
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::MatrixXd e = (nodes[static_cast<std::size_t>(i)] * jordan).exp();
    system.col(i) = e.row(0).transpose();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(system);
  const auto& sv = svd.singularValues();
  const double cond = sv(n - 1) > 0.0 ? sv(0) / sv(n - 1) : INFINITY;
  if (!(cond <= kMaxCondition)) {
    throw NumericalError("exponential interpolation system is ill-conditioned (cond " +
                         std::to_string(cond) + ")");
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  rhs(0) = 1.0;  // g_0(0) = 1, g_m(0) = 0 for m > 0
  const Eigen::VectorXd w = system.colPivHouseholderQr().solve(rhs);
  return {w.data(), w.data() + n};
}

using Poly = std::vector<double>;  // coefficients, highest degree first

Poly poly_multiply(const Poly& a, const Poly& b) {
  Poly out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

// Long division by a monic divisor; returns the quotient, remainder in `rem`.
Poly poly_divide(Poly num, const Poly& den, double* max_rem) {
  const std::size_t dn = den.size() - 1;
  if (num.size() <= dn) {
    *max_rem = 0.0;
    for (double v : num) *max_rem = std::max(*max_rem, std::abs(v));
    return {0.0};
  }
  Poly q(num.size() - dn, 0.0);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double c = num[i];
    q[i] = c;
    for (std::size_t j = 0; j <= dn; ++j) num[i + j] -= c * den[j];
  }
  *max_rem = 0.0;
  for (std::size_t i = q.size(); i < num.size(); ++i) {
    *max_rem = std::max(*max_rem, std::abs(num[i]));
  }
  return q;
}

std::complex<double> poly_eval(const Poly& p, std::complex<double> z) {
  std::complex<double> acc = 0.0;
  for (double c : p) acc = acc * z + c;
  return acc;
}

std::complex<double> poly_eval_derivative(const Poly& p, std::complex<double> z) {
  std::complex<double> acc = 0.0;
  const auto deg = static_cast<int>(p.size()) - 1;
  for (int i = 0; i < deg; ++i) acc = acc * z + p[static_cast<std::size_t>(i)] * double(deg - i);
  return acc;
}

// Companion-matrix eigenvalues, each polished by a few Newton steps.
std::vector<std::complex<double>> poly_roots(const Poly& p) {
  const auto deg = static_cast<Eigen::Index>(p.size()) - 1;
  if (deg <= 0) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(deg, deg);
  for (Eigen::Index j = 0; j < deg; ++j) {
    companion(0, j) = -p[static_cast<std::size_t>(j + 1)] / p[0];
  }
  for (Eigen::Index i = 1; i < deg; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  if (es.info() != Eigen::Success) throw NumericalError("companion eigenvalue solve failed");
  std::vector<std::complex<double>> roots(es.eigenvalues().data(),
                                          es.eigenvalues().data() + deg);
  for (auto& r : roots) {
    for (int it = 0; it < 3; ++it) {
      const auto d = poly_eval_derivative(p, r);
      if (std::abs(d) == 0.0) break;
      const auto step = poly_eval(p, r) / d;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) break;
      r -= step;
    }
  }
  return roots;
}

bool root_less(std::complex<double> a, std::complex<double> b) {
  const double ma = std::abs(a), mb = std::abs(b);
  if (ma != mb) return ma < mb;
  return std::arg(a) < std::arg(b);
}

// Chooses the roots of the factor: everything strictly inside the unit
// circle plus half of every on-circle cluster.
std::vector<std::complex<double>> select_minimum_phase(std::vector<std::complex<double>> roots) {
  std::sort(roots.begin(), roots.end(), root_less);
  std::vector<std::complex<double>> chosen;
  std::vector<std::complex<double>> on_circle;
  std::size_t outside = 0;
  for (const auto& r : roots) {
    const double m = std::abs(r);
    if (std::abs(m - 1.0) <= kClusterTol) {
      on_circle.push_back(r);
    } else if (m < 1.0 - kInsideTol) {
      chosen.push_back(r);
    } else {
      ++outside;
    }
  }
  if (outside != chosen.size()) {
    throw NumericalError("symbol roots are not in reciprocal pairs");
  }
  // Cluster on-circle roots by position; each cluster must be even.
  std::sort(on_circle.begin(), on_circle.end(), [](auto a, auto b) {
    return std::arg(a) < std::arg(b);
  });
  std::vector<bool> used(on_circle.size(), false);
  for (std::size_t i = 0; i < on_circle.size(); ++i) {
    if (used[i]) continue;
    std::vector<std::size_t> cluster{i};
    used[i] = true;
    for (std::size_t j = i + 1; j < on_circle.size(); ++j) {
      if (!used[j] && std::abs(on_circle[j] - on_circle[i]) <= std::sqrt(kClusterTol)) {
        cluster.push_back(j);
        used[j] = true;
      }
    }
    if (cluster.size() % 2 != 0) {
      throw NumericalError("odd-multiplicity root cluster on the unit circle");
    }
    std::complex<double> mean = 0.0;
    for (auto k : cluster) mean += on_circle[k];
    mean /= static_cast<double>(cluster.size());
    mean /= std::abs(mean);
    for (std::size_t k = 0; k < cluster.size() / 2; ++k) chosen.push_back(mean);
  }
  std::sort(chosen.begin(), chosen.end(), root_less);
  return chosen;
}

}  // namespace

double InterpolatorySymbol::evaluate_on_circle(double omega) const {
  double acc = tap(0);
  for (int k = 1; k <= half_width(); ++k) acc += 2.0 * tap(k) * std::cos(k * omega);
  return acc;
}

std::vector<double> InterpolatorySymbol::odd_weights() const {
  std::vector<double> w;
  for (int k = -half_width(); k <= half_width(); k += 2) w.push_back(tap(k));
  return w;
}

InterpolatorySymbol exp_dd_symbol(const FilterSpec& spec) {
  check_spec(spec);
  const int p = spec.order;
  std::vector<double> nodes;
  for (int i = 0; i < 2 * p; ++i) nodes.push_back(2.0 * i - (2.0 * p - 1.0));

  std::vector<double> w = spec.lambda_eff == 0.0 ? polynomial_weights(nodes)
                                                 : exponential_weights(nodes, spec.lambda_eff);
  // Nodes are symmetric, so the exact weights are too.
  for (std::size_t i = 0; i < w.size() / 2; ++i) {
    const double s = 0.5 * (w[i] + w[w.size() - 1 - i]);
    w[i] = w[w.size() - 1 - i] = s;
  }

  InterpolatorySymbol sym;
  sym.order = p;
  sym.lambda_eff = spec.lambda_eff;
  sym.taps.assign(static_cast<std::size_t>(4 * p - 1), 0.0);
  sym.taps[static_cast<std::size_t>(2 * p - 1)] = 1.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    sym.taps[static_cast<std::size_t>(nodes[i] + (2 * p - 1))] = w[i];
  }
  return sym;
}

std::vector<double> spectral_factorize(const InterpolatorySymbol& sym) {
  const int p = sym.order;
  const int n = sym.half_width();
  if (p < 1 || sym.taps.size() != static_cast<std::size_t>(2 * n + 1)) {
    throw DataError("malformed interpolatory symbol");
  }
  for (int j = 0; j < kCircleGrid; ++j) {
    const double v = sym.evaluate_on_circle(2.0 * std::numbers::pi * j / kCircleGrid);
    if (v < -kNonnegativityTol) {
      throw NumericalError("symbol is negative on the unit circle");
    }
  }

  // z^n a(z), highest degree first. Symmetric, so ordering is immaterial.
  const Poly full(sym.taps.rbegin(), sym.taps.rend());

  std::vector<std::complex<double>> roots;
  bool deflated = false;
  if (sym.lambda_eff) {
    // a vanishes to order p at -e^{lambda} and -e^{-lambda}.
    const Poly quad{1.0, 2.0 * std::cosh(*sym.lambda_eff), 1.0};
    Poly known{1.0};
    for (int i = 0; i < p; ++i) known = poly_multiply(known, quad);
    double rem = 0.0;
    const Poly quotient = poly_divide(full, known, &rem);
    double scale = 0.0;
    for (double c : full) scale = std::max(scale, std::abs(c));
    if (rem <= 1e-9 * scale) {
      roots = poly_roots(quotient);
      const std::complex<double> inner(-std::exp(-*sym.lambda_eff), 0.0);
      const std::complex<double> outer(-std::exp(*sym.lambda_eff), 0.0);
      for (int i = 0; i < p; ++i) {
        roots.push_back(inner);
        roots.push_back(outer);
      }
      deflated = true;
    }
  }
  if (!deflated) roots = poly_roots(full);

  const auto chosen = select_minimum_phase(std::move(roots));
  if (chosen.size() != static_cast<std::size_t>(n)) {
    throw NumericalError("root assignment produced the wrong filter length");
  }

  std::vector<std::complex<double>> coef{1.0};
  for (const auto& r : chosen) {
    std::vector<std::complex<double>> next(coef.size() + 1, 0.0);
    for (std::size_t i = 0; i < coef.size(); ++i) {
      next[i] += coef[i];
      next[i + 1] -= coef[i] * r;
    }
    coef = std::move(next);
  }
  std::vector<double> h(coef.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < coef.size(); ++i) {
    h[i] = coef[i].real();
    sum += h[i];
  }
  double a_at_one = 0.0;
  for (double t : sym.taps) a_at_one += t;
  if (!(a_at_one > 0.0) || sum == 0.0) throw NumericalError("degenerate symbol at z = 1");
  const double s = std::sqrt(a_at_one) / sum;
  for (auto& v : h) v *= s;

  for (int m = -n; m <= n; ++m) {
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
      const int j = k + m;
      if (j >= 0 && j <= n) acc += h[static_cast<std::size_t>(k)] * h[static_cast<std::size_t>(j)];
    }
    if (std::abs(acc - sym.tap(m)) > kResidualTol) {
      throw NumericalError("spectral factorization residual too large");
    }
  }
  return h;
}

std::vector<double> highpass_from_lowpass(std::span<const double> h) {
  if (h.size() % 2 != 0) throw DataError("low-pass filter must have even length");
  const std::size_t n = h.size();
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = (k % 2 == 0 ? 1.0 : -1.0) * h[n - 1 - k];
  return g;
}

FilterPair make_filter_pair(const FilterSpec& spec) {
  const auto sym = exp_dd_symbol(spec);
  FilterPair pair;
  pair.spec = spec;
  pair.lowpass = spectral_factorize(sym);
  pair.highpass = highpass_from_lowpass(pair.lowpass);
  const int n = sym.half_width();
  for (int m = -n; m <= n; ++m) {
    double acc = 0.0;
    for (int k = 0; k <= n; ++k) {
      const int j = k + m;
      if (j >= 0 && j <= n) {
        acc += pair.lowpass[static_cast<std::size_t>(k)] * pair.lowpass[static_cast<std::size_t>(j)];
      }
    }
    pair.factorization_residual = std::max(pair.factorization_residual, std::abs(acc - sym.tap(m)));
  }
  return pair;
}

double refine_midpoint(const InterpolatorySymbol& sym, std::span<const double> coarse,
                       std::size_t k) {
  const auto p = static_cast<std::ptrdiff_t>(sym.order);
  const auto kk = static_cast<std::ptrdiff_t>(k);
  if (kk - p + 1 < 0 || kk + p >= static_cast<std::ptrdiff_t>(coarse.size())) {
    throw DataError("refinement stencil leaves the coarse sequence");
  }
  double acc = 0.0;
  for (std::ptrdiff_t m = kk - p + 1; m <= kk + p; ++m) {
    acc += sym.tap(static_cast<int>(2 * kk + 1 - 2 * m)) * coarse[static_cast<std::size_t>(m)];
  }
  return acc;
}

FilterBank::FilterBank(std::size_t n_y, std::size_t n_t, int order, int levels, double y_scale)
    : n_y_(n_y), n_t_(n_t), order_(order), levels_(levels), y_scale_(y_scale) {
  if (n_y < 1) throw DataError("filter bank needs at least one frequency column");
  const int max_levels = log2_exact(n_t);
  if (levels < 0 || levels > max_levels) {
    throw DataError("levels must lie in [0, log2(n_t)]");
  }
  if (!(y_scale > 0.0) || !std::isfinite(y_scale)) throw DataError("y_scale must be positive");
  if (order < 1) throw DataError("filter order must be >= 1");

  table_.resize(n_y / 2 + 1);
  for (std::size_t xi = 0; xi < table_.size(); ++xi) {
    const double lam = lambda(xi);
    for (int step = 1; step <= levels; ++step) {
      const double requested = lam * std::ldexp(1.0, step - 1);
      FilterSpec spec{order, std::min(requested, kLambdaMax)};
      if (requested > kLambdaMax) ++clamped_count_;
      auto it = cache_.find(spec);
      if (it == cache_.end()) {
        it = cache_.emplace(spec, std::make_shared<const FilterPair>(make_filter_pair(spec))).first;
      }
      table_[xi].push_back(it->second);
    }
  }
}

double FilterBank::lambda(std::size_t xi) const {
  const std::size_t x = std::min(xi % n_y_, n_y_ - xi % n_y_);
  return y_scale_ * 2.0 * std::numbers::pi * static_cast<double>(x) / static_cast<double>(n_y_);
}

const FilterPair& FilterBank::pair(std::size_t xi, int step) const {
  if (xi >= n_y_ || step < 1 || step > levels_) throw DataError("filter bank index out of range");
  const std::size_t x = std::min(xi, n_y_ - xi);
  return *table_[x][static_cast<std::size_t>(step - 1)];
}

std::vector<const FilterPair*> FilterBank::column_pairs(std::size_t xi) const {
  std::vector<const FilterPair*> out;
  for (int step = 1; step <= levels_; ++step) out.push_back(&pair(xi, step));
  return out;
}

std::string FilterBank::dump() const {
  std::ostringstream os;
  char buf[64];
  for (std::size_t xi = 0; xi < table_.size(); ++xi) {
    for (int step = 1; step <= levels_; ++step) {
      const auto& h = table_[xi][static_cast<std::size_t>(step - 1)]->lowpass;
      for (std::size_t k = 0; k < h.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%zu %d %zu %.17g\n", xi, step, k, h[k]);
        os << buf;
      }
    }
  }
  return os.str();
}

}  // namespace phsdcs
