#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phsdcs/core.hpp"
#include "phsdcs/linear_operator.hpp"

namespace phsdcs {

enum class SolverMethod { bp, lasso };

std::string to_string(SolverMethod m);
SolverMethod parse_solver_method(const std::string& s);

struct SolverConfig {
  SolverMethod method = SolverMethod::lasso;
  double mu = 1.0;       // Lasso penalty
  double gamma = 100.0;  // Douglas-Rachford prox scale
  int iterations = 10;
  std::optional<double> step_override;  // Lasso step; default 1 / ||A||^2
  double tol = 0.0;                     // stop when ||b_k - b_{k-1}|| <= tol ||b_k||
  int power_iterations = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SolveResult {
  std::vector<cplx> beta;
  int iterations_run = 0;
  std::vector<double> objective_trace;
  std::vector<double> residual_trace;  // ||A b_k - y|| per iteration
  double residual = 0.0;               // final ||A beta - y||
  std::optional<double> kkt_residual;  // Lasso only
  double operator_norm = 0.0;          // ||A|| used for the step (Lasso) or 1 (BP)
};

/// z * max(|z| - tau, 0) / |z|.
cplx soft_threshold(cplx z, double tau);

/// Power-iteration estimate of ||A||_2 from a seeded random start. When
/// `trace` is given it receives the (nondecreasing) per-iteration estimates.
double operator_norm(const LinearOperator& op, int iters, std::uint64_t seed,
                     std::vector<double>* trace = nullptr);

/// Relative error ||A A^H v - v|| / ||v|| for a seeded random v.
double row_orthonormality_defect(const LinearOperator& op, std::uint64_t seed);

/// min 1/2 ||A b - y||^2 + mu ||b||_1 by accelerated proximal gradient.
SolveResult lasso_fista(const LinearOperator& op, std::span<const cplx> y,
                        const SolverConfig& cfg);

/// min ||b||_1 s.t. A b = y by Douglas-Rachford splitting. Requires
/// A A^H = I so the affine projection is exact.
SolveResult bp_douglas_rachford(const LinearOperator& op, std::span<const cplx> y,
                                const SolverConfig& cfg);

/// Dispatches on cfg.method.
SolveResult solve(const LinearOperator& op, std::span<const cplx> y, const SolverConfig& cfg);

/// Lasso stationarity gap with r = A^H (A b - y): max over zero entries of
/// (|r_i| - mu)_+ and over nonzero entries of |r_i + mu b_i / |b_i||.
double kkt_residual(const LinearOperator& op, std::span<const cplx> y,
                    std::span<const cplx> beta, double mu);

}  // namespace phsdcs
