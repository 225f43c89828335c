#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "phsdcs/core.hpp"

namespace phsdcs {

/// Matrix-free complex linear map C^cols -> C^rows with its adjoint.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual std::size_t rows() const = 0;
  virtual std::size_t cols() const = 0;

  /// y = A x. `x` has cols() entries, `y` rows().
  virtual void apply(std::span<const cplx> x, std::span<cplx> y) const = 0;
  /// x = A^H y.
  virtual void apply_adjoint(std::span<const cplx> y, std::span<cplx> x) const = 0;

  std::vector<cplx> operator()(std::span<const cplx> x) const {
    std::vector<cplx> y(rows());
    apply(x, y);
    return y;
  }
  std::vector<cplx> adjoint(std::span<const cplx> y) const {
    std::vector<cplx> x(cols());
    apply_adjoint(y, x);
    return x;
  }
};

}  // namespace phsdcs
