#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "phsdcs/core.hpp"
#include "phsdcs/linear_operator.hpp"
#include "phsdcs/transform.hpp"

namespace phsdcs {

enum class MaskDomain { fourier, pixel };

std::string to_string(MaskDomain d);
MaskDomain parse_mask_domain(const std::string& s);

/// (u, v) = (row, column) in standard DFT ordering for Fourier masks, or the
/// pixel position for pixel masks.
struct GridIndex {
  std::size_t u = 0;
  std::size_t v = 0;

  auto operator<=>(const GridIndex&) const = default;
};

/// The measurement operator: an ordered list of distinct grid positions.
class SamplingMask {
 public:
  SamplingMask(std::size_t n_t, std::size_t n_y, MaskDomain domain,
               std::vector<GridIndex> indices, bool hermitian_completed = false);

  std::size_t n_t() const { return n_t_; }
  std::size_t n_y() const { return n_y_; }
  MaskDomain domain() const { return domain_; }
  const std::vector<GridIndex>& indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool hermitian_completed() const { return hermitian_completed_; }

  /// True when every index's negation (mod the grid) is also present.
  bool closed_under_negation() const;

  /// Stable 16-hex-digit FNV-1a digest of the mask geometry.
  std::string id() const;

 private:
  std::size_t n_t_;
  std::size_t n_y_;
  MaskDomain domain_;
  std::vector<GridIndex> indices_;
  bool hermitian_completed_;
};

struct MeasurementVector {
  std::vector<cplx> values;
  std::string mask_id;
};

/// Radial lines through the centre of an n x n spectrum: line l at angle
/// pi * l / lines, `points_per_line` samples spaced n / points_per_line apart
/// along the diameter, rounded to the nearest grid point and deduplicated.
/// `seed` is accepted for future jittered variants and currently unused.
SamplingMask radial_mask(std::size_t n, std::size_t lines, std::size_t points_per_line,
                         bool hermitian, std::uint64_t seed = 0);

MeasurementVector measure(const ComplexGrid& grid, const SamplingMask& mask);
MeasurementVector measure(const Image& img, const SamplingMask& mask);
ComplexGrid measure_adjoint(const MeasurementVector& meas, const SamplingMask& mask);
ComplexGrid measure_adjoint(std::span<const cplx> values, const SamplingMask& mask);

/// A = Theta Phi: coefficients -> measurements, never materialized.
class ComposedOperator final : public LinearOperator {
 public:
  ComposedOperator(SamplingMask mask, TransformHandle transform);

  const SamplingMask& mask() const { return mask_; }
  const TransformHandle& transform() const { return transform_; }

  std::size_t rows() const override { return mask_.size(); }
  std::size_t cols() const override { return transform_.size(); }
  void apply(std::span<const cplx> x, std::span<cplx> y) const override;
  void apply_adjoint(std::span<const cplx> y, std::span<cplx> x) const override;

  MeasurementVector apply(const CoefficientPyramid& beta) const;
  CoefficientPyramid apply_adjoint(const MeasurementVector& meas) const;

  /// Wraps a flat coefficient vector in this operator's pyramid geometry.
  CoefficientPyramid to_pyramid(std::vector<cplx> values) const;

 private:
  SamplingMask mask_;
  TransformHandle transform_;
};

}  // namespace phsdcs
