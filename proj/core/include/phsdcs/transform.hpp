#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "phsdcs/core.hpp"
#include "phsdcs/filters.hpp"

namespace phsdcs {

inline constexpr int kDefaultLevels = 4;
inline constexpr int kDefaultOrder = 2;

/// The sparsifying operator: either the PHSD transform (DFT along y, then a
/// per-frequency non-stationary wavelet cascade along t) or a separable 2-D
/// Daubechies transform. Immutable and cheap to copy.
class TransformHandle {
 public:
  static TransformHandle phsd(std::size_t n_t, std::size_t n_y, int order = kDefaultOrder,
                              int levels = kDefaultLevels, double y_scale = 1.0);
  static TransformHandle daub2d(std::size_t n_t, std::size_t n_y, int order = kDefaultOrder,
                                int levels = kDefaultLevels);

  BasisKind kind() const { return tag_.kind; }
  const BasisTag& tag() const { return tag_; }
  int levels() const { return levels_; }
  std::size_t n_t() const { return n_t_; }
  std::size_t n_y() const { return n_y_; }
  std::size_t size() const { return n_t_ * n_y_; }

  /// PHSD only.
  const FilterBank& bank() const;
  /// daub2d only.
  const FilterPair& pair() const;

  /// Empty pyramid with this handle's geometry and tag.
  CoefficientPyramid make_pyramid() const;
  bool matches(const CoefficientPyramid& pyr) const;

 private:
  TransformHandle() = default;

  BasisTag tag_;
  int levels_ = 0;
  std::size_t n_t_ = 0;
  std::size_t n_y_ = 0;
  std::shared_ptr<const FilterBank> bank_;
  std::shared_ptr<const FilterPair> pair_;
};

struct InverseResult {
  Image image;
  /// max |Im| / max |value| of the synthesized grid before the real part
  /// was taken. Conjugate-symmetric pyramids give ~1e-16.
  double imaginary_residue = 0.0;

  bool corrupted() const { return imaginary_residue > 1e-6; }
};

/// Unitary DFT along y (across each row), column xi holding f_xi(t).
ComplexGrid fft_columns(const Image& img);
ComplexGrid fft_columns(const ComplexGrid& grid);
ComplexGrid ifft_columns(const ComplexGrid& grid);

/// Periodic decimated analysis. pairs[l] is used at step l + 1 (step 1 is
/// finest). Output is [coarse | details, coarsest first].
std::vector<cplx> cascade_forward_1d(std::span<const cplx> signal,
                                     std::span<const FilterPair* const> pairs, int levels);
std::vector<cplx> cascade_inverse_1d(std::span<const cplx> coeffs,
                                     std::span<const FilterPair* const> pairs, int levels);

CoefficientPyramid phsd_forward(const Image& img, const TransformHandle& t);
CoefficientPyramid phsd_forward(const ComplexGrid& grid, const TransformHandle& t);
/// Adjoint of synthesis; identical to analysis for this orthonormal construction.
CoefficientPyramid phsd_adjoint(const Image& img, const TransformHandle& t);
InverseResult phsd_inverse(const CoefficientPyramid& pyr, const TransformHandle& t);
ComplexGrid phsd_synthesize(const CoefficientPyramid& pyr, const TransformHandle& t);

CoefficientPyramid daub2d_forward(const Image& img, const TransformHandle& t);
CoefficientPyramid daub2d_forward(const ComplexGrid& grid, const TransformHandle& t);
InverseResult daub2d_inverse(const CoefficientPyramid& pyr, const TransformHandle& t);
ComplexGrid daub2d_synthesize(const CoefficientPyramid& pyr, const TransformHandle& t);

// Dispatch on the handle's kind.
CoefficientPyramid analyze(const ComplexGrid& grid, const TransformHandle& t);
ComplexGrid synthesize(const CoefficientPyramid& pyr, const TransformHandle& t);
CoefficientPyramid transform_forward(const Image& img, const TransformHandle& t);
InverseResult transform_inverse(const CoefficientPyramid& pyr, const TransformHandle& t,
                                int bit_depth = 8);

}  // namespace phsdcs
