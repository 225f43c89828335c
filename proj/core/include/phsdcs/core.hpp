#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

namespace phsdcs {

using cplx = std::complex<double>;

/// Real-valued grayscale image. Rows index the t axis (height = n_t),
/// columns index the y axis (width = n_y). Pixels are row-major.
class Image {
 public:
  Image() = default;
  Image(std::size_t width, std::size_t height, std::vector<double> pixels,
        int bit_depth = 8);
  /// Zero-filled image.
  Image(std::size_t width, std::size_t height, int bit_depth = 8);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  int bit_depth() const { return bit_depth_; }
  /// 2^bit_depth - 1.
  double peak() const;

  double at(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }
  double& at(std::size_t row, std::size_t col) { return pixels_[row * width_ + col]; }

  const std::vector<double>& pixels() const { return pixels_; }
  std::vector<double>& pixels() { return pixels_; }

  Image transposed() const;

  bool operator==(const Image&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<double> pixels_;
  int bit_depth_ = 8;
};

/// Complex grid with the same geometry conventions as Image.
class ComplexGrid {
 public:
  ComplexGrid() = default;
  ComplexGrid(std::size_t width, std::size_t height);
  ComplexGrid(std::size_t width, std::size_t height, std::vector<cplx> values);
  explicit ComplexGrid(const Image& img);

  std::size_t width() const { return width_; }
  std::size_t height() const { return height_; }
  std::size_t size() const { return values_.size(); }

  cplx at(std::size_t row, std::size_t col) const { return values_[row * width_ + col]; }
  cplx& at(std::size_t row, std::size_t col) { return values_[row * width_ + col]; }

  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& values() { return values_; }

  /// Real part as an image; `imaginary_residue` receives max|Im| / max|z|
  /// (0 for an all-zero grid).
  Image real_part(int bit_depth, double* imaginary_residue = nullptr) const;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<cplx> values_;
};

enum class BasisKind { phsd, daub2d };

struct BasisTag {
  BasisKind kind = BasisKind::phsd;
  int order = 2;

  std::string to_string() const;
  bool operator==(const BasisTag&) const = default;
};

/// Transform coefficients. Storage is column-major over the (n_t x n_y)
/// coefficient plane: entry (i, col) lives at values[col * n_t + i]. For
/// PHSD each column is one frequency index and holds
/// [coarse band | detail bands, coarsest first]; for daub2d the columns
/// are those of the Mallat-packed square.
struct CoefficientPyramid {
  std::size_t n_t = 0;
  std::size_t n_y = 0;
  int levels = 0;
  BasisTag basis;
  std::vector<cplx> values;

  CoefficientPyramid() = default;
  CoefficientPyramid(std::size_t n_t, std::size_t n_y, int levels, BasisTag basis);
  CoefficientPyramid(std::size_t n_t, std::size_t n_y, int levels, BasisTag basis,
                     std::vector<cplx> values);

  std::size_t size() const { return values.size(); }
  cplx at(std::size_t i, std::size_t col) const { return values[col * n_t + i]; }
  cplx& at(std::size_t i, std::size_t col) { return values[col * n_t + i]; }
  double energy() const;
  /// Same geometry and basis.
  bool compatible(const CoefficientPyramid& other) const;
};

/// PSNR in decibels, with an explicit tag for the zero-error case.
struct Decibels {
  double value = 0.0;
  bool infinite = false;

  static Decibels inf() { return {0.0, true}; }
  /// "inf" or the value at 17 significant digits.
  std::string to_string() const;
};

struct SparsityReport {
  std::size_t total_count = 0;
  std::size_t significant_count = 0;
  double threshold = 0.0;
  double energy_fraction = 1.0;
};

double mse(const Image& a, const Image& b);

/// Peak is taken from the reference bit depth.
Decibels psnr(const Image& reference, const Image& test);

SparsityReport sparsity_report(const CoefficientPyramid& pyr, double threshold);

/// Zero all but the k largest-modulus entries; ties keep the lower index.
CoefficientPyramid keep_top_k(const CoefficientPyramid& pyr, std::size_t k);

bool is_power_of_two(std::size_t n);
int log2_exact(std::size_t n);

}  // namespace phsdcs
