#include "phsdcs/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "phsdcs/error.hpp"

namespace phsdcs {

namespace {

void check_depth(int bit_depth) {
  if (bit_depth != 8 && bit_depth != 16) {
    throw DataError("unsupported bit depth " + std::to_string(bit_depth) + " (expected 8 or 16)");
  }
}

}  // namespace

Image::Image(std::size_t width, std::size_t height, std::vector<double> pixels, int bit_depth)
    : width_(width), height_(height), pixels_(std::move(pixels)), bit_depth_(bit_depth) {
  check_depth(bit_depth);
  if (width == 0 || height == 0) throw DataError("image dimensions must be positive");
  if (pixels_.size() != width * height) {
    throw DataError("pixel count " + std::to_string(pixels_.size()) + " does not match " +
                    std::to_string(width) + "x" + std::to_string(height));
  }
  for (double v : pixels_) {
    if (!std::isfinite(v)) throw DataError("image contains a non-finite pixel");
  }
}

Image::Image(std::size_t width, std::size_t height, int bit_depth)
    : Image(width, height, std::vector<double>(width * height, 0.0), bit_depth) {}

double Image::peak() const { return std::ldexp(1.0, bit_depth_) - 1.0; }

Image Image::transposed() const {
  std::vector<double> out(pixels_.size());
  for (std::size_t r = 0; r < height_; ++r) {
    for (std::size_t c = 0; c < width_; ++c) out[c * height_ + r] = pixels_[r * width_ + c];
  }
  return Image(height_, width_, std::move(out), bit_depth_);
}

ComplexGrid::ComplexGrid(std::size_t width, std::size_t height)
    : width_(width), height_(height), values_(width * height) {}

ComplexGrid::ComplexGrid(std::size_t width, std::size_t height, std::vector<cplx> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (values_.size() != width * height) throw DataError("complex grid size mismatch");
}

ComplexGrid::ComplexGrid(const Image& img)
    : width_(img.width()), height_(img.height()), values_(img.size()) {
  std::copy(img.pixels().begin(), img.pixels().end(), values_.begin());
}

Image ComplexGrid::real_part(int bit_depth, double* imaginary_residue) const {
  std::vector<double> px(values_.size());
  double max_abs = 0.0;
  double max_imag = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    px[i] = values_[i].real();
    max_abs = std::max(max_abs, std::abs(values_[i]));
    max_imag = std::max(max_imag, std::abs(values_[i].imag()));
  }
  if (imaginary_residue) *imaginary_residue = max_abs > 0.0 ? max_imag / max_abs : 0.0;
  return Image(width_, height_, std::move(px), bit_depth);
}

std::string BasisTag::to_string() const {
  return std::string(kind == BasisKind::phsd ? "phsd" : "daub2d") + "-p" + std::to_string(order);
}

CoefficientPyramid::CoefficientPyramid(std::size_t n_t, std::size_t n_y, int levels, BasisTag basis)
    : n_t(n_t), n_y(n_y), levels(levels), basis(basis), values(n_t * n_y) {}

CoefficientPyramid::CoefficientPyramid(std::size_t n_t, std::size_t n_y, int levels, BasisTag basis,
                                       std::vector<cplx> values)
    : n_t(n_t), n_y(n_y), levels(levels), basis(basis), values(std::move(values)) {
  if (this->values.size() != n_t * n_y) throw DataError("pyramid size mismatch");
}

double CoefficientPyramid::energy() const {
  double e = 0.0;
  for (const auto& v : values) e += std::norm(v);
  return e;
}

bool CoefficientPyramid::compatible(const CoefficientPyramid& other) const {
  return n_t == other.n_t && n_y == other.n_y && levels == other.levels && basis == other.basis;
}

std::string Decibels::to_string() const {
  if (infinite) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

double mse(const Image& a, const Image& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw DataError("mse: dimension mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.pixels()[i] - b.pixels()[i];
    acc += d * d;
  }
  return acc / static_cast<double>(a.size());
}

Decibels psnr(const Image& reference, const Image& test) {
  const double err = mse(reference, test);
  if (err == 0.0) return Decibels::inf();
  const double peak = reference.peak();
  return {10.0 * std::log10(peak * peak / err), false};
}

SparsityReport sparsity_report(const CoefficientPyramid& pyr, double threshold) {
  if (!(threshold >= 0.0)) throw DataError("sparsity threshold must be nonnegative");
  SparsityReport rep;
  rep.total_count = pyr.size();
  rep.threshold = threshold;
  double total = 0.0;
  double kept = 0.0;
  for (const auto& v : pyr.values) {
    const double e = std::norm(v);
    total += e;
    if (std::abs(v) > threshold) {
      ++rep.significant_count;
      kept += e;
    }
  }
  rep.energy_fraction = total > 0.0 ? kept / total : 1.0;
  return rep;
}

CoefficientPyramid keep_top_k(const CoefficientPyramid& pyr, std::size_t k) {
  if (k > pyr.size()) throw DataError("keep_top_k: k exceeds coefficient count");
  std::vector<std::size_t> order(pyr.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> mod(pyr.size());
  for (std::size_t i = 0; i < pyr.size(); ++i) mod[i] = std::abs(pyr.values[i]);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                    [&](std::size_t a, std::size_t b) {
                      if (mod[a] != mod[b]) return mod[a] > mod[b];
                      return a < b;
                    });
  CoefficientPyramid out(pyr.n_t, pyr.n_y, pyr.levels, pyr.basis);
  for (std::size_t j = 0; j < k; ++j) out.values[order[j]] = pyr.values[order[j]];
  return out;
}

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

int log2_exact(std::size_t n) {
  if (!is_power_of_two(n)) throw DataError(std::to_string(n) + " is not a power of two");
  int j = 0;
  while ((std::size_t{1} << j) < n) ++j;
  return j;
}

}  // namespace phsdcs
