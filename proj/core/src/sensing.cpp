#include "phsdcs/sensing.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>

#include "phsdcs/error.hpp"
#include "phsdcs/fft.hpp"

namespace phsdcs {

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) {
    h ^= (v >> (8 * i)) & 0xffU;
    h *= kFnvPrime;
  }
}

std::size_t wrap(long long x, std::size_t n) {
  const auto m = static_cast<long long>(n);
  return static_cast<std::size_t>(((x % m) + m) % m);
}

}  // namespace

std::string to_string(MaskDomain d) { return d == MaskDomain::fourier ? "fourier" : "pixel"; }

MaskDomain parse_mask_domain(const std::string& s) {
  if (s == "fourier") return MaskDomain::fourier;
  if (s == "pixel") return MaskDomain::pixel;
  throw DataError("unknown mask domain '" + s + "'");
}

SamplingMask::SamplingMask(std::size_t n_t, std::size_t n_y, MaskDomain domain,
                           std::vector<GridIndex> indices, bool hermitian_completed)
    : n_t_(n_t), n_y_(n_y), domain_(domain), indices_(std::move(indices)),
      hermitian_completed_(hermitian_completed) {
  if (n_t == 0 || n_y == 0) throw DataError("mask dimensions must be positive");
  std::set<GridIndex> seen;
  for (const auto& idx : indices_) {
    if (idx.u >= n_t || idx.v >= n_y) {
      throw DataError("mask index (" + std::to_string(idx.u) + ", " + std::to_string(idx.v) +
                      ") outside " + std::to_string(n_t) + "x" + std::to_string(n_y));
    }
    if (!seen.insert(idx).second) {
      throw DataError("mask index (" + std::to_string(idx.u) + ", " + std::to_string(idx.v) +
                      ") repeated");
    }
  }
}

bool SamplingMask::closed_under_negation() const {
  const std::set<GridIndex> all(indices_.begin(), indices_.end());
  for (const auto& idx : indices_) {
    const GridIndex neg{(n_t_ - idx.u) % n_t_, (n_y_ - idx.v) % n_y_};
    if (!all.contains(neg)) return false;
  }
  return true;
}

std::string SamplingMask::id() const {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, n_t_);
  fnv_mix(h, n_y_);
  fnv_mix(h, domain_ == MaskDomain::fourier ? 0 : 1);
  for (const auto& idx : indices_) {
    fnv_mix(h, idx.u);
    fnv_mix(h, idx.v);
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

SamplingMask radial_mask(std::size_t n, std::size_t lines, std::size_t points_per_line,
                         bool hermitian, std::uint64_t /*seed*/) {
  if (!is_power_of_two(n) || n < 2) throw DataError("radial mask size must be a power of two");
  if (lines < 1) throw DataError("radial mask needs at least one line");
  if (points_per_line < 1 || points_per_line > n) {
    throw DataError("points per line must lie in [1, n]");
  }
  const double spacing = static_cast<double>(n) / static_cast<double>(points_per_line);
  const auto centre = static_cast<long long>(points_per_line / 2);

  std::vector<GridIndex> indices;
  std::set<GridIndex> seen;
  auto add = [&](GridIndex idx) {
    if (seen.insert(idx).second) indices.push_back(idx);
  };
  for (std::size_t l = 0; l < lines; ++l) {
    const double theta = std::numbers::pi * static_cast<double>(l) / static_cast<double>(lines);
    const double dr = std::sin(theta);
    const double dc = std::cos(theta);
    for (std::size_t i = 0; i < points_per_line; ++i) {
      const double s = static_cast<double>(static_cast<long long>(i) - centre) * spacing;
      const auto r = static_cast<long long>(std::round(s * dr));
      const auto c = static_cast<long long>(std::round(s * dc));
      add({wrap(r, n), wrap(c, n)});
    }
  }
  if (hermitian) {
    const std::size_t kept = indices.size();
    for (std::size_t i = 0; i < kept; ++i) {
      const auto idx = indices[i];
      add({(n - idx.u) % n, (n - idx.v) % n});
    }
  }
  return SamplingMask(n, n, MaskDomain::fourier, std::move(indices), hermitian);
}

MeasurementVector measure(const ComplexGrid& grid, const SamplingMask& mask) {
  if (grid.height() != mask.n_t() || grid.width() != mask.n_y()) {
    throw DataError("measure: image dimensions do not match the mask");
  }
  MeasurementVector out;
  out.mask_id = mask.id();
  out.values.reserve(mask.size());
  if (mask.domain() == MaskDomain::fourier) {
    ComplexGrid spectrum = grid;
    fft::grid2d(spectrum.values(), spectrum.height(), spectrum.width(), false);
    for (const auto& idx : mask.indices()) out.values.push_back(spectrum.at(idx.u, idx.v));
  } else {
    for (const auto& idx : mask.indices()) out.values.push_back(grid.at(idx.u, idx.v));
  }
  return out;
}

MeasurementVector measure(const Image& img, const SamplingMask& mask) {
  return measure(ComplexGrid(img), mask);
}

ComplexGrid measure_adjoint(std::span<const cplx> values, const SamplingMask& mask) {
  if (values.size() != mask.size()) {
    throw DataError("measure_adjoint: " + std::to_string(values.size()) +
                    " measurements for a mask of " + std::to_string(mask.size()));
  }
  ComplexGrid grid(mask.n_y(), mask.n_t());
  for (std::size_t m = 0; m < values.size(); ++m) {
    const auto& idx = mask.indices()[m];
    grid.at(idx.u, idx.v) = values[m];
  }
  if (mask.domain() == MaskDomain::fourier) {
    fft::grid2d(grid.values(), grid.height(), grid.width(), true);
  }
  return grid;
}

ComplexGrid measure_adjoint(const MeasurementVector& meas, const SamplingMask& mask) {
  return measure_adjoint(std::span<const cplx>(meas.values), mask);
}

ComposedOperator::ComposedOperator(SamplingMask mask, TransformHandle transform)
    : mask_(std::move(mask)), transform_(std::move(transform)) {
  if (mask_.n_t() != transform_.n_t() || mask_.n_y() != transform_.n_y()) {
    throw DataError("mask and transform dimensions differ");
  }
}

CoefficientPyramid ComposedOperator::to_pyramid(std::vector<cplx> values) const {
  return CoefficientPyramid(transform_.n_t(), transform_.n_y(), transform_.levels(),
                            transform_.tag(), std::move(values));
}

void ComposedOperator::apply(std::span<const cplx> x, std::span<cplx> y) const {
  if (x.size() != cols() || y.size() != rows()) throw DataError("apply: size mismatch");
  const auto pyr = to_pyramid(std::vector<cplx>(x.begin(), x.end()));
  const auto meas = measure(synthesize(pyr, transform_), mask_);
  std::copy(meas.values.begin(), meas.values.end(), y.begin());
}

void ComposedOperator::apply_adjoint(std::span<const cplx> y, std::span<cplx> x) const {
  if (x.size() != cols() || y.size() != rows()) throw DataError("apply_adjoint: size mismatch");
  const auto pyr = analyze(measure_adjoint(y, mask_), transform_);
  std::copy(pyr.values.begin(), pyr.values.end(), x.begin());
}

MeasurementVector ComposedOperator::apply(const CoefficientPyramid& beta) const {
  if (!transform_.matches(beta)) throw DataError("apply: pyramid does not match the operator");
  return measure(synthesize(beta, transform_), mask_);
}

CoefficientPyramid ComposedOperator::apply_adjoint(const MeasurementVector& meas) const {
  return analyze(measure_adjoint(meas, mask_), transform_);
}

}  // namespace phsdcs
