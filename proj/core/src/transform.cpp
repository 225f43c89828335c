#include "phsdcs/transform.hpp"

#include <algorithm>

#include "phsdcs/error.hpp"
#include "phsdcs/fft.hpp"

namespace phsdcs {

namespace {

void check_dims(std::size_t n_t, std::size_t n_y) {
  if (n_t < 2 || n_y < 2 || !is_power_of_two(n_t) || !is_power_of_two(n_y)) {
    throw DataError("transform dimensions must be powers of two >= 2, got " +
                    std::to_string(n_t) + "x" + std::to_string(n_y));
  }
}

// One periodic analysis step on x[0..len): low half then high half into out.
template <typename It>
void analysis_step(It x, std::size_t len, const FilterPair& f, std::vector<cplx>& out) {
  const auto& h = f.lowpass;
  const auto& g = f.highpass;
  const std::size_t half = len / 2;
  out.assign(len, cplx{});
  for (std::size_t k = 0; k < half; ++k) {
    cplx c{}, d{};
    for (std::size_t m = 0; m < h.size(); ++m) {
      const cplx v = x[(2 * k + m) % len];
      c += h[m] * v;
      d += g[m] * v;
    }
    out[k] = c;
    out[half + k] = d;
  }
}

// Transpose of analysis_step: rebuilds len samples from [low | high].
template <typename It>
void synthesis_step(It coeffs, std::size_t len, const FilterPair& f, std::vector<cplx>& out) {
  const auto& h = f.lowpass;
  const auto& g = f.highpass;
  const std::size_t half = len / 2;
  out.assign(len, cplx{});
  for (std::size_t k = 0; k < half; ++k) {
    const cplx c = coeffs[k];
    const cplx d = coeffs[half + k];
    for (std::size_t m = 0; m < h.size(); ++m) {
      out[(2 * k + m) % len] += h[m] * c + g[m] * d;
    }
  }
}

void check_cascade(std::size_t n, std::span<const FilterPair* const> pairs, int levels) {
  if (levels < 0) throw DataError("cascade: negative level count");
  if (levels > 0 && (!is_power_of_two(n) || (n >> levels) == 0)) {
    throw DataError("cascade: length " + std::to_string(n) + " does not support " +
                    std::to_string(levels) + " levels");
  }
  if (pairs.size() < static_cast<std::size_t>(levels)) {
    throw DataError("cascade: fewer filter pairs than levels");
  }
}

}  // namespace

TransformHandle TransformHandle::phsd(std::size_t n_t, std::size_t n_y, int order, int levels,
                                      double y_scale) {
  check_dims(n_t, n_y);
  TransformHandle t;
  t.tag_ = {BasisKind::phsd, order};
  t.levels_ = levels;
  t.n_t_ = n_t;
  t.n_y_ = n_y;
  t.bank_ = std::make_shared<const FilterBank>(n_y, n_t, order, levels, y_scale);
  return t;
}

TransformHandle TransformHandle::daub2d(std::size_t n_t, std::size_t n_y, int order,
                                        int levels) {
  check_dims(n_t, n_y);
  if (levels < 0 || levels > log2_exact(std::min(n_t, n_y))) {
    throw DataError("daub2d levels must lie in [0, log2(min(n_t, n_y))]");
  }
  TransformHandle t;
  t.tag_ = {BasisKind::daub2d, order};
  t.levels_ = levels;
  t.n_t_ = n_t;
  t.n_y_ = n_y;
  t.pair_ = std::make_shared<const FilterPair>(make_filter_pair({order, 0.0}));
  return t;
}

const FilterBank& TransformHandle::bank() const {
  if (!bank_) throw DataError("transform handle has no PHSD filter bank");
  return *bank_;
}

const FilterPair& TransformHandle::pair() const {
  if (!pair_) throw DataError("transform handle has no Daubechies filter pair");
  return *pair_;
}

CoefficientPyramid TransformHandle::make_pyramid() const {
  return CoefficientPyramid(n_t_, n_y_, levels_, tag_);
}

bool TransformHandle::matches(const CoefficientPyramid& pyr) const {
  return pyr.n_t == n_t_ && pyr.n_y == n_y_ && pyr.levels == levels_ && pyr.basis == tag_ &&
         pyr.values.size() == size();
}

ComplexGrid fft_columns(const ComplexGrid& grid) {
  check_dims(grid.height(), grid.width());
  ComplexGrid out = grid;
  fft::rows(out.values(), out.height(), out.width(), false);
  return out;
}

ComplexGrid fft_columns(const Image& img) { return fft_columns(ComplexGrid(img)); }

ComplexGrid ifft_columns(const ComplexGrid& grid) {
  check_dims(grid.height(), grid.width());
  ComplexGrid out = grid;
  fft::rows(out.values(), out.height(), out.width(), true);
  return out;
}

std::vector<cplx> cascade_forward_1d(std::span<const cplx> signal,
                                     std::span<const FilterPair* const> pairs, int levels) {
  check_cascade(signal.size(), pairs, levels);
  std::vector<cplx> out(signal.begin(), signal.end());
  std::vector<cplx> work;
  std::size_t len = signal.size();
  for (int step = 0; step < levels; ++step, len /= 2) {
    analysis_step(out.begin(), len, *pairs[static_cast<std::size_t>(step)], work);
    std::copy(work.begin(), work.end(), out.begin());
  }
  return out;
}

std::vector<cplx> cascade_inverse_1d(std::span<const cplx> coeffs,
                                     std::span<const FilterPair* const> pairs, int levels) {
  check_cascade(coeffs.size(), pairs, levels);
  std::vector<cplx> out(coeffs.begin(), coeffs.end());
  std::vector<cplx> work;
  for (int step = levels; step >= 1; --step) {
    const std::size_t len = coeffs.size() >> (step - 1);
    synthesis_step(out.begin(), len, *pairs[static_cast<std::size_t>(step - 1)], work);
    std::copy(work.begin(), work.end(), out.begin());
  }
  return out;
}

CoefficientPyramid phsd_forward(const ComplexGrid& grid, const TransformHandle& t) {
  if (t.kind() != BasisKind::phsd) throw DataError("phsd_forward: handle is not PHSD");
  if (grid.height() != t.n_t() || grid.width() != t.n_y()) {
    throw DataError("phsd_forward: image dimensions do not match the transform");
  }
  const ComplexGrid spectrum = fft_columns(grid);
  CoefficientPyramid pyr = t.make_pyramid();
  const std::size_t n_t = t.n_t();
  std::vector<cplx> column(n_t);
  for (std::size_t xi = 0; xi < t.n_y(); ++xi) {
    for (std::size_t r = 0; r < n_t; ++r) column[r] = spectrum.at(r, xi);
    const auto pairs = t.bank().column_pairs(xi);
    const auto coeffs = cascade_forward_1d(column, pairs, t.levels());
    std::copy(coeffs.begin(), coeffs.end(), pyr.values.begin() + static_cast<std::ptrdiff_t>(xi * n_t));
  }
  return pyr;
}

CoefficientPyramid phsd_forward(const Image& img, const TransformHandle& t) {
  return phsd_forward(ComplexGrid(img), t);
}

CoefficientPyramid phsd_adjoint(const Image& img, const TransformHandle& t) {
  return phsd_forward(img, t);
}

ComplexGrid phsd_synthesize(const CoefficientPyramid& pyr, const TransformHandle& t) {
  if (t.kind() != BasisKind::phsd || !t.matches(pyr)) {
    throw DataError("phsd_inverse: pyramid " + pyr.basis.to_string() +
                    " does not match transform " + t.tag().to_string());
  }
  const std::size_t n_t = t.n_t();
  ComplexGrid spectrum(t.n_y(), n_t);
  for (std::size_t xi = 0; xi < t.n_y(); ++xi) {
    const auto pairs = t.bank().column_pairs(xi);
    const std::span<const cplx> coeffs(pyr.values.data() + xi * n_t, n_t);
    const auto column = cascade_inverse_1d(coeffs, pairs, t.levels());
    for (std::size_t r = 0; r < n_t; ++r) spectrum.at(r, xi) = column[r];
  }
  return ifft_columns(spectrum);
}

InverseResult phsd_inverse(const CoefficientPyramid& pyr, const TransformHandle& t) {
  InverseResult res;
  res.image = phsd_synthesize(pyr, t).real_part(8, &res.imaginary_residue);
  return res;
}

CoefficientPyramid daub2d_forward(const ComplexGrid& grid, const TransformHandle& t) {
  if (t.kind() != BasisKind::daub2d) throw DataError("daub2d_forward: handle is not daub2d");
  if (grid.height() != t.n_t() || grid.width() != t.n_y()) {
    throw DataError("daub2d_forward: image dimensions do not match the transform");
  }
  const FilterPair& f = t.pair();
  ComplexGrid work = grid;
  std::vector<cplx> line, out;
  std::size_t rows = t.n_t(), cols = t.n_y();
  for (int step = 0; step < t.levels(); ++step, rows /= 2, cols /= 2) {
    for (std::size_t r = 0; r < rows; ++r) {
      line.assign(work.values().begin() + static_cast<std::ptrdiff_t>(r * work.width()),
                  work.values().begin() + static_cast<std::ptrdiff_t>(r * work.width() + cols));
      analysis_step(line.begin(), cols, f, out);
      for (std::size_t c = 0; c < cols; ++c) work.at(r, c) = out[c];
    }
    line.resize(rows);
    for (std::size_t c = 0; c < cols; ++c) {
      for (std::size_t r = 0; r < rows; ++r) line[r] = work.at(r, c);
      analysis_step(line.begin(), rows, f, out);
      for (std::size_t r = 0; r < rows; ++r) work.at(r, c) = out[r];
    }
  }
  CoefficientPyramid pyr = t.make_pyramid();
  for (std::size_t c = 0; c < t.n_y(); ++c) {
    for (std::size_t r = 0; r < t.n_t(); ++r) pyr.at(r, c) = work.at(r, c);
  }
  return pyr;
}

CoefficientPyramid daub2d_forward(const Image& img, const TransformHandle& t) {
  return daub2d_forward(ComplexGrid(img), t);
}

ComplexGrid daub2d_synthesize(const CoefficientPyramid& pyr, const TransformHandle& t) {
  if (t.kind() != BasisKind::daub2d || !t.matches(pyr)) {
    throw DataError("daub2d_inverse: pyramid " + pyr.basis.to_string() +
                    " does not match transform " + t.tag().to_string());
  }
  const FilterPair& f = t.pair();
  ComplexGrid work(t.n_y(), t.n_t());
  for (std::size_t c = 0; c < t.n_y(); ++c) {
    for (std::size_t r = 0; r < t.n_t(); ++r) work.at(r, c) = pyr.at(r, c);
  }
  std::vector<cplx> line, out;
  for (int step = t.levels(); step >= 1; --step) {
    const std::size_t rows = t.n_t() >> (step - 1);
    const std::size_t cols = t.n_y() >> (step - 1);
    line.resize(rows);
    for (std::size_t c = 0; c < cols; ++c) {
      for (std::size_t r = 0; r < rows; ++r) line[r] = work.at(r, c);
      synthesis_step(line.begin(), rows, f, out);
      for (std::size_t r = 0; r < rows; ++r) work.at(r, c) = out[r];
    }
    line.resize(cols);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) line[c] = work.at(r, c);
      synthesis_step(line.begin(), cols, f, out);
      for (std::size_t c = 0; c < cols; ++c) work.at(r, c) = out[c];
    }
  }
  return work;
}

InverseResult daub2d_inverse(const CoefficientPyramid& pyr, const TransformHandle& t) {
  InverseResult res;
  res.image = daub2d_synthesize(pyr, t).real_part(8, &res.imaginary_residue);
  return res;
}

CoefficientPyramid analyze(const ComplexGrid& grid, const TransformHandle& t) {
  return t.kind() == BasisKind::phsd ? phsd_forward(grid, t) : daub2d_forward(grid, t);
}

ComplexGrid synthesize(const CoefficientPyramid& pyr, const TransformHandle& t) {
  return t.kind() == BasisKind::phsd ? phsd_synthesize(pyr, t) : daub2d_synthesize(pyr, t);
}

CoefficientPyramid transform_forward(const Image& img, const TransformHandle& t) {
  return analyze(ComplexGrid(img), t);
}

InverseResult transform_inverse(const CoefficientPyramid& pyr, const TransformHandle& t,
                                int bit_depth) {
  InverseResult res;
  res.image = synthesize(pyr, t).real_part(bit_depth, &res.imaginary_residue);
  return res;
}

}  // namespace phsdcs
