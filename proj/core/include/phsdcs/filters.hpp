#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace phsdcs {

/// Largest per-level exponent accepted by the symbol construction. Larger
/// requests are clamped by build_filter_bank.
inline constexpr double kLambdaMax = 2.0;

struct FilterSpec {
  int order = 2;            // p: the reproduced space has dimension 2p
  double lambda_eff = 0.0;  // exponent on the unit-spaced fine grid

  auto operator<=>(const FilterSpec&) const = default;
};

/// Symmetric interpolatory subdivision mask a_k, k = -(2p-1) .. 2p-1.
struct InterpolatorySymbol {
  int order = 0;
  std::vector<double> taps;  // taps[k + 2p - 1] = a_k
  /// Exponent the symbol was built for, when known. spectral_factorize uses
  /// it to divide out the zeros at -e^{+-lambda} before root finding.
  std::optional<double> lambda_eff;

  int half_width() const { return 2 * order - 1; }
  double tap(int k) const { return taps[static_cast<std::size_t>(k + half_width())]; }
  /// a(e^{iw}) = sum_k a_k e^{ikw}; real because the mask is symmetric.
  double evaluate_on_circle(double omega) const;
  /// Odd-position weights a_{-(2p-1)}, a_{-(2p-3)}, ..., a_{2p-1}.
  std::vector<double> odd_weights() const;
};

struct FilterPair {
  std::vector<double> lowpass;
  std::vector<double> highpass;
  FilterSpec spec;
  /// max |(h * h_rev)_k - a_k| measured at construction.
  double factorization_residual = 0.0;
};

/// Exponential Deslauriers-Dubuc symbol: the odd taps are the weights w_i of
/// sum_i w_i u(x_i) = u(0) over nodes x_i = +-1, +-3, ..., +-(2p-1), exact on
/// span{t^j e^{+-lambda t}, j < p} (polynomials of degree < 2p when lambda = 0).
InterpolatorySymbol exp_dd_symbol(const FilterSpec& spec);

/// Orthonormal low-pass h with h(z) h(1/z) = a(z), minimum phase, h(1) > 0.
std::vector<double> spectral_factorize(const InterpolatorySymbol& sym);

/// g_k = (-1)^k h_{n-1-k}.
std::vector<double> highpass_from_lowpass(std::span<const double> h);

/// exp_dd_symbol + spectral_factorize + highpass_from_lowpass.
FilterPair make_filter_pair(const FilterSpec& spec);

/// Inserted value between coarse[k] and coarse[k + 1] by one refinement step:
/// sum_m a_{2k+1-2m} coarse[m]. Throws if the stencil leaves the sequence.
double refine_midpoint(const InterpolatorySymbol& sym, std::span<const double> coarse,
                       std::size_t k);

/// Per-frequency, per-level filters of the PHSD transform. Frequency index xi
/// and n_y - xi share filters; pairs are stored for xi = 0 .. n_y/2.
class FilterBank {
 public:
  FilterBank(std::size_t n_y, std::size_t n_t, int order, int levels, double y_scale);

  std::size_t n_y() const { return n_y_; }
  std::size_t n_t() const { return n_t_; }
  int order() const { return order_; }
  int levels() const { return levels_; }
  double y_scale() const { return y_scale_; }

  /// Unclamped exponent for column xi: y_scale * 2 pi |xi| / n_y.
  double lambda(std::size_t xi) const;

  /// Filter for column xi (any 0 <= xi < n_y) at level step 1..levels, where
  /// step 1 is the finest (n_t -> n_t / 2).
  const FilterPair& pair(std::size_t xi, int step) const;
  /// The `levels` pairs used for column xi, finest step first.
  std::vector<const FilterPair*> column_pairs(std::size_t xi) const;

  /// Number of (xi, step) entries whose requested exponent exceeded kLambdaMax.
  std::size_t clamped_count() const { return clamped_count_; }
  /// Distinct constructed pairs.
  std::size_t distinct_pairs() const { return cache_.size(); }

  /// Text dump of the low-pass taps, one line per tap:
  /// `xi level tap_index value` with 17 significant digits.
  std::string dump() const;

 private:
  std::size_t n_y_;
  std::size_t n_t_;
  int order_;
  int levels_;
  double y_scale_;
  std::size_t clamped_count_ = 0;
  std::map<FilterSpec, std::shared_ptr<const FilterPair>> cache_;
  std::vector<std::vector<std::shared_ptr<const FilterPair>>> table_;  // [xi][step-1]
};

}  // namespace phsdcs
