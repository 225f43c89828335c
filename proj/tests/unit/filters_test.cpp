#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "phsdcs/error.hpp"
#include "phsdcs/filters.hpp"

using namespace phsdcs;

namespace {

// Odd weights by solving the interpolation conditions directly in the
// monomial-exponential basis. Fine for moderate lambda; the library uses a
// different basis to stay well conditioned near zero.
std::vector<double> reference_weights(int p, double lambda) {
  const int n = 2 * p;
  std::vector<double> nodes;
  for (int i = -(2 * p - 1); i <= 2 * p - 1; i += 2) nodes.push_back(i);
  auto basis = [&](int j, double x) {
    if (lambda == 0.0) return std::pow(x, j);
    const int deg = j / 2;
    return std::pow(x, deg) * std::exp((j % 2 == 0 ? lambda : -lambda) * x);
  };
  Eigen::MatrixXd m(n, n);
  Eigen::VectorXd rhs(n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) m(j, i) = basis(j, nodes[std::size_t(i)]);
    rhs(j) = basis(j, 0.0);
  }
  Eigen::VectorXd w = m.fullPivLu().solve(rhs);
  return {w.data(), w.data() + n};
}

std::vector<double> autocorrelation(const std::vector<double>& h) {
  const int n = int(h.size());
  std::vector<double> a(std::size_t(2 * n - 1), 0.0);
  for (int k = -(n - 1); k <= n - 1; ++k) {
    double s = 0.0;
    for (int m = 0; m < n; ++m) {
      if (m + k >= 0 && m + k < n) s += h[std::size_t(m)] * h[std::size_t(m + k)];
    }
    a[std::size_t(k + n - 1)] = s;
  }
  return a;
}

double shift_corr(const std::vector<double>& a, const std::vector<double>& b, int shift) {
  double s = 0.0;
  for (int k = 0; k < int(a.size()); ++k) {
    const int j = k + shift;
    if (j >= 0 && j < int(b.size())) s += a[std::size_t(k)] * b[std::size_t(j)];
  }
  return s;
}

struct Defects {
  double ortho = 0.0;
  double cross = 0.0;
  double high = 0.0;
};

Defects orthonormality_defects(const FilterPair& f) {
  Defects d;
  const int len = int(f.lowpass.size());
  for (int m = -(len / 2); m <= len / 2; ++m) {
    const double delta = m == 0 ? 1.0 : 0.0;
    d.ortho = std::max(d.ortho, std::abs(shift_corr(f.lowpass, f.lowpass, 2 * m) - delta));
    d.high = std::max(d.high, std::abs(shift_corr(f.highpass, f.highpass, 2 * m) - delta));
    d.cross = std::max(d.cross, std::abs(shift_corr(f.lowpass, f.highpass, 2 * m)));
  }
  return d;
}

const double kSqrt2 = std::numbers::sqrt2;
const double kSqrt3 = std::numbers::sqrt3;

}  // namespace

TEST(ExpDdSymbol, LinearMidpoint) {
  const auto w = exp_dd_symbol({1, 0.0}).odd_weights();
  ASSERT_EQ(w.size(), 2u);
  EXPECT_NEAR(w[0], 0.5, 1e-15);
  EXPECT_NEAR(w[1], 0.5, 1e-15);
}

TEST(ExpDdSymbol, CubicLagrange) {
  const auto w = exp_dd_symbol({2, 0.0}).odd_weights();
  const std::vector<double> expect{-1.0 / 16, 9.0 / 16, 9.0 / 16, -1.0 / 16};
  ASSERT_EQ(w.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(w[i], expect[i], 1e-14);
}

TEST(ExpDdSymbol, OrderOneClosedForm) {
  const auto w = exp_dd_symbol({1, 1.0}).odd_weights();
  const double expect = 1.0 / (2.0 * std::cosh(1.0));
  EXPECT_NEAR(w[0], expect, 1e-14);
  EXPECT_NEAR(w[1], expect, 1e-14);
  EXPECT_NEAR(expect, 0.324027, 1e-6);
}

TEST(ExpDdSymbol, EvenTapsAreInterpolatory) {
  for (int p = 1; p <= 3; ++p) {
    const auto s = exp_dd_symbol({p, 0.7});
    EXPECT_EQ(s.tap(0), 1.0);
    for (int k = 2; k <= s.half_width(); k += 2) {
      EXPECT_EQ(s.tap(k), 0.0);
      EXPECT_EQ(s.tap(-k), 0.0);
    }
    for (int k = 1; k <= s.half_width(); ++k) EXPECT_EQ(s.tap(k), s.tap(-k));
  }
}

TEST(ExpDdSymbol, MatchesDirectSolve) {
  for (int p = 1; p <= 3; ++p) {
    for (double lam : {0.25, 0.5, 1.0, 2.0}) {
      const auto w = exp_dd_symbol({p, lam}).odd_weights();
      const auto ref = reference_weights(p, lam);
      ASSERT_EQ(w.size(), ref.size());
      for (std::size_t i = 0; i < w.size(); ++i) {
        EXPECT_NEAR(w[i], ref[i], 1e-10) << "p=" << p << " lambda=" << lam;
      }
    }
  }
}

TEST(ExpDdSymbol, LambdaContinuity) {
  for (int p = 1; p <= 3; ++p) {
    const auto a0 = exp_dd_symbol({p, 0.0});
    const auto a1 = exp_dd_symbol({p, 1e-4});
    double diff = 0.0;
    for (std::size_t i = 0; i < a0.taps.size(); ++i) {
      diff = std::max(diff, std::abs(a0.taps[i] - a1.taps[i]));
    }
    EXPECT_LT(diff, 1e-6) << "p=" << p;
  }
}

TEST(ExpDdSymbol, RejectsBadSpecs) {
  EXPECT_THROW(exp_dd_symbol({0, 0.0}), DataError);
  EXPECT_THROW(exp_dd_symbol({2, -0.1}), DataError);
  EXPECT_THROW(exp_dd_symbol({2, kLambdaMax + 0.5}), DataError);
  EXPECT_THROW(exp_dd_symbol({2, std::nan("")}), DataError);
}

TEST(ExpDdSymbol, NonnegativeOnCircle) {
  for (int p = 1; p <= 3; ++p) {
    for (double lam : {0.0, 0.5, 2.0}) {
      const auto s = exp_dd_symbol({p, lam});
      for (int i = 0; i <= 512; ++i) {
        EXPECT_GE(s.evaluate_on_circle(std::numbers::pi * i / 512.0), -1e-12);
      }
    }
  }
}

TEST(Refinement, ReproducesExponentials) {
  for (int p : {1, 2}) {
    for (double lam : {0.0, 0.5, 1.0}) {
      const auto s = exp_dd_symbol({p, lam});
      std::vector<double> coarse;
      for (int m = 0; m < 12; ++m) coarse.push_back(std::exp(lam * 2.0 * m));
      for (std::size_t k = std::size_t(p - 1); k + std::size_t(p) < coarse.size(); ++k) {
        const double want = std::exp(lam * (2.0 * double(k) + 1.0));
        EXPECT_NEAR(refine_midpoint(s, coarse, k), want, 1e-9 * want);
      }
    }
  }
}

TEST(Refinement, ReproducesPolynomialsAtZero) {
  const auto s = exp_dd_symbol({2, 0.0});
  std::vector<double> coarse;
  for (int m = 0; m < 8; ++m) coarse.push_back(std::pow(2.0 * m, 3) - 4.0 * m);
  for (std::size_t k = 1; k < 6; ++k) {
    const double t = 2.0 * double(k) + 1.0;
    EXPECT_NEAR(refine_midpoint(s, coarse, k), t * t * t - 2.0 * t, 1e-9);
  }
}

TEST(Refinement, StencilMustFit) {
  const auto s = exp_dd_symbol({2, 0.0});
  std::vector<double> coarse(4, 1.0);
  EXPECT_THROW(refine_midpoint(s, coarse, 0), DataError);
  EXPECT_THROW(refine_midpoint(s, coarse, 3), DataError);
  EXPECT_NO_THROW(refine_midpoint(s, coarse, 1));
}

TEST(SpectralFactorize, Haar) {
  const auto h = spectral_factorize(exp_dd_symbol({1, 0.0}));
  ASSERT_EQ(h.size(), 2u);
  EXPECT_NEAR(h[0], 1.0 / kSqrt2, 1e-12);
  EXPECT_NEAR(h[1], 1.0 / kSqrt2, 1e-12);
}

TEST(SpectralFactorize, Daubechies2ClosedForm) {
  const auto h = spectral_factorize(exp_dd_symbol({2, 0.0}));
  const double d = 4.0 * kSqrt2;
  const std::vector<double> expect{(1 + kSqrt3) / d, (3 + kSqrt3) / d, (3 - kSqrt3) / d,
                                   (1 - kSqrt3) / d};
  ASSERT_EQ(h.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(h[i], expect[i], 1e-8);
  EXPECT_NEAR(h[0], 0.482963, 1e-6);
  EXPECT_NEAR(h[3], -0.129410, 1e-6);
}

TEST(SpectralFactorize, AutocorrelationMatchesSymbol) {
  for (int p = 1; p <= 3; ++p) {
    for (double lam : {0.0, 0.25, 0.5, 1.0, 2.0}) {
      const auto s = exp_dd_symbol({p, lam});
      const auto h = spectral_factorize(s);
      ASSERT_EQ(h.size(), std::size_t(2 * p));
      const auto a = autocorrelation(h);
      ASSERT_EQ(a.size(), s.taps.size());
      for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], s.taps[i], 1e-8);
      double sum = 0.0;
      for (double v : h) sum += v;
      EXPECT_GT(sum, 0.0);
    }
  }
}

TEST(SpectralFactorize, RejectsNegativeSymbol) {
  InterpolatorySymbol bad{1, {0.9, 1.0, 0.9}, std::nullopt};
  EXPECT_THROW(spectral_factorize(bad), NumericalError);
}

TEST(Highpass, Haar) {
  const std::vector<double> h{1 / kSqrt2, 1 / kSqrt2};
  const auto g = highpass_from_lowpass(h);
  EXPECT_NEAR(g[0], 1 / kSqrt2, 1e-15);
  EXPECT_NEAR(g[1], -1 / kSqrt2, 1e-15);
}

TEST(Highpass, Daubechies2) {
  const double d = 4.0 * kSqrt2;
  const std::vector<double> h{(1 + kSqrt3) / d, (3 + kSqrt3) / d, (3 - kSqrt3) / d,
                              (1 - kSqrt3) / d};
  const auto g = highpass_from_lowpass(h);
  const std::vector<double> expect{-0.129410, -0.224144, 0.836516, -0.482963};
  for (std::size_t i = 0; i < 4; ++i) EXPECT_NEAR(g[i], expect[i], 1e-6);
  EXPECT_EQ(g[0], h[3]);
  EXPECT_EQ(g[1], -h[2]);
}

TEST(Highpass, OddLengthRejected) {
  const std::vector<double> h{1.0, 2.0, 3.0};
  EXPECT_THROW(highpass_from_lowpass(h), DataError);
}

TEST(FilterPair, OrthonormalAcrossGrid) {
  for (int p = 1; p <= 3; ++p) {
    for (double lam : {0.0, 0.25, 0.5, 1.0, 2.0}) {
      const auto f = make_filter_pair({p, lam});
      const auto d = orthonormality_defects(f);
      EXPECT_LE(d.ortho, 1e-8);
      EXPECT_LE(d.high, 1e-8);
      EXPECT_LE(d.cross, 1e-8);
      EXPECT_LE(f.factorization_residual, 1e-8);
      EXPECT_EQ(f.spec.order, p);
      EXPECT_EQ(f.spec.lambda_eff, lam);
    }
  }
}

TEST(FilterPair, HighpassAnnihilatesExponentials) {
  // The minimum-phase low-pass keeps the zeros at -e^{-lambda}, so the
  // wavelet has vanishing moments against k^j e^{-lambda k}, j < p.
  for (int p = 1; p <= 3; ++p) {
    for (double lam : {0.0, 0.5, 1.0}) {
      const auto f = make_filter_pair({p, lam});
      for (int j = 0; j < p; ++j) {
        double s = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < f.highpass.size(); ++k) {
          const double e = std::pow(double(k), j) * std::exp(-lam * double(k));
          s += f.highpass[k] * e;
          scale += std::abs(f.highpass[k] * e);
        }
        EXPECT_NEAR(s / scale, 0.0, 1e-9) << "p=" << p << " lambda=" << lam << " j=" << j;
      }
    }
  }
}

TEST(FilterBank, ZeroFrequencyIsDaubechies) {
  FilterBank bank(8, 32, 2, 3, 1.0);
  const auto ref = make_filter_pair({2, 0.0});
  for (int step = 1; step <= 3; ++step) {
    EXPECT_EQ(bank.pair(0, step).lowpass, ref.lowpass);
    EXPECT_EQ(bank.pair(0, step).highpass, ref.highpass);
  }
}

TEST(FilterBank, SymmetricInFrequency) {
  FilterBank bank(16, 16, 2, 2, 1.0);
  for (std::size_t xi = 1; xi < 16; ++xi) {
    for (int step = 1; step <= 2; ++step) {
      EXPECT_EQ(&bank.pair(xi, step), &bank.pair(16 - xi, step));
    }
  }
}

TEST(FilterBank, LevelExponents) {
  FilterBank bank(16, 64, 2, 4, 1.0);
  for (std::size_t xi = 0; xi < 16; ++xi) {
    const double lam = 2.0 * std::numbers::pi * double(std::min(xi, 16 - xi)) / 16.0;
    EXPECT_NEAR(bank.lambda(xi), lam, 1e-15);
    for (int step = 1; step <= 4; ++step) {
      const double want = std::min(lam * std::pow(2.0, step - 1), kLambdaMax);
      EXPECT_NEAR(bank.pair(xi, step).spec.lambda_eff, want, 1e-15);
    }
  }
}

TEST(FilterBank, ClampedCount) {
  FilterBank bank(8, 8, 1, 1, 1.0);
  // lambda(xi) = pi xi / 4 for xi = 0..4; xi = 3, 4 exceed 2.0.
  EXPECT_EQ(bank.clamped_count(), 2u);
  FilterBank small(8, 8, 1, 1, 0.1);
  EXPECT_EQ(small.clamped_count(), 0u);
}

TEST(FilterBank, SmallExampleOrderOne) {
  FilterBank bank(8, 8, 1, 1, 1.0);
  const auto& f = bank.pair(1, 1);
  const double w = 1.0 / (2.0 * std::cosh(std::numbers::pi / 4));
  EXPECT_NEAR(w, 0.3774699, 1e-6);
  ASSERT_EQ(f.lowpass.size(), 2u);
  const auto a = autocorrelation(f.lowpass);
  EXPECT_NEAR(a[0], w, 1e-8);
  EXPECT_NEAR(a[1], 1.0, 1e-8);
  EXPECT_NEAR(a[2], w, 1e-8);
  // h0^2 + h1^2 = 1 and h0 h1 = w.
  const double s = std::sqrt(1 + 2 * w), d = std::sqrt(1 - 2 * w);
  EXPECT_NEAR(std::max(f.lowpass[0], f.lowpass[1]), (s + d) / 2, 1e-10);
  EXPECT_NEAR(std::min(f.lowpass[0], f.lowpass[1]), (s - d) / 2, 1e-10);
}

TEST(FilterBank, DumpFormat) {
  FilterBank bank(4, 8, 1, 2, 1.0);
  const std::string dump = bank.dump();
  std::istringstream in(dump);
  std::string line;
  std::size_t lines = 0;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::size_t xi, k;
    int step;
    double v;
    ASSERT_TRUE(ls >> xi >> step >> k >> v) << line;
    EXPECT_EQ(v, bank.pair(xi, step).lowpass[k]);
    ++lines;
  }
  EXPECT_EQ(lines, 3u * 2u * 2u);
  EXPECT_EQ(dump, FilterBank(4, 8, 1, 2, 1.0).dump());
}

TEST(FilterBank, RejectsBadArguments) {
  EXPECT_THROW(FilterBank(8, 8, 2, 4, 1.0), DataError);
  EXPECT_THROW(FilterBank(8, 8, 2, 1, 0.0), DataError);
  EXPECT_THROW(FilterBank(8, 8, 0, 1, 1.0), DataError);
  FilterBank bank(8, 8, 1, 1, 1.0);
  EXPECT_THROW(bank.pair(8, 1), DataError);
  EXPECT_THROW(bank.pair(0, 2), DataError);
}
