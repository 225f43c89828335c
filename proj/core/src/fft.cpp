#include "phsdcs/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "phsdcs/error.hpp"

namespace phsdcs::fft {

namespace {

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are created once per shape under a lock and never destroyed.
class PlanCache {
 public:
  fftw_plan get(int kind, std::size_t rows, std::size_t cols, bool inverse) {
    const auto key = std::make_tuple(kind, rows, cols, inverse);
    std::lock_guard lock(mutex_);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::vector<cplx> scratch(rows * cols);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const int sign = inverse ? FFTW_BACKWARD : FFTW_FORWARD;
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = nullptr;
    if (kind == 0) {
      int n = static_cast<int>(cols);
      plan = fftw_plan_many_dft(1, &n, static_cast<int>(rows), buf, nullptr, 1, n, buf, nullptr,
                                1, n, sign, flags);
    } else {
      plan = fftw_plan_dft_2d(static_cast<int>(rows), static_cast<int>(cols), buf, buf, sign,
                              flags);
    }
    if (!plan) throw NumericalError("FFTW planning failed");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, std::size_t, std::size_t, bool>, fftw_plan> plans_;
};

PlanCache& cache() {
  static PlanCache c;
  return c;
}

void check(std::span<cplx> data, std::size_t rows, std::size_t cols) {
  if (data.size() != rows * cols) throw DataError("fft: buffer size mismatch");
  if (!is_power_of_two(rows) || !is_power_of_two(cols)) {
    throw DataError("fft: dimensions must be powers of two");
  }
}

void run(fftw_plan plan, std::span<cplx> data, double scale) {
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
  for (auto& v : data) v *= scale;
}

}  // namespace

void rows(std::span<cplx> data, std::size_t rows, std::size_t cols, bool inverse) {
  check(data, rows, cols);
  run(cache().get(0, rows, cols, inverse), data, 1.0 / std::sqrt(static_cast<double>(cols)));
}

void grid2d(std::span<cplx> data, std::size_t rows, std::size_t cols, bool inverse) {
  check(data, rows, cols);
  run(cache().get(1, rows, cols, inverse), data,
      1.0 / std::sqrt(static_cast<double>(rows * cols)));
}

}  // namespace phsdcs::fft
