#include "detail/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace winsim::detail {

namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void transform(std::vector<std::complex<double>>& data, int sign) {
  if (data.empty()) return;
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(data.size()), buf, buf, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(plan);
}

bool is_smooth(std::size_t n) {
  for (std::size_t p : {2, 3, 5})
    while (n % p == 0) n /= p;
  return n == 1;
}

}  // namespace

void fft_forward(std::vector<std::complex<double>>& data) { transform(data, FFTW_FORWARD); }

void fft_inverse(std::vector<std::complex<double>>& data) {
  transform(data, FFTW_BACKWARD);
  const double scale = 1.0 / static_cast<double>(data.size());
  for (auto& v : data) v *= scale;
}

std::size_t fast_fft_size(std::size_t min_size, std::size_t multiple) {
  std::size_t q = (min_size + multiple - 1) / multiple;
  if (q == 0) q = 1;
  while (!is_smooth(q)) ++q;
  return q * multiple;
}

double bin_frequency(std::size_t k, std::size_t n, double dt) {
  const double df = 1.0 / (static_cast<double>(n) * dt);
  const auto kk = static_cast<long>(k);
  const auto nn = static_cast<long>(n);
  return static_cast<double>(kk < (nn + 1) / 2 ? kk : kk - nn) * df;
}

}  // namespace winsim::detail
