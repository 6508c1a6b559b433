#include "core/fft2.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace ptcov {
namespace fft2 {
namespace {

std::mutex plan_mutex;

fftw_plan get_plan(int rows, int cols, int sign) {
  static std::map<std::tuple<int, int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_tuple(rows, cols, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  // FFTW_UNALIGNED lets the plan run on any caller buffer via the new-array
  // execute interface.
  fftw_complex* tmp = fftw_alloc_complex(static_cast<std::size_t>(rows) * cols);
  fftw_plan plan =
      fftw_plan_dft_2d(rows, cols, tmp, tmp, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(tmp);
  cache.emplace(key, plan);
  return plan;
}

}  // namespace

void forward(int rows, int cols, std::complex<double>* data) {
  fftw_plan plan = get_plan(rows, cols, FFTW_FORWARD);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
}

void inverse(int rows, int cols, std::complex<double>* data) {
  fftw_plan plan = get_plan(rows, cols, FFTW_BACKWARD);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(data),
                   reinterpret_cast<fftw_complex*>(data));
  double scale = 1.0 / (static_cast<double>(rows) * cols);
  std::size_t n = static_cast<std::size_t>(rows) * cols;
  for (std::size_t i = 0; i < n; ++i) data[i] *= scale;
}

}  // namespace fft2
}  // namespace ptcov
