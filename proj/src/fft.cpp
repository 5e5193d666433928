#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

#include "penudge/detail/fft.hpp"

namespace penudge::detail {
namespace {

fftw_plan plan_for(const GridSpec& g, int sign) {
  static std::mutex mutex;
  static std::map<std::tuple<int, int, int, int>, fftw_plan> plans;
  std::lock_guard lock(mutex);
  const auto key = std::make_tuple(g.nx, g.ny, g.nz, sign);
  if (auto it = plans.find(key); it != plans.end()) return it->second;

  std::vector<Complex> a(g.size()), b(g.size());
  const int n[2] = {g.nx, g.ny};
  const int dist = g.nx * g.ny;
  fftw_plan p = fftw_plan_many_dft(
      2, n, g.nz, reinterpret_cast<fftw_complex*>(a.data()), nullptr, 1, dist,
      reinterpret_cast<fftw_complex*>(b.data()), nullptr, 1, dist, sign,
      FFTW_ESTIMATE | FFTW_UNALIGNED);
  plans.emplace(key, p);
  return p;
}

void execute(const GridSpec& g, int sign, const Complex* in, Complex* out) {
  fftw_execute_dft(plan_for(g, sign),
                   reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                   reinterpret_cast<fftw_complex*>(out));
}

}  // namespace

void fft_forward(const GridSpec& g, std::span<const Complex> in,
                 std::span<Complex> out) {
  std::vector<Complex> tmp(in.begin(), in.end());
  execute(g, FFTW_FORWARD, tmp.data(), out.data());
  const double scale = 1.0 / static_cast<double>(g.plane());
  for (auto& c : out) c *= scale;
}

void fft_forward(const GridSpec& g, std::span<const double> in,
                 std::span<Complex> out) {
  std::vector<Complex> tmp(in.begin(), in.end());
  execute(g, FFTW_FORWARD, tmp.data(), out.data());
  const double scale = 1.0 / static_cast<double>(g.plane());
  for (auto& c : out) c *= scale;
}

void fft_inverse(const GridSpec& g, std::span<const Complex> in,
                 std::span<Complex> out) {
  std::vector<Complex> tmp(in.begin(), in.end());
  execute(g, FFTW_BACKWARD, tmp.data(), out.data());
}

void fft_inverse_real(const GridSpec& g, std::span<const Complex> in,
                      std::span<double> out) {
  std::vector<Complex> tmp(in.begin(), in.end()), res(g.size());
  execute(g, FFTW_BACKWARD, tmp.data(), res.data());
  for (std::size_t i = 0; i < res.size(); ++i) out[i] = res[i].real();
}

}  // namespace penudge::detail
