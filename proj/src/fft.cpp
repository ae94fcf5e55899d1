#include "reductcheck/fft.hpp"

#include "reductcheck/error.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>

namespace reductcheck {

namespace {

std::mutex& planner_mutex()
{
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(std::span<std::complex<double>> data)
{
  return reinterpret_cast<fftw_complex*>(data.data());
}

} // namespace

FftPlan::FftPlan(const std::vector<std::size_t>& shape)
{
  if (shape.empty() || shape.size() > 2) {
    throw ConfigError("FftPlan: rank must be 1 or 2");
  }
  std::vector<int> dims;
  size_ = 1;
  for (std::size_t n : shape) {
    dims.push_back(static_cast<int>(n));
    size_ *= n;
  }
  // FFTW_UNALIGNED lets execution run on arbitrary std::vector storage.
  std::vector<std::complex<double>> scratch(size_);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, FFTW_FORWARD, flags);
  backward_plan_ = fftw_plan_dft(static_cast<int>(dims.size()), dims.data(), buf, buf, FFTW_BACKWARD, flags);
  if (!forward_plan_ || !backward_plan_) {
    throw NumericalError("FftPlan: FFTW planner failed");
  }
}

FftPlan::~FftPlan()
{
  std::lock_guard lock(planner_mutex());
  if (forward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  if (backward_plan_) fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

const FftPlan& FftPlan::for_shape(const std::vector<std::size_t>& shape)
{
  // The mutex must outlive the cache: it is constructed first.
  std::mutex& m = planner_mutex();
  static std::map<std::vector<std::size_t>, std::unique_ptr<FftPlan>> cache;
  std::lock_guard lock(m);
  auto it = cache.find(shape);
  if (it == cache.end()) {
    it = cache.emplace(shape, std::unique_ptr<FftPlan>(new FftPlan(shape))).first;
  }
  return *it->second;
}

void FftPlan::forward(std::span<cplx> data) const
{
  if (data.size() != size_) throw ConfigError("FftPlan::forward: size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(data), as_fftw(data));
}

void FftPlan::backward(std::span<cplx> data) const
{
  if (data.size() != size_) throw ConfigError("FftPlan::backward: size mismatch");
  fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(data), as_fftw(data));
  const double scale = 1.0 / static_cast<double>(size_);
  for (auto& z : data) z *= scale;
}

} // namespace reductcheck
