#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace reductcheck {

/// In-place complex DFT over a row-major array of the given shape (rank 1 or 2).
/// Plans are created once per shape and shared; execution is thread-safe.
class FftPlan {
public:
  using cplx = std::complex<double>;

  /// Cached plan for `shape`; plan creation is serialized internally.
  static const FftPlan& for_shape(const std::vector<std::size_t>& shape);

  /// Unnormalized forward transform (sign -1).
  void forward(std::span<cplx> data) const;
  /// Inverse transform including the 1/N normalization.
  void backward(std::span<cplx> data) const;

  std::size_t size() const { return size_; }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan();

private:
  explicit FftPlan(const std::vector<std::size_t>& shape);

  void* forward_plan_ = nullptr;
  void* backward_plan_ = nullptr;
  std::size_t size_ = 0;
};

} // namespace reductcheck
