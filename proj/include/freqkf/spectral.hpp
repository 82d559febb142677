#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace freqkf {

// Orthonormal DCT-II coefficients c_0..c_{N-1} of a length-N series.
struct ChannelSpectrum {
  std::vector<double> coeffs;

  std::size_t source_len() const noexcept { return coeffs.size(); }
  bool operator==(const ChannelSpectrum&) const = default;
};

// Precomputed orthonormal DCT-II basis for one length. The transform is the
// direct O(N^2) matrix product; rows are the basis vectors
//   b_k(t) = s_k cos(pi (2t+1) k / 2N),  s_0 = sqrt(1/N), s_k = sqrt(2/N).
// A plan is immutable once built and can be shared between threads.
class DctPlan {
 public:
  explicit DctPlan(std::size_t length);

  std::size_t length() const noexcept { return n_; }

  ChannelSpectrum forward(std::span<const double> series) const;
  std::vector<double> inverse(const ChannelSpectrum& spectrum) const;

  // Basis value b_k(t).
  double basis(std::size_t k, std::size_t t) const { return basis_[k * n_ + t]; }

 private:
  std::size_t n_;
  std::vector<double> basis_;
};

// Throws EmptySeries / NonFinite.
ChannelSpectrum dct(std::span<const double> series);

// Throws EmptySpectrum.
std::vector<double> idct(const ChannelSpectrum& spectrum);

double energy(std::span<const double> values);

// Sum of c_k^2 for k in [first, last).
double band_energy(const ChannelSpectrum& spectrum, std::size_t first, std::size_t last);

// High-frequency energy ratio
//   rho = sum_{k >= k0} c_k^2 / (sum_{k in D} c_k^2 + epsilon),
// D = all bins, or all but the DC bin when include_dc is false.
// Throws CutoffOutOfRange when k0 > N.
double high_freq_ratio(const ChannelSpectrum& spectrum, std::size_t k0, bool include_dc,
                       double epsilon);

// SNR_est = (1 - rho) / (rho + epsilon).
double estimate_snr(double rho, double epsilon);

}  // namespace freqkf
