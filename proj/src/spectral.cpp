#include "freqkf/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "freqkf/error.hpp"

namespace freqkf {

DctPlan::DctPlan(std::size_t length) : n_(length), basis_(length * length) {
  if (n_ == 0) throw Error(ErrorCode::EmptySeries, "DCT length must be at least 1");
  const double scale0 = std::sqrt(1.0 / static_cast<double>(n_));
  const double scale = std::sqrt(2.0 / static_cast<double>(n_));
  const std::size_t period = 4 * n_;
  for (std::size_t k = 0; k < n_; ++k) {
    const double s = k == 0 ? scale0 : scale;
    for (std::size_t t = 0; t < n_; ++t) {
      // Reduce (2t+1)k modulo the 4N period before scaling to an angle.
      const std::size_t m = ((2 * t + 1) * k) % period;
      const double angle = std::numbers::pi * static_cast<double>(m) / (2.0 * static_cast<double>(n_));
      basis_[k * n_ + t] = s * std::cos(angle);
    }
  }
}

ChannelSpectrum DctPlan::forward(std::span<const double> series) const {
  if (series.size() != n_) {
    std::ostringstream msg;
    msg << "plan length " << n_ << " applied to series of length " << series.size();
    throw Error(ErrorCode::LengthMismatch, msg.str());
  }
  ChannelSpectrum out{std::vector<double>(n_, 0.0)};
  for (std::size_t k = 0; k < n_; ++k) {
    const double* row = &basis_[k * n_];
    double acc = 0.0;
    for (std::size_t t = 0; t < n_; ++t) acc += row[t] * series[t];
    out.coeffs[k] = acc;
  }
  return out;
}

std::vector<double> DctPlan::inverse(const ChannelSpectrum& spectrum) const {
  if (spectrum.coeffs.size() != n_) {
    std::ostringstream msg;
    msg << "plan length " << n_ << " applied to spectrum of length " << spectrum.coeffs.size();
    throw Error(ErrorCode::LengthMismatch, msg.str());
  }
  std::vector<double> out(n_, 0.0);
  for (std::size_t k = 0; k < n_; ++k) {
    const double c = spectrum.coeffs[k];
    if (c == 0.0) continue;
    const double* row = &basis_[k * n_];
    for (std::size_t t = 0; t < n_; ++t) out[t] += c * row[t];
  }
  return out;
}

ChannelSpectrum dct(std::span<const double> series) {
  if (series.empty()) throw Error(ErrorCode::EmptySeries, "cannot transform an empty series");
  for (double v : series) {
    if (!std::isfinite(v)) throw Error(ErrorCode::NonFinite, "series contains a non-finite value");
  }
  return DctPlan(series.size()).forward(series);
}

std::vector<double> idct(const ChannelSpectrum& spectrum) {
  if (spectrum.coeffs.empty()) throw Error(ErrorCode::EmptySpectrum, "empty spectrum");
  return DctPlan(spectrum.coeffs.size()).inverse(spectrum);
}

double energy(std::span<const double> values) {
  double acc = 0.0;
  for (double v : values) acc += v * v;
  return acc;
}

double band_energy(const ChannelSpectrum& spectrum, std::size_t first, std::size_t last) {
  const std::size_t n = spectrum.coeffs.size();
  if (last > n) last = n;
  if (first >= last) return 0.0;
  return energy(std::span<const double>(spectrum.coeffs).subspan(first, last - first));
}

double high_freq_ratio(const ChannelSpectrum& spectrum, std::size_t k0, bool include_dc,
                       double epsilon) {
  const std::size_t n = spectrum.coeffs.size();
  if (k0 > n) {
    std::ostringstream msg;
    msg << "cutoff k0 = " << k0 << " exceeds spectrum length " << n;
    throw Error(ErrorCode::CutoffOutOfRange, msg.str());
  }
  // An excluded DC bin leaves both sums, so rho stays below 1 even for k0 = 0.
  const std::size_t first = include_dc ? 0 : 1;
  const double high = band_energy(spectrum, std::max(k0, first), n);
  const double total = band_energy(spectrum, first, n);
  return high / (total + epsilon);
}

double estimate_snr(double rho, double epsilon) { return (1.0 - rho) / (rho + epsilon); }

}  // namespace freqkf
