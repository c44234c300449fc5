#include "szbov/spectral.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <utility>

namespace szbov::spectral {

namespace {

// FFTW planning is not thread-safe; execution of an existing plan on new
// arrays is. Plans are created once per (size, direction) and kept for the
// lifetime of the process.
class PlanCache {
 public:
  fftw_plan get(int n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    auto* in = fftw_alloc_complex(static_cast<std::size_t>(n));
    auto* out = fftw_alloc_complex(static_cast<std::size_t>(n));
    fftw_plan plan = fftw_plan_dft_1d(n, in, out, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(key, plan);
    return plan;
  }

  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<int, int>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

ComplexSeq transform(std::span<const ComplexPoint> in, int sign) {
  ComplexSeq out(in.size());
  if (in.empty()) return out;
  ComplexSeq scratch(in.begin(), in.end());
  fftw_plan plan = plan_cache().get(static_cast<int>(in.size()), sign);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(scratch.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

// sum_k c_k exp(2 pi i k x / period) with the Nyquist coefficient split
// evenly between +n/2 and -n/2.
ComplexPoint evaluate_series(const ComplexSeq& c, double x, double period, bool differentiate) {
  const std::size_t n = c.size();
  const double omega = kTwoPi / period;
  const ComplexPoint step = std::polar(1.0, omega * x);
  ComplexPoint sum = differentiate ? ComplexPoint{} : c[0];
  ComplexPoint pos{1.0, 0.0};
  ComplexPoint neg{1.0, 0.0};
  const std::size_t half = n / 2;
  for (std::size_t k = 1; k < half; ++k) {
    pos *= step;
    neg = std::conj(pos);
    ComplexPoint term_pos = c[k] * pos;
    ComplexPoint term_neg = c[n - k] * neg;
    if (differentiate) {
      const double kw = omega * static_cast<double>(k);
      sum += kI * kw * (term_pos - term_neg);
    } else {
      sum += term_pos + term_neg;
    }
  }
  if (n % 2 == 0 && n >= 2) {
    const double arg = omega * static_cast<double>(half) * x;
    if (differentiate) {
      sum += -c[half] * omega * static_cast<double>(half) * std::sin(arg);
    } else {
      sum += c[half] * std::cos(arg);
    }
  }
  return sum;
}

}  // namespace

ComplexSeq fft(std::span<const ComplexPoint> in) { return transform(in, FFTW_FORWARD); }

ComplexSeq ifft(std::span<const ComplexPoint> in) { return transform(in, FFTW_BACKWARD); }

ComplexSeq derivative(std::span<const ComplexPoint> samples, double period) {
  const std::size_t n = samples.size();
  ComplexSeq coeffs = fft(samples);
  const double scale = kTwoPi / period / static_cast<double>(n);
  for (std::size_t m = 0; m < n; ++m) {
    if (n % 2 == 0 && m == n / 2) {
      coeffs[m] = 0.0;
      continue;
    }
    coeffs[m] *= kI * (scale * static_cast<double>(wavenumber(m, n)));
  }
  return ifft(coeffs);
}

namespace {

// P f: the zero-mean oscillatory antiderivative of real samples, at the nodes.
RealSeq oscillatory_antiderivative(std::span<const double> samples) {
  const std::size_t n = samples.size();
  ComplexSeq buf(samples.begin(), samples.end());
  ComplexSeq coeffs = fft(buf);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t m = 0; m < n; ++m) {
    const long k = wavenumber(m, n);
    if (k == 0 || (n % 2 == 0 && m == n / 2)) {
      coeffs[m] = 0.0;
    } else {
      coeffs[m] *= inv_n / (kI * (kTwoPi * static_cast<double>(k)));
    }
  }
  ComplexSeq values = ifft(coeffs);
  RealSeq out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = values[j].real();
  return out;
}

}  // namespace

RealSeq cumulative_integral(std::span<const double> samples) {
  const std::size_t n = samples.size();
  double mean = 0.0;
  for (double v : samples) mean += v;
  mean /= static_cast<double>(n);
  RealSeq osc = oscillatory_antiderivative(samples);
  RealSeq out(n + 1);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = mean * static_cast<double>(j) / static_cast<double>(n) + osc[j] - osc[0];
  }
  out[0] = 0.0;
  out[n] = mean;
  return out;
}

RealSeq cumulative_integral_adjoint(std::span<const double> cotangent) {
  const std::size_t n = cotangent.size() - 1;
  const double inv_n = 1.0 / static_cast<double>(n);
  // Row 0 of the forward map is identically zero, so cotangent[0] is dropped.
  RealSeq c(n, 0.0);
  double weighted = cotangent[n];
  double total = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    c[j] = cotangent[j];
    weighted += cotangent[j] * static_cast<double>(j) * inv_n;
    total += cotangent[j];
  }
  // P is skew (odd kernel), so P^T c = -P c and P^T e_0 = -P e_0.
  RealSeq pc = oscillatory_antiderivative(c);
  RealSeq delta(n, 0.0);
  delta[0] = 1.0;
  RealSeq pe0 = oscillatory_antiderivative(delta);
  RealSeq out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = weighted * inv_n - pc[j] + total * pe0[j];
  return out;
}

TrigInterpolant::TrigInterpolant(std::span<const ComplexPoint> samples, double period)
    : coeffs_(fft(samples)), period_(period) {
  const double inv_n = 1.0 / static_cast<double>(coeffs_.size());
  for (auto& c : coeffs_) c *= inv_n;
}

ComplexPoint TrigInterpolant::operator()(double x) const {
  return evaluate_series(coeffs_, x, period_, false);
}

ComplexPoint TrigInterpolant::derivative(double x) const {
  return evaluate_series(coeffs_, x, period_, true);
}

Antiderivative::Antiderivative(std::span<const double> samples) {
  const std::size_t n = samples.size();
  ComplexSeq buf(samples.begin(), samples.end());
  coeffs_ = fft(buf);
  const double inv_n = 1.0 / static_cast<double>(n);
  integral_.assign(n, ComplexPoint{});
  for (std::size_t m = 0; m < n; ++m) {
    coeffs_[m] *= inv_n;
    const long k = wavenumber(m, n);
    if (k != 0 && !(n % 2 == 0 && m == n / 2)) {
      integral_[m] = coeffs_[m] / (kI * (kTwoPi * static_cast<double>(k)));
    }
  }
  mean_ = coeffs_[0].real();
  offset_ = evaluate_series(integral_, 0.0, 1.0, false).real();
}

double Antiderivative::operator()(double x) const {
  return mean_ * x + evaluate_series(integral_, x, 1.0, false).real() - offset_;
}

double Antiderivative::rate(double x) const {
  return evaluate_series(coeffs_, x, 1.0, false).real();
}

}  // namespace szbov::spectral
