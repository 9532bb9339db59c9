// Copyright 2026 cellkit contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cellkit/common/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cellkit {

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

double sample_stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double s = 0.0;
  for (double x : xs) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(xs.size() - 1));
}

double percentile(std::vector<double> xs, double p) {
  if (xs.empty()) throw std::invalid_argument("percentile of empty series");
  std::sort(xs.begin(), xs.end());
  if (xs.size() == 1) return xs[0];
  const double rank = p / 100.0 * static_cast<double>(xs.size() - 1);
  const size_t lo = static_cast<size_t>(rank);
  const size_t hi = std::min(lo + 1, xs.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return xs[lo] * (1.0 - frac) + xs[hi] * frac;
}

double autocorr_lag1(const std::vector<double>& xs) {
  const size_t n = xs.size();
  if (n < 3) return 0.0;
  const double m = mean(xs);
  double num = 0.0;
  double den = 0.0;
  for (size_t i = 0; i < n; ++i) {
    den += (xs[i] - m) * (xs[i] - m);
    if (i + 1 < n) num += (xs[i] - m) * (xs[i + 1] - m);
  }
  if (den <= 0.0) return 0.0;
  return num / den;
}

double kolmogorov_q(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double q = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    q += sign * term;
    sign = -sign;
    if (term < 1e-12) break;
  }
  return std::clamp(2.0 * q, 0.0, 1.0);
}

namespace {

double ks_p_value(double d, double n_eff) {
  const double sn = std::sqrt(n_eff);
  return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

}  // namespace

KsResult ks_test_exponential(std::vector<double> samples, double rate) {
  KsResult r;
  const size_t n = samples.size();
  if (n == 0) return r;
  std::sort(samples.begin(), samples.end());
  for (size_t i = 0; i < n; ++i) {
    const double cdf = 1.0 - std::exp(-rate * std::max(samples[i], 0.0));
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    r.d = std::max(r.d, std::max(std::abs(cdf - lo), std::abs(hi - cdf)));
  }
  r.p_value = ks_p_value(r.d, static_cast<double>(n));
  return r;
}

KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b) {
  KsResult r;
  if (a.empty() || b.empty()) return r;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  size_t i = 0;
  size_t j = 0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    r.d = std::max(r.d, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
  }
  r.p_value = ks_p_value(r.d, na * nb / (na + nb));
  return r;
}

}  // namespace cellkit
