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

#pragma once

#include <cstddef>
#include <vector>

namespace cellkit {

double mean(const std::vector<double>& xs);
double sample_stddev(const std::vector<double>& xs);

// Linear-interpolated percentile, p in [0, 100].
double percentile(std::vector<double> xs, double p);

// Lag-1 autocorrelation of a scalar series. Returns 0 for n < 3 or a
// degenerate (constant) series.
double autocorr_lag1(const std::vector<double>& xs);

// Kolmogorov-Smirnov machinery. p-values use the asymptotic Kolmogorov
// distribution with the Stephens small-sample correction.

// Survival function of the Kolmogorov distribution, Q(lambda).
double kolmogorov_q(double lambda);

struct KsResult {
  double d = 0.0;      // sup-norm statistic
  double p_value = 1.0;
};

// One-sample test against Exponential(rate).
KsResult ks_test_exponential(std::vector<double> samples, double rate);

// Two-sample test.
KsResult ks_test_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace cellkit
