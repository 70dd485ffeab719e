#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "ballot/nn/random.hpp"
#include "ballot/nn/tensor.hpp"

namespace ballot::testing {

inline double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

struct GradCheck {
  double max_error = 0.0;
  std::string worst;
  std::size_t checked = 0;

  void merge(const GradCheck& other) {
    if (other.max_error > max_error) {
      max_error = other.max_error;
      worst = other.worst;
    }
    checked += other.checked;
  }
};

struct GradCheckOptions {
  std::size_t per_tensor = 0;  // sampled entries per tensor, 0 = all
  nn::Index only_tensor = -1;  // restrict to one tensor
  std::uint64_t seed = 11;
  double step = 1e-6;
};

// Central differences against `analytic`; `loss` re-evaluates the objective
// from the current contents of `params`.
template <typename Scalar, typename LossFn>
GradCheck check_gradients(nn::ParameterSet<Scalar>& params, const nn::GradientSet<Scalar>& analytic,
                          LossFn&& loss, const GradCheckOptions& options = {}) {
  GradCheck result;
  nn::Rng rng(options.seed);
  const auto per_tensor = options.per_tensor;
  const auto step = static_cast<Scalar>(options.step);
  for (nn::Index t = 0; t < params.size(); ++t) {
    if (options.only_tensor >= 0 && t != options.only_tensor) continue;
    auto& tensor = params[t];
    std::vector<nn::Index> entries(static_cast<std::size_t>(tensor.size()));
    std::iota(entries.begin(), entries.end(), nn::Index{0});
    if (per_tensor && entries.size() > per_tensor) {
      nn::shuffle(entries, rng);
      entries.resize(per_tensor);
    }
    for (nn::Index k : entries) {
      Scalar& x = tensor.data()[k];
      const Scalar saved = x;
      x = saved + step;
      const Scalar up = loss();
      x = saved - step;
      const Scalar down = loss();
      x = saved;
      const double numeric = static_cast<double>((up - down) / (Scalar(2) * step));
      const double err = relative_error(static_cast<double>(analytic[t].data()[k]), numeric);
      if (result.checked == 0 || err > result.max_error) {
        result.max_error = err;
        result.worst = params.name(t) + "[" + std::to_string(k) + "]";
      }
      ++result.checked;
    }
  }
  return result;
}

}  // namespace ballot::testing
