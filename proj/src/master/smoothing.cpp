#include "rlcycle/master/smoothing.hpp"

#include <algorithm>

#include "rlcycle/errors.hpp"

namespace rlcycle::master {

std::vector<double> moving_average(std::span<const double> xs, int window) {
  if (window < 1 || window % 2 == 0) throw DomainError("window must be odd and >= 1");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(xs.size());
  const std::ptrdiff_t half = window / 2;
  std::vector<double> out(xs.size());
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const std::ptrdiff_t h = std::min({half, i, n - 1 - i});
    double sum = 0.0;
    for (std::ptrdiff_t k = i - h; k <= i + h; ++k) sum += xs[static_cast<std::size_t>(k)];
    out[static_cast<std::size_t>(i)] = sum / static_cast<double>(2 * h + 1);
  }
  return out;
}

}  // namespace rlcycle::master
