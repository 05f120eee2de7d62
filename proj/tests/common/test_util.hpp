#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "rlcycle/nn/matrix.hpp"
#include "rlcycle/nn/network.hpp"

namespace rlcycle::tutil {

// Random dense net with small uniform parameters (biases included).
inline nn::Network random_network(std::mt19937_64& rng, std::vector<std::size_t> sizes,
                                  std::vector<nn::Activation> acts, double scale = 0.8) {
  nn::Network net(sizes, acts);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (double& p : net.parameters()) p = u(rng);
  return net;
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double lo = -1.0,
                                         double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

inline nn::Matrix random_matrix(std::mt19937_64& rng, std::size_t rows, std::size_t cols,
                                double lo = -1.0, double hi = 1.0) {
  nn::Matrix m(rows, cols);
  std::uniform_real_distribution<double> u(lo, hi);
  for (double& x : m.data()) x = u(rng);
  return m;
}

// Central differences of f over every entry of `params` (restored afterwards).
inline std::vector<double> central_difference(std::span<double> params,
                                              const std::function<double()>& f,
                                              double h = 1e-5) {
  std::vector<double> g(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double keep = params[i];
    params[i] = keep + h;
    const double up = f();
    params[i] = keep - h;
    const double down = f();
    params[i] = keep;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

// |a - b| <= rel * max(|a|, |b|) + abs_floor
inline bool close_rel(double a, double b, double rel = 1e-4, double abs_floor = 1e-7) {
  return std::abs(a - b) <= rel * std::max(std::abs(a), std::abs(b)) + abs_floor;
}

}  // namespace rlcycle::tutil
