#pragma once

#include <span>
#include <vector>

namespace rlcycle::master {

// Centred moving average. Near the ends the window shrinks symmetrically so it
// stays centred. `window` must be odd and >= 1.
std::vector<double> moving_average(std::span<const double> xs, int window);

}  // namespace rlcycle::master
