#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rlcycle/rl/experience.hpp"
#include "rlcycle/rl/train_batch.hpp"

namespace rlcycle::ddpg {

// Fixed-capacity FIFO ring of transitions with uniform sampling.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void add(rl::Experience e);
  void add(std::span<const rl::Experience> experiences);

  std::size_t size() const { return storage_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t total_added() const { return total_added_; }

  // i-th surviving experience, oldest first.
  const rl::Experience& at(std::size_t i) const;

  // n rows drawn uniformly with replacement. Throws ContractError if size() < n.
  rl::TrainBatch sample(std::size_t n, std::mt19937_64& rng) const;

 private:
  std::size_t capacity_;
  std::vector<rl::Experience> storage_;
  std::size_t head_ = 0;  // slot of the oldest experience once full
  std::uint64_t total_added_ = 0;
};

}  // namespace rlcycle::ddpg
