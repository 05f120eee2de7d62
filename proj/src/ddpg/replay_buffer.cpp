#include "rlcycle/ddpg/replay_buffer.hpp"

#include <string>

#include "rlcycle/errors.hpp"

namespace rlcycle::ddpg {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw DomainError("replay capacity must be > 0");
  storage_.reserve(capacity_);
}

void ReplayBuffer::add(rl::Experience e) {
  if (storage_.size() < capacity_) {
    storage_.push_back(std::move(e));
  } else {
    storage_[head_] = std::move(e);
    head_ = (head_ + 1) % capacity_;
  }
  ++total_added_;
}

void ReplayBuffer::add(std::span<const rl::Experience> experiences) {
  for (const auto& e : experiences) add(e);
}

const rl::Experience& ReplayBuffer::at(std::size_t i) const {
  if (i >= storage_.size()) throw ContractError("replay index out of range");
  return storage_[(head_ + i) % storage_.size()];
}

rl::TrainBatch ReplayBuffer::sample(std::size_t n, std::mt19937_64& rng) const {
  if (n == 0) throw ContractError("sample size must be > 0");
  if (storage_.size() < n) {
    throw ContractError("cannot sample " + std::to_string(n) + " rows from a buffer of " +
                        std::to_string(storage_.size()));
  }
  std::uniform_int_distribution<std::size_t> pick(0, storage_.size() - 1);
  const auto& proto = storage_.front();
  rl::TrainBatch batch;
  batch.algorithm = rl::Algorithm::kDdpg;
  batch.obs = nn::Matrix(n, proto.obs.size());
  batch.actions = nn::Matrix(n, proto.action.size());
  batch.next_obs = nn::Matrix(n, proto.next_obs.size());
  batch.rewards.resize(n);
  batch.dones.resize(n);
  for (std::size_t r = 0; r < n; ++r) {
    const auto& e = storage_[pick(rng)];
    std::copy(e.obs.begin(), e.obs.end(), batch.obs.row(r).begin());
    std::copy(e.action.begin(), e.action.end(), batch.actions.row(r).begin());
    std::copy(e.next_obs.begin(), e.next_obs.end(), batch.next_obs.row(r).begin());
    batch.rewards[r] = e.reward;
    batch.dones[r] = e.done ? 1 : 0;
  }
  return batch;
}

}  // namespace rlcycle::ddpg
