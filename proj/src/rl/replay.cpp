#include "drs/rl/replay.hpp"

#include <numeric>
#include <stdexcept>

namespace drs::rl {

ReplayBuffer::ReplayBuffer(int capacity) : capacity_(capacity) {
  if (capacity < 1) throw std::invalid_argument("ReplayBuffer: capacity < 1");
  storage_.reserve(capacity);
}

void ReplayBuffer::push(PolicyTransition t) {
  if (size() < capacity_) {
    storage_.push_back(std::move(t));
  } else {
    storage_[head_] = std::move(t);
    head_ = (head_ + 1) % capacity_;
  }
}

const PolicyTransition& ReplayBuffer::at(int i) const {
  if (i < 0 || i >= size()) throw std::out_of_range("ReplayBuffer::at");
  return storage_[(head_ + i) % size()];
}

std::vector<const PolicyTransition*> ReplayBuffer::sample(
    int batch_size, std::mt19937_64& rng) const {
  if (batch_size < 1 || batch_size > size())
    throw std::invalid_argument("ReplayBuffer::sample: bad batch size");
  if (static_cast<int>(scratch_.size()) != size()) {
    scratch_.resize(size());
    std::iota(scratch_.begin(), scratch_.end(), 0);
  }
  std::vector<const PolicyTransition*> out(batch_size);
  for (int i = 0; i < batch_size; ++i) {
    std::uniform_int_distribution<int> pick(i, size() - 1);
    std::swap(scratch_[i], scratch_[pick(rng)]);
    out[i] = &storage_[scratch_[i]];
  }
  return out;
}

}  // namespace drs::rl
