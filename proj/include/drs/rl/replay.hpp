#pragma once

#include <random>
#include <vector>

namespace drs::rl {

/// One policy-buffer entry. The action is the raw network output in
/// [-1, 1]^d; environment-side projection happens at the boundary.
struct PolicyTransition {
  std::vector<double> s;
  std::vector<double> a;
  std::vector<double> s_next;
  double r_total = 0.0;
  bool done = false;
};

/// Fixed-capacity FIFO ring. sample() draws uniformly without replacement
/// inside a batch; returned pointers stay valid until the next push.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(int capacity);

  void push(PolicyTransition t);
  int size() const { return static_cast<int>(storage_.size()); }
  int capacity() const { return capacity_; }

  // i-th oldest element
  const PolicyTransition& at(int i) const;

  // throws std::invalid_argument when batch_size > size
  std::vector<const PolicyTransition*> sample(int batch_size,
                                              std::mt19937_64& rng) const;

 private:
  int capacity_;
  int head_ = 0;  // index of the oldest element once full
  std::vector<PolicyTransition> storage_;
  mutable std::vector<int> scratch_;  // partial Fisher-Yates workspace
};

}  // namespace drs::rl
