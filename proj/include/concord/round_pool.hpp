#pragma once

#include <barrier>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace concord {

/**
 * Fixed set of worker lanes that execute one batch of independent tasks at a
 * time. run() returns only after every lane has finished its share, so
 * consecutive calls are separated by a full barrier.
 *
 * Task i goes to lane i % size(); the calling thread acts as lane 0.
 */
class RoundPool {
 public:
  explicit RoundPool(std::size_t workers);
  ~RoundPool();

  RoundPool(const RoundPool&) = delete;
  RoundPool& operator=(const RoundPool&) = delete;

  std::size_t size() const noexcept { return lanes_; }

  void run(std::size_t count, const std::function<void(std::size_t)>& task);

 private:
  void lane_loop(std::size_t lane);
  void run_share(std::size_t lane);

  std::size_t lanes_;
  std::barrier<> start_;
  std::barrier<> done_;
  const std::function<void(std::size_t)>* task_ = nullptr;
  std::size_t count_ = 0;
  bool stop_ = false;
  std::vector<std::thread> threads_;
};

}  // namespace concord
