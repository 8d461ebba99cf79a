#include "concord/round_pool.hpp"

#include <algorithm>

namespace concord {

RoundPool::RoundPool(std::size_t workers)
    : lanes_(std::max<std::size_t>(workers, 1)),
      start_(static_cast<std::ptrdiff_t>(lanes_)),
      done_(static_cast<std::ptrdiff_t>(lanes_)) {
  threads_.reserve(lanes_ - 1);
  for (std::size_t lane = 1; lane < lanes_; ++lane) threads_.emplace_back([this, lane] { lane_loop(lane); });
}

RoundPool::~RoundPool() {
  if (threads_.empty()) return;
  stop_ = true;
  start_.arrive_and_wait();
  for (auto& t : threads_) t.join();
}

void RoundPool::run(std::size_t count, const std::function<void(std::size_t)>& task) {
  if (lanes_ == 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  task_ = &task;
  count_ = count;
  start_.arrive_and_wait();
  run_share(0);
  done_.arrive_and_wait();
  task_ = nullptr;
}

void RoundPool::run_share(std::size_t lane) {
  for (std::size_t i = lane; i < count_; i += lanes_) (*task_)(i);
}

void RoundPool::lane_loop(std::size_t lane) {
  for (;;) {
    start_.arrive_and_wait();
    if (stop_) return;
    run_share(lane);
    done_.arrive_and_wait();
  }
}

}  // namespace concord
