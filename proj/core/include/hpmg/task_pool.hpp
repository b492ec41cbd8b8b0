#pragma once

/// \file task_pool.hpp
/// Fixed set of executor threads draining a FIFO queue. With zero executors
/// submitted tasks run inline on the caller.

#include <condition_variable>
#include <deque>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace hpmg {

class TaskPool {
public:
  explicit TaskPool(int executors);
  ~TaskPool();

  TaskPool(const TaskPool&) = delete;
  TaskPool& operator=(const TaskPool&) = delete;

  int executors() const { return static_cast<int>(threads_.size()); }
  void submit(std::function<void()> task);

private:
  void run();

  std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> queue_;
  bool stop_ = false;
  std::vector<std::thread> threads_;
};

} // namespace hpmg
