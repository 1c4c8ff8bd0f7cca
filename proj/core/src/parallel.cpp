#include "mcfob/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <condition_variable>
#include <cstdlib>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace mcfob {
namespace {

std::size_t default_workers() {
  if (const char* env = std::getenv("MCFOB_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value > 0) return static_cast<std::size_t>(value);
    } catch (const std::exception&) {
      // fall through to hardware concurrency
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Persistent pool: one job at a time, chunk k handled by worker k (chunk 0 by
// the caller).
class Pool {
 public:
  explicit Pool(std::size_t workers) {
    for (std::size_t k = 1; k < workers; ++k) {
      threads_.emplace_back([this, k] { loop(k); });
    }
  }

  ~Pool() {
    {
      std::lock_guard lock(mutex_);
      stop_ = true;
      ++generation_;
    }
    wake_.notify_all();
    for (auto& t : threads_) t.join();
  }

  std::size_t size() const { return threads_.size() + 1; }

  void run(std::size_t count,
           const std::function<void(std::size_t, std::size_t)>& body) {
    const std::size_t chunks = std::min(size(), count);
    {
      std::lock_guard lock(mutex_);
      body_ = &body;
      count_ = count;
      chunks_ = chunks;
      pending_ = chunks - 1;
      ++generation_;
    }
    wake_.notify_all();
    run_chunk(0);
    std::unique_lock lock(mutex_);
    done_.wait(lock, [this] { return pending_ == 0; });
    body_ = nullptr;
  }

 private:
  void run_chunk(std::size_t k) {
    const std::size_t begin = count_ * k / chunks_;
    const std::size_t end = count_ * (k + 1) / chunks_;
    if (begin < end) (*body_)(begin, end);
  }

  void loop(std::size_t k) {
    std::size_t seen = 0;
    for (;;) {
      std::unique_lock lock(mutex_);
      wake_.wait(lock, [&] { return generation_ != seen; });
      seen = generation_;
      if (stop_) return;
      if (k >= chunks_) continue;
      lock.unlock();
      run_chunk(k);
      lock.lock();
      if (--pending_ == 0) done_.notify_one();
    }
  }

  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable wake_;
  std::condition_variable done_;
  const std::function<void(std::size_t, std::size_t)>* body_ = nullptr;
  std::size_t count_ = 0;
  std::size_t chunks_ = 1;
  std::size_t pending_ = 0;
  std::size_t generation_ = 0;
  bool stop_ = false;
};

std::mutex g_pool_mutex;
std::size_t g_requested = 0;
std::unique_ptr<Pool> g_pool;

Pool& pool() {
  if (!g_pool) {
    g_pool = std::make_unique<Pool>(g_requested ? g_requested : default_workers());
  }
  return *g_pool;
}

}  // namespace

std::size_t worker_count() {
  std::lock_guard lock(g_pool_mutex);
  return pool().size();
}

void set_worker_count(std::size_t workers) {
  std::lock_guard lock(g_pool_mutex);
  g_requested = workers;
  g_pool.reset();
}

void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body) {
  if (count == 0) return;
  std::lock_guard lock(g_pool_mutex);
  Pool& p = pool();
  if (p.size() == 1 || count == 1) {
    body(0, count);
    return;
  }
  p.run(count, body);
}

}  // namespace mcfob
