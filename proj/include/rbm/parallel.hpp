// Copyright the rbm authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef RBM_PARALLEL_HPP
#define RBM_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rbm
{

// Worker count: RBM_NUM_THREADS when set, otherwise the hardware concurrency.
inline unsigned worker_count()
{
  if (const char *env = std::getenv("RBM_NUM_THREADS"))
  {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1)
      return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Runs body(i) for i in [0, count). Each index is visited exactly once, so
// bodies writing only to slot i give results independent of the schedule.
// The first exception thrown by any body is rethrown.
template <typename Body>
void parallel_for(std::size_t count, Body &&body)
{
  const unsigned workers = std::min<std::size_t>(worker_count(), std::max<std::size_t>(count, 1));
  if (workers <= 1)
  {
    for (std::size_t i = 0; i < count; ++i)
      body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
  {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++)
      {
        try
        {
          body(i);
        }
        catch (...)
        {
          std::lock_guard lock(failure_mutex);
          if (!failure)
            failure = std::current_exception();
        }
      }
    });
  }
  pool.clear();
  if (failure)
    std::rethrow_exception(failure);
}

}  // namespace rbm

#endif  // RBM_PARALLEL_HPP
