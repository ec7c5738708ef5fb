#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace crspectra {

/// Worker cap: CR_SPECTRA_THREADS if set (clamped to >= 1), otherwise
/// std::thread::hardware_concurrency().
int worker_count();

namespace detail {
/// Set inside pool workers so nested chunked_reduce calls run inline instead
/// of oversubscribing.
extern thread_local bool tls_in_worker;
}  // namespace detail

/// Splits [0, count) into fixed-size chunks, evaluates `work(begin, end)` for
/// each chunk on a worker pool, and feeds the partial results to `combine` in
/// chunk order. The chunk grid does not depend on the worker count, so the
/// reduction order (and hence every floating-point result) is identical for
/// any CR_SPECTRA_THREADS setting.
template <class Partial, class Work, class Combine>
void chunked_reduce(std::size_t count, std::size_t chunk_size, Work&& work, Combine&& combine) {
  if (count == 0) return;
  if (chunk_size == 0) chunk_size = 1;
  const std::size_t num_chunks = (count + chunk_size - 1) / chunk_size;

  const int workers = detail::tls_in_worker ? 1 : worker_count();
  if (workers <= 1 || num_chunks == 1) {
    for (std::size_t c = 0; c < num_chunks; ++c) {
      const std::size_t begin = c * chunk_size;
      const std::size_t end = std::min(count, begin + chunk_size);
      combine(work(begin, end));
    }
    return;
  }

  std::vector<Partial> partials(num_chunks);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    detail::tls_in_worker = true;
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) break;
      const std::size_t c = next.fetch_add(1);
      if (c >= num_chunks) break;
      const std::size_t begin = c * chunk_size;
      const std::size_t end = std::min(count, begin + chunk_size);
      try {
        partials[c] = work(begin, end);
      } catch (...) {
        std::scoped_lock lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        break;
      }
    }
  };
  std::vector<std::thread> pool;
  const std::size_t spawn = std::min<std::size_t>(static_cast<std::size_t>(workers), num_chunks);
  pool.reserve(spawn);
  for (std::size_t i = 0; i < spawn; ++i) pool.emplace_back(run);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
  for (auto& p : partials) combine(std::move(p));
}

/// Neumaier-compensated accumulator; used wherever sums must not lose
/// low-order bits (quadrature, polynomial evaluation).
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace crspectra
