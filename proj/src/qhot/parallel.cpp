#include "qhot/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

namespace qhot {

int worker_count() {
  if (const char* env = std::getenv("QHOT_WORKERS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v < 1)
      throw std::runtime_error("QHOT_WORKERS must be a positive integer");
    return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::size_t chunk_count(std::int64_t n, std::int64_t chunk_size) {
  if (n <= 0) return 0;
  return static_cast<std::size_t>((n + chunk_size - 1) / chunk_size);
}

void parallel_chunks(std::int64_t n, std::int64_t chunk_size,
                     const std::function<void(std::int64_t, std::int64_t,
                                              std::size_t)>& fn) {
  if (n <= 0) return;
  if (chunk_size <= 0) throw std::invalid_argument("chunk_size must be > 0");
  const std::size_t n_chunks = chunk_count(n, chunk_size);
  const int workers =
      static_cast<int>(std::min<std::size_t>(worker_count(), n_chunks));

  auto run_chunk = [&](std::size_t c) {
    const std::int64_t begin = static_cast<std::int64_t>(c) * chunk_size;
    const std::int64_t end = std::min(n, begin + chunk_size);
    fn(begin, end, c);
  };

  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= n_chunks) return;
      try {
        run_chunk(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(static_cast<std::size_t>(workers));
  for (int i = 0; i < workers; ++i) threads.emplace_back(worker);
  for (auto& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qhot
