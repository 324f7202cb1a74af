#ifndef GENRBF_PARALLEL_HPP_
#define GENRBF_PARALLEL_HPP_

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace genrbf {

/// Process-wide worker bound; 0 means hardware concurrency.
void set_thread_count(int n);
int thread_count();

/// Runs fn(i) for i in [0, count). Each index is independent, so the
/// result cannot depend on the schedule. The first exception thrown by
/// any worker is rethrown on the caller.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn) {
    int workers = thread_count();
    if (workers <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    workers = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(workers), count));
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (int t = 0; t < workers; ++t) threads.emplace_back(work);
    for (auto& t : threads) t.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace genrbf

#endif  // GENRBF_PARALLEL_HPP_
