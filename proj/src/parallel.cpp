#include "genrbf/parallel.hpp"

namespace genrbf {

namespace {
std::atomic<int> g_thread_count{0};
}

void set_thread_count(int n) { g_thread_count.store(n < 0 ? 0 : n); }

int thread_count() {
    int n = g_thread_count.load();
    if (n == 0) {
        unsigned hw = std::thread::hardware_concurrency();
        n = hw == 0 ? 1 : static_cast<int>(hw);
    }
    return n;
}

}  // namespace genrbf
