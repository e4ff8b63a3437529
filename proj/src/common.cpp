#include "frontforge/common.hpp"

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <mutex>
#include <set>
#include <thread>

namespace frontforge {

namespace {

std::mutex g_warn_mutex;
WarningSink g_sink;
std::set<std::string> g_seen;
unsigned g_workers = 0;

}  // namespace

void set_warning_sink(WarningSink sink)
{
    std::lock_guard lock(g_warn_mutex);
    g_sink = std::move(sink);
    g_seen.clear();
}

void warn(const std::string& module, const std::string& message)
{
    std::lock_guard lock(g_warn_mutex);
    const std::string text = module + ": warning: " + message;
    if (!g_seen.insert(text).second)
        return;
    if (g_sink)
        g_sink(text);
    else
        std::cerr << text << '\n';
}

unsigned worker_count()
{
    if (g_workers > 0)
        return g_workers;
    if (const char* env = std::getenv("FRONTFORGE_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0)
            return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

void set_worker_count(unsigned workers) { g_workers = workers; }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body)
{
    const unsigned workers = std::min<std::size_t>(worker_count(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count)
                    return;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                    next = count;
                }
            }
        });
    }
    for (auto& t : pool)
        t.join();
    if (failure)
        std::rethrow_exception(failure);
}

double wall_seconds()
{
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

}  // namespace frontforge
