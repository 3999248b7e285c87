#ifndef QFORMS_PARALLEL_HPP
#define QFORMS_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qforms {

/*
 * out[i] = fn(i) for i in [0, count), spread over `threads` workers.
 * Results are stored by index, so callers reduce in a fixed order no
 * matter how the work was scheduled. The first exception is rethrown.
 */
template <typename Fn>
auto parallel_map(std::size_t count, unsigned threads, Fn && fn)
    -> std::vector<decltype(fn(std::size_t{}))>
{
    using R = decltype(fn(std::size_t{}));
    std::vector<R> out(count);
    if (threads <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i)
            out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_lock;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= count)
                return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard lk(error_lock);
                if (!error)
                    error = std::current_exception();
                next = count;
            }
        }
    };
    std::vector<std::thread> pool;
    unsigned const n = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    for (unsigned t = 0; t < n; ++t)
        pool.emplace_back(worker);
    for (auto & th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
    return out;
}

/* Neumaier summation. */
class compensated_sum
{
  public:
    void add(double x)
    {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

} // namespace qforms

#endif
