#ifndef ULSPH_CORE_HPP
#define ULSPH_CORE_HPP

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

namespace ulsph {

using Real = double;

template <int D>
using Vec = Eigen::Matrix<Real, D, 1>;
template <int D>
using Mat = Eigen::Matrix<Real, D, D>;

inline constexpr Real pi = 3.14159265358979323846;

/// Chunked index-space parallelism. Each index is processed exactly once and
/// writes only its own slot, so results do not depend on the thread count.
template <typename Fn>
void parallel_for(std::size_t n, int n_threads, Fn &&fn)
{
    if (n_threads <= 1 || n < 2 * static_cast<std::size_t>(n_threads))
    {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    std::size_t chunk = (n + n_threads - 1) / n_threads;
    for (int t = 0; t < n_threads; ++t)
    {
        std::size_t begin = t * chunk;
        std::size_t end = std::min(n, begin + chunk);
        if (begin >= end)
            break;
        workers.emplace_back([begin, end, &fn] {
            for (std::size_t i = begin; i < end; ++i)
                fn(i);
        });
    }
    for (auto &w : workers)
        w.join();
}

} // namespace ulsph

#endif
