#pragma once

#include <cstddef>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wsd::par {

inline int hardware_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

// 0 means "use all hardware threads"; anything else is clamped to >= 1.
inline int resolve(int requested) {
    if (requested == 0) return hardware_threads();
    return requested < 1 ? 1 : requested;
}

// Static-schedule index loop. Bodies must be independent per index; every
// kernel in this project writes to per-index slots, so results do not
// depend on the thread count.
template <class F>
void for_each_index(std::size_t n, int threads, F&& body) {
    threads = resolve(threads);
#ifdef _OPENMP
    if (threads > 1) {
#pragma omp parallel for schedule(static) num_threads(threads)
        for (long long i = 0; i < static_cast<long long>(n); ++i) {
            body(static_cast<std::size_t>(i));
        }
        return;
    }
#endif
    for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace wsd::par
