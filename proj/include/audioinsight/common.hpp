// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace audioinsight {

// Thrown for invalid inputs, malformed files and contract violations.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline uint64_t splitmix64(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derive an independent stream seed from a master seed. Used everywhere a
// sub-task (clip, fold, repeat, tree) needs its own deterministic RNG so
// results do not depend on scheduling order.
inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
    uint64_t state = seed ^ (0xd1b54a32d192ed03ULL * (stream + 1));
    return splitmix64(state);
}

inline uint64_t mix_seed(uint64_t seed, uint64_t a, uint64_t b) {
    return mix_seed(mix_seed(seed, a), b);
}

// FNV-1a, used for stable segment/clip identifiers.
inline uint64_t fnv1a(const std::string& s, uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Which samples a fitted artifact (feature layout, standardizer) was trained
// on. Test-time code audits these against held-out sample ids.
struct FitProvenance {
    std::string tag;                  // protocol/repeat/fold identifier
    std::vector<uint64_t> fit_uids;   // sorted segment uids used for fitting

    bool contains(uint64_t uid) const {
        return std::binary_search(fit_uids.begin(), fit_uids.end(), uid);
    }
};

// Runs fn(i) for i in [0, n) on up to `jobs` threads. jobs <= 1 runs inline.
// The first exception thrown by any task is rethrown on the caller thread.
inline void parallel_for(size_t n, unsigned jobs, const std::function<void(size_t)>& fn) {
    if (n == 0) return;
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<size_t>(jobs, n));
    if (jobs <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr eptr;
    std::mutex eptr_mu;
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (unsigned t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= n || failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(eptr_mu);
                    if (!eptr) eptr = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (eptr) std::rethrow_exception(eptr);
}

}  // namespace audioinsight
