#pragma once

#include <numeric>
#include <vector>

namespace rdcds {

/// Calls fn(idx) for every k-subset of {0..n-1}, idx ascending, in lexicographic order.
template <class Fn>
void for_each_combination(int n, int k, Fn&& fn) {
    if (k < 0 || k > n) return;
    std::vector<int> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    while (true) {
        fn(static_cast<const std::vector<int>&>(idx));
        int i = k - 1;
        while (i >= 0 && idx[i] == n - k + i) --i;
        if (i < 0) return;
        ++idx[i];
        for (int j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

/// k-subsets of `items`.
template <class Fn>
void for_each_subset(const std::vector<int>& items, int k, Fn&& fn) {
    std::vector<int> pick(k > 0 ? k : 0);
    for_each_combination(static_cast<int>(items.size()), k, [&](const std::vector<int>& idx) {
        for (int j = 0; j < k; ++j) pick[j] = items[idx[j]];
        fn(static_cast<const std::vector<int>&>(pick));
    });
}

inline long long binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    long long r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace rdcds
