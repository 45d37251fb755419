#pragma once

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <iterator>
#include <tuple>
#include <vector>

// Reference model for differential testing: a set is its strictly
// ascending, duplicate-free element sequence.  Deliberately plain -- no
// balancing, no bit tricks -- so that it stays auditable.

namespace setforge::oracle {

template <typename T>
using model = std::vector<T>;  // sorted, duplicate-free

template <typename T>
bool is_model(const model<T>& m) {
    for (std::size_t i = 1; i < m.size(); ++i) {
        if (!(m[i - 1] < m[i])) return false;
    }
    return true;
}

template <typename T>
model<T> from_values(std::vector<T> xs) {
    std::sort(xs.begin(), xs.end());
    xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
    return xs;
}

template <typename T>
bool member(const model<T>& m, const T& x) {
    return std::binary_search(m.begin(), m.end(), x);
}

template <typename T>
model<T> insert(model<T> m, const T& x) {
    auto it = std::lower_bound(m.begin(), m.end(), x);
    if (it == m.end() || x < *it) m.insert(it, x);
    return m;
}

template <typename T>
model<T> erase(model<T> m, const T& x) {
    auto it = std::lower_bound(m.begin(), m.end(), x);
    if (it != m.end() && !(x < *it)) m.erase(it);
    return m;
}

template <typename T>
model<T> set_union(const model<T>& a, const model<T>& b) {
    model<T> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

template <typename T>
model<T> set_intersection(const model<T>& a, const model<T>& b) {
    model<T> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

template <typename T>
model<T> set_difference(const model<T>& a, const model<T>& b) {
    model<T> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

template <typename T, typename Pred>
model<T> filter(const model<T>& m, Pred&& p) {
    model<T> out;
    std::copy_if(m.begin(), m.end(), std::back_inserter(out), p);
    return out;
}

// Elements below x, whether x was present, elements above x.
template <typename T>
std::tuple<model<T>, bool, model<T>> split(const model<T>& m, const T& x) {
    auto lo = std::lower_bound(m.begin(), m.end(), x);
    auto hi = std::upper_bound(m.begin(), m.end(), x);
    return {model<T>(m.begin(), lo), lo != hi, model<T>(hi, m.end())};
}

template <typename T>
std::size_t size(const model<T>& m) {
    return m.size();
}

template <typename T>
bool is_subset(const model<T>& a, const model<T>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

template <typename T>
bool equal(const model<T>& a, const model<T>& b) {
    return a == b;
}

// All 2^n subsets of {0..n-1}, each exactly once.  Pre: n <= 16.
inline std::vector<model<std::uint64_t>> enumerate_universe(int n) {
    assert(n >= 0 && n <= 16 && "enumerate_universe: universe too large");
    std::vector<model<std::uint64_t>> out;
    out.reserve(std::size_t{1} << n);
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << n); ++bits) {
        model<std::uint64_t> m;
        for (int j = 0; j < n; ++j) {
            if (bits & (std::uint64_t{1} << j)) m.push_back(static_cast<std::uint64_t>(j));
        }
        out.push_back(std::move(m));
    }
    return out;
}

}  // namespace setforge::oracle
