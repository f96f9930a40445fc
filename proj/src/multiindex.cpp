#include "oscgeo/multiindex.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace oscgeo {

std::uint64_t mi_key(const MultiIndex& a) {
    std::uint64_t k = 0;
    for (int v : a) k = (k << 4) | static_cast<std::uint64_t>(v & 0xf);
    return (k << 4) | static_cast<std::uint64_t>(a.size());
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
    return r;
}

double mi_binom(const MultiIndex& a, const MultiIndex& b) {
    double r = 1.0;
    for (std::size_t i = 0; i < a.size(); ++i) r *= binom(a[i], b[i]);
    return r;
}

double mi_factorial(const MultiIndex& a) {
    double r = 1.0;
    for (int v : a) r *= factorial(v);
    return r;
}

bool mi_leq(const MultiIndex& a, const MultiIndex& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

MultiIndex mi_sub(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

MultiIndex mi_add(const MultiIndex& a, const MultiIndex& b) {
    MultiIndex r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

namespace {
void enumerate(int dim, int total, MultiIndex& cur, int pos, std::vector<MultiIndex>& out) {
    if (pos == dim - 1) {
        cur[pos] = total;
        out.push_back(cur);
        return;
    }
    for (int v = total; v >= 0; --v) {
        cur[pos] = v;
        enumerate(dim, total - v, cur, pos + 1, out);
    }
}
}  // namespace

MultiIndexSet::MultiIndexSet(int dim, int order) : dim_(dim), order_(order) {
    if (dim < 1 || dim > 8 || order < 0 || order > 12)
        throw std::invalid_argument("MultiIndexSet: dim/order out of supported range");
    MultiIndex cur(dim, 0);
    for (int total = 0; total <= order; ++total) enumerate(dim, total, cur, 0, list_);
    for (int i = 0; i < size(); ++i) rank_.emplace(mi_key(list_[i]), i);
}

int MultiIndexSet::rank(const MultiIndex& a) const {
    auto it = rank_.find(mi_key(a));
    return it == rank_.end() ? -1 : it->second;
}

const MultiIndexSet& MultiIndexSet::get(int dim, int order) {
    static std::mutex mu;
    static std::map<std::pair<int, int>, MultiIndexSet> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({dim, order});
    if (it == cache.end())
        it = cache.emplace(std::make_pair(dim, order), MultiIndexSet(dim, order)).first;
    return it->second;
}

}  // namespace oscgeo
