#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

namespace oscgeo {

using MultiIndex = std::vector<int>;

inline int mi_order(const MultiIndex& a) {
    int s = 0;
    for (int v : a) s += v;
    return s;
}

// Packs a multiindex into a 64-bit key (each entry < 16, dim <= 8).
std::uint64_t mi_key(const MultiIndex& a);

double factorial(int n);
double binom(int n, int k);
double mi_binom(const MultiIndex& a, const MultiIndex& b);  // prod of per-coordinate binomials
double mi_factorial(const MultiIndex& a);
bool mi_leq(const MultiIndex& a, const MultiIndex& b);      // componentwise a <= b
MultiIndex mi_sub(const MultiIndex& a, const MultiIndex& b);
MultiIndex mi_add(const MultiIndex& a, const MultiIndex& b);

// All multiindices in `dim` variables with |a| <= order, graded lex, with rank lookup.
class MultiIndexSet {
public:
    MultiIndexSet(int dim, int order);

    int size() const { return static_cast<int>(list_.size()); }
    const MultiIndex& at(int i) const { return list_[i]; }
    int rank(const MultiIndex& a) const;  // -1 if not in the set
    int dim() const { return dim_; }
    int order() const { return order_; }

    // Process-wide cache; sets are immutable once built.
    static const MultiIndexSet& get(int dim, int order);

private:
    int dim_, order_;
    std::vector<MultiIndex> list_;
    std::unordered_map<std::uint64_t, int> rank_;
};

}  // namespace oscgeo
