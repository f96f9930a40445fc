#include "oscgeo/partition.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace oscgeo {

namespace {

// Shared combination logic over double or Jet scalars. `active` pairs each
// active cell index with its bump value at the query point; the cell formula is
//   [ sum over subsets M of the same-scale actives with k in M of
//     (1/#M) prod_{M} eta prod_{same scale \ M} (1 - eta) ]
//   * prod_{higher scales} (1 - eta).
template <typename T>
T combine(const std::vector<Partition::Cell>& cells,
          const std::vector<std::pair<std::size_t, T>>& active, std::size_t k, const T& one) {
    int jk = cells[k].scale;
    std::vector<const T*> same;
    int pos_k = -1;
    T tail = one;
    bool k_active = false;
    for (const auto& [idx, v] : active) {
        if (idx == k) k_active = true;
        int j = cells[idx].scale;
        if (j == jk) {
            if (idx == k) pos_k = static_cast<int>(same.size());
            same.push_back(&v);
        } else if (j > jk) {
            tail = tail * (one - v);
        }
    }
    if (!k_active) return one - one;

    T acc = one - one;
    std::size_t n = same.size();
    for (std::size_t mask = 0; mask < (std::size_t(1) << n); ++mask) {
        if (!(mask >> pos_k & 1)) continue;
        T term = one;
        int card = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask >> i & 1) {
                term = term * (*same[i]);
                ++card;
            } else {
                term = term * (one - *same[i]);
            }
        }
        acc += term * (1.0 / card);
    }
    return acc * tail;
}

}  // namespace

double Partition::value(std::size_t k, const VecD& y) const {
    std::vector<std::pair<std::size_t, double>> active;
    for (std::size_t i = 0; i < bumps_.size(); ++i) {
        double v = bumps_[i](y);
        if (bumps_[i].positive_at(y)) active.emplace_back(i, v);
    }
    return combine(cells_, active, k, 1.0);
}

double Partition::sum(const VecD& y) const {
    double s = 0;
    for (std::size_t k = 0; k < cells_.size(); ++k) s += value(k, y);
    return s;
}

int Partition::overlap_count(const VecD& y) const {
    int n = 0;
    for (std::size_t k = 0; k < cells_.size(); ++k)
        if (value(k, y) > 1e-14) ++n;
    return n;
}

Jet Partition::jet(std::size_t k, int jq, const VecD& xq, const VecD& t, int order) const {
    VecD y = atlas_->chart(jq, xq, t);
    std::vector<std::pair<std::size_t, Jet>> active;
    for (std::size_t i = 0; i < bumps_.size(); ++i)
        if (bumps_[i].positive_at(y))
            active.emplace_back(i, bumps_[i].jet_through(jq, xq, t, order));
    int bd = atlas_->ball_dim(xq);
    Jet one = Jet::constant(bd, order, 1.0);
    return combine(cells_, active, k, one);
}

nlohmann::json Partition::json() const {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : cells_)
        cells.push_back({{"center", nlohmann::json(c.center)}, {"scale", c.scale}});
    return {{"cells", cells}};
}

Partition build_partition(std::shared_ptr<const ChartAtlas> atlas,
                          const std::function<int(const VecD&)>& R,
                          const std::vector<VecD>& region, int N) {
    std::vector<std::pair<VecD, int>> samples;
    samples.reserve(region.size());
    for (const auto& y : region) samples.emplace_back(y, R(y));

    for (std::size_t a = 0; a < samples.size(); ++a)
        for (std::size_t b = a + 1; b < samples.size(); ++b) {
            const auto& [xa, ra] = samples[a];
            const auto& [xb, rb] = samples[b];
            if (std::abs(ra - rb) >= N && atlas->balls_intersect(ra, xa, rb, xb))
                throw PartitionHypothesisError(xa, xb, ra, rb);
        }

    std::sort(samples.begin(), samples.end());

    Partition part;
    part.atlas_ = atlas;
    std::map<int, std::vector<VecD>> by_scale;
    for (const auto& [y, j] : samples) by_scale[j].push_back(y);
    for (const auto& [j, pts] : by_scale) {
        std::vector<VecD> picked;
        for (const auto& y : pts) {
            if (!atlas->exists(j, y) || !atlas->exists(j - 2, y)) continue;
            bool clear = true;
            for (const auto& z : picked)
                if (atlas->balls_intersect(j - 2, z, j - 2, y)) {
                    clear = false;
                    break;
                }
            if (clear) picked.push_back(y);
        }
        for (auto& z : picked) {
            part.bumps_.emplace_back(atlas, j, z);
            part.cells_.push_back({std::move(z), j});
        }
    }
    return part;
}

}  // namespace oscgeo
