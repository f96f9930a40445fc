#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <vector>

#include <json.hpp>

#include "oscgeo/bump.hpp"

namespace oscgeo {

struct PartitionHypothesisError : std::runtime_error {
    PartitionHypothesisError(VecD a, VecD b, int ra, int rb)
        : std::runtime_error("scale assignment jumps by >= N across intersecting balls"),
          x(std::move(a)), xp(std::move(b)), rx(ra), rxp(rb) {}
    VecD x, xp;
    int rx, rxp;
};

/// Partition of unity subordinate to the balls B_{R(x_k)}(x_k): greedy maximal
/// centers per scale, cells assembled from the bumps by the subset formula
/// (per-scale subset sums times the product of (1 - eta) over higher scales).
class Partition {
public:
    struct Cell {
        VecD center;
        int scale;
    };

    const std::vector<Cell>& cells() const { return cells_; }
    const Bump& bump(std::size_t k) const { return bumps_[k]; }

    double value(std::size_t k, const VecD& y) const;
    double sum(const VecD& y) const;
    int overlap_count(const VecD& y) const;

    // The cell function seen through the chart of B_{jq}(xq), as a jet at t.
    Jet jet(std::size_t k, int jq, const VecD& xq, const VecD& t, int order) const;

    nlohmann::json json() const;

private:
    friend Partition build_partition(std::shared_ptr<const ChartAtlas>,
                                     const std::function<int(const VecD&)>&,
                                     const std::vector<VecD>&, int);
    std::shared_ptr<const ChartAtlas> atlas_;
    std::vector<Cell> cells_;
    std::vector<Bump> bumps_;
};

// R assigns a scale to every region sample; N is the Lipschitz bound required
// of R across intersecting balls (validated first, with a witness pair thrown
// on failure).
Partition build_partition(std::shared_ptr<const ChartAtlas> atlas,
                          const std::function<int(const VecD&)>& R,
                          const std::vector<VecD>& region, int N);

}  // namespace oscgeo
