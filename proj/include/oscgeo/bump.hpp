#pragma once

#include <memory>

#include "oscgeo/atlas.hpp"

namespace oscgeo {

// Radial cutoff profile in rho = |t|^2: identically 1 for |t| <= c, identically 0
// for |t| >= (1+c)/2, and the smooth transition B(s)/(B(s)+B(1-s)) with
// B(s) = e^{-1/s} in between. All derivatives vanish at both joints.
double bump_profile(double rho, double c);
Jet bump_profile_jet(const Jet& rho, double c);

/// Smooth bump adapted to B_j(x): equals 1 on B_{j-1}(x), vanishes outside the
/// concentric ball of local radius (1+c)/2, jet-evaluable through any chart.
class Bump {
public:
    Bump(std::shared_ptr<const ChartAtlas> atlas, int j, VecD x, double c = 1.0 / 3.0);

    int scale() const { return j_; }
    const VecD& center() const { return x_; }
    double cutoff() const { return c_; }

    double operator()(const VecD& y) const;          // ambient point
    bool positive_at(const VecD& y) const;           // y in the open support
    double local(const VecD& t) const;               // own chart coordinates
    Jet local_jet(const VecD& t, int order) const;

    // The bump seen through the chart of B_{jp}(xp), as a jet at local point t.
    Jet jet_through(int jp, const VecD& xp, const VecD& t, int order) const;

private:
    std::shared_ptr<const ChartAtlas> atlas_;
    int j_;
    VecD x_;
    double c_;
};

}  // namespace oscgeo
