#pragma once

#include <memory>
#include <vector>

#include "oscgeo/field.hpp"
#include "oscgeo/jet.hpp"

namespace oscgeo {

/// A family of balls B_j(x) with chart maps from the Euclidean unit ball
/// and normalized measure weights. Single-parameter scale lattice (j in Z).
class ChartAtlas {
public:
    virtual ~ChartAtlas() = default;

    virtual int ambient_dim() const = 0;
    virtual int ball_dim(const VecD& x) const = 0;
    virtual int scale_cap() const = 0;
    virtual double nesting_radix() const = 0;  // radius ratio between consecutive scales

    virtual bool exists(int j, const VecD& x) const = 0;
    virtual VecD chart(int j, const VecD& x, const VecD& t) const = 0;
    virtual bool in_ball(int j, const VecD& x, const VecD& y) const = 0;
    virtual VecD chart_inverse(int j, const VecD& x, const VecD& y) const = 0;
    virtual bool balls_intersect(int j, const VecD& x, int jp, const VecD& xp) const = 0;
    virtual bool same_leaf(const VecD& x, const VecD& y) const = 0;

    // Jets (in the local variables at t) of the ambient components of the chart.
    virtual std::vector<Jet> chart_jets(int j, const VecD& x, const VecD& t,
                                        int order) const = 0;
    // Jets of Phi_{j,x}^{-1} o Phi_{jp,xp} at local point t of the source chart.
    virtual std::vector<Jet> transition_jets(int j, const VecD& x, int jp, const VecD& xp,
                                             const VecD& t, int order) const = 0;
    // Normalized weight J_{j,x}: integrates to 1 over the unit ball.
    virtual Jet measure_weight(int j, const VecD& x, const VecD& t, int order) const = 0;
};

/// Radial one-parameter atlas on R^d minus the origin: leaves are open rays,
/// B_j(x) = { x e^s : |s| < radix^j }, chart t -> e^{radix^j t} x, and the
/// weight is the polar-coordinates factor r^{d-1} dr renormalized. Radix 3
/// makes engulfing exact; radix 2 exists as a counterexample fixture.
class BnwAtlas : public ChartAtlas {
public:
    explicit BnwAtlas(int d, int cap = 0, double radix = 3.0);

    int ambient_dim() const override { return d_; }
    int ball_dim(const VecD&) const override { return 1; }
    int scale_cap() const override { return cap_; }
    double nesting_radix() const override { return radix_; }

    bool exists(int j, const VecD& x) const override;
    VecD chart(int j, const VecD& x, const VecD& t) const override;
    bool in_ball(int j, const VecD& x, const VecD& y) const override;
    VecD chart_inverse(int j, const VecD& x, const VecD& y) const override;
    bool balls_intersect(int j, const VecD& x, int jp, const VecD& xp) const override;
    bool same_leaf(const VecD& x, const VecD& y) const override;
    std::vector<Jet> chart_jets(int j, const VecD& x, const VecD& t, int order) const override;
    std::vector<Jet> transition_jets(int j, const VecD& x, int jp, const VecD& xp,
                                     const VecD& t, int order) const override;
    Jet measure_weight(int j, const VecD& x, const VecD& t, int order) const override;

    double radius(int j) const;                        // radix^j, log length
    double log_offset(const VecD& x, const VecD& y) const;  // ln(|y|/|x|)

private:
    int d_, cap_;
    double radix_;
};

/// Flat one-parameter Euclidean atlas on R: B_j(x) = (x - radix^j, x + radix^j),
/// chart t -> x + radix^j t, Lebesgue weight 1/2.
class FlatAtlas : public ChartAtlas {
public:
    explicit FlatAtlas(int cap = 8, double radix = 3.0);

    int ambient_dim() const override { return 1; }
    int ball_dim(const VecD&) const override { return 1; }
    int scale_cap() const override { return cap_; }
    double nesting_radix() const override { return radix_; }

    bool exists(int j, const VecD& x) const override;
    VecD chart(int j, const VecD& x, const VecD& t) const override;
    bool in_ball(int j, const VecD& x, const VecD& y) const override;
    VecD chart_inverse(int j, const VecD& x, const VecD& y) const override;
    bool balls_intersect(int j, const VecD& x, int jp, const VecD& xp) const override;
    bool same_leaf(const VecD&, const VecD&) const override { return true; }
    std::vector<Jet> chart_jets(int j, const VecD& x, const VecD& t, int order) const override;
    std::vector<Jet> transition_jets(int j, const VecD& x, int jp, const VecD& xp,
                                     const VecD& t, int order) const override;
    Jet measure_weight(int j, const VecD& x, const VecD& t, int order) const override;

private:
    int cap_;
    double radix_;
};

std::shared_ptr<ChartAtlas> bnw_atlas(int d, int cap = 0);

// f composed with the chart of B_j(x), expanded at local point t.
Jet pullback_jet(const ScalarField& f, const ChartAtlas& atlas, int j, const VecD& x,
                 const VecD& t, int order);

// |d^k_{x0} f|_{B_j(x)}: dk_norm of the pullback at t = Phi^{-1}(x0).
double dk_norm_at(const ScalarField& f, const ChartAtlas& atlas, int j, const VecD& x,
                  const VecD& x0, int k);

}  // namespace oscgeo
