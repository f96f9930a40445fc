#include "oscgeo/atlas.hpp"

#include <cmath>
#include <stdexcept>

namespace oscgeo {

namespace {

double norm2(const VecD& x) {
    double s = 0;
    for (double xi : x) s += xi * xi;
    return std::sqrt(s);
}

}  // namespace

BnwAtlas::BnwAtlas(int d, int cap, double radix) : d_(d), cap_(cap), radix_(radix) {
    if (d < 1) throw std::invalid_argument("BnwAtlas: d must be >= 1");
    if (radix <= 1.0) throw std::invalid_argument("BnwAtlas: radix must exceed 1");
}

double BnwAtlas::radius(int j) const { return std::pow(radix_, j); }

double BnwAtlas::log_offset(const VecD& x, const VecD& y) const {
    return std::log(norm2(y) / norm2(x));
}

bool BnwAtlas::exists(int j, const VecD& x) const {
    return j <= cap_ && norm2(x) > 0.0;
}

VecD BnwAtlas::chart(int j, const VecD& x, const VecD& t) const {
    double f = std::exp(radius(j) * t[0]);
    VecD y = x;
    for (auto& yi : y) yi *= f;
    return y;
}

bool BnwAtlas::same_leaf(const VecD& x, const VecD& y) const {
    double nx = norm2(x), ny = norm2(y);
    if (nx == 0.0 || ny == 0.0) return false;
    double dot = 0;
    for (int i = 0; i < d_; ++i) dot += x[i] * y[i];
    return dot > 0 && std::abs(dot - nx * ny) <= 1e-9 * nx * ny;
}

bool BnwAtlas::in_ball(int j, const VecD& x, const VecD& y) const {
    if (!same_leaf(x, y)) return false;
    return std::abs(log_offset(x, y)) < radius(j);
}

VecD BnwAtlas::chart_inverse(int j, const VecD& x, const VecD& y) const {
    if (!same_leaf(x, y)) throw std::domain_error("chart_inverse: point off the leaf");
    return {log_offset(x, y) / radius(j)};
}

bool BnwAtlas::balls_intersect(int j, const VecD& x, int jp, const VecD& xp) const {
    if (!same_leaf(x, xp)) return false;
    return std::abs(log_offset(x, xp)) < radius(j) + radius(jp);
}

std::vector<Jet> BnwAtlas::chart_jets(int j, const VecD& x, const VecD& t, int order) const {
    Jet tv = Jet::variable(1, order, 0, t[0]);
    Jet f = jet_exp(tv * radius(j));
    std::vector<Jet> out;
    out.reserve(d_);
    for (int i = 0; i < d_; ++i) out.push_back(f * x[i]);
    return out;
}

std::vector<Jet> BnwAtlas::transition_jets(int j, const VecD& x, int jp, const VecD& xp,
                                           const VecD& t, int order) const {
    // Phi_{j,x}^{-1} o Phi_{jp,xp} in log coordinates is affine:
    // t -> (radix^{jp} t + ln(|xp|/|x|)) / radix^j
    Jet tv = Jet::variable(1, order, 0, t[0]);
    Jet out = (tv * radius(jp) + log_offset(x, xp)) / radius(j);
    return {out};
}

Jet BnwAtlas::measure_weight(int j, const VecD& x, const VecD& t, int order) const {
    (void)x;
    // polar factor r^{d-1} dr with r = |x| e^{a t}, a = radix^j, renormalized on (-1,1):
    // J(t) = b e^{b t} / (2 sinh b), b = d a.
    double b = d_ * radius(j);
    Jet tv = Jet::variable(1, order, 0, t[0]);
    return jet_exp(tv * b) * (b / (2.0 * std::sinh(b)));
}

FlatAtlas::FlatAtlas(int cap, double radix) : cap_(cap), radix_(radix) {
    if (radix <= 1.0) throw std::invalid_argument("FlatAtlas: radix must exceed 1");
}

bool FlatAtlas::exists(int j, const VecD&) const { return j <= cap_; }

VecD FlatAtlas::chart(int j, const VecD& x, const VecD& t) const {
    return {x[0] + std::pow(radix_, j) * t[0]};
}

bool FlatAtlas::in_ball(int j, const VecD& x, const VecD& y) const {
    return std::abs(y[0] - x[0]) < std::pow(radix_, j);
}

VecD FlatAtlas::chart_inverse(int j, const VecD& x, const VecD& y) const {
    return {(y[0] - x[0]) / std::pow(radix_, j)};
}

bool FlatAtlas::balls_intersect(int j, const VecD& x, int jp, const VecD& xp) const {
    return std::abs(xp[0] - x[0]) < std::pow(radix_, j) + std::pow(radix_, jp);
}

std::vector<Jet> FlatAtlas::chart_jets(int j, const VecD& x, const VecD& t, int order) const {
    Jet tv = Jet::variable(1, order, 0, t[0]);
    return {tv * std::pow(radix_, j) + x[0]};
}

std::vector<Jet> FlatAtlas::transition_jets(int j, const VecD& x, int jp, const VecD& xp,
                                            const VecD& t, int order) const {
    Jet tv = Jet::variable(1, order, 0, t[0]);
    return {(tv * std::pow(radix_, jp) + (xp[0] - x[0])) / std::pow(radix_, j)};
}

Jet FlatAtlas::measure_weight(int, const VecD&, const VecD& t, int order) const {
    (void)t;
    return Jet::constant(1, order, 0.5);
}

std::shared_ptr<ChartAtlas> bnw_atlas(int d, int cap) {
    return std::make_shared<BnwAtlas>(d, cap);
}

Jet pullback_jet(const ScalarField& f, const ChartAtlas& atlas, int j, const VecD& x,
                 const VecD& t, int order) {
    auto charts = atlas.chart_jets(j, x, t, order);
    return f.jet_of(std::span<const Jet>(charts.data(), charts.size()));
}

double dk_norm_at(const ScalarField& f, const ChartAtlas& atlas, int j, const VecD& x,
                  const VecD& x0, int k) {
    VecD t = atlas.chart_inverse(j, x, x0);
    return dk_norm(pullback_jet(f, atlas, j, x, t, k), k);
}

}  // namespace oscgeo
