#include "oscgeo/bump.hpp"

#include <cmath>
#include <stdexcept>

namespace oscgeo {

namespace {

double a2_of(double c) { return c * c; }
double b2_of(double c) { return (1 + c) * (1 + c) / 4.0; }

double B(double s) { return s > 0 ? std::exp(-1.0 / s) : 0.0; }

}  // namespace

double bump_profile(double rho, double c) {
    double a2 = a2_of(c), b2 = b2_of(c);
    if (rho <= a2) return 1.0;
    if (rho >= b2) return 0.0;
    double s = (b2 - rho) / (b2 - a2);
    return B(s) / (B(s) + B(1 - s));
}

Jet bump_profile_jet(const Jet& rho, double c) {
    double a2 = a2_of(c), b2 = b2_of(c);
    // The transition pieces glue with all derivatives zero, so on the constant
    // pieces (including their closed boundaries) the constant jet is exact.
    if (rho.value() <= a2) return Jet::constant(rho.dim(), rho.order(), 1.0);
    if (rho.value() >= b2) return Jet::constant(rho.dim(), rho.order(), 0.0);
    Jet s = (b2 - rho) / (b2 - a2);
    Jet bs = jet_exp(-jet_inv(s));
    Jet bt = jet_exp(-jet_inv(1.0 - s));
    return bs / (bs + bt);
}

Bump::Bump(std::shared_ptr<const ChartAtlas> atlas, int j, VecD x, double c)
    : atlas_(std::move(atlas)), j_(j), x_(std::move(x)), c_(c) {
    if (!atlas_->exists(j_, x_)) throw std::domain_error("Bump: ball does not exist");
    if (c <= 0 || c >= 1) throw std::invalid_argument("Bump: cutoff must lie in (0,1)");
}

double Bump::local(const VecD& t) const {
    double rho = 0;
    for (double ti : t) rho += ti * ti;
    return bump_profile(rho, c_);
}

double Bump::operator()(const VecD& y) const {
    if (!atlas_->in_ball(j_, x_, y)) return 0.0;
    return local(atlas_->chart_inverse(j_, x_, y));
}

bool Bump::positive_at(const VecD& y) const {
    if (!atlas_->in_ball(j_, x_, y)) return false;
    VecD t = atlas_->chart_inverse(j_, x_, y);
    double rho = 0;
    for (double ti : t) rho += ti * ti;
    return rho < b2_of(c_);
}

Jet Bump::local_jet(const VecD& t, int order) const {
    int n = static_cast<int>(t.size());
    Jet rho = Jet::constant(n, order, 0.0);
    for (int i = 0; i < n; ++i) {
        Jet ti = Jet::variable(n, order, i, t[i]);
        rho += ti * ti;
    }
    return bump_profile_jet(rho, c_);
}

Jet Bump::jet_through(int jp, const VecD& xp, const VecD& t, int order) const {
    VecD y = atlas_->chart(jp, xp, t);
    int n = static_cast<int>(t.size());
    if (!atlas_->in_ball(j_, x_, y)) return Jet::constant(n, order, 0.0);
    auto trans = atlas_->transition_jets(j_, x_, jp, xp, t, order);
    Jet rho = Jet::constant(n, order, 0.0);
    for (const auto& ti : trans) rho += ti * ti;
    return bump_profile_jet(rho, c_);
}

}  // namespace oscgeo
