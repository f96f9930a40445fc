#include "oscgeo/cc.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace oscgeo {

namespace {

using Mat = std::vector<VecD>;  // rows

double dot(const VecD& a, const VecD& b) {
    double s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const VecD& a) { return std::sqrt(dot(a, a)); }

// Greedy modified Gram-Schmidt over the candidate columns; returns the chosen
// indices and the product of residual norms (the Gram volume of the pick).
std::vector<int> greedy_basis(const std::vector<VecD>& cols, int dim, double* volume) {
    std::vector<int> chosen;
    std::vector<VecD> ortho;
    std::vector<char> used(cols.size(), 0);
    double vol = 1.0;
    while (static_cast<int>(chosen.size()) < dim) {
        int best = -1;
        double best_res = 0;
        VecD best_vec;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (used[i]) continue;
            VecD r = cols[i];
            for (const VecD& o : ortho) {
                double c = dot(r, o);
                for (std::size_t a = 0; a < r.size(); ++a) r[a] -= c * o[a];
            }
            double rn = norm2(r);
            if (rn > best_res) {
                best_res = rn;
                best = static_cast<int>(i);
                best_vec = r;
            }
        }
        if (best < 0 || best_res <= 1e-10 * (1.0 + norm2(cols[best]))) break;
        used[best] = 1;
        chosen.push_back(best);
        vol *= best_res;
        for (double& v : best_vec) v /= best_res;
        ortho.push_back(best_vec);
    }
    if (volume) *volume = chosen.empty() ? 0.0 : vol;
    return chosen;
}

// Residual of b after projection onto the span of the columns.
double span_residual(const std::vector<VecD>& cols, const VecD& b) {
    std::vector<VecD> ortho;
    for (VecD r : cols) {
        for (const VecD& o : ortho) {
            double c = dot(r, o);
            for (std::size_t a = 0; a < r.size(); ++a) r[a] -= c * o[a];
        }
        double rn = norm2(r);
        if (rn > 1e-12) {
            for (double& v : r) v /= rn;
            ortho.push_back(r);
        }
    }
    VecD r = b;
    for (const VecD& o : ortho) {
        double c = dot(r, o);
        for (std::size_t a = 0; a < r.size(); ++a) r[a] -= c * o[a];
    }
    return norm2(r);
}

VecD field_value(const CCSystem& sys, int i, const VecD& y) {
    VecD v(sys.dim);
    for (int c = 0; c < sys.dim; ++c) v[c] = sys.fields[i][c](y);
    return v;
}

// Value and Jacobian of field i at y from order-1 jets of the components.
void field_jet(const CCSystem& sys, int i, const VecD& y, VecD& val, Mat& jac) {
    val.assign(sys.dim, 0.0);
    jac.assign(sys.dim, VecD(sys.dim, 0.0));
    for (int c = 0; c < sys.dim; ++c) {
        Jet j = jet_eval(sys.fields[i][c], y, 1);
        val[c] = j.value();
        for (int a = 0; a < sys.dim; ++a) {
            MultiIndex e(sys.dim, 0);
            e[a] = 1;
            jac[c][a] = j.coeff(e);
        }
    }
}

bool finite(const VecD& y) {
    for (double v : y)
        if (!std::isfinite(v)) return false;
    return true;
}

// One RK4 step of y' = V(y) for a fixed control.
template <class RHS>
VecD rk4_step(const RHS& V, const VecD& y, double h) {
    VecD k1 = V(y), y2(y), k2, y3(y), k3, y4(y), k4, out(y);
    for (std::size_t a = 0; a < y.size(); ++a) y2[a] += 0.5 * h * k1[a];
    k2 = V(y2);
    for (std::size_t a = 0; a < y.size(); ++a) y3[a] += 0.5 * h * k2[a];
    k3 = V(y3);
    for (std::size_t a = 0; a < y.size(); ++a) y4[a] += h * k3[a];
    k4 = V(y4);
    for (std::size_t a = 0; a < y.size(); ++a)
        out[a] += h / 6.0 * (k1[a] + 2 * k2[a] + 2 * k3[a] + k4[a]);
    return out;
}

// Control draw: uniform in the q-dimensional unit ball.
VecD draw_control(std::mt19937_64& rng, int q) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    VecD a(q);
    double n = 0;
    do {
        for (int i = 0; i < q; ++i) a[i] = g(rng);
        n = norm2(a);
    } while (n == 0);
    double r = std::pow(u(rng), 1.0 / q);
    for (double& v : a) v *= r / n;
    return a;
}

double det_small(Mat m) {
    const int n = static_cast<int>(m.size());
    double det = 1.0;
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int r = c + 1; r < n; ++r)
            if (std::abs(m[r][c]) > std::abs(m[piv][c])) piv = r;
        if (m[piv][c] == 0) return 0.0;
        if (piv != c) {
            std::swap(m[piv], m[c]);
            det = -det;
        }
        det *= m[c][c];
        for (int r = c + 1; r < n; ++r) {
            double f = m[r][c] / m[c][c];
            for (int k = c; k < n; ++k) m[r][k] -= f * m[c][k];
        }
    }
    return det;
}

double gram_volume(const Mat& cols_by_row, int n0) {
    // cols_by_row is dim x n0; Gram volume sqrt(det(J^T J)).
    Mat g(n0, VecD(n0, 0.0));
    for (int a = 0; a < n0; ++a)
        for (int b = 0; b < n0; ++b) {
            double s = 0;
            for (const VecD& row : cols_by_row) s += row[a] * row[b];
            g[a][b] = s;
        }
    return std::sqrt(std::max(det_small(g), 0.0));
}

ScalarField comp(const std::string& expr, int dim) {
    static const std::vector<std::string> names3 = {"x", "y", "t"};
    std::vector<std::string> vars(names3.begin(), names3.begin() + dim);
    VecD lo(dim, -4.0), hi(dim, 4.0);
    return ScalarField::parse_field(expr, vars, {}, Domain::box(lo, hi));
}

bool unit_cube_scale(const VecD& d) {
    for (double v : d)
        if (!(v > 0.0) || v > 1.0) return false;
    return true;
}

}  // namespace

void CCSystem::validate() const {
    if (dim < 1 || fields.empty()) throw std::invalid_argument("CCSystem: empty system");
    if (static_cast<int>(degrees.size()) != q())
        throw std::invalid_argument("CCSystem: one degree row per field required");
    for (const auto& f : fields)
        if (static_cast<int>(f.size()) != dim)
            throw std::invalid_argument("CCSystem: component count mismatch");
    for (const auto& row : degrees) {
        if (static_cast<int>(row.size()) != scale_dim)
            throw std::invalid_argument("CCSystem: degree arity mismatch");
        double total = 0;
        for (double e : row) {
            if (e < 0) throw std::invalid_argument("CCSystem: negative degree");
            total += e;
        }
        if (total == 0) throw std::invalid_argument("CCSystem: zero formal degree");
    }
}

double cc_weight(const CCSystem& sys, int i, const VecD& delta) {
    double w = 1.0;
    for (int k = 0; k < sys.scale_dim; ++k) w *= std::pow(delta[k], sys.degrees[i][k]);
    return w;
}

CCSystem cc_system(const std::string& name) {
    CCSystem s;
    s.name = name;
    if (name == "heisenberg") {
        s.dim = 3;
        s.scale_dim = 1;
        s.fields = {{comp("1", 3), comp("0*x", 3), comp("-y/2", 3)},
                    {comp("0*x", 3), comp("1", 3), comp("x/2", 3)},
                    {comp("0*x", 3), comp("0*x", 3), comp("1", 3)}};
        s.degrees = {{1.0}, {1.0}, {2.0}};
        s.domain = Domain::box({-4, -4, -4}, {4, 4, 4});
    } else if (name == "flat") {
        s.dim = 2;
        s.scale_dim = 2;
        s.fields = {{comp("1", 2), comp("0*x", 2)}, {comp("0*x", 2), comp("1", 2)}};
        s.degrees = {{1.0, 0.0}, {0.0, 1.0}};
        s.domain = Domain::box({-4, -4}, {4, 4});
    } else if (name == "grushin" || name == "grushin_full") {
        s.dim = 2;
        s.scale_dim = 1;
        s.fields = {{comp("1", 2), comp("0*x", 2)}, {comp("0*x", 2), comp("x", 2)}};
        s.degrees = {{1.0}, {1.0}};
        if (name == "grushin_full") {
            s.fields.push_back({comp("0*x", 2), comp("1", 2)});
            s.degrees.push_back({2.0});
        }
        s.domain = Domain::box({-4, -4}, {4, 4});
    } else {
        throw std::invalid_argument("cc_system: unknown system '" + name + "'");
    }
    s.admissible = unit_cube_scale;
    s.validate();
    return s;
}

std::string CCBallCloud::csv() const {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t c = 0; c < x0.size(); ++c) os << (c ? ",x" : "x") << c + 1;
    os << '\n';
    for (const VecD& p : endpoints) {
        for (std::size_t c = 0; c < p.size(); ++c) os << (c ? "," : "") << p[c];
        os << '\n';
    }
    return os.str();
}

CCBallCloud cc_ball_sample(const CCSystem& sys, const VecD& x0, const VecD& delta,
                           int n_paths, int n_steps, std::uint64_t seed, int n_pieces) {
    sys.validate();
    if (static_cast<int>(x0.size()) != sys.dim)
        throw std::invalid_argument("cc_ball_sample: base point arity mismatch");
    if (static_cast<int>(delta.size()) != sys.scale_dim || !sys.admissible(delta))
        throw std::invalid_argument("cc_ball_sample: scale outside the admissible set");
    if (n_paths < 1 || n_steps < 1 || n_pieces < 1)
        throw std::invalid_argument("cc_ball_sample: positive counts required");

    const int q = sys.q();
    VecD w(q);
    for (int i = 0; i < q; ++i) w[i] = cc_weight(sys, i, delta);

    int levels = 0;
    while ((1 << (levels + 1)) <= n_pieces) ++levels;

    CCBallCloud cloud;
    cloud.x0 = x0;
    cloud.delta = delta;
    cloud.seed = seed;
    cloud.n_steps = n_steps;
    cloud.n_pieces = n_pieces;
    cloud.endpoints.reserve(n_paths);

    for (int path = 0; path < n_paths; ++path) {
        std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (path + 1)));
        // mixing piece counts keeps both the reachable-set boundary (constant
        // controls) and the interior (wiggly controls) populated
        std::uniform_int_distribution<int> lev(0, levels);
        int pieces = 1 << lev(rng);
        std::vector<VecD> controls(pieces);
        for (VecD& a : controls) a = draw_control(rng, q);

        VecD y = x0;
        bool ok = true;
        int steps_per_piece = std::max(1, n_steps / pieces);
        for (int pc = 0; pc < pieces && ok; ++pc) {
            const VecD& a = controls[pc];
            auto V = [&](const VecD& z) {
                VecD v(sys.dim, 0.0);
                for (int i = 0; i < q; ++i) {
                    double c = w[i] * a[i];
                    if (c == 0) continue;
                    for (int cc = 0; cc < sys.dim; ++cc)
                        v[cc] += c * sys.fields[i][cc](z);
                }
                return v;
            };
            double h = 1.0 / (pieces * steps_per_piece);
            for (int st = 0; st < steps_per_piece && ok; ++st) {
                y = rk4_step(V, y, h);
                ok = finite(y) && sys.domain.contains(y);
            }
        }
        if (ok)
            cloud.endpoints.push_back(y);
        else
            ++cloud.discarded;
    }
    return cloud;
}

double cloud_volume(const CCBallCloud& cloud, int grid) {
    if (cloud.endpoints.empty()) return 0.0;
    const int d = static_cast<int>(cloud.endpoints.front().size());
    VecD lo = cloud.endpoints.front(), hi = lo;
    for (const VecD& p : cloud.endpoints)
        for (int a = 0; a < d; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    double box = 1.0;
    for (int a = 0; a < d; ++a) box *= std::max(hi[a] - lo[a], 1e-300);

    std::unordered_set<long long> occupied;
    for (const VecD& p : cloud.endpoints) {
        long long key = 0;
        for (int a = 0; a < d; ++a) {
            double f = (p[a] - lo[a]) / std::max(hi[a] - lo[a], 1e-300);
            int cell = std::min(grid - 1, static_cast<int>(f * grid));
            key = key * grid + cell;
        }
        occupied.insert(key);
    }
    double cells = std::pow(static_cast<double>(grid), d);
    return box * static_cast<double>(occupied.size()) / cells;
}

VecD CCChart::operator()(const VecD& u) const {
    if (static_cast<int>(u.size()) != n0)
        throw std::invalid_argument("CCChart: coordinate arity mismatch");
    VecD w(n0);
    for (int c = 0; c < n0; ++c) w[c] = cc_weight(sys, basis[c], delta);
    auto V = [&](const VecD& z) {
        VecD v(sys.dim, 0.0);
        for (int c = 0; c < n0; ++c) {
            double f = u[c] * w[c];
            if (f == 0) continue;
            for (int a = 0; a < sys.dim; ++a) v[a] += f * sys.fields[basis[c]][a](z);
        }
        return v;
    };
    VecD y = x0;
    double h = 1.0 / sys.rk4_steps;
    for (int st = 0; st < sys.rk4_steps; ++st) {
        y = rk4_step(V, y, h);
        if (!finite(y) || !sys.domain.contains(y))
            throw std::domain_error("CCChart: flow left the system domain");
    }
    return y;
}

double CCChart::jacobian_volume(const VecD& u) const {
    if (static_cast<int>(u.size()) != n0)
        throw std::invalid_argument("CCChart: coordinate arity mismatch");
    VecD w(n0);
    for (int c = 0; c < n0; ++c) w[c] = cc_weight(sys, basis[c], delta);

    // augmented state: the flow and the u-Jacobian column by column
    const int dim = sys.dim;
    VecD state(dim + dim * n0, 0.0);
    for (int a = 0; a < dim; ++a) state[a] = x0[a];

    auto rhs = [&](const VecD& z) {
        VecD out(z.size(), 0.0);
        VecD y(z.begin(), z.begin() + dim);
        std::vector<VecD> fv(n0);
        std::vector<Mat> fj(n0);
        for (int c = 0; c < n0; ++c) field_jet(sys, basis[c], y, fv[c], fj[c]);
        Mat dv(dim, VecD(dim, 0.0));
        for (int c = 0; c < n0; ++c) {
            double f = u[c] * w[c];
            for (int a = 0; a < dim; ++a) {
                out[a] += f * fv[c][a];
                for (int b = 0; b < dim; ++b) dv[a][b] += f * fj[c][a][b];
            }
        }
        for (int c = 0; c < n0; ++c) {
            for (int a = 0; a < dim; ++a) {
                double s = w[c] * fv[c][a];
                for (int b = 0; b < dim; ++b) s += dv[a][b] * z[dim + c * dim + b];
                out[dim + c * dim + a] = s;
            }
        }
        return out;
    };
    double h = 1.0 / sys.rk4_steps;
    for (int st = 0; st < sys.rk4_steps; ++st) {
        state = rk4_step(rhs, state, h);
        if (!finite(state)) throw std::domain_error("CCChart: variational flow blew up");
    }
    Mat cols_by_row(dim, VecD(n0, 0.0));
    for (int c = 0; c < n0; ++c)
        for (int a = 0; a < dim; ++a) cols_by_row[a][c] = state[dim + c * dim + a];
    return gram_volume(cols_by_row, n0);
}

double CCChart::reference_volume() const {
    Mat cols_by_row(sys.dim, VecD(n0, 0.0));
    for (int c = 0; c < n0; ++c) {
        VecD v = field_value(sys, basis[c], x0);
        double w = cc_weight(sys, basis[c], delta);
        for (int a = 0; a < sys.dim; ++a) cols_by_row[a][c] = w * v[a];
    }
    return gram_volume(cols_by_row, n0);
}

CCChart cc_exp_chart(const CCSystem& sys, const VecD& x0, const VecD& delta) {
    sys.validate();
    if (!sys.admissible(delta))
        throw std::invalid_argument("cc_exp_chart: scale outside the admissible set");
    std::vector<VecD> cols;
    for (int i = 0; i < sys.q(); ++i) {
        VecD v = field_value(sys, i, x0);
        double w = cc_weight(sys, i, delta);
        for (double& c : v) c *= w;
        cols.push_back(v);
    }
    double vol = 0;
    auto basis = greedy_basis(cols, sys.dim, &vol);
    if (basis.empty()) throw std::domain_error("cc_exp_chart: degenerate span at the base point");
    CCChart chart;
    chart.sys = sys;
    chart.x0 = x0;
    chart.delta = delta;
    chart.basis = std::move(basis);
    chart.n0 = static_cast<int>(chart.basis.size());
    return chart;
}

int cc_engulfing_exponent(const CCSystem& sys) {
    double dmin = std::numeric_limits<double>::infinity();
    for (const auto& row : sys.degrees) {
        double total = 0;
        for (double e : row) total += e;
        dmin = std::min(dmin, total);
    }
    return std::max(1, static_cast<int>(std::ceil(1.0 / dmin)));
}

int cc_choose_M(const CCSystem& sys, double rho) {
    if (!(rho > 0) || rho > 1) throw std::invalid_argument("cc_choose_M: rho must be in (0, 1]");
    int p = cc_engulfing_exponent(sys);
    int M = 2;
    while (1.0 / M > std::ldexp(rho, -p)) M *= 2;
    return M;
}

nlohmann::json CCAxiomReport::json() const {
    nlohmann::json ws = nlohmann::json::array();
    for (const auto& w : witnesses)
        ws.push_back({{"axiom", w.axiom},
                      {"x", w.x},
                      {"value", w.value},
                      {"note", w.note}});
    return {{"system", system},
            {"M", M},
            {"p", p},
            {"integrability_pass", integrability_pass},
            {"doubling_pass", doubling_pass},
            {"jacobian_pass", jacobian_pass},
            {"volume", volume},
            {"volume_doubled", volume_doubled},
            {"doubling_ratio", doubling_ratio},
            {"expected_doubling", expected_doubling},
            {"doubling_slack", doubling_slack},
            {"jacobian_K", jacobian_K},
            {"jacobian_K_refined", jacobian_K_refined},
            {"paths", paths},
            {"discarded", discarded},
            {"all_pass", all_pass()},
            {"witnesses", ws}};
}

CCAxiomReport cc_axiom_check(const CCSystem& sys, const VecD& x0, const VecD& delta,
                             int n_paths, std::uint64_t seed, int grid, double slack) {
    sys.validate();
    VecD delta2 = delta;
    for (double& v : delta2) v *= 2;
    if (!sys.admissible(delta) || !sys.admissible(delta2))
        throw std::invalid_argument("cc_axiom_check: delta and 2 delta must be admissible");

    CCAxiomReport rep;
    rep.system = sys.name;
    rep.p = cc_engulfing_exponent(sys);
    rep.M = cc_choose_M(sys, 0.5);
    rep.doubling_slack = slack;

    // integrability: every bracket stays in the pointwise span of the fields
    rep.integrability_pass = true;
    std::vector<VecD> samples = {x0};
    for (int a = 0; a < sys.dim; ++a)
        for (double off : {-0.1, 0.1}) {
            VecD y = x0;
            y[a] += off;
            if (sys.domain.contains(y)) samples.push_back(y);
        }
    for (const VecD& y : samples) {
        std::vector<VecD> span;
        std::vector<VecD> vals(sys.q());
        std::vector<Mat> jacs(sys.q());
        for (int i = 0; i < sys.q(); ++i) {
            field_jet(sys, i, y, vals[i], jacs[i]);
            span.push_back(vals[i]);
        }
        for (int i = 0; i < sys.q(); ++i)
            for (int j = i + 1; j < sys.q(); ++j) {
                VecD br(sys.dim, 0.0);
                for (int c = 0; c < sys.dim; ++c)
                    for (int a = 0; a < sys.dim; ++a)
                        br[c] += vals[i][a] * jacs[j][c][a] - vals[j][a] * jacs[i][c][a];
                double bn = norm2(br);
                if (bn == 0) continue;
                double res = span_residual(span, br);
                if (res > 1e-8 * bn) {
                    rep.integrability_pass = false;
                    AxiomWitness w;
                    w.axiom = "integrability";
                    w.x = y;
                    w.value = res / bn;
                    w.note = "[X" + std::to_string(i + 1) + ",X" + std::to_string(j + 1) +
                             "] leaves the span";
                    rep.witnesses.push_back(w);
                }
            }
    }
    if (!rep.integrability_pass) return rep;

    for (const auto& row : sys.degrees)
        for (double e : row) rep.expected_doubling += e;
    rep.expected_doubling = std::pow(2.0, rep.expected_doubling);

    auto small = cc_ball_sample(sys, x0, delta, n_paths, 32, seed);
    auto big = cc_ball_sample(sys, x0, delta2, n_paths, 32, seed + 1);
    rep.paths = 2L * n_paths;
    rep.discarded = small.discarded + big.discarded;
    rep.volume = cloud_volume(small, grid);
    rep.volume_doubled = cloud_volume(big, grid);
    rep.doubling_ratio = rep.volume > 0 ? rep.volume_doubled / rep.volume : 0.0;
    rep.doubling_pass = rep.volume > 0 &&
                        std::abs(rep.doubling_ratio / rep.expected_doubling - 1.0) <= slack;
    if (!rep.doubling_pass) {
        AxiomWitness w;
        w.axiom = "doubling";
        w.x = x0;
        w.value = rep.doubling_ratio;
        w.note = "volume-doubling ratio off target";
        rep.witnesses.push_back(w);
    }

    auto chart_K = [&](const CCSystem& s) {
        auto chart = cc_exp_chart(s, x0, delta);
        double ref = chart.reference_volume();
        std::mt19937_64 rng(seed ^ 0xc2b2ae3d27d4eb4fULL);
        double K = 1.0;
        for (int i = 0; i < 40; ++i) {
            VecD u = draw_control(rng, chart.n0);
            for (double& v : u) v *= 0.5;
            double r = chart.jacobian_volume(u) / ref;
            K = std::max({K, r, 1.0 / r});
        }
        return K;
    };
    rep.jacobian_K = chart_K(sys);
    CCSystem fine = sys;
    fine.rk4_steps *= 2;
    rep.jacobian_K_refined = chart_K(fine);
    rep.jacobian_pass = rep.jacobian_K <= 10.0 &&
                        rep.jacobian_K_refined <= 2.0 * rep.jacobian_K + 1e-9;
    if (!rep.jacobian_pass) {
        AxiomWitness w;
        w.axiom = "jacobian";
        w.x = x0;
        w.value = rep.jacobian_K;
        w.note = "Jacobian comparability constant out of range";
        rep.witnesses.push_back(w);
    }
    return rep;
}

}  // namespace oscgeo
