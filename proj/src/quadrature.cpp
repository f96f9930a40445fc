#include "oscgeo/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace oscgeo {

namespace {

struct Rule {
    std::vector<double> x, w;
};

Rule make_rule(int n) {
    // Newton iteration on P_n from the Chebyshev initial guess.
    Rule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double p0, p1, dp;
        for (int it = 0; it < 100; ++it) {
            p0 = 1.0;
            p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[n - 1 - i] = x;
        r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

const Rule& rule(int n) {
    static std::map<int, Rule> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
    return it->second;
}

template <typename F, typename Acc>
long panels_pass(const F& f, double a, double b, long panels, int order, Acc& acc) {
    const Rule& r = rule(order);
    double h = (b - a) / panels;
    for (long p = 0; p < panels; ++p) {
        double c = a + (p + 0.5) * h;
        for (int i = 0; i < order; ++i) acc(c + 0.5 * h * r.x[i], 0.5 * h * r.w[i], f);
    }
    return panels * order;
}

}  // namespace

const std::vector<double>& gl_nodes(int n) { return rule(n).x; }
const std::vector<double>& gl_weights(int n) { return rule(n).w; }

QuadResult integrate_1d(const std::function<double(double)>& f, double a, double b, double tol,
                        long max_nodes) {
    QuadResult res;
    const int order = 16;
    double prev = 0.0;
    bool have_prev = false;
    for (long panels = 1; panels * order <= max_nodes; panels *= 2) {
        double sum = 0.0;
        auto acc = [&](double x, double w, const std::function<double(double)>& g) {
            sum += w * g(x);
        };
        res.nodes_used += panels_pass(f, a, b, panels, order, acc);
        if (have_prev && std::abs(sum - prev) <= tol * (1.0 + std::abs(sum))) {
            res.value = sum;
            res.converged = true;
            return res;
        }
        prev = sum;
        have_prev = true;
    }
    res.value = prev;
    return res;
}

OscResult oscillatory_integral_1d(const std::function<double(double)>& phase,
                                  const std::function<double(double)>& amp, double a, double b,
                                  double lambda, double tol, long max_nodes) {
    OscResult res;
    // coarse sweep to estimate total phase variation
    double lo = phase(a), hi = lo;
    for (int i = 1; i <= 256; ++i) {
        double v = phase(a + (b - a) * i / 256.0);
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    double waves = std::abs(lambda) * (hi - lo) / (2 * std::numbers::pi) + 1.0;
    const int order = 16;
    long panels = 1;
    while (panels * order < waves * 20.0) panels *= 2;

    std::complex<double> prev{0, 0};
    bool have_prev = false;
    for (; panels * order <= max_nodes; panels *= 2) {
        std::complex<double> sum{0, 0};
        auto acc = [&](double x, double w, const std::function<double(double)>& ph) {
            double p = lambda * ph(x);
            sum += w * amp(x) * std::complex<double>(std::cos(p), std::sin(p));
        };
        res.nodes_used += panels_pass(phase, a, b, panels, order, acc);
        if (have_prev && std::abs(sum - prev) <= tol * (1.0 + std::abs(sum))) {
            res.value = sum;
            res.converged = true;
            return res;
        }
        prev = sum;
        have_prev = true;
    }
    res.value = prev;
    return res;
}

OscResult oscillatory_integral_2d(const std::function<double(double, double)>& phase,
                                  const std::function<double(double, double)>& amp, double a0,
                                  double b0, double a1, double b1, double lambda, double tol,
                                  long max_nodes) {
    OscResult res;
    double lo = phase(a0, a1), hi = lo;
    for (int i = 0; i <= 32; ++i)
        for (int k = 0; k <= 32; ++k) {
            double v = phase(a0 + (b0 - a0) * i / 32.0, a1 + (b1 - a1) * k / 32.0);
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    double waves = std::abs(lambda) * (hi - lo) / (2 * std::numbers::pi) + 1.0;
    const int order = 16;
    long panels = 1;
    while (panels * order < waves * 12.0) panels *= 2;

    std::complex<double> prev{0, 0};
    bool have_prev = false;
    const Rule& r = rule(order);
    for (; 2 * panels * panels * order * order <= max_nodes || !have_prev; panels *= 2) {
        if (static_cast<double>(panels) * panels * order * order > static_cast<double>(max_nodes))
            break;
        std::complex<double> sum{0, 0};
        double h0 = (b0 - a0) / panels, h1 = (b1 - a1) / panels;
        for (long p = 0; p < panels; ++p)
            for (long q = 0; q < panels; ++q) {
                double c0 = a0 + (p + 0.5) * h0, c1 = a1 + (q + 0.5) * h1;
                for (int i = 0; i < order; ++i)
                    for (int k = 0; k < order; ++k) {
                        double x = c0 + 0.5 * h0 * r.x[i], y = c1 + 0.5 * h1 * r.x[k];
                        double w = 0.25 * h0 * h1 * r.w[i] * r.w[k];
                        double ph = lambda * phase(x, y);
                        sum += w * amp(x, y) * std::complex<double>(std::cos(ph), std::sin(ph));
                    }
            }
        res.nodes_used += panels * panels * order * order;
        if (have_prev && std::abs(sum - prev) <= tol * (1.0 + std::abs(sum))) {
            res.value = sum;
            res.converged = true;
            return res;
        }
        prev = sum;
        have_prev = true;
    }
    res.value = prev;
    return res;
}

}  // namespace oscgeo
