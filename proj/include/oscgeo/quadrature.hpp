#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace oscgeo {

// Gauss-Legendre nodes/weights on (-1, 1), cached per order.
const std::vector<double>& gl_nodes(int n);
const std::vector<double>& gl_weights(int n);

// Composite Gauss-Legendre with panel doubling until two successive levels
// agree within tol * (1 + |value|).
struct QuadResult {
    double value = 0.0;
    bool converged = false;
    long nodes_used = 0;
};

QuadResult integrate_1d(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10, long max_nodes = 1 << 20);

// oint e^{i lambda phase(t)} amp(t) dt on [a, b]. Panel count starts from an
// estimate of the number of wavelengths lambda (max phase - min phase) / 2pi
// and doubles until two levels agree. `converged` reports the node-cap failure
// mode explicitly instead of returning garbage.
struct OscResult {
    std::complex<double> value{0.0, 0.0};
    bool converged = false;
    long nodes_used = 0;
};

OscResult oscillatory_integral_1d(const std::function<double(double)>& phase,
                                  const std::function<double(double)>& amp, double a, double b,
                                  double lambda, double tol = 1e-9,
                                  long max_nodes = 1 << 22);

// Tensor-product version on [a0,b0] x [a1,b1].
OscResult oscillatory_integral_2d(const std::function<double(double, double)>& phase,
                                  const std::function<double(double, double)>& amp, double a0,
                                  double b0, double a1, double b1, double lambda,
                                  double tol = 1e-8, long max_nodes = 1 << 24);

}  // namespace oscgeo
