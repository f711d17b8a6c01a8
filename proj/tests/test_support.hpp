#pragma once

// Shared fixtures and independent reference computations for the tests.
// Nothing here calls into the library's numerical routines.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>

#include "spatialqt/state.hpp"

namespace testing_support {

using C = std::complex<double>;

inline std::string data_path(const std::string& name) { return std::string(SPATIALQT_TEST_DATA) + "/" + name; }

// The printed experimental reconstruction, rows/cols ++, +-, -+, --.
inline Eigen::Matrix4cd experimental_rho() {
    Eigen::Matrix4cd m;
    m << C(0.028, 0), C(0.083, 0.004), C(0.081, 0.005), C(-0.129, 0.062),
         C(0.083, -0.004), C(0.468, 0), C(0.444, -0.058), C(0.097, -0.008),
         C(0.081, -0.005), C(0.444, 0.058), C(0.462, 0), C(0.096, -0.006),
         C(-0.129, -0.062), C(0.097, 0.008), C(0.096, 0.006), C(0.042, 0);
    return m;
}

// Printed two-component fit: mostly entangled and nearly product parts.
inline Eigen::Vector4cd printed_phi1() {
    const C p = std::polar(1.0, 4.2);
    Eigen::Vector4cd v(0.077 * p, 0.704 * p, 0.699 * p, 0.099 * p);
    return v.normalized();
}

inline Eigen::Vector4cd printed_phi2() {
    const C t = std::polar(1.0, 0.07);
    Eigen::Vector4cd v(0.514, 0.502 * t, 0.501 * t, 0.483);
    return v.normalized();
}

// Haar-ish random pure state and random full-rank mixed state.
inline Eigen::Vector4cd random_vector(std::mt19937_64& rng) {
    std::normal_distribution<double> n;
    Eigen::Vector4cd v;
    for (int i = 0; i < 4; ++i) v(i) = C(n(rng), n(rng));
    return v.normalized();
}

inline Eigen::Matrix4cd random_density(std::mt19937_64& rng) {
    Eigen::Matrix4cd g;
    std::normal_distribution<double> n;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) g(i, j) = C(n(rng), n(rng));
    Eigen::Matrix4cd rho = g * g.adjoint();
    return rho / rho.trace();
}

inline spatialqt::PureState2Q to_state(const Eigen::Vector4cd& v) {
    return spatialqt::PureState2Q::normalized({v(0), v(1), v(2), v(3)});
}

// ---- Fresnel oracles --------------------------------------------------------
// Free propagation written in the transverse-momentum representation:
//   psi_z(x) = 1/(2 pi) Int dq psi~(q) exp(i q x - i alpha q^2),
// with the slit top-hat psi~(q) = sqrt(2a) sinc(q a) exp(-i q c).
// A dense trapezoid sum over |q| <= Q replaces the integral; Q is picked so the
// chirp is resolved at the edge (alpha Q h ~ 1/4).

inline double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(x) / x; }

inline C riemann_mode(double x, double center, double a, double alpha, long nodes) {
    const double q_max = std::sqrt(nodes / (8.0 * alpha));
    const double h = 2.0 * q_max / nodes;
    C sum = 0.0;
    for (long n = 0; n <= nodes; ++n) {
        const double q = -q_max + n * h;
        const double w = (n == 0 || n == nodes) ? 0.5 : 1.0;
        sum += w * sinc(q * a) * std::exp(C(0.0, q * (x - center) - alpha * q * q));
    }
    return sum * h * std::sqrt(2.0 * a) / (2.0 * std::numbers::pi);
}

// Same, integrated over a detector of half-width b centred at x and divided by
// 2b sqrt(a / (2 pi i alpha)). The aperture adds a sinc(q b) factor.
inline C riemann_kernel(double x, double b, double center, double a, double alpha, long nodes) {
    const double q_max = std::sqrt(nodes / (8.0 * alpha));
    const double h = 2.0 * q_max / nodes;
    C sum = 0.0;
    for (long n = 0; n <= nodes; ++n) {
        const double q = -q_max + n * h;
        const double w = (n == 0 || n == nodes) ? 0.5 : 1.0;
        sum += w * sinc(q * a) * sinc(q * b) * std::exp(C(0.0, q * (x - center) - alpha * q * q));
    }
    const C norm = std::sqrt(C(0.0, -a / (2.0 * std::numbers::pi * alpha)));  // sqrt(a/(2 pi i alpha))
    return sum * h * std::sqrt(2.0 * a) / (2.0 * std::numbers::pi) / norm;
}

// |<f0|f1>| by a midpoint sum over the common support.
inline double riemann_fstate_overlap(double x0, double x1, double b, double alpha, int nodes) {
    const double lo = std::max(x0, x1) - b;
    const double hi = std::min(x0, x1) + b;
    if (hi <= lo) return 0.0;
    const double h = (hi - lo) / nodes;
    C sum = 0.0;
    for (int n = 0; n < nodes; ++n) {
        const double x = lo + (n + 0.5) * h;
        sum += std::exp(C(0.0, x1 * (x - x1) / (2 * alpha) - x0 * (x - x0) / (2 * alpha)));
    }
    return std::abs(sum * h) / (2.0 * b);
}

// Born rule written out element by element for U_s (x) U_i.
inline std::array<double, 4> brute_probabilities(const Eigen::Matrix4cd& rho, const Eigen::Matrix2cd& us,
                                                 const Eigen::Matrix2cd& ui) {
    std::array<double, 4> p{};
    for (int ks = 0; ks < 2; ++ks)
        for (int ki = 0; ki < 2; ++ki) {
            C acc = 0.0;
            for (int j = 0; j < 4; ++j)
                for (int k = 0; k < 4; ++k) {
                    const C aj = us(ks, j / 2) * ui(ki, j % 2);
                    const C ak = us(ks, k / 2) * ui(ki, k % 2);
                    acc += aj * rho(j, k) * std::conj(ak);
                }
            p[2 * ks + ki] = acc.real();
        }
    return p;
}

}  // namespace testing_support
