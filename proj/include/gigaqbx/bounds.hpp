#ifndef GIGAQBX_BOUNDS_HPP
#define GIGAQBX_BOUNDS_HPP

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gigaqbx/expansions.hpp"

// Closed-form accuracy bounds for translation chains with varying
// expansion orders, and randomized experiments that stress them.
//
// Setting: a unit charge in the closed disk B(z0, lambda*r) with
// |z0| >= (c+1+lambda)*r (multipole-mediated) or a point charge with
// |z0| >= (c+1)*r (local-mediated); the final q-th order local lives at
// z inside B(0,r) and is evaluated at y with |y-z| <= r-|z|. The
// convergence factors are omega = 1/(1+c/lambda) and alpha = 1/(1+c).

namespace gigaqbx {

// Error of a q-th order local obtained through a p-truncated mediating
// multipole: ((q+1)/(p+1)) * omega^(p+1) / (1-omega).
inline double m2qbxl_bound(int p, int q, double c, double lambda) {
    require(p >= 0 && q >= 0, "orders must be >= 0");
    require(c > 0 && lambda > 0, "separation parameters must be positive");
    const double omega = 1.0 / (1.0 + c / lambda);
    return (double(q + 1) / double(p + 1)) * std::pow(omega, p + 1) / (1.0 - omega);
}

// Error of a q-th order local obtained through a p-truncated mediating
// local: ((q+1)/(p+1)) * alpha^(p+1) / (1-alpha).
inline double l2qbxl_bound(int p, int q, double c) {
    require(p >= 0 && q >= 0, "orders must be >= 0");
    require(c > 0, "separation parameter must be positive");
    const double alpha = 1.0 / (1.0 + c);
    return (double(q + 1) / double(p + 1)) * std::pow(alpha, p + 1) / (1.0 - alpha);
}

// Error with both a mediating multipole and a mediating local truncated
// to p-th order.
inline double m2l2qbxl_bound(int p, int q, double c, double lambda) {
    require(p >= 0 && q >= 0, "orders must be >= 0");
    require(c > 0 && lambda > 0, "separation parameters must be positive");
    const double omega = 1.0 / (1.0 + c / lambda);
    const double alpha = 1.0 / (1.0 + c);
    return double(q + 1) * std::pow(omega, p + 1) / (1.0 - omega) +
           (double(q + 1) / double(p + 1)) * std::pow(alpha, p + 1) / (1.0 - alpha);
}

// Aggregate FMM error bound for the full evaluation, as an explicit,
// computable three-term sum: the separated-smaller and separated-bigger
// contributions (convergence factor sqrt(2)/3 each) plus the
// multipole-to-local contribution (factor alpha = (t_f+sqrt(2))/(6-sqrt(2))).
// A is the total absolute source strength, sum_i |w_i mu(y_i)|.
inline double gigaqbx_error_bound(int p_qbx, int p_fmm, double t_f, double A) {
    require(p_qbx >= 0 && p_fmm >= 0, "orders must be >= 0");
    require(A >= 0, "total source strength must be >= 0");
    const double sqrt2 = std::sqrt(2.0);
    require(t_f >= 0.0 && t_f < 6.0 - 2.0 * sqrt2, "target confinement factor out of range");
    const double alpha = (t_f + sqrt2) / (6.0 - sqrt2);
    const double q1 = p_qbx + 1, p1 = p_fmm + 1;
    const double mpole_terms =
        2.0 * (3.0 * A / (3.0 - sqrt2)) * (q1 / p1) * std::pow(sqrt2 / 3.0, p1);
    const double m2l_term =
        (A / (1.0 - alpha)) * q1 * (1.0 + 1.0 / p1) * std::pow(alpha, p1);
    return mpole_terms + m2l_term;
}

// --- translation-chain experiments -----------------------------------------

enum class ChainKind { m2l, m2qbxl, l2qbxl, m2l2qbxl };

inline const char* chain_name(ChainKind k) {
    switch (k) {
        case ChainKind::m2l: return "m2l";
        case ChainKind::m2qbxl: return "m2qbxl";
        case ChainKind::l2qbxl: return "l2qbxl";
        case ChainKind::m2l2qbxl: return "m2l2qbxl";
    }
    return "?";
}

inline ChainKind chain_from_name(const std::string& s) {
    if (s == "m2l") return ChainKind::m2l;
    if (s == "m2qbxl") return ChainKind::m2qbxl;
    if (s == "l2qbxl") return ChainKind::l2qbxl;
    if (s == "m2l2qbxl") return ChainKind::m2l2qbxl;
    throw PreconditionError("unknown chain kind: " + s);
}

struct ChainGeometry {
    double c = 2.0;       // separation multiple
    double lambda = 1.0;  // source-ball scale
    double r = 1.0;       // target disk radius
};

struct BoundReport {
    double measured = 0.0;
    double bound = 0.0;
    bool satisfied = false;
    double factor = 0.0;  // omega or alpha governing the bound
};

// Reference value of the classical 1-away point-FMM multipole-to-local
// heuristic, (sqrt(2)/(4-sqrt(2)))^(p+1).
inline double point_fmm_m2l_heuristic(int p) {
    const double sqrt2 = std::sqrt(2.0);
    return std::pow(sqrt2 / (4.0 - sqrt2), p + 1);
}

namespace detail {

// Shift a local to `center` at order min(q, input order), zero-padding
// the tail when q exceeds the input order (the missing coefficients of a
// p-th order mediating expansion are exactly zero).
inline Expansion l2l_padded(const Expansion& src, Complex center, int q) {
    Expansion out = l2l(src, center, std::min(q, src.order()));
    out.coeffs.resize(q + 1);
    return out;
}

// |sum_k (d_k) (y-z)^k| with the order-0 difference taken as real parts
// only (the log branch may differ between the two routes).
inline double eval_coeff_difference(const Expansion& a, const Expansion& b, Complex y) {
    const Complex z = y - a.center;
    Complex acc = 0.0;
    for (int k = a.order(); k >= 1; --k) acc = (acc + a.coeffs[k] - b.coeffs[k]) * z;
    acc += a.coeffs[0].real() - b.coeffs[0].real();
    return std::abs(acc);
}

} // namespace detail

// Randomized admissible placements per trial: the source ball center at
// the minimum admissible separation (worst case), the source uniform in
// its ball, z uniform in the open target disk, and y on the circle
// |y-z| = r-|z| where the triangle-inequality step of the bound is tight.
inline std::vector<BoundReport> chain_experiment(const ChainGeometry& g, ChainKind kind,
                                                 int p, int q, int trials,
                                                 std::uint64_t seed = 12345) {
    require(g.c > 0, "chain geometry: c must be positive");
    require(g.lambda > 0, "chain geometry: lambda must be positive");
    require(g.r > 0, "chain geometry: r must be positive");
    require(p >= 0 && q >= 0, "orders must be >= 0");
    require(trials >= 0, "trial count must be >= 0");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto angle = [&] { return 2.0 * pi * unit(rng); };

    std::vector<BoundReport> reports;
    reports.reserve(trials);

    for (int t = 0; t < trials; ++t) {
        BoundReport rep;
        if (kind == ChainKind::m2l) {
            // Classical 1-away configuration: unit-radius boxes with one
            // box of gap, expansion orders p throughout.
            const Complex src_center(4.0, 0.0);
            const Complex src(src_center.real() + (2.0 * unit(rng) - 1.0),
                              src_center.imag() + (2.0 * unit(rng) - 1.0));
            const Complex target(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
            const SourceCharge charge{src, 1.0, Complex(0.0, 0.0)};
            const Expansion local =
                m2l(p2m(std::span(&charge, 1), src_center, p), Complex(0.0, 0.0), p);
            rep.measured = std::abs(l_eval(local, target) -
                                    std::log(std::abs(target - src)));
            rep.bound = point_fmm_m2l_heuristic(p);
            rep.factor = std::sqrt(2.0) / (4.0 - std::sqrt(2.0));
        } else {
            const double sep = (kind == ChainKind::l2qbxl) ? (g.c + 1.0) * g.r
                                                           : (g.c + 1.0 + g.lambda) * g.r;
            const Complex z0 = std::polar(sep, angle());
            Complex src_pos = z0;
            if (kind != ChainKind::l2qbxl)
                src_pos += std::polar(g.lambda * g.r * std::sqrt(unit(rng)), angle());
            const SourceCharge charge{src_pos, 1.0, Complex(0.0, 0.0)};

            const Complex z = std::polar(g.r * std::sqrt(unit(rng)), angle());
            const Complex y = z + std::polar(g.r - std::abs(z), angle());
            const Complex origin(0.0, 0.0);
            const auto charge_span = std::span(&charge, 1);

            Expansion mediated;
            switch (kind) {
                case ChainKind::m2qbxl:
                    mediated = m2l(p2m(charge_span, z0, p), z, q);
                    rep.bound = m2qbxl_bound(p, q, g.c, g.lambda);
                    rep.factor = 1.0 / (1.0 + g.c / g.lambda);
                    break;
                case ChainKind::l2qbxl:
                    mediated = detail::l2l_padded(p2l(charge_span, origin, p), z, q);
                    rep.bound = l2qbxl_bound(p, q, g.c);
                    rep.factor = 1.0 / (1.0 + g.c);
                    break;
                case ChainKind::m2l2qbxl:
                    mediated = detail::l2l_padded(
                        m2l(p2m(charge_span, z0, p), origin, p), z, q);
                    rep.bound = m2l2qbxl_bound(p, q, g.c, g.lambda);
                    rep.factor = 1.0 / (1.0 + g.c / g.lambda);
                    break;
                default: break;
            }
            const Expansion direct = p2l(charge_span, z, q);
            rep.measured = detail::eval_coeff_difference(direct, mediated, y);
        }
        rep.satisfied = rep.measured <= rep.bound * (1.0 + 1e-9);
        reports.push_back(rep);
    }
    return reports;
}

} // namespace gigaqbx

#endif
