#ifndef GIGAQBX_EXPANSIONS_HPP
#define GIGAQBX_EXPANSIONS_HPP

#include <cmath>
#include <span>
#include <vector>

#include "gigaqbx/types.hpp"

// Multipole and local (Taylor) expansions of 2D Laplace potentials in
// complex form, their formation from charges and dipoles, the four
// translation operators, and evaluation.
//
// Conventions, for a unit charge at offset z0 from the expansion center:
//   multipole:  phi(z) = log(z - z0) = a_0 log z + sum_k a_k z^-k,
//               a_0 = 1, a_k = -z0^k / k            (valid |z| > |z0|)
//   local:      phi(z) = sum_m b_m z^m,
//               b_0 = log(-z0), b_m = -1/(m z0^m)   (valid |z| < |z0|)
// Dipole coefficients are the z0-derivatives of the charge coefficients
// along the (complex) moment. Potentials are real parts only; the
// imaginary part of an order-0 local coefficient is branch-dependent
// and never compared.

namespace gigaqbx {

// Strengths carry quadrature weight, density and kernel prefactor
// pre-multiplied, so the expansion code is kernel-agnostic.
struct SourceCharge {
    Complex position{};
    double monopole = 0.0;   // charge strength
    Complex dipole{};        // dipole moment in complex direction form
};

enum class ExpansionKind { multipole, local };

struct Expansion {
    ExpansionKind kind = ExpansionKind::local;
    Complex center{};
    std::vector<Complex> coeffs;  // length order+1

    int order() const { return static_cast<int>(coeffs.size()) - 1; }
};

inline Expansion zero_expansion(ExpansionKind kind, Complex center, int p) {
    require(p >= 0, "expansion order must be >= 0");
    return Expansion{kind, center, std::vector<Complex>(p + 1)};
}

// Pascal triangle, precomputed. Orders are capped at 64, so rows up to
// 2*64 + 2 cover every translation operator without per-call factorials.
constexpr int max_order = 64;

namespace detail {

struct BinomialTable {
    static constexpr int rows = 2 * max_order + 3;
    double c[rows][rows] = {};
    BinomialTable() {
        for (int n = 0; n < rows; ++n) {
            c[n][0] = 1.0;
            for (int k = 1; k <= n; ++k)
                c[n][k] = c[n - 1][k - 1] + (k <= n - 1 ? c[n - 1][k] : 0.0);
        }
    }
};

inline double binom(int n, int k) {
    static const BinomialTable table;
    return table.c[n][k];
}

} // namespace detail

// --- formation ------------------------------------------------------------

inline void p2m_add(Expansion& out, std::span<const SourceCharge> sources) {
    const int p = out.order();
    for (const SourceCharge& s : sources) {
        const Complex z0 = s.position - out.center;
        out.coeffs[0] += s.monopole;
        // a_k = -q z0^k/k - n z0^(k-1)
        Complex z0_pow = 1.0;  // z0^(k-1)
        for (int k = 1; k <= p; ++k) {
            out.coeffs[k] -= s.dipole * z0_pow;
            z0_pow *= z0;
            out.coeffs[k] -= s.monopole * z0_pow / double(k);
        }
    }
}

inline Expansion p2m(std::span<const SourceCharge> sources, Complex center, int p) {
    Expansion out = zero_expansion(ExpansionKind::multipole, center, p);
    p2m_add(out, sources);
    return out;
}

inline void p2l_add(Expansion& out, std::span<const SourceCharge> sources) {
    const int p = out.order();
    for (const SourceCharge& s : sources) {
        const Complex z0 = s.position - out.center;
        if (z0 == Complex(0.0, 0.0))
            throw PreconditionError("p2l: source coincides with expansion center");
        const Complex inv = 1.0 / z0;
        out.coeffs[0] += s.monopole * std::log(-z0) + s.dipole * inv;
        // b_m = -q/(m z0^m) + n/z0^(m+1)
        Complex inv_pow = inv;  // z0^-m
        for (int m = 1; m <= p; ++m) {
            out.coeffs[m] += inv_pow * (s.dipole * inv - s.monopole / double(m));
            inv_pow *= inv;
        }
    }
}

inline Expansion p2l(std::span<const SourceCharge> sources, Complex center, int p) {
    Expansion out = zero_expansion(ExpansionKind::local, center, p);
    p2l_add(out, sources);
    return out;
}

// --- translation ----------------------------------------------------------

// Shift a multipole expansion to a new center; exact (lower triangular).
inline void m2m_add(Expansion& out, const Expansion& src) {
    const int p = std::min(out.order(), src.order());
    const Complex d = src.center - out.center;  // old center relative to new
    out.coeffs[0] += src.coeffs[0];
    std::vector<Complex> d_pow(p + 1);
    d_pow[0] = 1.0;
    for (int m = 1; m <= p; ++m) d_pow[m] = d_pow[m - 1] * d;
    for (int m = 1; m <= p; ++m) {
        Complex alpha = -src.coeffs[0] * d_pow[m] / double(m);
        for (int k = 1; k <= m; ++k)
            alpha += detail::binom(m - 1, k - 1) * src.coeffs[k] * d_pow[m - k];
        out.coeffs[m] += alpha;
    }
}

inline Expansion m2m(const Expansion& src, Complex new_center) {
    require(src.kind == ExpansionKind::multipole, "m2m: input must be a multipole");
    Expansion out = zero_expansion(ExpansionKind::multipole, new_center, src.order());
    m2m_add(out, src);
    return out;
}

// Convert a multipole expansion into a local one about out.center. The
// inner sums run over all stored source coefficients (k <= src order).
inline void m2l_add(Expansion& out, const Expansion& src) {
    const int p = src.order();
    const int q = out.order();
    const Complex y = out.center - src.center;
    if (y == Complex(0.0, 0.0))
        throw PreconditionError("m2l: coincident expansion centers");
    const Complex inv = 1.0 / y;
    const Complex a0 = src.coeffs[0];

    std::vector<Complex> inv_pow(p + q + 1);
    inv_pow[0] = 1.0;
    for (int k = 1; k <= p + q; ++k) inv_pow[k] = inv_pow[k - 1] * inv;

    {
        Complex beta0 = a0 * std::log(y);
        for (int k = 1; k <= p; ++k) beta0 += src.coeffs[k] * inv_pow[k];
        out.coeffs[0] += beta0;
    }
    double sign = -1.0;  // (-1)^m
    for (int m = 1; m <= q; ++m) {
        Complex beta = -sign * a0 * inv_pow[m] / double(m);
        Complex tail = 0.0;
        for (int k = 1; k <= p; ++k)
            tail += detail::binom(m + k - 1, k - 1) * src.coeffs[k] * inv_pow[m + k];
        out.coeffs[m] += beta + sign * tail;
        sign = -sign;
    }
}

inline Expansion m2l(const Expansion& src, Complex new_center, int q) {
    require(src.kind == ExpansionKind::multipole, "m2l: input must be a multipole");
    require(q >= 0, "m2l: output order must be >= 0");
    Expansion out = zero_expansion(ExpansionKind::local, new_center, q);
    m2l_add(out, src);
    return out;
}

// Shift a local expansion; optionally truncate to a lower output order.
// Coefficient m of the result depends only on input coefficients k >= m,
// so truncation commutes with the shift.
inline void l2l_add(Expansion& out, const Expansion& src) {
    const int p = src.order();
    const int q = out.order();
    const Complex y = out.center - src.center;
    std::vector<Complex> y_pow(p + 1);
    y_pow[0] = 1.0;
    for (int k = 1; k <= p; ++k) y_pow[k] = y_pow[k - 1] * y;
    for (int m = 0; m <= q && m <= p; ++m) {
        Complex beta = 0.0;
        for (int k = m; k <= p; ++k)
            beta += detail::binom(k, m) * src.coeffs[k] * y_pow[k - m];
        out.coeffs[m] += beta;
    }
}

inline Expansion l2l(const Expansion& src, Complex new_center, int q = -1) {
    require(src.kind == ExpansionKind::local, "l2l: input must be a local expansion");
    if (q < 0) q = src.order();
    require(q <= src.order(), "l2l: output order may not exceed input order");
    Expansion out = zero_expansion(ExpansionKind::local, new_center, q);
    l2l_add(out, src);
    return out;
}

// --- evaluation -----------------------------------------------------------

inline double m_eval(const Expansion& src, Complex target) {
    const Complex z = target - src.center;
    if (z == Complex(0.0, 0.0))
        throw PreconditionError("m_eval: target coincides with expansion center");
    Complex acc = src.coeffs[0] * std::log(z);
    const Complex inv = 1.0 / z;
    Complex inv_pow = inv;
    for (int k = 1; k <= src.order(); ++k) {
        acc += src.coeffs[k] * inv_pow;
        inv_pow *= inv;
    }
    return acc.real();
}

inline double l_eval(const Expansion& src, Complex target) {
    const Complex z = target - src.center;
    Complex acc = 0.0;
    for (int k = src.order(); k >= 0; --k) acc = acc * z + src.coeffs[k];
    return acc.real();
}

// Potential of a single source at a target, no expansions.
inline double direct_eval(const SourceCharge& s, Complex target) {
    const Complex d = target - s.position;
    double pot = 0.0;
    if (s.monopole != 0.0) pot += s.monopole * std::log(std::abs(d));
    if (s.dipole != Complex(0.0, 0.0)) pot += (s.dipole / (s.position - target)).real();
    return pot;
}

} // namespace gigaqbx

#endif
