#include <catch2/catch_amalgamated.hpp>

#include "gigaqbx/expansions.hpp"
#include "test_support.hpp"

using namespace gigaqbx;
using testsupport::coeffs_close;
using testsupport::log_sum_oracle;
using testsupport::random_charges;
using testsupport::total_strength;

namespace {
std::vector<SourceCharge> unit_charge_at(Complex pos) {
    return {SourceCharge{pos, 1.0, Complex(0.0, 0.0)}};
}
} // namespace

TEST_CASE("p2m basic coefficients") {
    SECTION("charge at the center") {
        const Complex c(0.3, -0.2);
        auto e = p2m(unit_charge_at(c), c, 2);
        REQUIRE(e.coeffs.size() == 3);
        CHECK(e.coeffs[0] == Complex(1.0, 0.0));
        CHECK(e.coeffs[1] == Complex(0.0, 0.0));
        CHECK(e.coeffs[2] == Complex(0.0, 0.0));
    }
    SECTION("charge at offset 0.5") {
        auto e = p2m(unit_charge_at(Complex(0.5, 0.0)), Complex(0.0, 0.0), 2);
        CHECK(e.coeffs[0].real() == Catch::Approx(1.0));
        CHECK(e.coeffs[1].real() == Catch::Approx(-0.5));
        CHECK(e.coeffs[2].real() == Catch::Approx(-0.125));
    }
    SECTION("symmetric pair kills odd coefficients exactly") {
        const Complex z0(0.37, 0.21);
        std::vector<SourceCharge> srcs = {{z0, 1.0, {}}, {-z0, 1.0, {}}};
        auto e = p2m(srcs, Complex(0.0, 0.0), 3);
        CHECK(e.coeffs[1] == Complex(0.0, 0.0));
        CHECK(e.coeffs[3] == Complex(0.0, 0.0));
    }
    SECTION("rejects negative order") {
        CHECK_THROWS_AS(p2m(unit_charge_at(Complex(0, 0)), Complex(0, 0), -1),
                        PreconditionError);
    }
}

TEST_CASE("p2l basic coefficients") {
    SECTION("charge at -1") {
        auto e = p2l(unit_charge_at(Complex(-1.0, 0.0)), Complex(0.0, 0.0), 1);
        CHECK(e.coeffs[0].real() == Catch::Approx(0.0).margin(1e-15));
        CHECK(e.coeffs[1].real() == Catch::Approx(1.0));
        CHECK(e.coeffs[1].imag() == Catch::Approx(0.0).margin(1e-15));
    }
    SECTION("charge at 2, order 0") {
        auto e = p2l(unit_charge_at(Complex(2.0, 0.0)), Complex(0.0, 0.0), 0);
        CHECK(e.coeffs[0].real() == Catch::Approx(std::log(2.0)));
    }
    SECTION("coincident source rejected") {
        const Complex c(1.0, 1.0);
        CHECK_THROWS_AS(p2l(unit_charge_at(c), c, 3), PreconditionError);
    }
    SECTION("random ensemble matches log-sum oracle within the tail bound") {
        std::mt19937_64 rng(7);
        for (int trial = 0; trial < 20; ++trial) {
            auto srcs = random_charges(rng, 12, Complex(0, 0), 1.0);
            double min_dist = 1e300;
            for (auto& s : srcs) {
                s.position += Complex(3.0, 0.0);  // keep sources separated
                min_dist = std::min(min_dist, std::abs(s.position));
            }
            const int p = 15;
            auto e = p2l(srcs, Complex(0.0, 0.0), p);
            const double rho = 0.3;
            const Complex z = std::polar(rho * min_dist, 1.1 + trial);
            const double tail = total_strength(srcs) *
                                std::pow(rho, p + 1) / ((p + 1) * (1.0 - rho));
            CHECK(std::abs(l_eval(e, z) - log_sum_oracle(srcs, z)) <= 2.0 * tail);
        }
    }
}

TEST_CASE("m2m shift") {
    std::mt19937_64 rng(21);
    SECTION("zero shift is the identity") {
        auto srcs = random_charges(rng, 8, Complex(0, 0), 1.0);
        auto e = p2m(srcs, Complex(0.5, 0.5), 12);
        auto shifted = m2m(e, Complex(0.5, 0.5));
        CHECK(coeffs_close(e, shifted, 1e-15));
    }
    SECTION("matches direct formation at the new center") {
        for (int trial = 0; trial < 20; ++trial) {
            auto srcs = random_charges(rng, 10 + trial, Complex(0, 0), 1.0, true);
            const Complex c1(0.1, -0.3), c2(-0.4, 0.2);
            const int p = 5 + trial;
            auto via_shift = m2m(p2m(srcs, c1, p), c2);
            auto direct = p2m(srcs, c2, p);
            CHECK(coeffs_close(via_shift, direct, 1e-12));
        }
    }
    SECTION("two chained shifts equal one") {
        auto srcs = random_charges(rng, 15, Complex(0, 0), 1.0);
        auto e = p2m(srcs, Complex(0, 0), 20);
        auto chained = m2m(m2m(e, Complex(0.7, 0.1)), Complex(-0.2, 0.9));
        auto single = m2m(e, Complex(-0.2, 0.9));
        CHECK(coeffs_close(chained, single, 1e-12));
    }
}

TEST_CASE("m2l conversion") {
    SECTION("point-charge multipole reduces to p2l of the charge") {
        const Complex c_old(0.25, 0.1), c_new(2.0, 1.5);
        auto srcs = unit_charge_at(c_old);
        auto med = m2l(p2m(srcs, c_old, 6), c_new, 8);
        auto ref = p2l(srcs, c_new, 8);
        CHECK(coeffs_close(med, ref, 1e-13, /*real_part_order0=*/true));
    }
    SECTION("order-0 source, order-0 output") {
        Expansion src = zero_expansion(ExpansionKind::multipole, Complex(0, 0), 0);
        src.coeffs[0] = 2.5;
        auto loc = m2l(src, Complex(3.0, 4.0), 0);
        const Complex expect = 2.5 * std::log(Complex(3.0, 4.0));
        CHECK(loc.coeffs[0].real() == Catch::Approx(expect.real()));
    }
    SECTION("coincident centers rejected") {
        Expansion src = zero_expansion(ExpansionKind::multipole, Complex(1, 1), 3);
        CHECK_THROWS_AS(m2l(src, Complex(1, 1), 3), PreconditionError);
    }
    SECTION("truncation error within the mediating-multipole bound") {
        // geometry: source ball scale lambda=1 at separation (c+1+lambda)r, c=2
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double r = 1.0, c = 2.0, lambda = 1.0;
        const double omega = 1.0 / 3.0;
        for (int trial = 0; trial < 50; ++trial) {
            const int p = 4 + (trial % 3) * 6, q = (trial % 4) * 2;
            const Complex z0 = std::polar((c + 1 + lambda) * r, 2 * pi * u(rng));
            const Complex spos = z0 + std::polar(lambda * r * std::sqrt(u(rng)), 2 * pi * u(rng));
            auto srcs = unit_charge_at(spos);
            const Complex z = std::polar(r * std::sqrt(u(rng)), 2 * pi * u(rng));
            const Complex y = z + std::polar(r - std::abs(z), 2 * pi * u(rng));
            auto med = m2l(p2m(srcs, z0, p), z, q);
            auto ref = p2l(srcs, z, q);
            const Complex dz = y - z;
            Complex acc = 0.0;
            for (int k = q; k >= 1; --k) acc = (acc + ref.coeffs[k] - med.coeffs[k]) * dz;
            acc += ref.coeffs[0].real() - med.coeffs[0].real();
            const double bound =
                (double(q + 1) / (p + 1)) * std::pow(omega, p + 1) / (1 - omega);
            CHECK(std::abs(acc) <= bound * (1 + 1e-9));
        }
    }
}

TEST_CASE("l2l shift") {
    std::mt19937_64 rng(33);
    auto srcs = random_charges(rng, 10, Complex(4.0, 3.0), 0.8, true);
    auto local = p2l(srcs, Complex(0.1, 0.0), 14);

    SECTION("zero shift is the identity") {
        CHECK(coeffs_close(local, l2l(local, local.center), 1e-15));
    }
    SECTION("re-centering leaves evaluation invariant") {
        std::uniform_real_distribution<double> u(-0.3, 0.3);
        for (int i = 0; i < 20; ++i) {
            const Complex c2(u(rng), u(rng));
            auto moved = l2l(local, c2);
            const Complex z(u(rng), u(rng));
            CHECK(l_eval(moved, z) ==
                  Catch::Approx(l_eval(local, z)).epsilon(1e-12));
        }
    }
    SECTION("chained shifts equal a single shift") {
        auto chained = l2l(l2l(local, Complex(0.2, -0.1)), Complex(-0.15, 0.05));
        auto single = l2l(local, Complex(-0.15, 0.05));
        CHECK(coeffs_close(chained, single, 1e-12));
    }
    SECTION("output order above input order rejected") {
        CHECK_THROWS_AS(l2l(local, Complex(0, 0), local.order() + 1), PreconditionError);
    }
}

TEST_CASE("m_eval") {
    SECTION("log-only expansion at |z| = e") {
        Expansion e = zero_expansion(ExpansionKind::multipole, Complex(0, 0), 4);
        e.coeffs[0] = 1.0;
        CHECK(m_eval(e, std::polar(std::exp(1.0), 0.7)) == Catch::Approx(1.0));
    }
    SECTION("target at center rejected") {
        Expansion e = zero_expansion(ExpansionKind::multipole, Complex(1, 2), 2);
        CHECK_THROWS_AS(m_eval(e, Complex(1, 2)), PreconditionError);
    }
    SECTION("zero expansion evaluates to zero") {
        Expansion e = zero_expansion(ExpansionKind::multipole, Complex(0, 0), 6);
        CHECK(m_eval(e, Complex(2, 1)) == 0.0);
    }
    SECTION("geometric tail at 4x separation") {
        const Complex z0(0.3, 0.4);
        auto e = p2m(unit_charge_at(z0), Complex(0, 0), 20);
        const Complex z = std::polar(4.0 * std::abs(z0), 0.3);
        const double err = std::abs(m_eval(e, z) - std::log(std::abs(z - z0)));
        CHECK(err <= std::pow(0.25, 21) / (1 - 0.25));
    }
    SECTION("convergence ratio tracks |z0|/|z|") {
        // source and target on a common ray so the tail terms do not rotate
        const Complex z0 = std::polar(0.5, 0.4);
        const Complex z = std::polar(1.0, 0.4);
        const double ref = std::log(std::abs(z - z0));
        // least-squares slope of log(error) against p; the range starts
        // high enough that the 1/k tail factor no longer distorts it
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int count = 0;
        for (int p = 16; p <= 40; p += 4) {
            auto e = p2m(unit_charge_at(z0), Complex(0, 0), p);
            const double err = std::abs(m_eval(e, z) - ref);
            sx += p;
            sy += std::log(err);
            sxx += double(p) * p;
            sxy += p * std::log(err);
            ++count;
        }
        const double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);
        CHECK(slope == Catch::Approx(std::log(0.5)).epsilon(0.10));
    }
}

TEST_CASE("l_eval") {
    Expansion e = zero_expansion(ExpansionKind::local, Complex(1.0, -1.0), 1);
    e.coeffs[0] = Complex(0.25, 9.0);
    e.coeffs[1] = Complex(1.0, 0.0);
    SECTION("at the center only the real part of the constant survives") {
        CHECK(l_eval(e, e.center) == 0.25);
    }
    SECTION("linear coefficient") {
        e.coeffs[0] = 0.0;
        CHECK(l_eval(e, e.center + Complex(2.0, 0.0)) == Catch::Approx(2.0));
    }
    SECTION("high-order local matches the potential deep inside its disk") {
        const Complex z0(2.0, 0.5), c(0.0, 0.0);
        auto loc = p2l(unit_charge_at(z0), c, 30);
        const Complex z = std::polar(0.25 * std::abs(z0 - c), 2.2);
        CHECK(std::abs(l_eval(loc, z) - std::log(std::abs(z - z0))) < 1e-8);
    }
}

TEST_CASE("dipole coefficients are source-position derivatives") {
    const Complex z0(0.4, -0.7);
    const Complex n(0.6, 0.8);
    const double eps = 1e-6;
    const Complex step = 0.5 * eps * n;
    std::vector<SourceCharge> dipole = {{z0, 0.0, n}};
    std::vector<SourceCharge> pair = {{z0 + step, 1.0 / eps, {}},
                                      {z0 - step, -1.0 / eps, {}}};
    SECTION("multipole side") {
        auto a = p2m(dipole, Complex(0, 0), 10);
        auto b = p2m(pair, Complex(0, 0), 10);
        CHECK(coeffs_close(a, b, 1e-8));
    }
    SECTION("local side") {
        auto a = p2l(dipole, Complex(3.0, 3.0), 10);
        auto b = p2l(pair, Complex(3.0, 3.0), 10);
        CHECK(coeffs_close(a, b, 1e-8, /*real_part_order0=*/true));
    }
    SECTION("direct evaluation side") {
        const Complex z(2.5, 0.3);
        const double a = direct_eval(dipole[0], z);
        const double b = direct_eval(pair[0], z) + direct_eval(pair[1], z);
        CHECK(a == Catch::Approx(b).epsilon(1e-8));
        CHECK(a == Catch::Approx(log_sum_oracle(dipole, z)).epsilon(1e-13));
    }
}
