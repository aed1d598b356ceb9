#include "doctest.h"

#include <cmath>
#include <random>

#include "heomtt/bath.hpp"
#include "heomtt/errors.hpp"

using namespace heomtt;
using namespace heomtt::bath;

namespace {

constexpr double pi = 3.14159265358979323846;

double ohmic_direct(double p, double W, double G, double w) {
    return p * w / (((w + W) * (w + W) + G * G) * ((w - W) * (w - W) + G * G));
}

// Composite Simpson on [0, wmax] for C(t); coth handled by its series near 0.
cplx simpson_correlation(const SpectralDensity& sd, double beta, double t, double wmax, long n) {
    auto f = [&](double w) -> cplx {
        if (w == 0.0) {
            // J(w) coth(beta w / 2) -> 2 J'(0) / beta.
            const double h = 1e-7;
            return 2.0 * evaluate_sd(sd, h) / h / beta;
        }
        const double J = evaluate_sd(sd, w);
        return J * cplx(std::cos(w * t) / std::tanh(0.5 * beta * w), -std::sin(w * t));
    };
    const double h = wmax / n;
    cplx s = f(0.0) + f(wmax);
    for (long i = 1; i < n; ++i)
        s += (i % 2 ? 4.0 : 2.0) * f(i * h);
    return s * h / 3.0 / pi;
}

const LorentzianOhmicSD app1{{{2.0e-12, 4.5e-3, 4.0e-4}}};

} // namespace

TEST_CASE("Ohmic Lorentzian evaluation") {
    const LorentzianOhmicSD sd{{{0.7, 1.3, 0.4}}};
    CHECK(evaluate_sd(sd, 0.0) == 0.0);
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 10; ++i) {
        const double w = u(rng);
        CHECK(evaluate_sd(sd, w) == doctest::Approx(ohmic_direct(0.7, 1.3, 0.4, w)).epsilon(1e-13));
        CHECK(evaluate_sd(sd, -w) == -evaluate_sd(sd, w));
    }
    CHECK(spectral_peak(app1) == doctest::Approx(4.5e-3).epsilon(1e-2));
}

TEST_CASE("super-Ohmic density grows as w^3") {
    const LorentzianSuperOhmicSD sd{{{1.0, 1.0, 0.3, 2.0, 0.5}}};
    const double w1 = 1e-4, w2 = 2e-4;
    const double slope = std::log(evaluate_sd(sd, w2) / evaluate_sd(sd, w1)) / std::log(w2 / w1);
    CHECK(slope == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(expand_correlation(sd, 2.0, 0).size() == 4);
}

TEST_CASE("quadrature agrees with an independent Simpson rule") {
    const LorentzianOhmicSD sd{{{0.5, 1.0, 0.3}}};
    const double beta = 2.0;
    for (double t : {0.0, 0.7, 3.0}) {
        const cplx q = correlation_quadrature(sd, beta, t);
        const cplx s = simpson_correlation(sd, beta, t, 4000.0, 4000000);
        CHECK(std::abs(q - s) < 1e-7 * std::abs(correlation_quadrature(sd, beta, 0.0)));
    }
    CHECK(std::abs(correlation_quadrature(sd, beta, 0.0).imag()) <= 1e-10 * correlation_quadrature(sd, beta, 0.0).real());
    CHECK(std::abs(correlation_quadrature(LorentzianOhmicSD{{{0.0, 1.0, 0.3}}}, beta, 1.0)) == 0.0);
    CHECK(correlation_zero_closed_form(sd, beta) ==
          doctest::Approx(correlation_quadrature(sd, beta, 0.0).real()).epsilon(1e-9));
}

TEST_CASE("expansion reproduces the quadrature correlation") {
    const LorentzianOhmicSD sd{{{0.5, 1.0, 0.3}, {0.2, 2.5, 0.6}}};
    const double beta = 3.0;
    const auto e = expand_correlation(sd, beta, 400);
    CHECK(e.size() == 404);
    const double c0 = correlation_quadrature(sd, beta, 0.0).real();
    double worst = 0.0, worst_conj = 0.0;
    for (int i = 0; i <= 40; ++i) {
        const double t = 0.05 + 0.5 * i;
        const cplx q = correlation_quadrature(sd, beta, t);
        worst = std::max(worst, std::abs(e.correlation(t) - q) / c0);
        worst_conj = std::max(worst_conj, std::abs(e.correlation_conj(t) - std::conj(q)) / c0);
    }
    CHECK(worst < 1e-4);
    CHECK(worst_conj < 1e-4);
    CHECK(std::abs(e.correlation(0.0).imag()) < 1e-10 * std::abs(e.correlation(0.0)));
    for (const auto& t : e.terms)
        if (!t.matsubara)
            CHECK((I_unit * t.gamma).real() < 0.0);
    CHECK(expand_correlation(app1, units::beta_from_kelvin(298), 0).size() == 2);
    CHECK_THROWS_AS(expand_correlation(sd, -1.0, 0), ConfigError);
}

TEST_CASE("discrete expansion") {
    const DiscreteSD d{{{0.5, 0.1}, {1.2, 0.3}}};
    const double beta = 1.7;
    const auto e = discrete_expansion(d, beta);
    CHECK(e.size() == 4);
    double c0 = 0.0;
    for (const auto& m : d.modes)
        c0 += m.coupling * m.coupling / (2 * m.omega) / std::tanh(0.5 * beta * m.omega);
    CHECK(e.correlation(0.0).real() == doctest::Approx(c0).epsilon(1e-14));
    for (double t : {0.3, 2.0, 11.0})
        CHECK(std::abs(e.correlation(t) - discrete_correlation(d, beta, t)) < 1e-14);
    // Undamped: exp(i gamma t) with real gamma.
    for (const auto& t : e.terms)
        CHECK(t.gamma.imag() == 0.0);

    // beta w = 50: the emission side is negligible.
    const DiscreteSD one{{{1.0, 0.2}}};
    const auto z = discrete_expansion(one, 50.0);
    double big = 0.0, small = 1e300;
    for (const auto& t : z.terms) {
        big = std::max(big, std::abs(t.alpha));
        small = std::min(small, std::abs(t.alpha));
    }
    CHECK(small < 1e-20 * big);
}

TEST_CASE("reorganization energy and Makri discretization") {
    CHECK(reorganization_energy(LorentzianOhmicSD{{{0.0, 1.0, 0.2}}}) == 0.0);
    const LorentzianOhmicSD sd{{{0.5, 1.0, 0.3}, {0.2, 2.5, 0.6}}};
    const double lam = reorganization_energy(sd);
    // lambda = p / (4 Gamma (Omega^2 + Gamma^2)) per Ohmic term.
    CHECK(lam == doctest::Approx(0.5 / (4 * 0.3 * 1.09) + 0.2 / (4 * 0.6 * (6.25 + 0.36))).epsilon(1e-9));
    for (int N : {1, 7, 40}) {
        const DiscreteSD d = discretize_makri(sd, N);
        CHECK(d.modes.size() == static_cast<std::size_t>(N));
        CHECK(reorganization_energy(d) == doctest::Approx(lam).epsilon(1e-6));
        CHECK(discrete_expansion(d, 1.0).size() == static_cast<std::size_t>(2 * N));
    }
    // One bin sits at the median of the cumulative reorganization energy.
    const DiscreteSD one = discretize_makri(sd, 1);
    CHECK(cumulative_reorganization(sd, one.modes[0].omega) == doctest::Approx(0.5 * lam).epsilon(1e-6));
    CHECK_THROWS(discretize_makri(sd, 0));
}

TEST_CASE("kappa diagnostics") {
    const double beta = units::beta_from_kelvin(298);
    const LorentzianOhmicSD sd{{{2.0e-9, 8e-3, 3e-3}}};
    LorentzianOhmicSD four = sd;
    four.terms[0].p *= 4;
    const auto k1 = kappa(sd, beta), k4 = kappa(four, beta);
    CHECK(k4.Delta == doctest::Approx(2 * k1.Delta).epsilon(1e-9));
    CHECK(k4.Lambda == doctest::Approx(k1.Lambda).epsilon(1e-9));
    CHECK(k4.kappa == doctest::Approx(0.5 * k1.kappa).epsilon(1e-8));
    CHECK(kappa_quadrature(sd, beta).kappa == doctest::Approx(k1.kappa).epsilon(1e-6));

    const double lam = units::ev_to_au(0.05);
    for (double target : {1.4, 0.3}) {
        const auto c = construct_ohmic_for(lam, target, beta, 0.5);
        CHECK(kappa(c, beta).kappa == doctest::Approx(target).epsilon(1e-8));
        CHECK(reorganization_energy(c) == doctest::Approx(lam).epsilon(1e-8));
    }
}

TEST_CASE("app-1 bath scales") {
    const double beta = units::beta_from_kelvin(298);
    const double c0 = correlation_quadrature(app1, beta, 0.0).real();
    auto envelope = [&](double t_fs) {
        double env = 0.0;
        for (int i = -20; i <= 20; ++i)
            env = std::max(env, std::abs(correlation_quadrature(app1, beta, units::fs_to_au(t_fs + i))));
        return env / c0;
    };
    // Long-lived memory that has died out by 250 fs.
    CHECK(envelope(250.0) < 1.0 / std::exp(1.0));
    CHECK(envelope(40.0) > 1.0 / std::exp(1.0));
}
