#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "heomtt/units.hpp"

namespace heomtt::bath {

/// Tannor-Meier two-pole Lorentzian: J(w) = p w / ([(w+W)^2+G^2][(w-W)^2+G^2]).
struct OhmicTerm {
    double p;
    double omega;
    double gamma;
};

/// Four-pole super-Ohmic Lorentzian: J(w) = p w^3 / (Y(W1,G1) Y(W2,G2)).
struct SuperOhmicTerm {
    double p;
    double omega1;
    double gamma1;
    double omega2;
    double gamma2;
};

struct LorentzianOhmicSD {
    std::vector<OhmicTerm> terms;
};

struct LorentzianSuperOhmicSD {
    std::vector<SuperOhmicTerm> terms;
};

struct DiscreteMode {
    double omega;
    double coupling;
};

/// J(w) = (pi/2) sum_j c_j^2 / w_j delta(w - w_j).
struct DiscreteSD {
    std::vector<DiscreteMode> modes;
};

using SpectralDensity = std::variant<LorentzianOhmicSD, LorentzianSuperOhmicSD, DiscreteSD>;

/// One damped exponential of C(t) = sum_k alpha_k exp(i gamma_k t);
/// C*(t) = sum_k alpha_tilde_k exp(i gamma_k t).
struct ExpansionTerm {
    cplx alpha;
    cplx alpha_tilde;
    cplx gamma;
    bool matsubara = false;
};

struct CorrelationExpansion {
    std::vector<ExpansionTerm> terms;

    std::size_t size() const { return terms.size(); }
    cplx correlation(double t) const;
    cplx correlation_conj(double t) const;
};

struct BathSpec {
    SpectralDensity sd;
    double temperature_kelvin = 298.0;
    int n_matsubara = 0;
    std::size_t coupling_index = 0;

    double beta() const;
};

void validate(const SpectralDensity& sd);
bool is_continuous(const SpectralDensity& sd);

/// Odd in w. The discrete variant evaluates the histogram form
/// pi c_j^2 / (2 w_j dw_j) on the bin around w_j.
double evaluate_sd(const SpectralDensity& sd, double omega);

struct QuadratureOptions {
    double rel_tol = 1e-10;
    double abs_tol = 0.0;
    int max_depth = 18;
};

/// C(t) = (1/pi) int_0^inf J(w) [coth(beta w/2) cos(w t) - i sin(w t)] dw
/// by panelled adaptive Gauss-Kronrod. Throws ConvergenceError when the
/// error estimate stays above tolerance.
cplx correlation_quadrature(const SpectralDensity& sd, double beta, double t,
                            const QuadratureOptions& opts = {});

/// Residue expansion: 2 terms per Ohmic Lorentzian, 4 per super-Ohmic one,
/// plus n_matsubara Bose-pole terms at gamma = i 2 pi k / beta.
CorrelationExpansion expand_correlation(const BathSpec& bath);
CorrelationExpansion expand_correlation(const SpectralDensity& sd, double beta, int n_matsubara);

/// Two undamped terms per mode (gamma = -w_j and +w_j); no Matsubara terms.
CorrelationExpansion discrete_expansion(const DiscreteSD& dsd, double beta);

/// Exact discrete correlation sum_j c_j^2/(2 w_j) [coth(beta w_j/2) cos - i sin].
cplx discrete_correlation(const DiscreteSD& dsd, double beta, double t);

/// lambda = (1/pi) int_0^inf J(w)/w dw; exact sum for DiscreteSD.
double reorganization_energy(const SpectralDensity& sd);

/// Cumulative (1/pi) int_0^w J(x)/x dx for continuous densities.
double cumulative_reorganization(const SpectralDensity& sd, double omega);

/// Equal-lambda-fraction discretization: mode j sits at the frequency where
/// the cumulative reorganization energy reaches (j - 1/2)/N of the total and
/// carries lambda/N.
DiscreteSD discretize_makri(const SpectralDensity& sd, int n_modes);

/// Frequency of the global maximum of J on w > 0.
double spectral_peak(const SpectralDensity& sd);

/// Re C(0) summed from poles plus Matsubara terms until the series tail is
/// below rel_tol. Independent from the quadrature route.
double correlation_zero_closed_form(const SpectralDensity& sd, double beta, double rel_tol = 1e-12);

struct KappaResult {
    double kappa;
    double Lambda;
    double Delta;
};

/// kappa = Lambda / Delta with Lambda the peak of J and Delta^2 = Re C(0).
KappaResult kappa(const SpectralDensity& sd, double beta);
KappaResult kappa_quadrature(const SpectralDensity& sd, double beta);

/// Single Ohmic Lorentzian with width gamma = width_ratio * omega that has the
/// requested reorganization energy and kappa at inverse temperature beta.
LorentzianOhmicSD construct_ohmic_for(double lambda, double kappa_target, double beta,
                                      double width_ratio);

/// Bose function 1/(exp(beta z) - 1) for complex z, overflow-safe.
cplx bose(cplx z, double beta);

/// Display form of a discrete density: (w_j, pi c_j^2 / (2 w_j dw_j)).
std::vector<std::pair<double, double>> discrete_display(const DiscreteSD& dsd);

} // namespace heomtt::bath
