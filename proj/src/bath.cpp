#include "heomtt/bath.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

// pchip.hpp calls unqualified isnan.
using std::isnan;
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/tools/minima.hpp>

#include "heomtt/errors.hpp"

namespace heomtt::bath {

namespace {

using boost::math::quadrature::gauss_kronrod;
constexpr double pi = std::numbers::pi;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Roots of (w + W)^2 + G^2 and (w - W)^2 + G^2.
void lorentz_roots(double omega, double gamma, std::vector<cplx>& out) {
    out.emplace_back(omega, gamma);
    out.emplace_back(omega, -gamma);
    out.emplace_back(-omega, gamma);
    out.emplace_back(-omega, -gamma);
}

cplx upsilon(cplx w, double omega, double gamma) {
    return ((w + omega) * (w + omega) + gamma * gamma) * ((w - omega) * (w - omega) + gamma * gamma);
}

// A rational density p w^power / prod_q (w - z_q) with simple poles.
struct RationalTerm {
    double p;
    int power;
    std::vector<cplx> poles;
};

std::vector<RationalTerm> rational_terms(const SpectralDensity& sd) {
    std::vector<RationalTerm> out;
    std::visit(overloaded{
                   [&](const LorentzianOhmicSD& s) {
                       for (const auto& t : s.terms) {
                           RationalTerm r{t.p, 1, {}};
                           lorentz_roots(t.omega, t.gamma, r.poles);
                           out.push_back(std::move(r));
                       }
                   },
                   [&](const LorentzianSuperOhmicSD& s) {
                       for (const auto& t : s.terms) {
                           RationalTerm r{t.p, 3, {}};
                           lorentz_roots(t.omega1, t.gamma1, r.poles);
                           lorentz_roots(t.omega2, t.gamma2, r.poles);
                           out.push_back(std::move(r));
                       }
                   },
                   [&](const DiscreteSD&) {
                       throw ConfigError("residue expansion requires a continuous spectral density");
                   },
               },
               sd);
    return out;
}

cplx residue(const RationalTerm& term, std::size_t which) {
    const cplx z = term.poles[which];
    cplx denom = 1.0;
    for (std::size_t q = 0; q < term.poles.size(); ++q) {
        if (q == which)
            continue;
        const cplx d = z - term.poles[q];
        if (std::abs(d) < 1e-14 * std::max(1.0, std::abs(z)))
            throw ConfigError("spectral density has a repeated pole; residue expansion needs distinct poles");
        denom *= d;
    }
    return term.p * std::pow(z, term.power) / denom;
}

cplx evaluate_complex(const SpectralDensity& sd, cplx w) {
    return std::visit(overloaded{
                          [&](const LorentzianOhmicSD& s) {
                              cplx acc = 0.0;
                              for (const auto& t : s.terms)
                                  acc += t.p * w / upsilon(w, t.omega, t.gamma);
                              return acc;
                          },
                          [&](const LorentzianSuperOhmicSD& s) {
                              cplx acc = 0.0;
                              for (const auto& t : s.terms)
                                  acc += t.p * w * w * w /
                                         (upsilon(w, t.omega1, t.gamma1) * upsilon(w, t.omega2, t.gamma2));
                              return acc;
                          },
                          [&](const DiscreteSD&) -> cplx {
                              throw ConfigError("complex evaluation needs a continuous spectral density");
                          },
                      },
                      sd);
}

// J(w)/w, regular at w = 0 for the continuous families.
double j_over_omega(const SpectralDensity& sd, double w) {
    return std::visit(overloaded{
                          [&](const LorentzianOhmicSD& s) {
                              double acc = 0.0;
                              for (const auto& t : s.terms)
                                  acc += t.p / upsilon(w, t.omega, t.gamma).real();
                              return acc;
                          },
                          [&](const LorentzianSuperOhmicSD& s) {
                              double acc = 0.0;
                              for (const auto& t : s.terms)
                                  acc += t.p * w * w /
                                         (upsilon(w, t.omega1, t.gamma1).real() *
                                          upsilon(w, t.omega2, t.gamma2).real());
                              return acc;
                          },
                          [&](const DiscreteSD&) -> double {
                              throw ConfigError("J/w is only defined for continuous densities");
                          },
                      },
                      sd);
}

// w coth(beta w / 2), with a series for |beta w| < 1e-3.
double omega_coth(double w, double beta) {
    const double x = 0.5 * beta * w;
    if (std::abs(beta * w) < 1e-3) {
        const double x2 = x * x;
        return (2.0 / beta) * (1.0 + x2 / 3.0 - x2 * x2 / 45.0);
    }
    return w / std::tanh(x);
}

struct Scales {
    double lo;   // smallest characteristic frequency
    double hi;   // upper end of the structured region
    std::vector<double> breaks;
};

Scales scales_of(const SpectralDensity& sd) {
    Scales s{std::numeric_limits<double>::infinity(), 0.0, {}};
    auto add_peak = [&](double omega, double gamma) {
        s.lo = std::min(s.lo, std::min(omega, gamma));
        s.hi = std::max(s.hi, omega + 60.0 * gamma);
        s.hi = std::max(s.hi, 4.0 * omega);
        for (double k : {-10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0}) {
            const double b = omega + k * gamma;
            if (b > 0.0)
                s.breaks.push_back(b);
        }
    };
    std::visit(overloaded{
                   [&](const LorentzianOhmicSD& d) {
                       for (const auto& t : d.terms)
                           add_peak(t.omega, t.gamma);
                   },
                   [&](const LorentzianSuperOhmicSD& d) {
                       for (const auto& t : d.terms) {
                           add_peak(t.omega1, t.gamma1);
                           add_peak(t.omega2, t.gamma2);
                       }
                   },
                   [&](const DiscreteSD& d) {
                       for (const auto& m : d.modes) {
                           s.lo = std::min(s.lo, m.omega);
                           s.hi = std::max(s.hi, m.omega);
                       }
                   },
               },
               sd);
    s.breaks.push_back(s.hi);
    std::sort(s.breaks.begin(), s.breaks.end());
    s.breaks.erase(std::unique(s.breaks.begin(), s.breaks.end()), s.breaks.end());
    return s;
}

// Panel edges on [0, hi] including the breakpoints, refined so no panel is
// wider than max_width.
std::vector<double> panel_edges(const Scales& s, double max_width) {
    std::vector<double> edges{0.0};
    for (double b : s.breaks) {
        const double a = edges.back();
        if (b <= a)
            continue;
        const int pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_width)));
        for (int i = 1; i <= pieces; ++i)
            edges.push_back(a + (b - a) * i / pieces);
    }
    return edges;
}

// Adaptive bisection on top of the fixed 15/31-point Kronrod pair. Boost's
// own recursion measures the tolerance against |integral|, which never
// settles on oscillatory panels whose contributions cancel.
template <class F>
double gk_panel(F& f, double a, double b, double tol, double floor, int depth, double& err_acc, double& l1_acc) {
    double err = 0.0, l1 = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate(f, a, b, 0, 0.0, &err, &l1);
    // The non-adaptive path reports the error on the [-1, 1] image; L1 is
    // already scaled.
    err *= 0.5 * (b - a);
    if (depth > 0 && err > tol * l1 && err > floor && err > 1e-300) {
        const double mid = 0.5 * (a + b);
        return gk_panel(f, a, mid, tol, 0.5 * floor, depth - 1, err_acc, l1_acc) +
               gk_panel(f, mid, b, tol, 0.5 * floor, depth - 1, err_acc, l1_acc);
    }
    err_acc += err;
    l1_acc += l1;
    return v;
}

template <class F>
double gk(F f, double a, double b, const QuadratureOptions& opts, double& err_acc, double& l1_acc) {
    if (std::isinf(b)) {
        // w = a + x / (1 - x) maps [0, 1) onto [a, inf).
        auto g = [&](double x) {
            const double u = 1.0 - x;
            return u > 0.0 ? f(a + x / u) / (u * u) : 0.0;
        };
        return gk_panel(g, 0.0, 1.0, opts.rel_tol, opts.abs_tol, opts.max_depth, err_acc, l1_acc);
    }
    return gk_panel(f, a, b, opts.rel_tol, opts.abs_tol, opts.max_depth, err_acc, l1_acc);
}

void check_convergence(double err, double l1, const QuadratureOptions& opts, const char* what) {
    const double budget = std::max(100.0 * opts.rel_tol * l1, opts.abs_tol);
    if (!(err <= budget) && err > 1e-300)
        throw ConvergenceError(std::string("quadrature did not converge for ") + what);
}

} // namespace

cplx CorrelationExpansion::correlation(double t) const {
    cplx acc = 0.0;
    for (const auto& k : terms)
        acc += k.alpha * std::exp(I_unit * k.gamma * t);
    return acc;
}

cplx CorrelationExpansion::correlation_conj(double t) const {
    cplx acc = 0.0;
    for (const auto& k : terms)
        acc += k.alpha_tilde * std::exp(I_unit * k.gamma * t);
    return acc;
}

double BathSpec::beta() const {
    if (!(temperature_kelvin > 0.0))
        throw ConfigError("bath temperature must be positive");
    return units::beta_from_kelvin(temperature_kelvin);
}

void validate(const SpectralDensity& sd) {
    std::visit(overloaded{
                   [](const LorentzianOhmicSD& s) {
                       for (const auto& t : s.terms)
                           if (!(t.omega > 0.0) || !(t.gamma > 0.0))
                               throw ConfigError("Ohmic Lorentzian needs omega > 0 and gamma > 0");
                   },
                   [](const LorentzianSuperOhmicSD& s) {
                       for (const auto& t : s.terms)
                           if (!(t.omega1 > 0.0) || !(t.gamma1 > 0.0) || !(t.omega2 > 0.0) || !(t.gamma2 > 0.0))
                               throw ConfigError("super-Ohmic Lorentzian needs positive centers and widths");
                   },
                   [](const DiscreteSD& s) {
                       double prev = 0.0;
                       for (const auto& m : s.modes) {
                           if (!(m.omega > prev))
                               throw ConfigError("discrete mode frequencies must be positive and strictly increasing");
                           prev = m.omega;
                       }
                   },
               },
               sd);
}

bool is_continuous(const SpectralDensity& sd) { return !std::holds_alternative<DiscreteSD>(sd); }

cplx bose(cplx z, double beta) {
    const cplx x = beta * z;
    if (x.real() > 0.0) {
        const cplx e = std::exp(-x);
        return e / (1.0 - e);
    }
    return 1.0 / (std::exp(x) - 1.0);
}

std::vector<std::pair<double, double>> discrete_display(const DiscreteSD& dsd) {
    std::vector<std::pair<double, double>> out;
    const auto& m = dsd.modes;
    for (std::size_t j = 0; j < m.size(); ++j) {
        double lo, hi;
        if (m.size() == 1) {
            lo = 0.0;
            hi = 2.0 * m[0].omega;
        } else {
            lo = j == 0 ? std::max(0.0, m[0].omega - 0.5 * (m[1].omega - m[0].omega))
                        : 0.5 * (m[j - 1].omega + m[j].omega);
            hi = j + 1 == m.size() ? m[j].omega + 0.5 * (m[j].omega - m[j - 1].omega)
                                   : 0.5 * (m[j].omega + m[j + 1].omega);
        }
        const double c2 = m[j].coupling * m[j].coupling;
        out.emplace_back(m[j].omega, pi * c2 / (2.0 * m[j].omega * (hi - lo)));
    }
    return out;
}

double evaluate_sd(const SpectralDensity& sd, double omega) {
    if (omega < 0.0)
        return -evaluate_sd(sd, -omega);
    if (const auto* d = std::get_if<DiscreteSD>(&sd)) {
        const auto shown = discrete_display(*d);
        const auto& m = d->modes;
        for (std::size_t j = 0; j < m.size(); ++j) {
            const double hi = j + 1 == m.size() ? (m.size() == 1 ? 2.0 * m[0].omega
                                                                 : m[j].omega + 0.5 * (m[j].omega - m[j - 1].omega))
                                                : 0.5 * (m[j].omega + m[j + 1].omega);
            const double lo = j == 0 ? (m.size() == 1 ? 0.0 : std::max(0.0, m[0].omega - 0.5 * (m[1].omega - m[0].omega)))
                                     : 0.5 * (m[j - 1].omega + m[j].omega);
            if (omega > lo && omega <= hi)
                return shown[j].second;
        }
        return 0.0;
    }
    return omega * j_over_omega(sd, omega);
}

cplx correlation_quadrature(const SpectralDensity& sd, double beta, double t, const QuadratureOptions& opts) {
    if (!is_continuous(sd))
        throw ConfigError("correlation_quadrature needs a continuous spectral density");
    if (!(beta > 0.0))
        throw ConfigError("beta must be positive");
    validate(sd);

    const Scales s = scales_of(sd);
    const double at = std::abs(t);
    const double width = at > 0.0 ? std::min(8.0 * pi / at, s.hi / 8.0) : s.hi / 8.0;
    const auto edges = panel_edges(s, width);

    QuadratureOptions o = opts;
    if (at > 0.0 && o.abs_tol == 0.0) {
        // Absolute floor per panel from the non-oscillatory magnitude, so
        // strongly cancelling panels at long times stop refining.
        const double scale = std::abs(correlation_quadrature(sd, beta, 0.0, opts)) * pi;
        o.abs_tol = 1e-3 * opts.rel_tol * scale / static_cast<double>(edges.size());
    }

    auto re_f = [&](double w) { return j_over_omega(sd, w) * omega_coth(w, beta) * std::cos(w * at); };
    auto im_f = [&](double w) { return -w * j_over_omega(sd, w) * std::sin(w * at); };

    double re = 0.0, im = 0.0, err = 0.0, l1 = 0.0;
    for (std::size_t i = 1; i < edges.size(); ++i) {
        re += gk(re_f, edges[i - 1], edges[i], o, err, l1);
        if (at > 0.0)
            im += gk(im_f, edges[i - 1], edges[i], o, err, l1);
    }

    // Smooth decaying tail beyond the structured region.
    const double W = edges.back();
    auto g_re = [&](double u) { return j_over_omega(sd, W + u) * omega_coth(W + u, beta); };
    auto g_im = [&](double u) { return (W + u) * j_over_omega(sd, W + u); };
    if (at == 0.0) {
        re += gk(g_re, 0.0, std::numeric_limits<double>::infinity(), o, err, l1);
    } else {
        boost::math::quadrature::ooura_fourier_cos<double> fcos(1e-11);
        boost::math::quadrature::ooura_fourier_sin<double> fsin(1e-11);
        const auto [gc, ec] = fcos.integrate(g_re, at);
        const auto [gs, es] = fsin.integrate(g_re, at);
        const auto [hc, ehc] = fcos.integrate(g_im, at);
        const auto [hs, ehs] = fsin.integrate(g_im, at);
        const double cw = std::cos(W * at), sw = std::sin(W * at);
        // int_W^inf f(w) cos(w t) = cos(Wt) int f(W+u) cos(ut) - sin(Wt) int f(W+u) sin(ut)
        re += cw * gc - sw * gs;
        im += -(sw * hc + cw * hs);
        // Ooura reports relative errors; the tail is small next to the panels,
        // so a loose relative bound on it suffices.
        if (std::max({ec, es, ehc, ehs}) > 1e-6)
            throw ConvergenceError("quadrature did not converge for the C(t) tail");
    }
    check_convergence(err, l1, o, "C(t)");
    cplx c{re / pi, im / pi};
    if (t < 0.0)
        c = std::conj(c);
    return c;
}

CorrelationExpansion expand_correlation(const SpectralDensity& sd, double beta, int n_matsubara) {
    if (!(beta > 0.0))
        throw ConfigError("expand_correlation: beta must be positive");
    if (n_matsubara < 0)
        throw ConfigError("expand_correlation: n_matsubara must be >= 0");
    validate(sd);
    if (const auto* d = std::get_if<DiscreteSD>(&sd))
        return discrete_expansion(*d, beta);

    CorrelationExpansion out;
    for (const auto& term : rational_terms(sd)) {
        for (std::size_t q = 0; q < term.poles.size(); ++q) {
            const cplx z = term.poles[q];
            if (z.imag() >= 0.0)
                continue;
            // Closing the contour in the lower half plane for t > 0.
            const cplx res = residue(term, q);
            const cplx nb = bose(z, beta);
            out.terms.push_back({-2.0 * I_unit * res * (1.0 + nb), -2.0 * I_unit * res * nb, -z, false});
        }
    }
    for (int k = 1; k <= n_matsubara; ++k) {
        const double nu = 2.0 * pi * k / beta;
        const cplx a = -2.0 * I_unit / beta * evaluate_complex(sd, cplx{0.0, -nu});
        out.terms.push_back({a, a, cplx{0.0, nu}, true});
    }
    return out;
}

CorrelationExpansion expand_correlation(const BathSpec& bath) {
    return expand_correlation(bath.sd, bath.beta(), bath.n_matsubara);
}

CorrelationExpansion discrete_expansion(const DiscreteSD& dsd, double beta) {
    if (!(beta > 0.0))
        throw ConfigError("discrete_expansion: beta must be positive");
    CorrelationExpansion out;
    for (const auto& m : dsd.modes) {
        const double amp = m.coupling * m.coupling / (2.0 * m.omega);
        const double n = bose(cplx{m.omega, 0.0}, beta).real();
        out.terms.push_back({amp * (n + 1.0), amp * n, cplx{-m.omega, 0.0}, false});
        out.terms.push_back({amp * n, amp * (n + 1.0), cplx{m.omega, 0.0}, false});
    }
    return out;
}

cplx discrete_correlation(const DiscreteSD& dsd, double beta, double t) {
    cplx acc = 0.0;
    for (const auto& m : dsd.modes) {
        const double amp = m.coupling * m.coupling / (2.0 * m.omega);
        const double coth = 1.0 / std::tanh(0.5 * beta * m.omega);
        acc += amp * cplx{coth * std::cos(m.omega * t), -std::sin(m.omega * t)};
    }
    return acc;
}

double cumulative_reorganization(const SpectralDensity& sd, double omega) {
    if (omega <= 0.0)
        return 0.0;
    const Scales s = scales_of(sd);
    QuadratureOptions opts;
    std::vector<double> edges{0.0};
    for (double e : panel_edges(s, s.hi / 8.0))
        if (e > 0.0 && e < omega)
            edges.push_back(e);
    edges.push_back(omega);
    auto f = [&](double w) { return j_over_omega(sd, w); };
    double acc = 0.0, err = 0.0, l1 = 0.0;
    for (std::size_t i = 1; i < edges.size(); ++i)
        acc += gk(f, edges[i - 1], edges[i], opts, err, l1);
    return acc / pi;
}

double reorganization_energy(const SpectralDensity& sd) {
    if (const auto* d = std::get_if<DiscreteSD>(&sd)) {
        double acc = 0.0;
        for (const auto& m : d->modes)
            acc += m.coupling * m.coupling / (2.0 * m.omega * m.omega);
        return acc;
    }
    validate(sd);
    const Scales s = scales_of(sd);
    QuadratureOptions opts;
    auto f = [&](double w) { return j_over_omega(sd, w); };
    const auto edges = panel_edges(s, s.hi / 8.0);
    double acc = 0.0, err = 0.0, l1 = 0.0;
    for (std::size_t i = 1; i < edges.size(); ++i)
        acc += gk(f, edges[i - 1], edges[i], opts, err, l1);
    acc += gk(f, edges.back(), std::numeric_limits<double>::infinity(), opts, err, l1);
    check_convergence(err, l1, opts, "reorganization energy");
    return acc / pi;
}

DiscreteSD discretize_makri(const SpectralDensity& sd, int n_modes) {
    if (n_modes < 1)
        throw ConfigError("discretize_makri: need at least one mode");
    if (!is_continuous(sd))
        throw ConfigError("discretize_makri: spectral density is already discrete");
    validate(sd);
    const double lambda = reorganization_energy(sd);
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw ConfigError("discretize_makri: reorganization energy must be finite and positive");

    const Scales s = scales_of(sd);
    const int n_grid = 10000;
    const double w_lo = 1e-6 * s.lo;
    double w_hi = 50.0 * s.hi;
    // Cumulative on a log grid; the first point carries the (linear) low-end piece.
    std::vector<double> w(n_grid), F(n_grid);
    auto f = [&](double x) { return j_over_omega(sd, x); };
    QuadratureOptions opts;
    opts.rel_tol = 1e-12;
    const double ratio = std::log(w_hi / w_lo) / (n_grid - 1);
    w[0] = w_lo;
    double err = 0.0, l1 = 0.0;
    F[0] = gk(f, 0.0, w_lo, opts, err, l1) / pi;
    for (int i = 1; i < n_grid; ++i) {
        w[i] = w_lo * std::exp(ratio * i);
        const double inc = gk(f, w[i - 1], w[i], opts, err, l1) / pi;
        if (inc < -1e-15 * lambda)
            throw ConfigError("discretize_makri: cumulative reorganization energy is not monotone");
        F[i] = F[i - 1] + inc;
    }
    const double top = (n_modes - 0.5) / n_modes * lambda;
    if (F.back() < top)
        throw ConvergenceError("discretize_makri: cumulative grid does not reach the last bin");

    // Monotone cubic interpolation of log w as a function of F.
    std::vector<double> xs, ys;
    xs.reserve(n_grid);
    ys.reserve(n_grid);
    for (int i = 0; i < n_grid; ++i) {
        if (!xs.empty() && F[i] <= xs.back() * (1.0 + 1e-15))
            continue;
        xs.push_back(F[i]);
        ys.push_back(std::log(w[i]));
    }
    if (xs.size() < 4)
        throw ConvergenceError("discretize_makri: cumulative reorganization energy is not invertible");
    boost::math::interpolators::pchip<std::vector<double>> inv(std::move(xs), std::move(ys));

    DiscreteSD out;
    const double c_scale = std::sqrt(2.0 * lambda / n_modes);
    for (int j = 1; j <= n_modes; ++j) {
        const double target = (j - 0.5) / n_modes * lambda;
        const double wj = std::exp(inv(target));
        out.modes.push_back({wj, wj * c_scale});
    }
    validate(out);
    return out;
}

double spectral_peak(const SpectralDensity& sd) {
    if (const auto* d = std::get_if<DiscreteSD>(&sd)) {
        const auto shown = discrete_display(*d);
        auto it = std::max_element(shown.begin(), shown.end(),
                                   [](const auto& a, const auto& b) { return a.second < b.second; });
        return it == shown.end() ? 0.0 : it->first;
    }
    const Scales s = scales_of(sd);
    const int n = 4000;
    const double lo = 1e-4 * s.lo, hi = 2.0 * s.hi;
    const double r = std::log(hi / lo) / (n - 1);
    int best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double v = evaluate_sd(sd, lo * std::exp(r * i));
        if (v > best_v) {
            best_v = v;
            best = i;
        }
    }
    const double a = lo * std::exp(r * std::max(0, best - 1));
    const double b = lo * std::exp(r * std::min(n - 1, best + 1));
    boost::uintmax_t iters = 200;
    const auto res = boost::math::tools::brent_find_minima([&](double x) { return -evaluate_sd(sd, x); }, a, b,
                                                           std::numeric_limits<double>::digits / 2, iters);
    return res.first;
}

double correlation_zero_closed_form(const SpectralDensity& sd, double beta, double rel_tol) {
    if (const auto* d = std::get_if<DiscreteSD>(&sd))
        return discrete_correlation(*d, beta, 0.0).real();
    const auto poles = expand_correlation(sd, beta, 0);
    double acc = 0.0;
    for (const auto& k : poles.terms)
        acc += k.alpha.real();
    // Matsubara series, terms decay at least like k^-3; add the tail estimate
    // sum_{k>M} c k^-3 ~ term_M * M / 2.
    double term = 0.0;
    long k = 1;
    for (; k < 10'000'000; ++k) {
        const double nu = 2.0 * pi * static_cast<double>(k) / beta;
        term = (-2.0 * I_unit / beta * evaluate_complex(sd, cplx{0.0, -nu})).real();
        acc += term;
        if (k > 8 && std::abs(term) * static_cast<double>(k) < rel_tol * std::abs(acc))
            break;
    }
    acc += term * static_cast<double>(k) / 2.0;
    return acc;
}

KappaResult kappa(const SpectralDensity& sd, double beta) {
    const double c0 = correlation_zero_closed_form(sd, beta);
    if (!(c0 > 0.0))
        throw ConfigError("kappa: C(0) must be positive");
    const double Lambda = spectral_peak(sd);
    const double Delta = std::sqrt(c0);
    return {Lambda / Delta, Lambda, Delta};
}

KappaResult kappa_quadrature(const SpectralDensity& sd, double beta) {
    const double c0 = correlation_quadrature(sd, beta, 0.0).real();
    if (!(c0 > 0.0))
        throw ConfigError("kappa: C(0) must be positive");
    const double Lambda = spectral_peak(sd);
    const double Delta = std::sqrt(c0);
    return {Lambda / Delta, Lambda, Delta};
}

LorentzianOhmicSD construct_ohmic_for(double lambda, double kappa_target, double beta, double width_ratio) {
    if (!(lambda > 0.0) || !(kappa_target > 0.0) || !(width_ratio > 0.0))
        throw ConfigError("construct_ohmic_for: lambda, kappa and width ratio must be positive");
    auto make = [&](double omega) {
        const double gamma = width_ratio * omega;
        const double p = 4.0 * lambda * gamma * (omega * omega + gamma * gamma);
        return LorentzianOhmicSD{{{p, omega, gamma}}};
    };
    // kappa grows monotonically with the center frequency at fixed lambda.
    double lo = std::log(1e-8), hi = std::log(10.0);
    auto kap = [&](double lw) { return kappa(make(std::exp(lw)), beta).kappa; };
    if (kap(lo) > kappa_target || kap(hi) < kappa_target)
        throw ConfigError("construct_ohmic_for: kappa target out of reach");
    for (int it = 0; it < 200 && hi - lo > 1e-14; ++it) {
        const double mid = 0.5 * (lo + hi);
        (kap(mid) < kappa_target ? lo : hi) = mid;
    }
    return make(std::exp(0.5 * (lo + hi)));
}

} // namespace heomtt::bath
