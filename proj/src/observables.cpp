#include "heomtt/observables.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "heomtt/errors.hpp"

namespace heomtt {

CMat reduce(const HEOMState& s) { return s.rho(); }

double SpectrumResult::peak_ev() const {
    if (values.empty())
        return 0.0;
    const auto it = std::max_element(values.begin(), values.end());
    return grid_ev[static_cast<std::size_t>(it - values.begin())];
}

CMat lowering_dipole(const CMat& mu) {
    CMat m = CMat::Zero(mu.rows(), mu.cols());
    for (Eigen::Index k = 1; k < mu.cols(); ++k)
        m(0, k) = mu(0, k);
    return m;
}

std::vector<double> half_line_transform(const std::vector<double>& times, const std::vector<cplx>& c,
                                        const std::vector<double>& omega_au, double window) {
    const std::size_t nt = times.size();
    if (nt < 2 || c.size() != nt)
        throw ConfigError("half-line transform needs at least two samples");
    const double dt = times[1] - times[0];
    std::vector<cplx> f(nt);
    for (std::size_t j = 0; j < nt; ++j) {
        const double w = (j == 0 || j + 1 == nt) ? 0.5 : 1.0;
        const double damp = window > 0.0 ? std::exp(-(times[j] - times[0]) / window) : 1.0;
        f[j] = w * dt * damp * c[j];
    }
    std::vector<double> out(omega_au.size());
    for (std::size_t q = 0; q < omega_au.size(); ++q) {
        // Phase recurrence instead of one exp per sample.
        const cplx step = std::exp(I_unit * omega_au[q] * dt);
        cplx ph = std::exp(I_unit * omega_au[q] * times[0]);
        cplx acc = 0.0;
        for (std::size_t j = 0; j < nt; ++j) {
            acc += ph * f[j];
            ph *= step;
            if ((j & 255) == 255)
                ph = std::exp(I_unit * omega_au[q] * times[j + 1 < nt ? j + 1 : j]);
        }
        out[q] = acc.real();
    }
    return out;
}

namespace {

// Runs task(i) for i in [0, count) on up to jobs threads.
void for_each_index(int count, int jobs, const std::function<void(int)>& task) {
    jobs = std::clamp(jobs, 1, std::max(1, count));
    if (jobs == 1) {
        for (int i = 0; i < count; ++i)
            task(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr err;
    std::mutex err_mutex;
    std::vector<std::thread> pool;
    for (int w = 0; w < jobs; ++w)
        pool.emplace_back([&] {
            for (int i = next++; i < count; i = next++) {
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard lock(err_mutex);
                    if (!err)
                        err = std::current_exception();
                }
            }
        });
    for (auto& t : pool)
        t.join();
    if (err)
        std::rethrow_exception(err);
}

SpectrumResult run_spectrum(const DenseHEOM& engine, HEOMState x0, const SpectrumOptions& opts) {
    if (!(opts.dt > 0.0) || !(opts.t_max > opts.dt))
        throw ConfigError("spectrum needs dt > 0 and t_max > dt");
    if (!(opts.omega_max_ev > opts.omega_min_ev) || opts.n_omega < 2)
        throw ConfigError("spectrum needs a nonempty frequency grid");
    const CMat X0 = x0.rho();
    SpectrumResult res;
    res.t_max = opts.t_max;
    res.window = opts.window;
    const long steps = static_cast<long>(std::llround(opts.t_max / opts.dt));
    const double t0 = x0.time;
    engine.propagate(
        std::move(x0), opts.dt, steps, opts.integrator,
        [&](const HEOMState& s) {
            res.times.push_back(s.time - t0);
            const CMat X = s.rho();
            res.correlation.push_back((X.conjugate().cwiseProduct(X0)).sum());
        });
    std::vector<double> omega(opts.n_omega);
    for (int q = 0; q < opts.n_omega; ++q) {
        res.grid_ev.push_back(opts.omega_min_ev + (opts.omega_max_ev - opts.omega_min_ev) * q / (opts.n_omega - 1));
        omega[q] = units::ev_to_au(res.grid_ev.back());
    }
    res.values = half_line_transform(res.times, res.correlation, omega, opts.window);
    const double c0 = std::abs(res.correlation.front());
    const double env = opts.window > 0.0 ? std::exp(-opts.t_max / opts.window) : 1.0;
    res.unresolved = c0 > 0.0 && std::abs(res.correlation.back()) * env > 1e-2 * c0;
    if (opts.normalize) {
        const double mx = *std::max_element(res.values.begin(), res.values.end());
        if (mx > 0.0)
            for (double& v : res.values)
                v /= mx;
    }
    return res;
}

} // namespace

SpectrumResult absorption_spectrum(const DenseHEOM& engine, const CMat& rho_ground, const SpectrumOptions& opts) {
    const CMat& mu = engine.model().dipole;
    if (mu.size() == 0)
        throw ConfigError("absorption spectrum needs a dipole matrix");
    const CMat X = rho_ground * lowering_dipole(mu);
    return run_spectrum(engine, HEOMState::factorized(engine.space_ptr(), X), opts);
}

SpectrumResult emission_spectrum(const DenseHEOM& engine, const HEOMState& equilibrium, const SpectrumOptions& opts) {
    const CMat& mu = engine.model().dipole;
    if (mu.size() == 0)
        throw ConfigError("emission spectrum needs a dipole matrix");
    if (equilibrium.data.size() != static_cast<Eigen::Index>(engine.size()))
        throw ConfigError("equilibrium state does not match the hierarchy");
    const CMat mm = lowering_dipole(mu);
    HEOMState x = equilibrium;
    x.time = 0.0;
    for (std::size_t i = 0; i < engine.space().size(); ++i)
        x.set_ado(i, mm * equilibrium.ado(i));
    return run_spectrum(engine, std::move(x), opts);
}

std::vector<CMat> generator_basis(int n) {
    if (n < 1)
        throw ConfigError("generator basis needs n >= 1");
    std::vector<CMat> G;
    const double r2 = std::sqrt(2.0);
    G.push_back(CMat::Identity(n, n) / std::sqrt(static_cast<double>(n)));
    for (int j = 0; j < n; ++j)
        for (int k = j + 1; k < n; ++k) {
            CMat s = CMat::Zero(n, n), a = CMat::Zero(n, n);
            s(j, k) = s(k, j) = 1.0 / r2;
            a(j, k) = -I_unit / r2;
            a(k, j) = I_unit / r2;
            G.push_back(s);
            G.push_back(a);
        }
    for (int l = 1; l < n; ++l) {
        CMat d = CMat::Zero(n, n);
        const double c = 1.0 / std::sqrt(static_cast<double>(l) * (l + 1));
        for (int j = 0; j < l; ++j)
            d(j, j) = c;
        d(l, l) = -c * l;
        G.push_back(d);
    }
    return G;
}

DynamicalMap dynamical_map(const DenseHEOM& engine, double dt, long n_steps, long stride, int jobs) {
    const int n = engine.dim();
    const int n2 = n * n;
    if (stride < 1)
        throw ConfigError("sample stride must be positive");
    DynamicalMap map;
    const long samples = n_steps / stride + 1;
    for (long s = 0; s < samples; ++s) {
        map.times.push_back(s * stride * dt);
        map.A.push_back(CMat::Zero(n2, n2));
        map.A_dot.push_back(CMat::Zero(n2, n2));
    }
    // Each task owns one column of every sample.
    for_each_index(n2, jobs, [&](int col) {
        CMat E = CMat::Zero(n, n);
        E(col / n, col % n) = 1.0;
        CVec deriv;
        long step = 0;
        engine.propagate(HEOMState::factorized(engine.space_ptr(), E), dt, n_steps, Integrator::RK4,
                         [&](const HEOMState& st) {
                             if (step % stride == 0) {
                                 const long q = step / stride;
                                 map.A[q].col(col) = vec(st.rho());
                                 engine.rhs(st.data, st.time, deriv);
                                 map.A_dot[q].col(col) = deriv.head(n2);
                             }
                             ++step;
                         });
    });
    return map;
}

VolumeResult f_matrix_and_volume(const DenseHEOM& engine, double dt, long n_steps, long stride, int jobs) {
    const int n = engine.dim();
    const int n2 = n * n;
    if (stride < 1)
        throw ConfigError("sample stride must be positive");
    const auto G = generator_basis(n);
    VolumeResult out;
    const long samples = n_steps / stride + 1;
    for (long s = 0; s < samples; ++s) {
        out.times.push_back(s * stride * dt);
        out.F.push_back(Eigen::MatrixXd::Zero(n2, n2));
    }
    for_each_index(n2, jobs, [&](int m) {
        long step = 0;
        engine.propagate(HEOMState::factorized(engine.space_ptr(), G[m]), dt, n_steps, Integrator::RK4,
                         [&](const HEOMState& st) {
                             if (step % stride == 0) {
                                 const CMat Gt = st.rho();
                                 // Column m holds the overlaps of G_m(t) with every G_l.
                                 for (int l = 0; l < n2; ++l)
                                     out.F[step / stride](l, m) = (G[l] * Gt).trace().real();
                             }
                             ++step;
                         });
    });
    for (const auto& F : out.F)
        out.V.push_back(F.determinant());
    return out;
}

Eigen::MatrixXcd decoherence_matrix(const CMat& A, const CMat& A_dot) {
    const int n2 = static_cast<int>(A.rows());
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n2))));
    // Lambda = A_dot A^-1, solved as A^T Lambda^T = A_dot^T.
    const Eigen::MatrixXcd At = A.transpose();
    const Eigen::MatrixXcd Adt = A_dot.transpose();
    const Eigen::MatrixXcd Lam = Eigen::FullPivLU<Eigen::MatrixXcd>(At).solve(Adt).transpose();
    const auto G = generator_basis(n);
    std::vector<CMat> LG;
    for (const CMat& g : G)
        LG.push_back(unvec(Lam * vec(g), n));
    Eigen::MatrixXcd D(n2 - 1, n2 - 1);
    for (int i = 1; i < n2; ++i)
        for (int j = 1; j < n2; ++j) {
            cplx s = 0.0;
            for (int m = 0; m < n2; ++m)
                s += (G[m] * G[i] * LG[m] * G[j]).trace();
            D(i - 1, j - 1) = s;
        }
    return D;
}

std::vector<double> canonical_rates(const CMat& A, const CMat& A_dot) {
    const Eigen::MatrixXcd D = decoherence_matrix(A, A_dot);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (D + D.adjoint()));
    const Eigen::VectorXd ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

CMat choi_matrix(const CMat& A) {
    const int n2 = static_cast<int>(A.rows());
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n2))));
    CMat C = CMat::Zero(n2, n2);
    for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k) {
            const CMat Phi = unvec(A.col(j * n + k), n);
            C.block(j * n, k * n, n, n) = Phi;
        }
    return C;
}

std::vector<double> choi_eigenvalues(const CMat& A) {
    const CMat C = choi_matrix(A);
    const Eigen::MatrixXcd H = 0.5 * (C + C.adjoint());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    const Eigen::VectorXd ev = es.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

bool non_monotonic(const std::vector<double>& v, double tol) {
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[i - 1] + tol)
            return true;
    return false;
}

} // namespace heomtt
