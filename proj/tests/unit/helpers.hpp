#pragma once

#include <random>

#include "heomtt/system.hpp"

namespace testing_util {

inline heomtt::CMat random_matrix(int n, std::mt19937& rng) {
    std::normal_distribution<double> d;
    heomtt::CMat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m(i, j) = {d(rng), d(rng)};
    return m;
}

inline heomtt::CMat random_hermitian(int n, std::mt19937& rng) {
    const heomtt::CMat m = random_matrix(n, rng);
    return 0.5 * (m + m.adjoint());
}

inline heomtt::CVec random_vector(long n, std::mt19937& rng) {
    std::normal_distribution<double> d;
    heomtt::CVec v(n);
    for (long i = 0; i < n; ++i)
        v(i) = {d(rng), d(rng)};
    return v;
}

// Random bath with K decaying terms split over the given coupling operators.
inline heomtt::SystemModel random_model(int n, int K, std::mt19937& rng, int n_baths = 1) {
    std::uniform_real_distribution<double> u(0.1, 1.0);
    heomtt::SystemModel m;
    m.H = random_hermitian(n, rng);
    m.H_ren = heomtt::CMat::Zero(n, n);
    for (int b = 0; b < n_baths; ++b)
        m.baths.push_back({random_hermitian(n, rng), {}});
    for (int k = 0; k < K; ++k) {
        heomtt::bath::ExpansionTerm t;
        t.alpha = {u(rng), u(rng) - 0.5};
        t.alpha_tilde = {u(rng), u(rng) - 0.5};
        t.gamma = {u(rng) - 0.5, u(rng)};
        m.baths[k % n_baths].expansion.terms.push_back(t);
    }
    return m;
}

} // namespace testing_util
