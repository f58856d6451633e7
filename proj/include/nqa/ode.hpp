#pragma once

// Adaptive Dormand-Prince 5(4) integrator over complex state vectors, with
// the classic 4th-order dense-output interpolant. Step acceptance follows the
// standard mixed absolute/relative error norm; FSAL is exploited.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>

#include "core.hpp"

namespace nqa {

template <std::size_t D>
using State = std::array<cplx, D>;

struct AdaptiveOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    long max_steps = 4000000;
    // Joint-norm rescale threshold for homogeneous linear systems whose
    // solutions grow exponentially; infinity disables. Rescaling a nonlinear
    // system would change the trajectory, so callers must opt in.
    double renorm_threshold = std::numeric_limits<double>::infinity();
};

struct IntegrationStats {
    long accepted = 0;
    long rejected = 0;
    long rhs_evals = 0;
    long renormalizations = 0;
    // Accumulated log of the joint-norm rescalings; the stored state is the
    // true state times e^{-log_scale}. Probability ratios are unaffected.
    double log_scale = 0.0;
    // Largest scaled local error norm among accepted steps (1.0 = tolerance).
    double max_local_error = 0.0;
};

namespace detail {

// Dormand-Prince RK5(4)7FM tableau.
inline constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double dp_a21 = 1.0 / 5;
inline constexpr double dp_a31 = 3.0 / 40, dp_a32 = 9.0 / 40;
inline constexpr double dp_a41 = 44.0 / 45, dp_a42 = -56.0 / 15, dp_a43 = 32.0 / 9;
inline constexpr double dp_a51 = 19372.0 / 6561, dp_a52 = -25360.0 / 2187,
                        dp_a53 = 64448.0 / 6561, dp_a54 = -212.0 / 729;
inline constexpr double dp_a61 = 9017.0 / 3168, dp_a62 = -355.0 / 33,
                        dp_a63 = 46732.0 / 5247, dp_a64 = 49.0 / 176,
                        dp_a65 = -5103.0 / 18656;
inline constexpr double dp_b[7] = {35.0 / 384,       0.0,          500.0 / 1113,
                                   125.0 / 192,      -2187.0 / 6784, 11.0 / 84,
                                   0.0};
// Embedded 4th-order error weights (b - b_hat).
inline constexpr double dp_e[7] = {71.0 / 57600,  0.0,
                                   -71.0 / 16695, 71.0 / 1920,
                                   -17253.0 / 339200, 22.0 / 525, -1.0 / 40};
// Dense-output weights for the quartic interpolant.
inline constexpr double dp_d[7] = {-12715105075.0 / 11282082432.0,
                                   0.0,
                                   87487479700.0 / 32700410799.0,
                                   -10690763975.0 / 1880347072.0,
                                   701980252875.0 / 199316789632.0,
                                   -1453857185.0 / 822651844.0,
                                   69997945.0 / 29380423.0};

template <std::size_t D>
double joint_norm(const State<D>& y) {
    double s = 0.0;
    for (const cplx& c : y) s += std::norm(c);
    return std::sqrt(s);
}

} // namespace detail

// Integrates dy/dt = rhs(t, y) from t0 to t1 (t1 > t0), emitting dense-output
// samples at the ascending times in sample_times[0..n_samples) via
// on_sample(index, state). Returns the state at t1.
template <std::size_t D, class RHS, class Sampler>
State<D> integrate_dense(RHS&& rhs, State<D> y, double t0, double t1,
                         const double* sample_times, std::size_t n_samples,
                         Sampler&& on_sample, const AdaptiveOptions& opt = {},
                         IntegrationStats* stats = nullptr) {
    if (!(t1 > t0)) throw invalid_params("integrate_dense: requires t1 > t0");
    IntegrationStats local;
    IntegrationStats& st = stats ? *stats : local;

    std::size_t next_sample = 0;
    while (next_sample < n_samples && sample_times[next_sample] <= t0) {
        on_sample(next_sample, y);
        ++next_sample;
    }

    std::array<State<D>, 7> k;
    State<D> ytmp, y1;
    double t = t0;

    rhs(t, y, k[0]);
    ++st.rhs_evals;

    // Initial step: conservative curvature-free guess refined by control.
    double h = (t1 - t0) * 1e-4;
    {
        double dy = 0.0, df = 0.0;
        for (std::size_t i = 0; i < D; ++i) {
            const double sc = opt.atol + opt.rtol * std::abs(y[i]);
            dy += std::norm(y[i]) / (sc * sc);
            df += std::norm(k[0][i]) / (sc * sc);
        }
        if (df > 0.0 && dy > 0.0)
            h = std::min(h, 0.01 * std::sqrt(dy / df));
        h = std::max(h, (t1 - t0) * 1e-12);
    }

    using detail::dp_b;
    using detail::dp_c;
    using detail::dp_d;
    using detail::dp_e;

    while (t < t1) {
        if (st.accepted + st.rejected >= opt.max_steps)
            throw std::runtime_error("integrate_dense: step budget exceeded");
        bool last = false;
        if (t + h >= t1) {
            h = t1 - t;
            last = true;
        }

        for (std::size_t i = 0; i < D; ++i)
            ytmp[i] = y[i] + h * detail::dp_a21 * k[0][i];
        rhs(t + dp_c[1] * h, ytmp, k[1]);
        for (std::size_t i = 0; i < D; ++i)
            ytmp[i] = y[i] + h * (detail::dp_a31 * k[0][i] + detail::dp_a32 * k[1][i]);
        rhs(t + dp_c[2] * h, ytmp, k[2]);
        for (std::size_t i = 0; i < D; ++i)
            ytmp[i] = y[i] + h * (detail::dp_a41 * k[0][i] + detail::dp_a42 * k[1][i] +
                                  detail::dp_a43 * k[2][i]);
        rhs(t + dp_c[3] * h, ytmp, k[3]);
        for (std::size_t i = 0; i < D; ++i)
            ytmp[i] = y[i] + h * (detail::dp_a51 * k[0][i] + detail::dp_a52 * k[1][i] +
                                  detail::dp_a53 * k[2][i] + detail::dp_a54 * k[3][i]);
        rhs(t + dp_c[4] * h, ytmp, k[4]);
        for (std::size_t i = 0; i < D; ++i)
            ytmp[i] = y[i] + h * (detail::dp_a61 * k[0][i] + detail::dp_a62 * k[1][i] +
                                  detail::dp_a63 * k[2][i] + detail::dp_a64 * k[3][i] +
                                  detail::dp_a65 * k[4][i]);
        rhs(t + dp_c[5] * h, ytmp, k[5]);
        for (std::size_t i = 0; i < D; ++i)
            y1[i] = y[i] + h * (dp_b[0] * k[0][i] + dp_b[2] * k[2][i] +
                                dp_b[3] * k[3][i] + dp_b[4] * k[4][i] +
                                dp_b[5] * k[5][i]);
        rhs(t + h, y1, k[6]);
        st.rhs_evals += 6;

        double err = 0.0;
        for (std::size_t i = 0; i < D; ++i) {
            cplx e = dp_e[0] * k[0][i] + dp_e[2] * k[2][i] + dp_e[3] * k[3][i] +
                     dp_e[4] * k[4][i] + dp_e[5] * k[5][i] + dp_e[6] * k[6][i];
            const double sc =
                opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
            err += std::norm(h * e) / (sc * sc);
        }
        err = std::sqrt(err / D);

        if (err > 1.0) {
            ++st.rejected;
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            continue;
        }
        ++st.accepted;
        st.max_local_error = std::max(st.max_local_error, err);

        if (next_sample < n_samples && sample_times[next_sample] <= t + h) {
            // Quartic dense interpolant over the accepted step.
            std::array<State<D>, 5> cont;
            for (std::size_t i = 0; i < D; ++i) {
                const cplx dy = y1[i] - y[i];
                cont[0][i] = y[i];
                cont[1][i] = dy;
                cont[2][i] = h * k[0][i] - dy;
                cont[3][i] = dy - h * k[6][i] - cont[2][i];
                cont[4][i] = h * (dp_d[0] * k[0][i] + dp_d[2] * k[2][i] +
                                  dp_d[3] * k[3][i] + dp_d[4] * k[4][i] +
                                  dp_d[5] * k[5][i] + dp_d[6] * k[6][i]);
            }
            while (next_sample < n_samples &&
                   (sample_times[next_sample] <= t + h ||
                    (last && next_sample == n_samples - 1))) {
                const double th = std::min(1.0, (sample_times[next_sample] - t) / h);
                State<D> u;
                for (std::size_t i = 0; i < D; ++i)
                    u[i] = cont[0][i] +
                           th * (cont[1][i] +
                                 (1.0 - th) * (cont[2][i] +
                                               th * (cont[3][i] + (1.0 - th) * cont[4][i])));
                on_sample(next_sample, u);
                ++next_sample;
            }
        }

        t += h;
        y = y1;
        k[0] = k[6]; // FSAL
        if (detail::joint_norm(y) > opt.renorm_threshold) {
            const double nrm = detail::joint_norm(y);
            const double inv = 1.0 / nrm;
            for (std::size_t i = 0; i < D; ++i) {
                y[i] *= inv;
                k[0][i] *= inv; // homogeneous linear system
            }
            ++st.renormalizations;
            st.log_scale += std::log(nrm);
        }
        h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
    }
    while (next_sample < n_samples) { // samples at exactly t1 after roundoff
        on_sample(next_sample, y);
        ++next_sample;
    }
    return y;
}

} // namespace nqa
