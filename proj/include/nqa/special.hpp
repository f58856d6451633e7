#pragma once

// Special functions needed by the closed-form predictions: complex Gamma
// (Lanczos), the Lerch transcendent on [0,1), and parabolic cylinder
// functions D_p(z) for complex order and argument via Kummer series.

#include <cfloat>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>

#include "core.hpp"

namespace nqa {

namespace detail {

// Lanczos approximation, g = 7, 9 coefficients: ~1e-13 relative accuracy in
// double precision on moderate |z|.
inline constexpr double lanczos_g = 7.0;
inline constexpr double lanczos_c[9] = {
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
};

inline bool is_nonpositive_integer(cplx z, double tol = 1e-14) {
    if (std::abs(z.imag()) > tol) return false;
    const double r = z.real();
    return r < 0.5 && std::abs(r - std::round(r)) < tol;
}

inline cplx gamma_positive_half(cplx z) {
    // valid for Re z >= 0.5
    z -= 1.0;
    cplx x = lanczos_c[0];
    for (int i = 1; i < 9; ++i) x += lanczos_c[i] / (z + double(i));
    const cplx t = z + lanczos_g + 0.5;
    return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

}  // namespace detail

// Gamma(z) for complex z away from the poles at 0, -1, -2, ...
inline cplx complex_gamma(cplx z) {
    if (detail::is_nonpositive_integer(z))
        throw domain_error("complex_gamma: pole at non-positive integer");
    if (z.real() >= 0.5) return detail::gamma_positive_half(z);
    // reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
    return M_PI / (std::sin(M_PI * z) * detail::gamma_positive_half(1.0 - z));
}

// 1/Gamma(z), entire; exactly zero at the poles of Gamma.
inline cplx reciprocal_gamma(cplx z) {
    if (detail::is_nonpositive_integer(z)) return cplx{0.0, 0.0};
    return 1.0 / complex_gamma(z);
}

struct LerchResult {
    double value;
    double tail_bound;  // bound on the truncation error
    int terms;
};

namespace detail {

// Phi(1-xe, 1/2, 1) for xe -> 0 via Li_{1/2}(e^-t) = sqrt(pi/t) +
// sum_n zeta(1/2-n)(-t)^n/n! with t = -log(1-xe); four terms leave a
// truncation error below 1e-20 relative for xe <= 1e-4. The direct series
// would need ~30/xe terms here and the argument itself degenerates to 1.0
// in double precision once xe < 2^-53.
inline LerchResult lerch_half_near_one(double xe) {
    constexpr double zeta_half = -1.4603545088095868;      // zeta(1/2)
    constexpr double zeta_m1h = -0.20788622497735457;      // zeta(-1/2)
    constexpr double zeta_m3h = -0.025485201889833036;     // zeta(-3/2)
    constexpr double zeta_m5h = 0.0085169287778503305;     // zeta(-5/2)
    const double t = -std::log1p(-xe);
    const double sum = std::sqrt(M_PI / t) + zeta_half - zeta_m1h * t +
                       0.5 * zeta_m3h * t * t - zeta_m5h * t * t * t / 6.0;
    const double tail = std::abs(zeta_m5h) * t * t * t * t / 6.0;
    return {std::exp(t) * sum, tail, 4};
}

}  // namespace detail

// Lerch transcendent Phi(x,s,a) = sum_{n>=0} x^n/(n+a)^s on 0 <= x < 1.
// Summation stops once the geometric tail bound drops below 1e-14 of the
// partial sum. For s=1/2, a=1 and x within 1e-4 of 1 (where the series
// needs >1e5 terms) the expansion around x=1 takes over.
inline LerchResult lerch_phi(double x, double s, double a) {
    if (x < 0.0 || x >= 1.0)
        throw domain_error("lerch_phi: requires 0 <= x < 1");
    if (!(s > 0.0) || !(a > 0.0))
        throw domain_error("lerch_phi: requires s > 0 and a > 0");
    if (x > 1.0 - 1e-4 && s == 0.5 && a == 1.0)
        return detail::lerch_half_near_one(1.0 - x);
    double sum = 0.0;
    double xn = 1.0;  // x^n
    int n = 0;
    for (;; ++n) {
        sum += xn / std::pow(n + a, s);
        xn *= x;
        const double tail = xn / (std::pow(n + 1 + a, s) * (1.0 - x));
        if (tail < 1e-14 * sum) return {sum, tail, n + 1};
        if (n > 100000000)
            throw domain_error("lerch_phi: series failed to converge");
    }
}

namespace detail {

inline constexpr int kummer_term_cap = 103;

// Kummer's confluent hypergeometric M(a,b,x) by direct series. For
// Re x < 0 the transformation M(a,b,x) = e^x M(b-a,b,-x) avoids the
// exponentially large cancellation of the alternating series.
inline cplx kummer_m(cplx a, cplx b, cplx x) {
    cplx pre{1.0, 0.0};
    if (x.real() < 0.0) {
        pre = std::exp(x);
        a = b - a;
        x = -x;
    }
    cplx sum{1.0, 0.0};
    cplx term{1.0, 0.0};
    for (int n = 0; n < kummer_term_cap; ++n) {
        term *= (a + double(n)) / (b + double(n)) * x / double(n + 1);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum)) return pre * sum;
    }
    throw domain_error("kummer_m: series did not converge within term cap");
}

}  // namespace detail

struct DResult {
    cplx value;
    // Cancellation model e^{|z^2/2|} * machine epsilon. |z^2/2| bounds both
    // loss channels: the even/odd branch cancellation (scale e^{|Re z^2/2|})
    // and the in-series cancellation at imaginary z^2 (scale e^{|z^2/2|}).
    double error_estimate;
};

// Parabolic cylinder function D_p(z), complex order and argument, via the
// standard split into even/odd Kummer series:
//   D_p(z) = 2^{p/2} sqrt(pi) e^{-z^2/4} [ M(-p/2, 1/2, z^2/2) / Gamma((1-p)/2)
//            - sqrt(2) z M((1-p)/2, 3/2, z^2/2) / Gamma(-p/2) ].
// Domain restricted to |z| <= 12 where the series (with term cap) converges.
inline DResult parabolic_cylinder_D(cplx p, cplx z) {
    if (std::abs(z) > 12.0)
        throw domain_error("parabolic_cylinder_D: |z| > 12 outside series domain");
    const cplx x = 0.5 * z * z;
    const cplx even = detail::kummer_m(-0.5 * p, cplx{0.5, 0.0}, x) *
                      reciprocal_gamma(0.5 * (1.0 - p));
    const cplx odd = detail::kummer_m(0.5 * (1.0 - p), cplx{1.5, 0.0}, x) *
                     reciprocal_gamma(-0.5 * p);
    const cplx val = std::pow(2.0, 0.5 * p) * std::sqrt(M_PI) *
                     std::exp(-0.25 * z * z) * (even - std::sqrt(2.0) * z * odd);
    const double err = std::exp(std::abs(x)) * DBL_EPSILON;
    return {val, err};
}

}  // namespace nqa
