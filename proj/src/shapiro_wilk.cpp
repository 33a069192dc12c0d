// Shapiro-Wilk W test following Royston's algorithm AS R94 (Applied
// Statistics 44(4), 1995), in double precision for complete samples.

#include "mvhinge/stats.hpp"

#include "mvhinge/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace mvhinge {

namespace detail {

// Wichura's AS 241 (PPND16), accurate to about 1e-16.
double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::InvalidArgument, "normal quantile outside (0, 1)");
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q *
               (((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                    45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
                 133.14166789178437745) * r + 3.387132872796366608) /
               (((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                    21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
                 42.313330701600911252) * r + 1.0);
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
                     1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
                  4.6303378461565452959) * r + 1.42343711074968357734) /
                (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
                     0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
                  2.05319162663775882187) * r + 1.0);
    } else {
        r -= 5.0;
        value = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
                     0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
                  5.4637849111641143699) * r + 6.6579046435011037772) /
                (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                     7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
                  0.59983220655588793769) * r + 1.0);
    }
    return q < 0.0 ? -value : value;
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

} // namespace detail

namespace {

// c[0] + c[1]·x + c[2]·x² + ...
template <std::size_t N>
double poly(const double (&c)[N], double x) {
    double result = 0.0;
    for (std::size_t i = N; i-- > 0;) result = result * x + c[i];
    return result;
}

constexpr double kC1[] = {0.0, 0.221157, -0.147981, -2.07119, 4.434685, -2.706056};
constexpr double kC2[] = {0.0, 0.042981, -0.293762, -1.752461, 5.682633, -3.582633};
constexpr double kC3[] = {0.544, -0.39978, 0.025054, -6.714e-4};
constexpr double kC4[] = {1.3822, -0.77857, 0.062767, -0.0020322};
constexpr double kC5[] = {-1.5861, -0.31082, -0.083751, 0.0038915};
constexpr double kC6[] = {-0.4803, -0.082676, 0.0030302};
constexpr double kG[] = {-2.273, 0.459};

/// Coefficients a_1..a_{n/2} for the upper half of the order statistics.
std::vector<double> coefficients(std::size_t n) {
    const std::size_t half = n / 2;
    std::vector<double> a(half);
    if (n == 3) {
        a[0] = std::numbers::sqrt2 / 2.0;
        return a;
    }
    const double an = static_cast<double>(n);
    std::vector<double> m(half);
    double summ2 = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        m[i] = detail::normal_quantile((static_cast<double>(i + 1) - 0.375) / (an + 0.25));
        summ2 += m[i] * m[i];
    }
    summ2 *= 2.0;
    const double ssumm2 = std::sqrt(summ2);
    const double rsn = 1.0 / std::sqrt(an);
    const double a1 = poly(kC1, rsn) - m[0] / ssumm2;

    std::size_t first_scaled;
    double fac;
    if (n > 5) {
        const double a2 = -m[1] / ssumm2 + poly(kC2, rsn);
        fac = std::sqrt((summ2 - 2.0 * m[0] * m[0] - 2.0 * m[1] * m[1]) / (1.0 - 2.0 * a1 * a1 - 2.0 * a2 * a2));
        a[1] = a2;
        first_scaled = 2;
    } else {
        fac = std::sqrt((summ2 - 2.0 * m[0] * m[0]) / (1.0 - 2.0 * a1 * a1));
        first_scaled = 1;
    }
    a[0] = a1;
    for (std::size_t i = first_scaled; i < half; ++i) a[i] = -m[i] / fac;
    return a;
}

} // namespace

ShapiroWilkResult shapiro_wilk(std::span<const double> samples) {
    const std::size_t n = samples.size();
    if (n < 3) throw Error(ErrorCode::TooFewSamples, "n = " + std::to_string(n));
    if (n > 5000) throw Error(ErrorCode::TooManySamples, "n = " + std::to_string(n));

    std::vector<double> x(samples.begin(), samples.end());
    for (double v : x) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite sample");
    }
    std::sort(x.begin(), x.end());
    const double range = x.back() - x.front();
    if (!(range > 0.0)) throw Error(ErrorCode::ZeroVariance, "all samples are equal");

    // Centre and range-scale first so W is unaffected by location and scale
    // beyond rounding.
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (double& v : x) {
        v = (v - mean) / range;
        ss += v * v;
    }

    const auto a = coefficients(n);
    double num = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) num += a[i] * (x[n - 1 - i] - x[i]);
    double w = num * num / ss;
    w = std::min(w, 1.0);
    const double w1 = 1.0 - w;

    ShapiroWilkResult result;
    result.w = w;
    if (n == 3) {
        // Exact distribution for n = 3.
        constexpr double pi6 = 6.0 / std::numbers::pi;
        constexpr double stqr = std::numbers::pi / 3.0;
        result.p = std::max(0.0, pi6 * (std::asin(std::sqrt(w)) - stqr));
        return result;
    }
    if (w1 <= 0.0) {
        result.p = 1.0;
        return result;
    }

    const double an = static_cast<double>(n);
    double y = std::log(w1);
    double mu;
    double sigma;
    if (n <= 11) {
        const double gamma = poly(kG, an);
        if (y >= gamma) {
            result.p = 1e-99;
            return result;
        }
        y = -std::log(gamma - y);
        mu = poly(kC3, an);
        sigma = std::exp(poly(kC4, an));
    } else {
        const double ln = std::log(an);
        mu = poly(kC5, ln);
        sigma = std::exp(poly(kC6, ln));
    }
    result.p = detail::normal_upper_tail((y - mu) / sigma);
    return result;
}

} // namespace mvhinge
