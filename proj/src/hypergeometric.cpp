#include "rla/hypergeometric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "rla/error.hpp"

namespace rla {

double log_gamma(double x) {
    static constexpr double kG = 7.0;
    static constexpr double kCoeff[9] = {
        0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
        771.32342877765313,   -176.61502916214059,   12.507343278686905,
        -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
    };
    require(x > 0.0 || x != std::floor(x), "log_gamma undefined at non-positive integers");

    if (x < 0.5) {
        // Gamma(x) Gamma(1-x) = pi / sin(pi x)
        return std::log(std::numbers::pi / std::abs(std::sin(std::numbers::pi * x))) - log_gamma(1.0 - x);
    }
    x -= 1.0;
    double a = kCoeff[0];
    for (int i = 1; i < 9; ++i) a += kCoeff[i] / (x + i);
    const double t = x + kG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (x + 0.5) * std::log(t) - t + std::log(a);
}

double log_binomial(std::int64_t n, std::int64_t r) {
    if (r < 0 || r > n) return -std::numeric_limits<double>::infinity();
    if (r == 0 || r == n) return 0.0;
    return log_gamma(static_cast<double>(n + 1)) - log_gamma(static_cast<double>(r + 1)) -
           log_gamma(static_cast<double>(n - r + 1));
}

namespace {

// ln[(N-C)! (N-S)! / (N! (N-C-S)!)], the log of C(N-C,S)/C(N,S).
double log_miss(std::int64_t n, std::int64_t c, std::int64_t s) {
    if (c == 0 || s == 0) return 0.0;
    if (s > n - c) return -std::numeric_limits<double>::infinity();
    const auto lg = [](std::int64_t v) { return log_gamma(static_cast<double>(v) + 1.0); };
    return lg(n - c) + lg(n - s) - lg(n) - lg(n - c - s);
}

void check_domain(std::int64_t n, std::int64_t c, std::int64_t s) {
    require(n >= 0, "number of units N must be non-negative");
    require(c >= 0 && c <= n, "corrupt units C must satisfy 0 <= C <= N");
    require(s >= 0 && s <= n, "sample size S must satisfy 0 <= S <= N");
}

void check_size_domain(std::int64_t n, std::int64_t c, double p) {
    require(n >= 1, "number of units N must be at least 1");
    require(c >= 1 && c <= n, "corrupt units C must satisfy 1 <= C <= N");
    require(p > 0.0 && p < 1.0, "probability P must be in (0,1)");
}

}  // namespace

double miss_probability(std::int64_t units, std::int64_t corrupt, std::int64_t sample) {
    check_domain(units, corrupt, sample);
    return std::exp(log_miss(units, corrupt, sample));
}

double check_probability(std::int64_t units, std::int64_t corrupt, std::int64_t sample) {
    check_domain(units, corrupt, sample);
    if (corrupt == 0 || sample == 0) return 0.0;
    if (sample > units - corrupt) return 1.0;
    return -std::expm1(log_miss(units, corrupt, sample));
}

std::int64_t exact_sample_size(std::int64_t units, std::int64_t corrupt, double probability) {
    check_size_domain(units, corrupt, probability);
    const double target = std::log1p(-probability) + kTieTolerance;
    const auto meets = [&](std::int64_t s) { return log_miss(units, corrupt, s) <= target; };

    // log_miss is decreasing in S and hits -inf at N - C + 1.
    std::int64_t lo = 1;
    std::int64_t hi = units - corrupt + 1;
    while (lo < hi) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (meets(mid))
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

std::int64_t sample_size_estimate(std::int64_t units, std::int64_t corrupt, double probability) {
    check_size_domain(units, corrupt, probability);
    const double n = static_cast<double>(units);
    const double c = static_cast<double>(corrupt);
    const double s = (n - (c - 1.0) / 2.0) * (1.0 - std::pow(1.0 - probability, 1.0 / c));
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::ceil(s)), 1, units);
}

}  // namespace rla
