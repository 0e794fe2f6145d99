#include "conc/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace conc {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

template <std::size_t N>
inline double horner(const double (&coef)[N], double x) noexcept {
    double acc = coef[N - 1];
    for (std::size_t i = N - 1; i-- > 0;) acc = acc * x + coef[i];
    return acc;
}

}  // namespace

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
        mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return ctr;
}

std::uint64_t SeedContext::next_bits() noexcept {
    const PhiloxCounter block{static_cast<std::uint32_t>(counter), static_cast<std::uint32_t>(counter >> 32),
                              static_cast<std::uint32_t>(stream_id), static_cast<std::uint32_t>(stream_id >> 32)};
    const PhiloxKey key{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32)};
    const PhiloxCounter out = philox4x32_10(block, key);
    ++counter;
    return static_cast<std::uint64_t>(out[0]) | (static_cast<std::uint64_t>(out[1]) << 32);
}

double SeedContext::uniform() noexcept {
    // (k + 0.5) / 2^53 lies strictly inside (0, 1).
    return (static_cast<double>(next_bits() >> 11) + 0.5) * 0x1.0p-53;
}

double SeedContext::normal() noexcept { return normal_quantile(uniform()); }

double SeedContext::exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

SeedContext derive_stream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept {
    return SeedContext{master_seed, stream_id, 0};
}

std::vector<double> draw_normal(SeedContext& ctx, std::size_t n) {
    std::vector<double> out(n);
    for (auto& z : out) z = ctx.normal();
    return out;
}

std::vector<double> draw_exponential(SeedContext& ctx, double rate, std::size_t n) {
    if (!(rate > 0.0)) throw std::invalid_argument("draw_exponential: rate must be positive");
    std::vector<double> out(n);
    for (auto& e : out) e = ctx.exponential(rate);
    return out;
}

double normal_quantile(double p) noexcept {
    static constexpr double a[] = {3.3871328727963666080e0,  1.3314166789178437745e+2, 1.9715909503065514427e+3,
                                   1.3731693765509461125e+4, 4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                   3.3430575583588128105e+4, 2.5090809287301226727e+3};
    static constexpr double b[] = {1.0,
                                   4.2313330701600911252e+1,
                                   6.8718700749205790830e+2,
                                   5.3941960214247511077e+3,
                                   2.1213794301586595867e+4,
                                   3.9307895800092710610e+4,
                                   2.8729085735721942674e+4,
                                   5.2264952788528545610e+3};
    static constexpr double c[] = {1.42343711074968357734e0,  4.63033784615654529590e0, 5.76949722146069140550e0,
                                   3.64784832476320460504e0,  1.27045825245236838258e0, 2.41780725177450611770e-1,
                                   2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static constexpr double d[] = {1.0,
                                   2.05319162663775882187e0,
                                   1.67638483018380384940e0,
                                   6.89767334985100004550e-1,
                                   1.48103976427480074590e-1,
                                   1.51986665636164571966e-2,
                                   5.47593808499534494600e-4,
                                   1.05075007164441684324e-9};
    static constexpr double e[] = {6.65790464350110377720e0,  5.46378491116411436990e0, 1.78482653991729133580e0,
                                   2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                   2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static constexpr double f[] = {1.0,
                                   5.99832206555887937690e-1,
                                   1.36929880922735805310e-1,
                                   1.48753612908506148525e-2,
                                   7.86869131145613259100e-4,
                                   1.84631831751005468180e-5,
                                   1.42151175831644588870e-7,
                                   2.04426310338993978564e-15};

    if (!(p > 0.0)) return p == 0.0 ? -HUGE_VAL : std::nan("");
    if (!(p < 1.0)) return p == 1.0 ? HUGE_VAL : std::nan("");
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * horner(a, r) / horner(b, r);
    }
    double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
    double value;
    if (r <= 5.0) {
        r -= 1.6;
        value = horner(c, r) / horner(d, r);
    } else {
        r -= 5.0;
        value = horner(e, r) / horner(f, r);
    }
    return q < 0.0 ? -value : value;
}

}  // namespace conc
