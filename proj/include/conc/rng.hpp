#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace conc {

// Philox4x32-10 block cipher (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"). Maps a 128-bit counter under a 64-bit key to 128 bits.
using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key) noexcept;

/// Position in a counter-based random stream.
///
/// The output at a position is Philox4x32-10 keyed by `master_seed` applied
/// to the counter block (counter, stream_id). Every variate consumes exactly
/// one counter value: uniforms, normals (inverse CDF) and exponentials
/// (inverse CDF) alike. Copying a SeedContext therefore replays the stream,
/// which is how synchronous couplings share noise.
struct SeedContext {
    std::uint64_t master_seed = 0;
    std::uint64_t stream_id = 0;
    std::uint64_t counter = 0;

    /// Raw 64 bits at the current position; advances the counter by one.
    std::uint64_t next_bits() noexcept;
    /// Uniform on the open interval (0, 1) with 53-bit resolution.
    double uniform() noexcept;
    /// Standard normal by inverse CDF of one uniform.
    double normal() noexcept;
    /// Exponential(rate) by inverse CDF of one uniform. rate is not checked.
    double exponential(double rate) noexcept;

    friend bool operator==(const SeedContext&, const SeedContext&) = default;
};

SeedContext derive_stream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept;

/// Appends nothing and returns an empty vector for n == 0. Advances ctx.counter by n.
std::vector<double> draw_normal(SeedContext& ctx, std::size_t n);

/// Throws std::invalid_argument unless rate > 0. Advances ctx.counter by n.
std::vector<double> draw_exponential(SeedContext& ctx, double rate, std::size_t n);

/// Inverse of the standard normal CDF (Wichura's AS241, about 1e-16 relative).
/// Returns -inf at 0, +inf at 1 and NaN outside [0, 1].
double normal_quantile(double p) noexcept;

}  // namespace conc
