#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include <boost/random/normal_distribution.hpp>

namespace lendfair {

//---------------------------------------------------------------------------//
/*!
 * Philox4x32-10 counter-based block cipher.
 *
 * Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits. Any
 * block of any stream can be produced independently, so a path's draws do
 * not depend on which worker generated it.
 */
class Philox4x32
{
  public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter encrypt(Counter ctr, Key key) noexcept
    {
        for (int round = 0; round < 10; ++round)
        {
            if (round > 0)
            {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            std::uint64_t const p0 = std::uint64_t{kMul0} * ctr[0];
            std::uint64_t const p1 = std::uint64_t{kMul1} * ctr[2];
            auto const hi0 = static_cast<std::uint32_t>(p0 >> 32);
            auto const lo0 = static_cast<std::uint32_t>(p0);
            auto const hi1 = static_cast<std::uint32_t>(p1 >> 32);
            auto const lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

  private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

//---------------------------------------------------------------------------//
/*!
 * 64-bit uniform bit generator for one simulation path.
 *
 * The stream is keyed by (seed, stream id, path index): the 256-bit
 * xoshiro256++ state is the Philox encryption of two counters carrying the
 * path index and stream id, so a path's draws do not depend on which worker
 * generated it or in which order. Satisfies UniformRandomBitGenerator.
 */
class PathRng
{
  public:
    using result_type = std::uint64_t;

    PathRng(std::uint64_t seed, std::uint32_t stream, std::uint32_t path_index) noexcept
    {
        Philox4x32::Key const key{static_cast<std::uint32_t>(seed),
                                  static_cast<std::uint32_t>(seed >> 32)};
        auto const b0 = Philox4x32::encrypt({0u, 0u, path_index, stream}, key);
        auto const b1 = Philox4x32::encrypt({1u, 0u, path_index, stream}, key);
        state_ = {join(b0[0], b0[1]), join(b0[2], b0[3]), join(b1[0], b1[1]),
                  join(b1[2], b1[3])};
        // xoshiro's only fixed point
        if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0)
        {
            state_[0] = 1;
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept
    {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept
    {
        auto const result = rotl(state_[0] + state_[3], 23) + state_[0];
        auto const t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

  private:
    static constexpr std::uint64_t join(std::uint32_t lo, std::uint32_t hi) noexcept
    {
        return (std::uint64_t{hi} << 32) | lo;
    }
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept
    {
        return (x << k) | (x >> (64 - k));
    }

    std::array<std::uint64_t, 4> state_{};
};

/// Standard normal variates drawn from one path stream (ziggurat).
class NormalStream
{
  public:
    NormalStream(std::uint64_t seed, std::uint32_t stream, std::uint32_t path_index) noexcept
        : rng_{seed, stream, path_index}
    {
    }

    double operator()() { return dist_(rng_); }

  private:
    PathRng rng_;
    boost::random::normal_distribution<double> dist_;
};

/// Stream ids that partition the seed space between simulation phases.
enum class StreamId : std::uint32_t
{
    Paths = 0,
    Train = 1,
    Test = 2,
    Confirm = 3,
};

}  // namespace lendfair
