#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "lendfair/rng.hpp"

using namespace lendfair;

// Known-answer vectors for Philox4x32-10 from the Random123 distribution.
TEST(Philox, KnownAnswerZero)
{
    auto const out = Philox4x32::encrypt({0, 0, 0, 0}, {0, 0});
    EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes)
{
    auto const out = Philox4x32::encrypt({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                         {0xffffffffu, 0xffffffffu});
    EXPECT_EQ(out, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(Philox, KnownAnswerPi)
{
    auto const out = Philox4x32::encrypt({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                         {0xa4093822u, 0x299f31d0u});
    EXPECT_EQ(out, (Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(PathRng, SameKeySameStream)
{
    PathRng a{42, 1, 7};
    PathRng b{42, 1, 7};
    for (int i = 0; i < 1000; ++i)
        ASSERT_EQ(a(), b());
}

TEST(PathRng, StreamsAndPathsAreDistinct)
{
    // first outputs of neighbouring keys never collide
    std::set<std::uint64_t> firsts;
    for (std::uint32_t stream = 0; stream < 4; ++stream)
    {
        for (std::uint32_t path = 0; path < 256; ++path)
            firsts.insert(PathRng{20230201, stream, path}());
    }
    firsts.insert(PathRng{20230202, 0, 0}());
    EXPECT_EQ(firsts.size(), 4u * 256u + 1u);
}

TEST(PathRng, TrainAndTestStreamsDiffer)
{
    auto const train = static_cast<std::uint32_t>(StreamId::Train);
    auto const test = static_cast<std::uint32_t>(StreamId::Test);
    ASSERT_NE(train, test);
    PathRng a{1, train, 0};
    PathRng b{1, test, 0};
    int equal = 0;
    for (int i = 0; i < 100; ++i)
        equal += a() == b();
    EXPECT_EQ(equal, 0);
}

TEST(NormalStream, Moments)
{
    NormalStream z{7, 0, 0};
    constexpr int n = 400000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i)
    {
        double const x = z();
        sum += x;
        sum2 += x * x;
    }
    double const mean = sum / n;
    double const var = sum2 / n - mean * mean;
    EXPECT_NEAR(mean, 0.0, 4.0 / std::sqrt(double(n)));
    EXPECT_NEAR(var, 1.0, 4.0 * std::sqrt(2.0 / n));
}
