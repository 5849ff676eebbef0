#include "bfkit/image.hpp"

#include <gtest/gtest.h>

namespace bfkit {
namespace {

TEST(Grid, RejectsBadShapes) {
    EXPECT_THROW(Image(0, 3), std::invalid_argument);
    EXPECT_THROW(Image(2, 2, std::vector<std::int16_t>(3)), std::invalid_argument);
}

TEST(Grid, RowMajorAccess) {
    Image img(3, 2, std::vector<std::int16_t>{1, 2, 3, 4, 5, 6});
    EXPECT_EQ(img(2, 0), 3);
    EXPECT_EQ(img(0, 1), 4);
    EXPECT_EQ(img.row(1)[2], 6);
    EXPECT_THROW(img.at(3, 0), std::out_of_range);
}

TEST(Rounding, HalfAwayFromZeroAndSaturates) {
    EXPECT_EQ(round_to_sample(2.5), 3);
    EXPECT_EQ(round_to_sample(-2.5), -3);
    EXPECT_EQ(round_to_sample(2.4999), 2);
    EXPECT_EQ(round_to_sample(1e9), 32767);
    EXPECT_EQ(round_to_sample(-1e9), -32768);
}

TEST(Conversion, RealRoundTripIsExactForSamples) {
    Image img(2, 2, std::vector<std::int16_t>{-100, 0, 300, 1000});
    EXPECT_EQ(to_image(to_real(img)), img);
}

}  // namespace
}  // namespace bfkit
