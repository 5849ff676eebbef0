#include "bfkit/io.hpp"

#include "bfkit/errors.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace bfkit {
namespace {

namespace fs = std::filesystem;

class IoTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("bfkit_io_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    fs::path path(const std::string& name) const { return dir_ / name; }

    void write_bytes(const fs::path& p, const std::string& bytes) const {
        std::ofstream out(p, std::ios::binary);
        out << bytes;
    }

    std::string read_bytes(const fs::path& p) const {
        std::ifstream in(p, std::ios::binary);
        return {std::istreambuf_iterator<char>(in), {}};
    }

    fs::path dir_;
};

TEST_F(IoTest, RawKnownBytes) {
    // -100, 0, 300, 1000 little-endian
    write_bytes(path("a.raw"), std::string("\x9c\xff\x00\x00\x2c\x01\xe8\x03", 8));
    write_bytes(path("a.meta"), "width=2\nheight=2\n");
    const Image img = read_image(path("a.raw"));
    ASSERT_EQ(img.width(), 2);
    ASSERT_EQ(img.height(), 2);
    EXPECT_EQ(img(0, 0), -100);
    EXPECT_EQ(img(1, 0), 0);
    EXPECT_EQ(img(0, 1), 300);
    EXPECT_EQ(img(1, 1), 1000);
}

TEST_F(IoTest, RawRoundTrip) {
    Image img(5, 3);
    std::int16_t v = -32768;
    for (auto& p : img.pixels()) p = v = static_cast<std::int16_t>(v + 4099);
    img(4, 2) = 32767;
    write_image(img, path("r.raw"));
    EXPECT_TRUE(fs::exists(sidecar_path(path("r.raw"))));
    EXPECT_EQ(read_image(path("r.raw")), img);
}

TEST_F(IoTest, RawErrors) {
    write_bytes(path("b.raw"), std::string(8, '\0'));
    EXPECT_THROW(read_image(path("b.raw")), FormatError);  // no sidecar
    try {
        read_image(path("b.raw"));
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("b.meta"), std::string::npos);
    }
    write_bytes(path("b.meta"), "width=3\nheight=2\n");
    EXPECT_THROW(read_image(path("b.raw")), FormatError);  // size mismatch
    write_bytes(path("b.meta"), "width=2\ndepth=2\n");
    EXPECT_THROW(read_image(path("b.raw")), FormatError);
}

TEST_F(IoTest, PgmKnownBytes) {
    write_bytes(path("a.pgm"), std::string("P5\n# note\n2 1\n65535\n\x01\x2c\x00\x07", 24));
    const Image img = read_image(path("a.pgm"));
    ASSERT_EQ(img.width(), 2);
    EXPECT_EQ(img(0, 0), 300);
    EXPECT_EQ(img(1, 0), 7);
}

TEST_F(IoTest, PgmRoundTripAndHeader) {
    Image img(4, 2);
    for (int i = 0; i < 8; ++i) img.pixels()[static_cast<std::size_t>(i)] = static_cast<std::int16_t>(i * 4000);
    write_image(img, path("r.pgm"));
    const std::string bytes = read_bytes(path("r.pgm"));
    EXPECT_EQ(bytes.substr(0, 15), std::string("P5\n4 2\n65535\n\x00\x00", 15));
    EXPECT_EQ(bytes.size(), 13u + 16u);
    EXPECT_EQ(read_image(path("r.pgm")), img);
}

TEST_F(IoTest, PgmRejections) {
    write_bytes(path("m.pgm"), std::string("P5\n2 1\n255\n\x01\x02", 13));
    try {
        read_image(path("m.pgm"));
        FAIL() << "8-bit PGM accepted";
    } catch (const FormatError& e) {
        ASSERT_TRUE(e.byte_offset());
        EXPECT_EQ(*e.byte_offset(), 7u);
    }
    write_bytes(path("p2.pgm"), "P2\n1 1\n65535\n0\n");
    EXPECT_THROW(read_image(path("p2.pgm")), FormatError);
    write_bytes(path("short.pgm"), std::string("P5\n2 1\n65535\n\x00\x01", 15));
    EXPECT_THROW(read_image(path("short.pgm")), FormatError);
    write_bytes(path("big.pgm"), std::string("P5\n1 1\n65535\n\x90\x00", 15));
    EXPECT_THROW(read_image(path("big.pgm")), FormatError);

    Image neg(1, 1, -5);
    EXPECT_THROW(write_image(neg, path("neg.pgm")), RangeError);
}

TEST_F(IoTest, ExtensionDispatch) {
    EXPECT_THROW(read_image(path("x.png")), FormatError);
    EXPECT_THROW(write_image(Image(1, 1), path("x.tif")), FormatError);
    EXPECT_THROW(read_image(path("missing.pgm")), FormatError);
    EXPECT_EQ(sidecar_path("/a/b/c.raw"), fs::path("/a/b/c.meta"));
}

}  // namespace
}  // namespace bfkit
