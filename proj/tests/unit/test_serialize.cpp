#include <gtest/gtest.h>

#include <cstring>
#include <filesystem>
#include <sstream>

#include "ttsvd/errors.hpp"
#include "ttsvd/serialize.hpp"
#include "ttsvd/structured.hpp"

using namespace ttsvd;

namespace {

template <class T>
std::string bytes(const T& v) {
    std::ostringstream out;
    write_tt(out, TTValue(v));
    return out.str();
}

template <class T>
T round_trip(const T& v) {
    std::istringstream in(bytes(v));
    return std::get<T>(read_tt(in));
}

template <class T>
bool same_cores(const T& a, const T& b) {
    if (a.length() != b.length()) return false;
    for (int n = 0; n < a.length(); ++n) {
        if (!(a.core(n) == b.core(n))) return false;
    }
    return true;
}

}  // namespace

TEST(Serialize, VectorRoundTripIsBitExact) {
    VectorTT x = random_vector_tt(6, 3, 1);
    VectorTT y = round_trip(x);
    EXPECT_TRUE(same_cores(x, y));
    EXPECT_EQ(x.tags(), y.tags());
    EXPECT_EQ(bytes(x), bytes(y));
}

TEST(Serialize, MatrixAndBlockRoundTrip) {
    MatrixTT a = random_matrix_tt(5, 2, 2);
    EXPECT_TRUE(same_cores(a, round_trip(a)));
    BlockTT u = move_block(random_block_tt(6, 4, 3, 3), 2);
    BlockTT v = round_trip(u);
    EXPECT_EQ(v.block_position(), 2);
    EXPECT_EQ(v.block_size(), 4);
    EXPECT_TRUE(same_cores(u, v));
    EXPECT_EQ(u.tags(), v.tags());
}

TEST(Serialize, HeaderLayout) {
    const std::string b = bytes(random_block_tt(4, 3, 2, 4));
    ASSERT_GE(b.size(), 36u);
    EXPECT_EQ(b.substr(0, 4), "TTSV");
    std::uint32_t version = 0;
    std::memcpy(&version, b.data() + 4, 4);
    EXPECT_EQ(version, 1u);
    EXPECT_EQ(static_cast<int>(b[8]), 3);  // block kind
    EXPECT_EQ(static_cast<int>(b[9]), 8);  // scalar width
    std::uint64_t n = 0, k = 0, pos = 0;
    std::memcpy(&n, b.data() + 12, 8);
    std::memcpy(&k, b.data() + 20, 8);
    std::memcpy(&pos, b.data() + 28, 8);
    EXPECT_EQ(n, 4u);
    EXPECT_EQ(k, 3u);
    EXPECT_EQ(pos, 3u);
}

TEST(Serialize, RejectsCorruptInput) {
    std::string b = bytes(random_vector_tt(4, 2, 5));
    std::string bad_magic = b;
    bad_magic[0] = 'X';
    std::istringstream in1(bad_magic);
    EXPECT_THROW(read_tt(in1), FormatError);
    std::istringstream in2(b.substr(0, b.size() - 3));
    EXPECT_THROW(read_tt(in2), FormatError);
}

TEST(Serialize, Files) {
    const auto path = std::filesystem::temp_directory_path() / "ttsvd_serialize_test.tt";
    MatrixTT a = random_matrix_tt(4, 3, 6);
    save_tt(path, a);
    EXPECT_TRUE(same_cores(a, std::get<MatrixTT>(load_tt(path))));
    std::filesystem::remove(path);
    EXPECT_THROW(load_tt(path), Error);
}
