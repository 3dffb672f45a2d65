#include <catch2/catch_amalgamated.hpp>
#include <sstream>

#include "zdet/int_matrix.hpp"

using namespace zdet;

TEST_CASE("matrix construction and norm") {
    IntMatrix a(2, 3);
    REQUIRE(a.rows() == 2);
    REQUIRE(a.cols() == 3);
    REQUIRE(a.norm() == 0);
    a(0, 1) = -7;
    a(1, 2) = 5;
    REQUIRE(a.norm() == 7);
    REQUIRE(!a.square());
    REQUIRE(IntMatrix::identity(4).square());
}

TEST_CASE("matrix product") {
    IntMatrix a(2, 2), b(2, 2);
    a(0, 0) = 1; a(0, 1) = 2; a(1, 0) = 3; a(1, 1) = 4;
    b(0, 0) = 5; b(0, 1) = 6; b(1, 0) = 7; b(1, 1) = 8;
    IntMatrix c = a * b;
    REQUIRE(c(0, 0) == 19);
    REQUIRE(c(0, 1) == 22);
    REQUIRE(c(1, 0) == 43);
    REQUIRE(c(1, 1) == 50);
}

TEST_CASE("text format round trip with comments") {
    std::istringstream in("# a comment\n2 3\n1 -2 3\n# interior comment\n4 5 -6\n");
    IntMatrix a = read_matrix(in);
    REQUIRE(a.rows() == 2);
    REQUIRE(a.cols() == 3);
    REQUIRE(a(0, 1) == -2);
    REQUIRE(a(1, 2) == -6);
    std::ostringstream out;
    write_matrix(out, a);
    std::istringstream in2(out.str());
    REQUIRE(read_matrix(in2) == a);
}

TEST_CASE("crlf files parse") {
    std::istringstream in("2 2\r\n1 2\r\n-3 4\r\n");
    const IntMatrix a = read_matrix(in);
    REQUIRE(a(1, 0) == -3);
    REQUIRE(a(1, 1) == 4);
}

TEST_CASE("malformed matrices are rejected") {
    auto parse = [](const std::string& s) {
        std::istringstream in(s);
        return read_matrix(in);
    };
    REQUIRE_THROWS_AS(parse(""), ParseError);
    REQUIRE_THROWS_AS(parse("2\n1 2\n3 4\n"), ParseError);
    REQUIRE_THROWS_AS(parse("2 2\n1 2\n3\n"), ParseError);
    REQUIRE_THROWS_AS(parse("2 2\n1 2\n3 4 5\n"), ParseError);
    REQUIRE_THROWS_AS(parse("2 2\n1 2\n3 x\n"), ParseError);
    REQUIRE_THROWS_AS(parse("1 1\n"), ParseError);
}
