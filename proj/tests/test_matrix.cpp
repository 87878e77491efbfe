#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hqa/matrix.hpp"

using namespace hqa;

TEST_CASE("affine_rows computes A*W + bias row-wise") {
    Matrix a(2, 3);
    a(0, 0) = 1;
    a(0, 1) = 0;
    a(0, 2) = 2;
    a(1, 0) = 0.5;
    a(1, 1) = 1;
    a(1, 2) = 0;
    Matrix w(3, 2);
    w(0, 0) = 1;
    w(0, 1) = -1;
    w(1, 0) = 2;
    w(1, 1) = 0.5;
    w(2, 0) = 0;
    w(2, 1) = 3;
    std::vector<double> bias{0.25, -0.5};
    Matrix out(2, 2);
    affine_rows(a, w, bias, out);
    // Hand products.
    CHECK(out(0, 0) == Catch::Approx(1 * 1 + 2 * 0 + 0.25).epsilon(0).margin(1e-15));
    CHECK(out(0, 1) == Catch::Approx(-1 + 6 - 0.5).epsilon(0).margin(1e-15));
    CHECK(out(1, 0) == Catch::Approx(0.5 + 2 + 0.25).epsilon(0).margin(1e-15));
    CHECK(out(1, 1) == Catch::Approx(-0.5 + 0.5 - 0.5).epsilon(0).margin(1e-15));
}

TEST_CASE("accumulate_outer sums per-row outer products") {
    Matrix a(2, 2), b(2, 3);
    a(0, 0) = 1;
    a(0, 1) = 2;
    a(1, 0) = 3;
    a(1, 1) = 4;
    for (std::size_t j = 0; j < 3; ++j) {
        b(0, j) = static_cast<double>(j + 1);
        b(1, j) = static_cast<double>(10 + j);
    }
    Matrix s(2, 3);
    accumulate_outer(a, b, s);
    CHECK(s(0, 0) == Catch::Approx(1 * 1 + 3 * 10).margin(1e-15));
    CHECK(s(1, 2) == Catch::Approx(2 * 3 + 4 * 12).margin(1e-15));
}

TEST_CASE("transpose flips indices") {
    Matrix m(2, 3);
    m(0, 2) = 5;
    m(1, 0) = -1;
    const Matrix t = transpose(m);
    REQUIRE(t.rows == 3);
    REQUIRE(t.cols == 2);
    CHECK(t(2, 0) == 5);
    CHECK(t(0, 1) == -1);
}

TEST_CASE("sigmoid hits pinned values") {
    CHECK(sigmoid(0.0) == 0.5);
    CHECK(std::fabs(sigmoid(1.0) - 0.7310585786300049) < 1e-15);
    CHECK(std::fabs(sigmoid(2.0) - 0.8807970779778823) < 1e-15);
    CHECK(std::fabs(sigmoid(-2.0) - (1.0 - 0.8807970779778823)) < 1e-15);
    Matrix m(1, 2);
    m(0, 0) = 0.0;
    m(0, 1) = 2.0;
    sigmoid_in_place(m);
    CHECK(m(0, 0) == 0.5);
    CHECK(std::fabs(m(0, 1) - 0.8807970779778823) < 1e-15);
}
