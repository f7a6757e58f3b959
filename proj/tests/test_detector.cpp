#include <doctest.h>

#include <caedge/detector.hpp>
#include <caedge/image.hpp>

#include <random>
#include <stdexcept>

#include "support/oracles.hpp"

using namespace caedge;

TEST_CASE("neighbor_diff_sum accumulates absolute differences over the mask") {
    // center 100 surrounded by 90s: full radius-1 rule sums 8 * 10
    GrayImage img(3, 3, 90);
    img.at(1, 1) = 100;
    const GrayImage padded = pad_zero(img, 1);
    CHECK(neighbor_diff_sum(padded, 2, 2, decode_rule(511, 1)) == 80);

    // the center cell contributes nothing even when selected
    CHECK(neighbor_diff_sum(padded, 2, 2, decode_rule(1, 1)) == 0);

    // constant image, any mask, interior pixel: zero
    const GrayImage flat = pad_zero(GrayImage(5, 5, 77), 1);
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20; ++i)
        CHECK(neighbor_diff_sum(flat, 3, 3, decode_rule(rng() % 512, 1)) == 0);
}

TEST_CASE("edge_response squashes the diff sum against delta") {
    CHECK(edge_response(0, 20) == doctest::Approx(0.0));
    CHECK(edge_response(0, 0) == doctest::Approx(0.0));  // 0/0 treated as no response
    CHECK(edge_response(80, 80) == doctest::Approx(0.5));
    CHECK(edge_response(80, 20) == doctest::Approx(0.8));
    CHECK(edge_response(100, 0) == doctest::Approx(1.0));
    CHECK_THROWS_AS(edge_response(-1, 20), std::invalid_argument);
    CHECK_THROWS_AS(edge_response(10, -1), std::invalid_argument);
}

TEST_CASE("detect_edges matches the brute-force evaluator") {
    std::mt19937_64 rng(12345);
    for (int radius : {1, 2}) {
        const NumberingTable& table = default_numbering(radius);
        for (int i = 0; i < 8; ++i) {
            const GrayImage img = oracle::random_gray(8, 8, rng);
            for (int p = 0; p < 4; ++p) {
                DetectorParams params;
                params.delta = static_cast<int>(rng() % 256);
                params.tau = oracle::random_map(1, 1, 0.5, rng).data[0] ? 0.3 : 0.7;
                const std::uint64_t z = rng() % (max_rule(radius) + 1);
                params.mask = decode_rule(z, radius);
                const EdgeMap got = detect_edges(img, params);
                const EdgeMap want =
                    oracle::brute_force_detect(img, params.delta, params.tau, z, radius, table);
                CHECK(got == want);
            }
        }
    }
}

TEST_CASE("detect_edges trivial outcomes") {
    std::mt19937_64 rng(31);
    const GrayImage img = oracle::random_gray(10, 6, rng);

    // tau = 1 can never be strictly exceeded (response <= 1)
    DetectorParams params;
    params.delta = 0;
    params.tau = 1.0;
    params.mask = decode_rule(511, 1);
    CHECK(detect_edges(img, params).edge_count() == 0);

    // constant zero image: nothing differs, even against the zero padding
    params.tau = 0.1;
    params.delta = 5;
    CHECK(detect_edges(GrayImage(7, 5, 0), params).edge_count() == 0);

    // empty rule mask: no neighbors, no response
    params.mask = decode_rule(0, 1);
    CHECK(detect_edges(img, params).edge_count() == 0);

    // output dimensions always match the input
    params.mask = decode_rule(300, 1);
    const EdgeMap out = detect_edges(img, params);
    CHECK(out.width == img.width);
    CHECK(out.height == img.height);

    CHECK_THROWS_AS(detect_edges(GrayImage(), params), std::invalid_argument);
    params.tau = 1.5;
    CHECK_THROWS_AS(detect_edges(img, params), std::invalid_argument);
}

TEST_CASE("constant bright image fires only against the zero padding") {
    // interior pixels see no contrast; border pixels compare against the pad
    DetectorParams params;
    params.delta = 20;
    params.tau = 0.5;
    params.mask = decode_rule(511, 1);
    const EdgeMap out = detect_edges(GrayImage(6, 5, 100), params);
    for (int y = 0; y < out.height; ++y)
        for (int x = 0; x < out.width; ++x) {
            const bool border = y == 0 || x == 0 || y == out.height - 1 || x == out.width - 1;
            CHECK(out.at(y, x) == (border ? 1 : 0));
        }
}

TEST_CASE("selecting the center bit never changes the result") {
    std::mt19937_64 rng(41);
    for (int i = 0; i < 10; ++i) {
        const GrayImage img = oracle::random_gray(9, 7, rng);
        DetectorParams a, b;
        a.delta = b.delta = static_cast<int>(rng() % 100);
        a.tau = b.tau = 0.4;
        const std::uint64_t z = rng() % 512;
        a.mask = decode_rule(z & ~std::uint64_t{1}, 1);
        b.mask = decode_rule(z | 1, 1);
        CHECK(detect_edges(img, a) == detect_edges(img, b));
    }
}

TEST_CASE("edge maps shrink monotonically in tau and grow with smaller delta") {
    std::mt19937_64 rng(53);
    for (int i = 0; i < 5; ++i) {
        const GrayImage img = oracle::random_gray(12, 9, rng);
        const std::uint64_t z = rng() % 512;

        DetectorParams params;
        params.delta = 32;
        params.mask = decode_rule(z, 1);
        std::size_t prev = SIZE_MAX;
        for (double tau : {0.0, 0.2, 0.4, 0.6, 0.8, 1.0}) {
            params.tau = tau;
            const EdgeMap out = detect_edges(img, params);
            CHECK(out.edge_count() <= prev);
            prev = out.edge_count();
        }

        params.tau = 0.5;
        prev = SIZE_MAX;
        for (int delta : {0, 16, 64, 128, 255}) {
            params.delta = delta;
            const EdgeMap out = detect_edges(img, params);
            CHECK(out.edge_count() <= prev);
            prev = out.edge_count();
        }
    }
}

TEST_CASE("decode_particle maps the unit cube onto parameter ranges") {
    DetectorParams p = decode_particle({0.0, 0.0, 0.0}, 1);
    CHECK(p.delta == 0);
    CHECK(p.tau == doctest::Approx(0.0));
    CHECK(p.mask.rule_number == 0);

    p = decode_particle({1.0, 1.0, 1.0}, 1);
    CHECK(p.delta == 255);
    CHECK(p.tau == doctest::Approx(1.0));
    CHECK(p.mask.rule_number == 511);

    // 0.5 * 255 = 127.5 rounds half-up to 128; 0.6849315 * 511 = 350.0 (349.99...)
    p = decode_particle({0.5, 0.3, 0.6849315}, 1);
    CHECK(p.delta == 128);
    CHECK(p.tau == doctest::Approx(0.3));
    CHECK(p.mask.rule_number == 350);

    p = decode_particle({1.0, 1.0, 1.0}, 2);
    CHECK(p.mask.rule_number == max_rule(2));

    // out-of-range coordinates clamp rather than throw
    p = decode_particle({-0.5, 2.0, 1.5}, 1);
    CHECK(p.delta == 0);
    CHECK(p.tau == doctest::Approx(1.0));
    CHECK(p.mask.rule_number == 511);
}
