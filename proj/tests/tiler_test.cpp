#include <doctest.h>

#include <algorithm>
#include <random>

#include "gsdkit/error.hpp"
#include "gsdkit/tiler.hpp"
#include "testutil.hpp"

using namespace gsdkit;

TEST_SUITE("tiler") {

TEST_CASE("the 640/256 grid lands on {0, 192, 384}") {
    const TileGrid grid = plan_grid(640, 640, 256, 3, 3);
    CHECK(grid.x_offsets == std::vector<int>{0, 192, 384});
    CHECK(grid.y_offsets == std::vector<int>{0, 192, 384});
    CHECK(grid.count() == 9);
}

TEST_CASE("single-patch and diffusion grids") {
    const TileGrid identity = plan_grid(256, 256, 256, 1, 1);
    CHECK(identity.x_offsets == std::vector<int>{0});
    CHECK(identity.y_offsets == std::vector<int>{0});

    // the 4-patch layout: non-overlapping 2x2 with patch = image/2
    const TileGrid quad = plan_grid(1024, 1024, 512, 2, 2);
    CHECK(quad.x_offsets == std::vector<int>{0, 512});
    CHECK(quad.y_offsets == std::vector<int>{0, 512});
}

TEST_CASE("grid planning failure modes") {
    try {
        plan_grid(640, 640, 256, 6, 6);  // 384 / 5 is not an integer
        FAIL("expected GridError");
    } catch (const Error& e) {
        CHECK(e.code() == "GridError");
    }
    try {
        plan_grid(200, 200, 256, 3, 3);
        FAIL("expected GeometryError");
    } catch (const Error& e) {
        CHECK(e.code() == "GeometryError");
    }
    // a single tile that does not span its axis has no valid offset
    CHECK_THROWS_AS(plan_grid(512, 512, 256, 1, 1), Error);
    CHECK_THROWS_AS(plan_grid(256, 256, 256, 2, 2), Error);  // stride would be 0
    CHECK_THROWS_AS(plan_grid(16, 16, 0, 1, 1), Error);
}

TEST_CASE("extraction is row-major and bit-faithful") {
    const RasterImage img = testutil::noise_image(640, 640, 3, Rational(20));
    const LabelMask mask = testutil::random_mask(640, 640, 4);
    const TileGrid grid = plan_grid(640, 640, 256, 3, 3);

    const auto patches = extract_patches(img, mask, grid);
    REQUIRE(patches.size() == 9);
    for (int k = 0; k < 9; ++k) {
        CHECK(patches[k].patch_index == k);
        CHECK(patches[k].image.gsd_cm == img.gsd_cm);
        const int xo = grid.x_offsets[k % 3];
        const int yo = grid.y_offsets[k / 3];
        // spot-check corners and centers against the source
        for (const auto& [px, py] : {std::pair{0, 0}, std::pair{255, 255}, std::pair{128, 37}}) {
            for (int c = 0; c < 3; ++c)
                CHECK(patches[k].image.at(px, py, c) == img.at(xo + px, yo + py, c));
            CHECK(patches[k].mask.at(px, py) == mask.at(xo + px, yo + py));
        }
    }
}

TEST_CASE("uniform image gives identical patches") {
    const RasterImage img = RasterImage::create(640, 640, Rational(20), 99);
    const LabelMask mask = LabelMask::create(640, 640, 1);
    const auto patches = extract_patches(img, mask, plan_grid(640, 640, 256, 3, 3));
    for (const auto& p : patches) {
        CHECK(p.image.same_pixels(patches[0].image));
        CHECK(p.mask.same_pixels(patches[0].mask));
    }
}

TEST_CASE("extract/reassemble is a bit-exact round trip") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 8; ++trial) {
        const RasterImage img = testutil::noise_image(640, 640, 100 + trial, Rational(20));
        const TileGrid grid = plan_grid(640, 640, 256, 3, 3);
        const auto tiles = extract_tiles(img, grid);

        std::vector<std::pair<int, RasterImage>> indexed;
        for (std::size_t k = 0; k < tiles.size(); ++k)
            indexed.emplace_back(int(k), tiles[k]);
        std::shuffle(indexed.begin(), indexed.end(), rng);  // order must not matter

        CHECK(reassemble(indexed, grid).same_pixels(img));
    }
}

TEST_CASE("overlapping patches from one source agree on shared pixels") {
    const RasterImage img = testutil::noise_image(640, 640, 55, Rational(20));
    const TileGrid grid = plan_grid(640, 640, 256, 3, 3);
    const auto tiles = extract_tiles(img, grid);
    // patches 0 and 1 overlap on x in [192, 256) of patch 0 = [0, 64) of patch 1
    for (int y = 0; y < 256; ++y)
        for (int x = 0; x < 64; ++x)
            for (int c = 0; c < 3; ++c)
                CHECK(tiles[0].at(192 + x, y, c) == tiles[1].at(x, y, c));
}

TEST_CASE("single-patch reassembly returns the patch") {
    const RasterImage img = testutil::noise_image(64, 64, 5, Rational(20));
    const TileGrid grid = plan_grid(64, 64, 64, 1, 1);
    CHECK(reassemble({{0, img}}, grid).same_pixels(img));
}

TEST_CASE("reassembly rejects incomplete or inconsistent patch sets") {
    const RasterImage img = testutil::noise_image(64, 64, 5, Rational(20));
    const TileGrid grid = plan_grid(64, 64, 32, 2, 2);
    const auto tiles = extract_tiles(img, grid);

    std::vector<std::pair<int, RasterImage>> missing = {
        {0, tiles[0]}, {1, tiles[1]}, {2, tiles[2]}};
    CHECK_THROWS_AS(reassemble(missing, grid), Error);

    std::vector<std::pair<int, RasterImage>> duplicate = {
        {0, tiles[0]}, {1, tiles[1]}, {2, tiles[2]}, {2, tiles[3]}};
    try {
        reassemble(duplicate, grid);
        FAIL("expected GridError");
    } catch (const Error& e) {
        CHECK(e.code() == "GridError");
    }

    std::vector<std::pair<int, RasterImage>> wrong_size = {
        {0, tiles[0]}, {1, tiles[1]}, {2, tiles[2]}, {3, testutil::noise_image(16, 16, 0)}};
    CHECK_THROWS_AS(reassemble(wrong_size, grid), Error);
}

TEST_CASE("grid/image dimension mismatches are caught") {
    const RasterImage img = testutil::noise_image(64, 64, 5, Rational(20));
    const LabelMask small_mask = testutil::random_mask(32, 32, 5);
    const TileGrid grid = plan_grid(128, 128, 64, 2, 2);
    CHECK_THROWS_AS(extract_tiles(img, grid), Error);
    CHECK_THROWS_AS(
        extract_patches(img, small_mask, plan_grid(64, 64, 32, 2, 2)), Error);
}

}  // TEST_SUITE
