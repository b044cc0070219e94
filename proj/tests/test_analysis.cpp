#include <doctest.h>

#include <cmath>

#include "synthrm/analysis.hpp"
#include "synthrm/rng.hpp"

using namespace synthrm;

namespace {

Image<uint8_t> mask4(std::initializer_list<int> v) {
    Image<uint8_t> m(4, 1);
    int i = 0;
    for (int x : v) m.data[i++] = (uint8_t)x;
    return m;
}

Image<float> sig4(std::initializer_list<double> v) {
    Image<float> s(4, 1);
    int i = 0;
    for (double x : v) s.data[i++] = (float)x;
    return s;
}

} // namespace

TEST_CASE("point-biserial hand-computed examples") {
    Image<uint8_t> valid(4, 1, 1);
    CHECK(point_biserial(mask4({1, 1, 0, 0}), sig4({1, 1, 0, 0}), valid) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(point_biserial(mask4({1, 1, 0, 0}), sig4({1, 2, 3, 4}), valid) ==
          doctest::Approx(-0.894427190999916).epsilon(1e-9));
}

TEST_CASE("point-biserial degenerate inputs throw") {
    Image<uint8_t> valid(4, 1, 1);
    CHECK_THROWS_AS(point_biserial(mask4({1, 1, 1, 1}), sig4({1, 2, 3, 4}), valid),
                    std::domain_error);
    CHECK_THROWS_AS(point_biserial(mask4({1, 1, 0, 0}), sig4({2, 2, 2, 2}), valid),
                    std::domain_error);
    Image<uint8_t> none(4, 1, 0);
    CHECK_THROWS_AS(point_biserial(mask4({1, 1, 0, 0}), sig4({1, 2, 3, 4}), none),
                    std::domain_error);
}

TEST_CASE("point-biserial properties: range, sign flip, affine invariance") {
    Rng rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 32;
        Image<uint8_t> mask(n, 1), valid(n, 1, 1), flipped(n, 1);
        Image<float> sig(n, 1);
        int ones = 0;
        for (int i = 0; i < n; ++i) {
            mask.data[i] = rng.bernoulli(0.4) ? 1 : 0;
            ones += mask.data[i];
            flipped.data[i] = 1 - mask.data[i];
            sig.data[i] = (float)rng.uniform(-120, -60);
        }
        if (ones == 0 || ones == n) continue;

        double r = point_biserial(mask, sig, valid);
        CHECK(r >= -1.0);
        CHECK(r <= 1.0);
        CHECK(point_biserial(flipped, sig, valid) == doctest::Approx(-r).epsilon(1e-12));

        double a = rng.uniform(0.1, 9.0), b = rng.uniform(-40, 40);
        Image<float> affine(n, 1);
        for (int i = 0; i < n; ++i) affine.data[i] = (float)(a * sig.data[i] + b);
        CHECK(point_biserial(mask, affine, valid) == doctest::Approx(r).epsilon(1e-5));
    }
}

TEST_CASE("per-sample statistics use population sigma over finite pixels") {
    Image<float> map(3, 1);
    map.data = {-80.0f, -90.0f, -100.0f};
    SampleStats s = sample_stats(map);
    CHECK(s.mean_db == doctest::Approx(-90.0));
    CHECK(s.max_db == doctest::Approx(-80.0));
    CHECK(s.std_db == doctest::Approx(8.1650).epsilon(1e-4));
    CHECK(s.finite_pixels == 3);

    Image<float> single(2, 1, std::numeric_limits<float>::quiet_NaN());
    single.data[0] = -72.5f;
    SampleStats t = sample_stats(single);
    CHECK(t.std_db == 0.0);
    CHECK(t.mean_db == doctest::Approx(-72.5));
    CHECK(t.max_db == doctest::Approx(-72.5));

    Image<float> empty(2, 2, std::numeric_limits<float>::quiet_NaN());
    CHECK_THROWS_AS(sample_stats(empty), std::domain_error);
}

TEST_CASE("gain statistics flag a bimodal campaign") {
    Rng rng(91);
    std::vector<Image<float>> maps;
    for (int i = 0; i < 60; ++i) {
        Image<float> m(4, 4);
        double center = i < 30 ? -70.0 : -120.0;
        for (auto& v : m.data) v = (float)(center + rng.uniform(-3, 3));
        maps.push_back(std::move(m));
    }
    GainStats g = gain_statistics(maps);
    CHECK(g.per_sample.size() == 60);
    CHECK(g.skipped_empty == 0);
    CHECK(g.bic_two < g.bic_one);
    CHECK(g.bimodal());
    for (const auto& s : g.per_sample) CHECK(s.max_db >= s.mean_db);

    // Unimodal control: per-sample constants drawn from a near-Gaussian law,
    // so P_max inherits a single mode.
    std::vector<Image<float>> uni;
    for (int i = 0; i < 60; ++i) {
        double g = 0;
        for (int k = 0; k < 12; ++k) g += rng.uniform(-2, 2);
        uni.emplace_back(4, 4, (float)(-90.0 + g));
    }
    CHECK(!gain_statistics(uni).bimodal());
}

TEST_CASE("empty maps are skipped with a count") {
    std::vector<Image<float>> maps;
    maps.emplace_back(2, 2, std::numeric_limits<float>::quiet_NaN());
    Image<float> ok(2, 2, -80.0f);
    maps.push_back(ok);
    GainStats g = gain_statistics(maps);
    CHECK(g.skipped_empty == 1);
    CHECK(g.per_sample.size() == 1);
}

TEST_CASE("image metrics identity and constant offset") {
    Image<float> gt(32, 32);
    Rng rng(3);
    for (auto& v : gt.data) v = (float)rng.uniform(0.1, 0.9);
    ImageMetrics id = image_metrics(gt, gt, 1.0);
    CHECK(id.nmse == 0.0);
    CHECK(id.mae == 0.0);
    CHECK(id.psnr == 99.0);
    CHECK(id.ssim == doctest::Approx(1.0).epsilon(1e-9));

    Image<float> off = gt;
    for (auto& v : off.data) v += 0.1f;
    ImageMetrics m = image_metrics(off, gt, 1.0);
    CHECK(m.mae == doctest::Approx(0.1).epsilon(1e-5));
    CHECK(m.psnr == doctest::Approx(20.0).epsilon(1e-4));
    CHECK(m.nmse > 0.0);
    CHECK(m.ssim < 1.0);
}

TEST_CASE("image metrics guard rails") {
    Image<float> a(8, 8, 0.5f), zeros(8, 8, 0.0f);
    CHECK_THROWS_AS(image_metrics(a, zeros, 1.0), std::domain_error);
    Image<float> wrong(4, 4, 0.5f);
    CHECK_THROWS_AS(image_metrics(a, wrong, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(image_metrics(a, a, 0.0), std::invalid_argument);
    // SSIM needs a full window; small images report NaN but keep the rest.
    Image<float> tiny(8, 8, 0.25f), tiny2(8, 8, 0.30f);
    ImageMetrics m = image_metrics(tiny, tiny2, 1.0);
    CHECK(std::isnan(m.ssim));
    CHECK(m.mae == doctest::Approx(0.05).epsilon(1e-5));
}

TEST_CASE("histogram uses fixed 1 dB bins with clamped tails") {
    Histogram h;
    h.add(-80.5);
    h.add(-80.2);
    h.add(-300.0); // clamps into the lowest bin
    h.add(5.0);    // clamps into the highest bin
    REQUIRE(h.counts.size() == 160);
    CHECK(h.counts[h.bin_of(-80.5)] == 2);
    CHECK(h.counts.front() == 1);
    CHECK(h.counts.back() == 1);
}
