#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "hexplore/rng.hpp"
#include "hexplore/spatial_codes.hpp"

using namespace hexplore;
using namespace hexplore::codes;

namespace {

constexpr double kPi = 3.14159265358979323846;

double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

}  // namespace

TEST_CASE("place activations normalize") {
    PlaceCellEnsemble one({{0.0, 0.0}}, {0.5});
    const auto single = place_activations(one, {3.0, -1.0});
    CHECK(single.size() == 1);
    CHECK(single[0] == 1.0);

    PlaceCellEnsemble pair({{-1.0, 0.0}, {1.0, 0.0}}, {0.5, 0.5});
    const auto sym = place_activations(pair, {0.0, 2.0});
    CHECK(sym[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sym[1] == doctest::Approx(0.5).epsilon(1e-12));

    PlaceCellEnsemble apart({{0.0, 0.0}, {5.0, 0.0}}, {0.5, 0.5});  // 10 sigma apart
    const auto at_center = place_activations(apart, {0.0, 0.0});
    CHECK(at_center[0] > 0.999);
    CHECK(sum(at_center) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(place_activations(PlaceCellEnsemble{}, {0, 0}), std::invalid_argument);
}

TEST_CASE("place activations match the direct formula") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vec2> centers;
        std::vector<double> widths;
        for (int i = 0; i < 12; ++i) {
            centers.push_back({rng.uniform(-5, 5), rng.uniform(-5, 5)});
            widths.push_back(rng.uniform(0.2, 2.0));
        }
        PlaceCellEnsemble e(centers, widths);
        const Vec2 r{rng.uniform(-5, 5), rng.uniform(-5, 5)};
        const auto got = place_activations(e, r);

        double denom = 0.0;
        std::vector<double> expected(centers.size());
        for (std::size_t i = 0; i < centers.size(); ++i) {
            expected[i] = std::exp(-(r - centers[i]).norm_sq() / (2 * widths[i] * widths[i]));
            denom += expected[i];
        }
        for (std::size_t i = 0; i < centers.size(); ++i)
            CHECK(got[i] == doctest::Approx(expected[i] / denom).epsilon(1e-12));
    }
}

TEST_CASE("head direction activations") {
    HeadDirectionEnsemble flat({0.0, kPi / 2, kPi, 3 * kPi / 2}, {0, 0, 0, 0});
    for (double a : hd_activations(flat, 1.234)) CHECK(a == doctest::Approx(0.25));

    HeadDirectionEnsemble one({1.0}, {3.0});
    CHECK(hd_activations(one, 0.2)[0] == 1.0);

    const auto uniform = HeadDirectionEnsemble::uniform(8, 2.5);
    const auto acts = hd_activations(uniform, uniform.preferred[5]);
    CHECK(std::distance(acts.begin(), std::max_element(acts.begin(), acts.end())) == 5);
    CHECK(sum(acts) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(hd_activations(HeadDirectionEnsemble{}, 0.0), std::invalid_argument);
}

TEST_CASE("pose cell distribution joins both ensembles in one softmax") {
    PlaceCellEnsemble place({{0.0, 0.0}}, {1.0});
    HeadDirectionEnsemble hd({0.7}, {0.0});
    const auto d = pose_cell_distribution(place, hd, {{0.0, 0.0}, 2.0});
    CHECK(d.size() == 2);
    CHECK(d[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(d[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("pose cell distribution matches a brute-force softmax") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vec2> centers;
        std::vector<double> widths;
        for (int i = 0; i < 6; ++i) {
            centers.push_back({rng.uniform(-3, 3), rng.uniform(-3, 3)});
            widths.push_back(rng.uniform(0.3, 1.5));
        }
        std::vector<double> pref, kappa;
        for (int j = 0; j < 4; ++j) {
            pref.push_back(rng.uniform(0, kTwoPi));
            kappa.push_back(rng.uniform(0.0, 4.0));
        }
        PlaceCellEnsemble place(centers, widths);
        HeadDirectionEnsemble hd(pref, kappa);
        geometry::Pose pose{{rng.uniform(-3, 3), rng.uniform(-3, 3)}, rng.uniform(0, kTwoPi)};

        const auto got = pose_cell_distribution(place, hd, pose);

        std::vector<double> logits;
        for (std::size_t i = 0; i < centers.size(); ++i)
            logits.push_back(-(pose.position - centers[i]).norm_sq() /
                             (2 * widths[i] * widths[i]));
        for (std::size_t j = 0; j < pref.size(); ++j)
            logits.push_back(kappa[j] * std::cos(pose.heading - pref[j]));
        double denom = 0.0;
        for (double l : logits) denom += std::exp(l);
        for (std::size_t i = 0; i < logits.size(); ++i)
            CHECK(got[i] == doctest::Approx(std::exp(logits[i]) / denom).epsilon(1e-10));

        CHECK(sum(got) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("hex code geometry") {
    const GridCode hex = make_hex_code(1.5);
    REQUIRE(hex.count() == 3);
    CHECK(hex.components[0].direction.x == doctest::Approx(1.0));
    CHECK(hex.components[0].direction.y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(hex.components[1].direction.x == doctest::Approx(-0.5));
    CHECK(hex.components[1].direction.y == doctest::Approx(std::sqrt(3.0) / 2));
    CHECK(hex.components[2].direction.x == doctest::Approx(-0.5));
    CHECK(hex.components[2].direction.y == doctest::Approx(-std::sqrt(3.0) / 2));

    Vec2 total{0, 0};
    for (const auto& c : hex.components) total += c.direction;
    CHECK(total.norm() < 1e-12);

    CHECK_THROWS_AS(make_hex_code(0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_hex_code(-1.0), std::invalid_argument);
}

TEST_CASE("isotropy check on canonical configurations") {
    const auto hex = isotropy_check(make_hex_code(2.0));
    CHECK(hex.first_order_residual <= 1e-12);
    CHECK(hex.second_order_residual <= 1e-12);
    CHECK(hex.lambda == 1.5);

    // Antipodal pair: passes first order, fails second order (rank-1).
    GridCode pair({geometry::FrequencyVector({1.0, 0.0}, 1.0),
                   geometry::FrequencyVector({-1.0, 0.0}, 1.0)});
    const auto anti = isotropy_check(pair);
    CHECK(anti.first_order_residual <= 1e-12);
    CHECK(anti.second_order_residual == doctest::Approx(1.0));

    GridCode single({geometry::FrequencyVector({1.0, 0.0}, 1.0)});
    CHECK(isotropy_check(single).first_order_residual == doctest::Approx(1.0));
}

TEST_CASE("isotropy is invariant to the base angle") {
    Rng rng(17);
    for (int i = 0; i < 25; ++i) {
        const auto rep = isotropy_check(make_hex_code(1.0, rng.uniform(0, kTwoPi)));
        CHECK(rep.first_order_residual <= 1e-12);
        CHECK(rep.second_order_residual <= 1e-12);
        CHECK(rep.lambda == 1.5);
    }
}

TEST_CASE("hex activity peaks and symmetry") {
    const GridCode hex = make_hex_code(0.7);
    CHECK(hex_activity(hex, {0, 0}) == doctest::Approx(3.0));

    Rng rng(23);
    const Mat2 r60 = geometry::rotation_of(kPi / 3);
    for (int i = 0; i < 100; ++i) {
        const Vec2 r{rng.uniform(-20, 20), rng.uniform(-20, 20)};
        CHECK(std::fabs(hex_activity(hex, r60 * r) - hex_activity(hex, r)) < 1e-9);
        CHECK(hex_activity(hex, r) >= -3.0 - 1e-12);
        CHECK(hex_activity(hex, r) <= 3.0 + 1e-12);
    }

    // Square code: four-fold symmetric by construction.
    GridCode square({geometry::FrequencyVector({1.0, 0.0}, 0.7),
                     geometry::FrequencyVector({0.0, 1.0}, 0.7)});
    const Mat2 r90 = geometry::rotation_of(kPi / 2);
    for (int i = 0; i < 100; ++i) {
        const Vec2 r{rng.uniform(-20, 20), rng.uniform(-20, 20)};
        CHECK(std::fabs(hex_activity(square, r90 * r) - hex_activity(square, r)) < 1e-9);
    }
}

TEST_CASE("hex activity maxima form a hexagonal lattice") {
    const double q = kTwoPi / 8.0;  // stripe period 8 m
    const GridCode hex = make_hex_code(q);
    const double lattice = 2.0 * (kTwoPi / q) / std::sqrt(3.0);

    // Dense grid search over ~2 lattice constants.
    const double extent = 2.2 * lattice;
    const int n = 500;
    const double h = extent / n;
    std::vector<Vec2> peaks;
    for (int i = 1; i < n - 1; ++i) {
        for (int j = 1; j < n - 1; ++j) {
            const Vec2 p{-extent / 2 + j * h, -extent / 2 + i * h};
            const double v = hex_activity(hex, p);
            if (v < 2.9) continue;
            bool is_peak = true;
            for (int di = -1; di <= 1 && is_peak; ++di)
                for (int dj = -1; dj <= 1; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    if (hex_activity(hex, {p.x + dj * h, p.y + di * h}) > v) {
                        is_peak = false;
                        break;
                    }
                }
            if (is_peak) peaks.push_back(p);
        }
    }
    REQUIRE(peaks.size() >= 7);

    // The peak nearest the origin is interior; check its six neighbors.
    Vec2 center = peaks[0];
    for (const Vec2& p : peaks)
        if (p.norm() < center.norm()) center = p;
    std::vector<Vec2> offsets;
    for (const Vec2& p : peaks) {
        const Vec2 d = p - center;
        if (d.norm() > 0.1 * lattice && d.norm() < 1.5 * lattice) offsets.push_back(d);
    }
    REQUIRE(offsets.size() == 6);
    std::vector<double> angles;
    for (const Vec2& d : offsets) {
        CHECK(d.norm() == doctest::Approx(lattice).epsilon(0.02));
        angles.push_back(std::atan2(d.y, d.x));
    }
    std::sort(angles.begin(), angles.end());
    for (std::size_t k = 1; k < angles.size(); ++k) {
        const double sep = (angles[k] - angles[k - 1]) * 180.0 / kPi;
        CHECK(sep == doctest::Approx(60.0).epsilon(2.0 / 60.0));
    }
}

TEST_CASE("temporal weight schedule") {
    const auto w = temporal_weights({5.0, 0.8, 8});
    REQUIRE(w.size() == 8);
    CHECK(w[0] == doctest::Approx(10.0));
    CHECK(w[1] == doctest::Approx(5.0));
    CHECK(w[2] == doctest::Approx(4.0));
    CHECK(w[3] == doctest::Approx(3.2));
    CHECK(w[4] == doctest::Approx(2.56));
    CHECK(w[5] == 1.0);
    CHECK(w[6] == 1.0);
    CHECK(w[7] == 1.0);

    CHECK_THROWS_AS(TemporalWeightSchedule(0.0, 0.8, 5), std::invalid_argument);
    CHECK_THROWS_AS(TemporalWeightSchedule(5.0, 1.0, 5), std::invalid_argument);
    CHECK_THROWS_AS(TemporalWeightSchedule(5.0, 0.8, 0), std::invalid_argument);
}

TEST_CASE("categorical KL") {
    const std::vector<double> p{0.25, 0.75};
    CHECK(categorical_kl(p, p) == 0.0);

    const std::vector<double> point{1.0, 0.0};
    const std::vector<double> fair{0.5, 0.5};
    CHECK(categorical_kl(point, fair) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(categorical_kl({{1.0, 0.0}}, {{0.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(categorical_kl({{0.5, 0.5}}, {{0.5, 0.4, 0.1}}), std::invalid_argument);
    CHECK_THROWS_AS(categorical_kl({{0.7, 0.7}}, {{0.5, 0.5}}), std::invalid_argument);
}

TEST_CASE("categorical KL matches the summation oracle and stays non-negative") {
    Rng rng(55);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = rng.uniform_int(2, 10);
        std::vector<double> p(n), q(n);
        double sp = 0, sq = 0;
        for (int i = 0; i < n; ++i) {
            p[i] = rng.uniform(0.01, 1.0);
            q[i] = rng.uniform(0.01, 1.0);
            sp += p[i];
            sq += q[i];
        }
        for (int i = 0; i < n; ++i) {
            p[i] /= sp;
            q[i] /= sq;
        }
        double expected = 0.0;
        for (int i = 0; i < n; ++i) expected += p[i] * std::log(p[i] / q[i]);

        const double got = categorical_kl(p, q);
        CHECK(std::fabs(got - std::max(expected, 0.0)) < 1e-12);
        CHECK(got >= 0.0);
    }
}

TEST_CASE("grid code rejects unequal magnitudes") {
    CHECK_THROWS_AS(GridCode({geometry::FrequencyVector({1.0, 0.0}, 1.0),
                              geometry::FrequencyVector({0.0, 1.0}, 2.0)}),
                    std::invalid_argument);
}
