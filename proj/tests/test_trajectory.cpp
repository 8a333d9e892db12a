#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pldeconv/error.hpp"
#include "pldeconv/image.hpp"
#include "pldeconv/trajectory.hpp"
#include "support.hpp"

using namespace pldeconv;

namespace {

KeyPoints random_small_keypoints(int k, std::uint64_t seed, double extent = 6.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-extent, extent);
  std::vector<Point2> p{{0, 0}};
  for (int i = 1; i < k; ++i) p.push_back({u(rng), u(rng)});
  return KeyPoints(p);
}

KeyPoints map_points(const KeyPoints& z, double sx, double sy, double tx = 0, double ty = 0) {
  std::vector<Point2> p;
  for (const Point2& q : z.points()) p.push_back({sx * q.x + tx, sy * q.y + ty});
  return KeyPoints::from_points(p);
}

}  // namespace

TEST_SUITE("keypoints") {
  TEST_CASE("invariants") {
    CHECK_THROWS_AS(KeyPoints({{0, 0}}), ValidationError);
    CHECK_THROWS_AS(KeyPoints({{1, 0}, {2, 0}}), ValidationError);
    CHECK_THROWS_AS(KeyPoints({{0, 0}, {NAN, 0}}), ValidationError);
    CHECK_NOTHROW(KeyPoints({{0, 0}, {0, 0}}));
  }

  TEST_CASE("latent vector excludes the origin and round trips") {
    const KeyPoints z({{0, 0}, {1, 2}, {3, -4}});
    const std::vector<double> v = z.latent();
    CHECK(v == std::vector<double>{1, 2, 3, -4});
    CHECK(KeyPoints::from_latent(v) == z);
    CHECK_THROWS_AS(KeyPoints::from_latent(std::vector<double>{1, 2, 3}), ValidationError);
  }

  TEST_CASE("from_points translates to the origin") {
    const std::vector<Point2> p{{5, 5}, {6, 7}};
    CHECK(KeyPoints::from_points(p).points()[1] == Point2{1, 2});
  }
}

TEST_SUITE("spline") {
  TEST_CASE("two points give a uniformly sampled segment") {
    const Trajectory t = interpolate_spline(KeyPoints({{0, 0}, {3, 6}}), 7);
    REQUIRE(t.samples.size() == 7);
    for (int i = 0; i < 7; ++i) {
      CHECK(t.samples[i].x == doctest::Approx(0.5 * i).epsilon(1e-12));
      CHECK(t.samples[i].y == doctest::Approx(1.0 * i).epsilon(1e-12));
    }
  }

  TEST_CASE("identical points collapse to copies") {
    const Trajectory t = interpolate_spline(KeyPoints({{0, 0}, {0, 0}, {0, 0}}), 10);
    REQUIRE(t.samples.size() == 10);
    for (const Point2& p : t.samples) CHECK(p == Point2{0, 0});
  }

  TEST_CASE("collinear equally spaced points stay on the line") {
    const KeyPoints z({{0, 0}, {1, 2}, {2, 4}, {3, 6}});
    for (const Point2& p : interpolate_spline(z, 101).samples) {
      CHECK(std::abs(p.y - 2 * p.x) < 1e-9);
    }
  }

  TEST_CASE("passes through every knot") {
    for (int seed = 0; seed < 20; ++seed) {
      const KeyPoints z = random_small_keypoints(2 + seed % 7, seed);
      const ChordSpline s(z.points());
      REQUIRE(s.knots().size() == z.points().size());
      for (std::size_t i = 0; i < z.points().size(); ++i) {
        const Point2 p = s.evaluate(s.knots()[i]);
        CHECK(std::abs(p.x - z.points()[i].x) < 1e-9);
        CHECK(std::abs(p.y - z.points()[i].y) < 1e-9);
      }
    }
  }

  TEST_CASE("consecutive duplicates are merged") {
    const ChordSpline s(std::vector<Point2>{{0, 0}, {1, 0}, {1, 0}, {2, 1}});
    CHECK(s.knots().size() == 3);
    CHECK(s.length() == doctest::Approx(1 + std::sqrt(2.0)));
  }

  TEST_CASE("natural end conditions: a cubic through collinear unequal spacing stays linear") {
    // Second derivative vanishes at both ends; collinear knots keep it zero
    // everywhere so the curve is the polyline itself.
    const KeyPoints z({{0, 0}, {1, 1}, {4, 4}});
    for (const Point2& p : interpolate_spline(z, 33).samples) CHECK(std::abs(p.y - p.x) < 1e-9);
  }

  TEST_CASE("sample count must cover the key points") {
    CHECK_THROWS_AS(interpolate_spline(KeyPoints({{0, 0}, {1, 0}, {2, 0}}), 2), ValidationError);
  }
}

TEST_SUITE("render") {
  TEST_CASE("zero-length trajectory renders a centered delta") {
    for (int m : {5, 8, 32}) {
      RenderConfig rc{m, 64, Centering::Centroid};
      const Kernel h = render_kernel(KeyPoints({{0, 0}, {0, 0}, {0, 0}}), rc);
      int ones = 0;
      for (double v : h.grid().pixels()) ones += v == 1.0;
      CHECK(ones == (m % 2 ? 1 : 0));
      CHECK(sum(h.grid()) == doctest::Approx(1.0).epsilon(1e-12));
    }
    const Kernel h = render_kernel(KeyPoints({{0, 0}, {0, 0}}), {9, 16, Centering::Centroid});
    CHECK(h == Kernel::delta(9));
  }

  TEST_CASE("horizontal line integrates the tent") {
    const Kernel h = render_kernel(KeyPoints({{0, 0}, {4, 0}}), {9, 4096, Centering::Centroid});
    const double want[5] = {0.125, 0.25, 0.25, 0.25, 0.125};
    for (int c = 0; c < 5; ++c) CHECK(std::abs(h(4, 2 + c) - want[c]) < 1e-3);
    double row = 0.0;
    for (int c = 0; c < 9; ++c) row += h(4, c);
    CHECK(row == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("invariant sweep over random key points") {
    const int ks[] = {2, 4, 6, 8};
    for (int seed = 0; seed < 40; ++seed) {
      const KeyPoints z = random_small_keypoints(ks[seed % 4], seed + 300);
      const Kernel h = render_kernel(z, {32, 1024, Centering::Centroid});
      CHECK(min_value(h.grid()) >= 0.0);
      CHECK(std::abs(sum(h.grid()) - 1.0) <= 1e-9);
    }
  }

  TEST_CASE("reflections flip the kernel exactly") {
    for (int seed = 0; seed < 20; ++seed) {
      const KeyPoints z = random_small_keypoints(2 + seed % 6, seed + 7);
      for (int m : {21, 22}) {
        const RenderConfig rc{m, 512, Centering::Centroid};
        const Kernel h = render_kernel(z, rc);
        CHECK(render_kernel(map_points(z, 1, -1), rc).grid() == flipped_vertical(h.grid()));
        CHECK(render_kernel(map_points(z, -1, 1), rc).grid() == flipped_horizontal(h.grid()));
      }
    }
  }

  TEST_CASE("common translation of the key points leaves the kernel unchanged") {
    // Key points on a 1/64 grid and dyadic offsets: re-anchoring at the
    // first point is exact, so the rendered kernels must agree bitwise.
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> u(-320, 320);
    for (int seed = 0; seed < 20; ++seed) {
      std::vector<Point2> p{{0, 0}};
      for (int i = 1; i < 3 + seed % 5; ++i) p.push_back({u(rng) / 64.0, u(rng) / 64.0});
      const KeyPoints z(p);
      const RenderConfig rc{21, 1024, Centering::Centroid};
      std::vector<Point2> shifted;
      for (const Point2& q : z.points()) shifted.push_back({q.x + 0.75, q.y - 3.5});
      CHECK(render_kernel(KeyPoints::from_points(shifted), rc) == render_kernel(z, rc));

      // Translating the sampled path itself only moves the centroid, up to
      // rounding in the mean.
      const Trajectory a = interpolate_spline(z, rc.samples);
      Trajectory b = a;
      for (Point2& q : b.samples) {
        q.x += 0.75;
        q.y -= 3.5;
      }
      CHECK(testing::max_abs_diff(render_trajectory(a, rc).grid(), render_trajectory(b, rc).grid()) < 1e-12);
    }
  }

  TEST_CASE("out-of-window trajectories name the excursion") {
    const RenderConfig rc{9, 256, Centering::Centroid};
    try {
      render_kernel(KeyPoints({{0, 0}, {20, 0}}), rc);
      FAIL("expected RenderError");
    } catch (const RenderError& e) {
      CHECK(e.excursion() > 4.0);
      CHECK(std::string(e.what()).find("window") != std::string::npos);
    }
    CHECK_THROWS_AS(render_kernel(KeyPoints({{0, 0}, {5, 0}}), {9, 256, Centering::None}),
                    RenderError);
  }

  TEST_CASE("uncentered rendering puts the origin at the window center") {
    const Kernel h = render_kernel(KeyPoints({{0, 0}, {0, 0}}), {7, 16, Centering::None});
    CHECK(h(3, 3) == 1.0);
    // Upward motion lands on lower row indices.
    const Kernel up = render_kernel(KeyPoints({{0, 0}, {0, 2}}), {7, 3, Centering::None});
    CHECK(up(1, 3) == doctest::Approx(1.0 / 3));
    CHECK(up(2, 3) == doctest::Approx(1.0 / 3));
    CHECK(up(3, 3) == doctest::Approx(1.0 / 3));
  }

  TEST_CASE("small latent perturbations move the kernel by a bounded amount") {
    const KeyPoints z = random_small_keypoints(4, 99);
    const RenderConfig rc{32, 1024, Centering::Centroid};
    const Kernel h = render_kernel(z, rc);
    double worst = 0.0;
    for (double eps : {1e-4, 1e-3, 1e-2}) {
      for (std::size_t i = 0; i < z.latent().size(); ++i) {
        std::vector<double> v = z.latent();
        v[i] += eps;
        const Kernel g = render_kernel(KeyPoints::from_latent(v), rc);
        double l1 = 0.0;
        for (std::size_t p = 0; p < h.grid().size(); ++p) {
          l1 += std::abs(g.grid().pixels()[p] - h.grid().pixels()[p]);
        }
        worst = std::max(worst, l1 / eps);
      }
    }
    CHECK(worst < 10.0);
  }
}

TEST_SUITE("random kernels") {
  TEST_CASE("step length bound and determinism") {
    for (int seed = 0; seed < 200; ++seed) {
      const KeyPoints z = random_keypoints(4, seed);
      REQUIRE(z.count() == 4);
      for (int i = 1; i < 4; ++i) {
        const Point2 a = z.points()[i - 1];
        const Point2 b = z.points()[i];
        CHECK(std::hypot(b.x - a.x, b.y - a.y) <= 100.0 / 3 + 1e-12);
      }
    }
    CHECK(random_keypoints(2, 5) == random_keypoints(2, 5));
    CHECK(random_keypoints(2, 5).count() == 2);
    CHECK_FALSE(random_keypoints(3, 5) == random_keypoints(3, 6));
  }

  TEST_CASE("step directions are uniform over eight bins") {
    int bins[8] = {};
    int n = 0;
    for (int seed = 0; seed < 10000; ++seed) {
      const KeyPoints z = random_keypoints(5, seed);
      for (int i = 1; i < 5; ++i) {
        const Point2 a = z.points()[i - 1];
        const Point2 b = z.points()[i];
        double deg = std::atan2(b.y - a.y, b.x - a.x) * 180 / std::numbers::pi;
        if (deg < 0) deg += 360;
        ++bins[std::min(7, static_cast<int>(deg / 45))];
        ++n;
      }
    }
    const double expect = n / 8.0;
    const double se = std::sqrt(n * (1.0 / 8) * (7.0 / 8));
    for (int b : bins) CHECK(std::abs(b - expect) <= 4 * se);
  }

  TEST_CASE("dataset sweep and determinism") {
    const RenderConfig rc;
    const auto a = generate_kernel_dataset(100, 4, rc, 42);
    REQUIRE(a.size() == 100);
    for (const KernelSample& s : a) {
      CHECK(std::abs(sum(s.kernel.grid()) - 1.0) <= 1e-9);
      CHECK(min_value(s.kernel.grid()) >= 0.0);
      CHECK(s.keypoints.count() == 4);
    }
    const auto b = generate_kernel_dataset(100, 4, rc, 42);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].kernel == b[i].kernel);
      CHECK(a[i].keypoints == b[i].keypoints);
    }
    // Record i is independent of the others.
    CHECK(generate_kernel_sample(17, 4, rc, 42, 0.3).kernel == a[17].kernel);

  }

  // Expected growth of the mean support with K does not hold for this walk:
  // the mean path length 50 * scale does not depend on K, and longer walks
  // fold back on themselves, so K = 2 lines cover more pixels.
  TEST_CASE("mean kernel support grows with K" * doctest::may_fail()) {
    auto support = [&](int k) {
      double total = 0.0;
      const auto set = generate_kernel_dataset(1000, k, {32, 256, Centering::Centroid}, 7);
      for (const KernelSample& s : set) {
        for (double v : s.kernel.grid().pixels()) total += v > 1e-4;
      }
      return total / set.size();
    };
    CHECK(support(8) > support(2));
  }

  TEST_CASE("a scale that cannot fit is reported with the record index") {
    try {
      generate_kernel_sample(3, 4, {5, 64, Centering::Centroid}, 1, 50.0);
      FAIL("expected RenderError");
    } catch (const RenderError& e) {
      CHECK(std::string(e.what()).find("record 3") != std::string::npos);
    }
  }
}

TEST_SUITE("line key points") {
  TEST_CASE("formula") {
    const KeyPoints a = keypoints_from_line(4, 0, 3);
    CHECK(a.points()[1].x == doctest::Approx(2.0));
    CHECK(a.points()[2].x == doctest::Approx(4.0));
    CHECK(std::abs(a.points()[2].y) < 1e-12);

    const KeyPoints b = keypoints_from_line(0, 73, 4);
    for (const Point2& p : b.points()) CHECK(p == Point2{0, 0});

    const KeyPoints c = keypoints_from_line(4, 90, 2);
    CHECK(std::abs(c.points()[1].x) < 1e-12);
    CHECK(c.points()[1].y == doctest::Approx(4.0));
  }

  TEST_CASE("rotation oracle") {
    for (double theta = 0; theta < 360; theta += 17) {
      const KeyPoints z = keypoints_from_line(6, theta, 4);
      const double t = theta * std::numbers::pi / 180;
      CHECK(z.points()[3].x == doctest::Approx(6 * std::cos(t)));
      CHECK(z.points()[3].y == doctest::Approx(6 * std::sin(t)));
    }
    CHECK_THROWS_AS(keypoints_from_line(-1, 0, 2), DomainError);
    CHECK_THROWS_AS(keypoints_from_line(1, 0, 1), ValidationError);
  }
}
