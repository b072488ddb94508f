#include <cmath>
#include <sstream>

#include "bvoc/rsk.hpp"
#include "doctest.h"

using namespace bvoc;
using namespace bvoc::rsk;

namespace {

std::vector<double> grid(double start, double stop, int n) {
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = start + (stop - start) * i / (n - 1);
  return x;
}

receiver::NoiseModel base_noise() {
  const channel::ChannelParams chan;
  return receiver::NoiseModel::from_mean(
      receiver::noise_mean({}, chan, 1.1e-9, {0.0, 0.0, 1.0}, 0.6, 0.05));
}

}  // namespace

TEST_CASE("ratio verdicts") {
  const RatioWindow w;
  CHECK(decode_ratio(0.0, 1.0, w) == Verdict::silent);
  CHECK(decode_ratio(-1.0, 1.0, w) == Verdict::silent);
  CHECK(decode_ratio(1.0, 2.0, w) == Verdict::decoded);
  CHECK(decode_ratio(1.0, 2.5, w) == Verdict::decoded);
  CHECK(decode_ratio(1.0, 2.6, w) == Verdict::corrupted);
  CHECK(decode_ratio(1.0, 1.9, w) == Verdict::corrupted);
  CHECK(to_string(Verdict::decoded) == "decoded");
  CHECK(std::isnan(BlendMeans{0.0, 1.0}.ratio()));
}

TEST_CASE("validation") {
  CHECK_THROWS(BlendSpec({0.0, 1.0, 1.0, 1.0}).validate());
  CHECK_THROWS(BlendSpec({1.0, 1.0, 1.0, 0.0}).validate());
  CHECK_THROWS(RatioWindow({2.5, 2.0}).validate());
}

TEST_CASE("noiseless ratio equals the mass ratio") {
  const channel::ChannelParams chan;
  const auto x = grid(0.01, 1.5, 50);
  const auto p = rsk_profile({}, {}, chan, receiver::NoiseModel::none(), {}, x, 0.0, 1.0, 1, 1, 0.05);
  for (std::size_t i = 0; i < x.size(); ++i) {
    CHECK(p.ratio[i] == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(p.verdict[i] == Verdict::decoded);
    CHECK(p.mean_a[i] == receiver::leaf_concentration({}, chan, 1.1e-9, {x[i], 0.0, 1.0}, 0.05));
  }
  CHECK(p.decode_range == x.back());
}

TEST_CASE("decode range rule") {
  const std::vector<double> x{0.1, 0.2, 0.3, 0.4};
  CHECK(decode_range(x, std::vector<double>{2.2, 2.1, 1.9, 2.2}, {}) == 0.2);
  CHECK(decode_range(x, std::vector<double>{1.5, 2.1, 2.1, 2.1}, {}) == 0.0);
  CHECK(decode_range(x, std::vector<double>{2.2, 2.2, 2.2, 2.2}, {}) == 0.4);
  CHECK(decode_range(x, std::vector<double>{2.2, NAN, 2.6, 2.2}, {}) == 0.4);
  CHECK_THROWS(decode_range(x, std::vector<double>{2.2}, {}));
}

TEST_CASE("profile is deterministic and thread independent") {
  const channel::ChannelParams chan;
  const auto x = grid(0.01, 1.5, 40);
  const BlendSpec blend{1.1e-9, 2.75e-9, 1.0, 5.0};
  const auto a = rsk_profile(blend, {}, chan, base_noise(), {}, x, 0.0, 1.0, 500, 9, 0.05, 1);
  const auto b = rsk_profile(blend, {}, chan, base_noise(), {}, x, 0.0, 1.0, 500, 9, 0.05, 4);
  CHECK(a.mean_a == b.mean_a);
  CHECK(a.mean_b == b.mean_b);
  CHECK(a.decode_range == b.decode_range);
  const auto c = rsk_profile(blend, {}, chan, base_noise(), {}, x, 0.0, 1.0, 500, 10, 0.05, 1);
  CHECK(a.mean_a != c.mean_a);
}

TEST_CASE("decode range shrinks as species B gets noisier") {
  const channel::ChannelParams chan;
  const auto x = grid(0.0075, 1.5, 200);
  double prev = INFINITY;
  for (double n : {1.0, 5.0, 10.0, 15.0}) {
    const BlendSpec blend{1.1e-9, 2.75e-9, 1.0, n};
    const double r = rsk_decode_range(blend, {}, chan, base_noise(), {}, x, 0.0, 1.0, 2000, 42, 0.05);
    CHECK(r <= prev);
    prev = r;
  }
}

TEST_CASE("rsk CSV") {
  RskProfile p;
  p.x = {0.1};
  p.mean_a = {1.0};
  p.mean_b = {2.2};
  p.ratio = {2.2};
  p.verdict = {Verdict::decoded};
  std::stringstream ss;
  write_rsk_csv(ss, p);
  CHECK(ss.str() == "x,mean_c_a,mean_c_b,ratio,verdict\n0.1,1,2.2,2.2,decoded\n");
}
