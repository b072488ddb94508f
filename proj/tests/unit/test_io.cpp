#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "bvoc/csv.hpp"
#include "bvoc/nelder_mead.hpp"
#include "bvoc/parallel.hpp"
#include "bvoc/rng.hpp"
#include "doctest.h"

using namespace bvoc;

TEST_CASE("double formatting round-trips") {
  for (double v : {0.0, 1.0, -2.5, 0.1, 1.1e-9, 4.375870369180930e-17, 1e300, 5e-324}) {
    const auto s = csv::format_double(v);
    CHECK(csv::parse_double(s) == v);
  }
  CHECK(csv::format_double(0.4) == "0.4");
  CHECK(csv::format_double(INFINITY) == "inf");
  CHECK(csv::format_double(-INFINITY) == "-inf");
  CHECK(csv::format_double(NAN) == "nan");
  CHECK(std::isinf(csv::parse_double("inf")));
  CHECK(std::isnan(csv::parse_double("nan")));
  CHECK_THROWS(csv::parse_double("1.5x"));
  CHECK_THROWS(csv::parse_double(""));
}

TEST_CASE("table reading") {
  std::istringstream in("# comment\n\ntime,value\n0,1.5\n1,2e-3\n");
  const auto t = csv::read_table(in);
  CHECK(t.header == std::vector<std::string>{"time", "value"});
  CHECK(t.rows() == 2);
  CHECK(t.column("value")[1] == 2e-3);
  CHECK_THROWS_AS(t.column("missing"), std::out_of_range);
}

TEST_CASE("table diagnostics carry line and column") {
  std::istringstream bad("a,b\n1,2\n3,oops\n");
  try {
    csv::read_table(bad);
    FAIL("expected an exception");
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("b") != std::string::npos);
  }
  std::istringstream ragged("a,b\n1\n");
  CHECK_THROWS(csv::read_table(ragged));
}

TEST_CASE("table writing") {
  std::ostringstream out;
  const std::vector<double> a{1.0, 2.0};
  const std::vector<double> b{0.5, -1e-20};
  csv::write_table(out, {"a", "b"}, {a, b}, '\t');
  CHECK(out.str() == "a\tb\n1\t0.5\n2\t-1e-20\n");
  CHECK(csv::separator_for("csv") == ',');
  CHECK(csv::separator_for("tsv") == '\t');
  CHECK_THROWS(csv::separator_for("xlsx"));
}

TEST_CASE("stream seeds depend only on their coordinates") {
  CHECK(derive_stream_seed(1, 2, 3) == derive_stream_seed(1, 2, 3));
  std::set<std::uint64_t> seen;
  for (std::uint64_t a = 0; a < 50; ++a)
    for (std::uint64_t b = 0; b < 50; ++b) seen.insert(derive_stream_seed(42, a, b));
  CHECK(seen.size() == 2500);
  NormalStream s1(42, 1, 2), s2(42, 1, 2);
  for (int i = 0; i < 10; ++i) CHECK(s1() == s2());
}

TEST_CASE("normal stream moments") {
  NormalStream s(7, 0, 0);
  double sum = 0.0;
  double sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = s();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(std::abs(sq / n - 1.0) < 0.01);
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(100, 3,
                               [](std::size_t i) {
                                 if (i == 57) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  parallel_for(0, 4, [](std::size_t) { FAIL("no work expected"); });
}

TEST_CASE("Nelder-Mead minimizes Rosenbrock") {
  auto rosen = [](const std::vector<double>& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  const auto r = optim::nelder_mead(rosen, {-1.2, 1.0}, {0.5, 0.5}, {5000, 1e-15, 1e-12});
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-5));
  for (std::size_t i = 1; i < r.history.size(); ++i) CHECK(r.history[i] <= r.history[i - 1]);
}

TEST_CASE("Nelder-Mead treats non-finite values as +inf and honours the budget") {
  auto f = [](const std::vector<double>& x) {
    return x[0] < 0 ? std::numeric_limits<double>::quiet_NaN() : (x[0] - 2) * (x[0] - 2);
  };
  const auto r = optim::nelder_mead(f, {1.0}, {0.5});
  CHECK(r.x[0] == doctest::Approx(2.0).epsilon(1e-4));
  const auto capped = optim::nelder_mead(f, {1.0}, {0.5}, {10, 0.0, 0.0});
  CHECK(capped.evaluations <= 10);
  CHECK_FALSE(capped.converged);
}
