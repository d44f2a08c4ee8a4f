#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "ocp/core.hpp"
#include "ocp/transcript_io.hpp"

using namespace ocp;

TEST_CASE("pinball loss values") {
  CHECK(pinball_loss(0.5, 0.5, 0.9) == 0.0);
  CHECK(pinball_loss(0.4, 0.5, 0.5) == Catch::Approx(0.05).margin(1e-15));
  CHECK(pinball_loss(0.9, 0.5, 0.9) == Catch::Approx(0.04).margin(1e-15));
  CHECK_THROWS_AS(pinball_loss(0.5, 0.5, 0.0), ConfigError);
  CHECK_THROWS_AS(pinball_loss(0.5, 0.5, 1.0), ConfigError);
}

TEST_CASE("pinball loss is nonnegative and zero only at the score") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double tau_hat = 2.0 * u(rng) - 0.5;  // may leave [0,1]
    const double tau = u(rng);
    const double q = 0.05 + 0.9 * u(rng);
    const double loss = pinball_loss(tau_hat, tau, q);
    CHECK(loss >= 0.0);
    if (tau_hat == tau) CHECK(loss == 0.0);
    if (loss == 0.0) CHECK(tau_hat == tau);
  }
}

TEST_CASE("pinball subgradient branches") {
  CHECK(pinball_subgradient(0.3, 0.7, 0.9) == Catch::Approx(-0.9));
  CHECK(pinball_subgradient(0.7, 0.3, 0.9) == Catch::Approx(0.1).margin(1e-15));
  // Tie resolves to the covered branch.
  CHECK(pinball_subgradient(0.5, 0.5, 0.5) == Catch::Approx(0.5));
}

TEST_CASE("pinball loss is convex in the prediction") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double tau = u(rng);
    const double q = 0.05 + 0.9 * u(rng);
    const double a = 2.0 * u(rng) - 0.5;
    const double b = 2.0 * u(rng) - 0.5;
    const double lam = u(rng);
    const double mid = lam * a + (1.0 - lam) * b;
    CHECK(pinball_loss(mid, tau, q) <=
          lam * pinball_loss(a, tau, q) + (1.0 - lam) * pinball_loss(b, tau, q) + 1e-12);
  }
}

TEST_CASE("pinball subgradient is a valid subgradient") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 2000; ++i) {
    const double tau = u(rng);
    const double q = 0.05 + 0.9 * u(rng);
    const double a = 2.0 * u(rng) - 0.5;
    const double b = 2.0 * u(rng) - 0.5;
    CHECK(pinball_loss(b, tau, q) >=
          pinball_loss(a, tau, q) + pinball_subgradient(a, tau, q) * (b - a) - 1e-12);
  }
}

TEST_CASE("summed pinball loss is minimized near the empirical quantile") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double q : {0.5, 0.75, 0.9}) {
    std::vector<double> samples(53);
    for (double& s : samples) s = u(rng);

    // Brute force over a fine grid.
    const double step = 1e-3;
    double best = 0.0;
    double best_loss = 1e100;
    for (int i = 0; i <= 1000; ++i) {
      const double cand = i * step;
      double loss = 0.0;
      for (double s : samples) loss += pinball_loss(cand, s, q);
      if (loss < best_loss) {
        best_loss = loss;
        best = cand;
      }
    }

    std::sort(samples.begin(), samples.end());
    const auto idx = static_cast<std::size_t>(
        std::ceil(q * static_cast<double>(samples.size()))) - 1;
    CHECK(std::abs(best - samples[idx]) <= step + 1e-12);
  }
}

TEST_CASE("transcript append maintains indices and contracts") {
  Transcript tr(1, 0.9);
  CHECK(tr.empty());
  tr.append({1.0}, 0.5, 0.0);
  CHECK(tr.size() == 1);
  CHECK(tr[0].t == 1);

  Transcript five(2, 0.5);
  for (int i = 0; i < 5; ++i) five.append({1.0, 0.0}, 0.2, 0.3);
  five.append({0.5, 1.0}, 0.9, 0.1);
  CHECK(five.size() == 6);
  for (std::size_t i = 0; i < five.size(); ++i) {
    CHECK(five[i].t == static_cast<long long>(i) + 1);
  }

  CHECK_THROWS_AS(five.append({1.0, 0.0, 0.0}, 0.2, 0.3), DataError);  // k mismatch
  CHECK_THROWS_AS(five.append({1.0, 0.0}, 1.5, 0.3), DataError);       // tau out of range
  CHECK_THROWS_AS(five.append({1.0, -0.1}, 0.5, 0.3), DataError);      // weight out of range
  CHECK_THROWS_AS(Transcript(0, 0.9), ConfigError);
  CHECK_THROWS_AS(Transcript(1, 1.0), ConfigError);
}

TEST_CASE("grid levels and nearest binning") {
  const Grid g(4);
  CHECK(g.size() == 5);
  const auto levels = g.levels();
  for (int i = 0; i <= 4; ++i) CHECK(levels[static_cast<std::size_t>(i)] == 0.25 * i);

  const Grid g10(10);
  CHECK(g10.bin(0.0) == 0);
  CHECK(g10.bin(1.0) == 10);
  CHECK(g10.bin(0.56) == 6);
  CHECK(g10.bin(0.54) == 5);
  CHECK(g10.bin(0.55) == 5);   // tie rounds down
  CHECK(g10.bin(-3.0) == 0);   // clamped
  CHECK(g10.bin(2.7) == 10);   // clamped
  CHECK_THROWS_AS(g10.bin(std::nan("")), DataError);
  CHECK_THROWS_AS(Grid(0), ConfigError);
}

TEST_CASE("binary group generators are validated") {
  GroupSpec g;
  g.name = "bad";
  g.kind = GroupKind::binary;
  g.weight = [](long long, const Transcript&) { return 0.5; };
  Transcript tr(1, 0.9);
  CHECK_THROWS_AS(g.evaluate(1, tr), DataError);
  g.kind = GroupKind::weighted;
  CHECK(g.evaluate(1, tr) == 0.5);
  g.weight = [](long long, const Transcript&) { return 1.2; };
  CHECK_THROWS_AS(g.evaluate(1, tr), DataError);
}

TEST_CASE("transcript CSV round-trips bit-identically") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Transcript tr(3, 0.9);
  for (int t = 0; t < 200; ++t) {
    tr.append({u(rng), u(rng), u(rng)}, u(rng), 3.0 * u(rng) - 1.0);
  }
  std::ostringstream os;
  write_transcript_csv(os, tr);
  std::istringstream is(os.str());
  const ParsedTranscript parsed = read_transcript_csv(is);
  REQUIRE(parsed.k == 3);
  REQUIRE(parsed.has_predictions);
  REQUIRE(parsed.rounds.size() == tr.size());
  for (std::size_t t = 0; t < tr.size(); ++t) {
    CHECK(parsed.rounds[t].tau == tr[t].tau);
    CHECK(parsed.rounds[t].tau_hat == tr[t].tau_hat);
    for (std::size_t i = 0; i < 3; ++i) CHECK(parsed.rounds[t].g[i] == tr[t].g[i]);
  }
  // Re-emitting the parsed rounds reproduces the same bytes.
  std::ostringstream os2;
  write_transcript_csv(os2, parsed.to_transcript(0.9));
  CHECK(os2.str() == os.str());
}

TEST_CASE("transcript CSV rejects malformed rows with line numbers") {
  {
    std::istringstream is("t,tau,tau_hat,g_1\n1,1.5,0.2,1\n");
    CHECK_THROWS_WITH(read_transcript_csv(is),
                      Catch::Matchers::ContainsSubstring("line 2"));
  }
  {
    std::istringstream is("t,tau,tau_hat,g_1\n1,0.5,0.2,1\n2,0.5,xyz,1\n");
    CHECK_THROWS_WITH(read_transcript_csv(is),
                      Catch::Matchers::ContainsSubstring("line 3"));
  }
  {
    std::istringstream is("t,tau,tau_hat,g_1\n1,0.5,0.2\n");
    CHECK_THROWS_AS(read_transcript_csv(is), DataError);  // missing cell
  }
  {
    std::istringstream is("t,wrong\n");
    CHECK_THROWS_AS(read_transcript_csv(is), DataError);
  }
  {
    std::istringstream is("t,tau,tau_hat\n");
    CHECK_THROWS_AS(read_transcript_csv(is), DataError);  // no group columns
  }
}

TEST_CASE("transcript CSV without predictions is a score stream") {
  std::istringstream is("t,tau,g_1,g_2\n1,0.5,1,0\n2,0.25,0,1\n");
  const ParsedTranscript parsed = read_transcript_csv(is);
  CHECK(parsed.k == 2);
  CHECK_FALSE(parsed.has_predictions);
  CHECK(parsed.rounds.size() == 2);
  CHECK_THROWS_AS(parsed.to_transcript(0.9), DataError);
}
