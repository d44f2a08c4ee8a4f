#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "ocp/auditors.hpp"
#include "ocp/environments.hpp"
#include "ocp/learners.hpp"

using namespace ocp;

TEST_CASE("distribution parameter validation and analytic quantiles") {
  CHECK(uniform_dist(0.0, 1.0).quantile(0.9) == Catch::Approx(0.9));
  // Across a shift from uniform(0,0.5) to uniform(0.5,1) the q-quantile
  // jumps from 0.45 to 0.95.
  CHECK(uniform_dist(0.0, 0.5).quantile(0.9) == Catch::Approx(0.45));
  CHECK(uniform_dist(0.5, 1.0).quantile(0.9) == Catch::Approx(0.95));
  CHECK_THROWS_AS(uniform_dist(0.5, 0.5), ConfigError);
  CHECK_THROWS_AS(uniform_dist(-0.1, 1.0), ConfigError);
  CHECK_THROWS_AS(beta_dist(0.0, 2.0), ConfigError);
  CHECK_THROWS_AS(atom_dist({0.5}, {0.0}), ConfigError);
  CHECK_THROWS_AS(atom_dist({1.5}, {1.0}), ConfigError);

  const Distribution atoms = atom_dist({0.2, 0.8}, {1.0, 3.0});
  CHECK(atoms.quantile(0.2) == Catch::Approx(0.2));
  CHECK(atoms.quantile(0.5) == Catch::Approx(0.8));
}

TEST_CASE("all stream kinds emit scores inside the unit interval") {
  std::mt19937_64 seeds(2);
  for (int rep = 0; rep < 3; ++rep) {
    const std::uint64_t seed = seeds();
    IidStream u(uniform_dist(0.1, 0.7), seed);
    IidStream b(beta_dist(0.5, 2.5), seed);
    IidStream a(atom_dist({0.0, 0.5, 1.0}, {1.0, 2.0, 1.0}), seed);
    TwoPhaseStream tp(500, 0.3, uniform_dist(0.0, 0.5), beta_dist(2.0, 2.0), seed);
    for (int t = 0; t < 500; ++t) {
      for (double v : {u.next(), b.next(), a.next(), tp.next()}) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
      }
    }
  }
}

TEST_CASE("streams replay bit-identically under the same seed") {
  IidStream s1(beta_dist(2.0, 3.0), 12345);
  IidStream s2(beta_dist(2.0, 3.0), 12345);
  for (int t = 0; t < 1000; ++t) CHECK(s1.next() == s2.next());
}

TEST_CASE("a two-phase stream with equal phases is the iid stream") {
  const Distribution d = uniform_dist(0.2, 0.8);
  IidStream iid(d, 42);
  TwoPhaseStream tp(600, 0.5, d, d, 42);
  for (int t = 0; t < 600; ++t) CHECK(iid.next() == tp.next());
  CHECK_THROWS_AS(TwoPhaseStream(100, 0.0, d, d, 1), ConfigError);
  CHECK_THROWS_AS(TwoPhaseStream(100, 1.0, d, d, 1), ConfigError);
}

TEST_CASE("symmetric beta has median one half") {
  IidStream s(beta_dist(2.0, 2.0), 9);
  std::vector<double> draws(100000);
  for (double& d : draws) d = s.next();
  std::sort(draws.begin(), draws.end());
  CHECK(draws[draws.size() / 2] == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("a point mass is the degenerate anti-smooth case") {
  IidStream s(atom_dist({0.5}, {1.0}), 1);
  std::vector<double> draws(200);
  for (double& d : draws) d = s.next();
  const SmoothnessProfile sp = smoothness_estimate(draws, 10);
  CHECK(sp.alpha == 0.0);
  CHECK(sp.rho == 1.0);
}

TEST_CASE("alternating scripted stream matches its fixed pattern") {
  const ScriptedStream s = example1_stream(4);
  CHECK(s.tau == std::vector<double>{0.5, 1.0, 0.5, 1.0});
  CHECK(s.tau_hat == std::vector<double>{0.4, 0.9, 0.4, 0.9});

  const Transcript tr = example1_stream(1000).to_transcript(0.5);
  CHECK(coverage(tr) == 0.0);
  const RegretReport ext = external_regret(tr, Grid(20));
  CHECK(ext.entries[0].regret <= 0.0);
}

TEST_CASE("contextual scripted stream never covers on any seed") {
  for (std::uint64_t seed : {1ull, 7ull, 99ull}) {
    const ScriptedStream s = example2_stream(2000, seed);
    const Transcript tr = s.to_transcript(0.5);
    CHECK(coverage(tr) == 0.0);
    // Context marginals balance out at rate ~ 1/sqrt(T).
    double a_count = 0.0;
    for (const Round& r : tr) a_count += r.g[1];
    CHECK(std::abs(a_count / 2000.0 - 0.5) <= 3.0 / std::sqrt(2000.0));
    // Group columns are consistent: all = A + B disjointly.
    for (const Round& r : tr) {
      CHECK(r.g[0] == 1.0);
      CHECK(r.g[1] + r.g[2] == 1.0);
    }
  }
}

TEST_CASE("contextual scripted stream has nonpositive external regret") {
  const Transcript tr = example2_stream(10000, 31).to_transcript(0.5);
  CHECK(external_regret(tr, Grid(20)).entries[0].regret <= 0.0);
}

TEST_CASE("square-root stream grows the iterate like the partial sum") {
  const ScriptedStream s = lower_bound_stream(101);
  CHECK(s.g[0][0] == 0.0);
  CHECK(s.g[1][0] == Catch::Approx(0.5));
  CHECK(s.g[100][0] == Catch::Approx(0.05));

  for (double q : {0.5, 0.9}) {
    GroupAciLearner l(1, q, 1.0);
    for (std::size_t t = 0; t < s.size(); ++t) l.update(s.g[t], s.tau[t]);
    // Partial-sum oracle: theta_{T+1} = q * sum_{j=1}^{T-1} 1/(2 sqrt(j)).
    double partial = 0.0;
    for (int j = 1; j <= 100; ++j) partial += 0.5 / std::sqrt(static_cast<double>(j));
    CHECK(l.theta()[0] == Catch::Approx(q * partial).margin(1e-9));
    CHECK(l.theta()[0] >= q * (std::sqrt(100.0) - 1.0));
  }
}

TEST_CASE("modular groups activate on divisibility") {
  const auto groups = modular_groups(4);
  REQUIRE(groups.size() == 4);
  Transcript empty(1, 0.9);
  for (long long t = 1; t <= 12; ++t) CHECK(groups[0].weight(t, empty) == 1.0);
  CHECK(groups[1].weight(4, empty) == 1.0);
  CHECK(groups[1].weight(5, empty) == 0.0);

  double size4 = 0.0;
  for (long long t = 1; t <= 100; ++t) size4 += groups[3].weight(t, empty);
  CHECK(size4 == 25.0);
}

TEST_CASE("learner reconverges after a two-phase shift") {
  TwoPhaseStream stream(100000, 0.5, uniform_dist(0.0, 0.5), uniform_dist(0.5, 1.0),
                        777);
  GroupAciLearner l(1, 0.9, 1.0);
  const std::vector<double> unit{1.0};
  double covered_second_half = 0.0;
  for (long long t = 1; t <= 100000; ++t) {
    const double tau = stream.next();
    const double pred = l.predict(unit);
    if (t > 50000 && pred >= tau) covered_second_half += 1.0;
    l.update(unit, tau);
  }
  CHECK(covered_second_half / 50000.0 == Catch::Approx(0.9).margin(0.02));
}

TEST_CASE("csv ingestion round-trips emitted transcripts") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Transcript tr(2, 0.9);
  for (int t = 0; t < 100; ++t) tr.append({u(rng), u(rng)}, u(rng), u(rng));

  const std::string path = "roundtrip_test.csv";
  write_transcript_csv(path, tr);
  const ParsedTranscript parsed = csv_ingest(path);
  const Transcript back = parsed.to_transcript(0.9);
  REQUIRE(back.size() == tr.size());
  for (std::size_t t = 0; t < tr.size(); ++t) {
    CHECK(back[t].tau == tr[t].tau);
    CHECK(back[t].tau_hat == tr[t].tau_hat);
    CHECK(back[t].g == tr[t].g);
  }
  std::remove(path.c_str());
}

TEST_CASE("csv ingestion reports bad rows and missing files") {
  const std::string path = "bad_rows_test.csv";
  {
    std::ofstream os(path);
    os << "t,tau,tau_hat,g_1\n1,0.5,0.4,1\n2,1.5,0.4,1\n";
  }
  CHECK_THROWS_WITH(csv_ingest(path), Catch::Matchers::ContainsSubstring("line 3"));
  std::remove(path.c_str());
  CHECK_THROWS_AS(csv_ingest("does_not_exist_12345.csv"), DataError);
}

TEST_CASE("audit-only csv files audit without a learner") {
  const Transcript tr = example1_stream(100).to_transcript(0.5);
  const std::string path = "audit_only_test.csv";
  write_transcript_csv(path, tr);
  const ParsedTranscript parsed = csv_ingest(path);
  REQUIRE(parsed.has_predictions);
  const Transcript back = parsed.to_transcript(0.5);
  CHECK(coverage(back) == 0.0);
  std::remove(path.c_str());
}
