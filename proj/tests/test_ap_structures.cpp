#include <doctest.h>

#include <random>

#include "apcf/ap_structures.hpp"
#include "apcf/lambda_construct.hpp"
#include "oracles.hpp"

using namespace apcf;

namespace {

std::vector<BigInt> ints(std::initializer_list<long> xs) {
  std::vector<BigInt> out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

// Every pair of consecutive differences equal and positive.
bool naive_ap(const std::vector<BigInt>& w) {
  if (w.size() < 2) return true;
  BigInt m = w[1] - w[0];
  if (m < 1) return false;
  for (std::size_t i = 1; i + 1 < w.size(); ++i)
    if (w[i + 1] - w[i] != m) return false;
  return true;
}

void check_contiguous(const BlockPartition& p) {
  Index next = 1;
  for (const auto& st : p.all()) {
    CHECK(st.v.min == next);
    CHECK(!st.v.empty());
    next = st.v.max + 1;
    CHECK(st.w.min == next);
    next = st.w.max + 1;
  }
  CHECK(p.covered() == next - 1);
  CHECK(p.is_contiguous());
}

}  // namespace

TEST_CASE("AP windows") {
  auto a = ints({3, 5, 7, 9});
  CHECK(is_ap(a) == BigInt(2));
  auto b = ints({1, 2, 4});
  CHECK_FALSE(is_ap(b).has_value());
  auto c = ints({4, 4, 4});
  CHECK_FALSE(is_ap(c).has_value());
  auto one = ints({7});
  CHECK(is_ap(one) == BigInt(1));
  auto two = ints({7, 19});
  CHECK(is_ap(two) == BigInt(12));
  auto down = ints({9, 5});
  CHECK_FALSE(is_ap(down).has_value());
}

TEST_CASE("AP predicate under shifts and scaling") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 2000; ++trial) {
    std::size_t len = std::uniform_int_distribution<std::size_t>(2, 12)(rng);
    std::vector<BigInt> w;
    BigInt x = std::uniform_int_distribution<long>(1, 100)(rng);
    const bool make_ap = trial % 2 == 0;
    for (std::size_t i = 0; i < len; ++i) {
      w.push_back(x);
      x += make_ap ? 5 : std::uniform_int_distribution<long>(1, 4)(rng);
    }
    const long c = std::uniform_int_distribution<long>(1, 1000)(rng);
    const long k = std::uniform_int_distribution<long>(1, 9)(rng);
    std::vector<BigInt> shifted, scaled;
    for (const auto& v : w) {
      shifted.push_back(v + c);
      scaled.push_back(v * k);
    }
    auto base = is_ap(w);
    CHECK(base.has_value() == naive_ap(w));
    CHECK(is_ap(shifted) == base);
    auto sc = is_ap(scaled);
    CHECK(sc.has_value() == base.has_value());
    if (base) CHECK(*sc == *base * k);
  }
}

TEST_CASE("maximal AP runs") {
  auto runs = find_ap_runs(DigitSeq{1, 3, 5, 6, 8, 10, 12}, 3);
  REQUIRE(runs.size() == 2);
  CHECK(runs[0] == APSegment{1, 3, BigInt(1), BigInt(2)});
  CHECK(runs[1] == APSegment{4, 4, BigInt(6), BigInt(2)});

  auto single = find_ap_runs(DigitSeq{2, 4, 6, 8}, 3);
  REQUIRE(single.size() == 1);
  CHECK(single[0].length == 4);

  std::vector<BigInt> squares;
  for (long n = 1; n <= 60; ++n) squares.emplace_back(4 * n * n);
  CHECK(find_ap_runs(DigitSeq(squares), 3).empty());

  // Runs with different steps may share one boundary digit.
  auto shared = find_ap_runs(DigitSeq{1, 2, 3, 5, 7}, 3);
  REQUIRE(shared.size() == 2);
  CHECK(shared[1].start == 3);

  CHECK_THROWS_AS(find_ap_runs(DigitSeq{1, 2, 3}, 2), Error);
}

TEST_CASE("AP runs against brute force") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    std::size_t n = std::uniform_int_distribution<std::size_t>(1, 40)(rng);
    std::vector<BigInt> a;
    BigInt x = 1;
    for (std::size_t i = 0; i < n; ++i) {
      a.push_back(x);
      x += std::uniform_int_distribution<long>(0, 3)(rng);
    }
    DigitSeq d(a);
    auto runs = find_ap_runs(d, 3);
    // Each reported run is an AP that cannot be extended on either side.
    for (std::size_t r = 0; r < runs.size(); ++r) {
      const auto& seg = runs[r];
      std::vector<BigInt> w(a.begin() + (seg.start - 1), a.begin() + (seg.start - 1 + seg.length));
      CHECK(naive_ap(w));
      CHECK(seg.length >= 3);
      CHECK(w[1] - w[0] == seg.difference);
      if (seg.start > 1) CHECK(a[seg.start - 1] - a[seg.start - 2] != seg.difference);
      if (seg.start + seg.length - 1 < n) CHECK(a[seg.start + seg.length - 1] - a[seg.start + seg.length - 2] != seg.difference);
      if (r > 0) CHECK(runs[r - 1].start + runs[r - 1].length - 1 <= seg.start);
    }
    // Every 3-term AP window lies inside some reported run.
    for (std::size_t i = 0; i + 2 < n; ++i) {
      std::vector<BigInt> w(a.begin() + i, a.begin() + i + 3);
      if (!naive_ap(w)) continue;
      bool covered = false;
      for (const auto& seg : runs) covered = covered || (seg.start <= i + 1 && i + 3 <= seg.start + seg.length - 1);
      CHECK(covered);
    }
  }
}

TEST_CASE("F membership scans") {
  SequenceSpec three = parse_spec("nu(n) = 3");
  auto rep = check_F_membership(DigitSeq{1, 2, 3, 4, 5}, three);
  CHECK(rep.verdict == MembershipReport::Verdict::Witnessed);
  REQUIRE(rep.witnesses.size() == 3);
  CHECK(rep.witnesses[0].start == 1);
  CHECK(rep.witnesses[1].start == 2);
  CHECK(rep.witnesses[2].start == 3);

  std::vector<BigInt> sq;
  for (long n = 1; n <= 50; ++n) sq.emplace_back(4 * n * n);
  auto none = check_F_membership(DigitSeq(sq), three);
  CHECK(none.verdict == MembershipReport::Verdict::Consistent);
  CHECK(none.witnesses.empty());
  CHECK_FALSE(none.first_violation.has_value());

  SequenceSpec nu = parse_spec("nu(n) = n");
  LambdaParams p = LambdaParams::for_F(nu, 2);
  DigitSeq d = sample_point(p, 9, 200);
  auto found = check_F_membership(d, nu);
  for (Index nk : {Index{3}, Index{9}, Index{81}}) {
    bool hit = false;
    for (const auto& w : found.witnesses) hit = hit || (w.start == nk && w.length == nk);
    CHECK(hit);
  }
  CHECK_THROWS_AS(check_F_membership(DigitSeq{3, 3, 4}, three), Error);
}

TEST_CASE("G membership scans") {
  SequenceSpec sigma = parse_spec("sigma(n) = n*(n+1)");
  LambdaParams p = LambdaParams::for_G_depth(sigma, 2, 60);
  DigitSeq d = sample_point(p, 21, 60);
  CHECK(check_G_membership(d, sigma, 1).verdict == MembershipReport::Verdict::Consistent);

  // sigma(3) = 12: the window is positions 12..14.
  std::vector<BigInt> digits(d.digits().begin(), d.digits().end());
  for (std::size_t i = 13; i < digits.size(); ++i) digits[i] += 1;
  auto bad = check_G_membership(DigitSeq(digits), sigma, 1);
  CHECK(bad.verdict == MembershipReport::Verdict::Violated);
  CHECK(bad.first_violation == Index{3});

  CHECK(check_G_membership(DigitSeq(digits), sigma, 50).verdict == MembershipReport::Verdict::Consistent);
  CHECK_THROWS_AS(check_G_membership(d, parse_spec("sigma(n) = n + 10"), 1), Error);
}

TEST_CASE("F blocks") {
  SequenceSpec nu = parse_spec("nu(n) = n");
  std::vector<Index> schedule{3, 9};
  BlockPartition p = blocks_for_F(nu, schedule);
  CHECK(p.stage(1).v.min == 1);
  CHECK(p.stage(1).v.max == 3);
  CHECK(p.stage(1).w.min == 4);
  CHECK(p.stage(1).w.max == 5);
  CHECK(p.stage(2).v.min == 6);
  check_contiguous(p);

  std::vector<Index> from_one{1, 3};
  BlockPartition q = blocks_for_F(nu, from_one);
  CHECK(q.stage(1).w.empty());
  check_contiguous(q);

  std::vector<Index> dense{3, 5};
  CHECK_THROWS_AS(blocks_for_F(nu, dense), Error);

  auto sched = default_schedule_F(nu, kPositionLimit);
  REQUIRE(sched.size() >= 4);
  CHECK(sched[0] == 3);
  CHECK(sched[1] == 9);
  CHECK(sched[2] == 81);
  CHECK(sched[3] == 6561);

  auto loc = p.locate(4);
  REQUIRE(loc);
  CHECK(loc->k == 1);
  CHECK(loc->in_w);
  CHECK_FALSE(p.locate(10000).has_value());
}

TEST_CASE("random valid F schedules tile an initial segment") {
  std::mt19937_64 rng(8);
  const char* specs[] = {"nu(n) = n", "nu(n) = 2*n", "nu(n) = n + 3", "nu(n) = 3", "nu(n) = n^2"};
  for (int trial = 0; trial < 1000; ++trial) {
    SequenceSpec nu = parse_spec(specs[trial % 5]);
    std::vector<Index> schedule;
    Index n = std::uniform_int_distribution<Index>(1, 50)(rng);
    std::size_t stages = std::uniform_int_distribution<std::size_t>(1, 6)(rng);
    for (std::size_t k = 0; k < stages; ++k) {
      schedule.push_back(n);
      if (nu.at(n) > 1000000000) break;
      n = n + nu.at(n).get_ui() + std::uniform_int_distribution<Index>(1, 100)(rng);
    }
    stages = schedule.size();
    BlockPartition p = blocks_for_F(nu, schedule);
    REQUIRE(p.stages() == stages);
    check_contiguous(p);
    for (std::size_t k = 1; k <= stages; ++k) {
      CHECK(p.stage(k).v.max == schedule[k - 1]);
      CHECK(p.stage(k).w.size() + 1 == nu.at(schedule[k - 1]));
    }
  }
}

TEST_CASE("G blocks") {
  SequenceSpec sigma = parse_spec("sigma(n) = n*(n+1)/2 + n");
  BlockPartition p = blocks_for_G(sigma, 3);
  CHECK(p.stage(1).v.min == 1);
  CHECK(p.stage(1).v.max == 2);
  CHECK(p.stage(1).w.empty());
  CHECK(p.stage(2).v.min == 3);
  CHECK(p.stage(2).v.max == 5);
  CHECK(p.stage(2).w.min == 6);
  CHECK(p.stage(2).w.max == 6);
  check_contiguous(p);

  check_contiguous(blocks_for_G(parse_spec("sigma(n) = n^2"), 100));
  BlockPartition single = blocks_for_G(parse_spec("sigma(n) = n^2"), 1);
  CHECK(single.stages() == 1);
  CHECK(single.stage(1).w.empty());
  CHECK_THROWS_AS(blocks_for_G(parse_spec("sigma(n) = n + 10"), 5), Error);

  // A spec that validates also tiles.
  for (const char* text : {"sigma(n) = n*(n+1)", "sigma(n) = n^3", "sigma(n) = n*(n+1)/2 + 5", "sigma(n) = 3*n^2"}) {
    SequenceSpec s = parse_spec(text);
    REQUIRE(validate(s, 40).ok);
    check_contiguous(blocks_for_G(s, 40));
  }
}

TEST_CASE("growth constants") {
  CHECK(growth_constants(parse_spec("nu(n) = 2*n"), 10000).estimate == doctest::Approx(2.0));
  GrowthEstimate beta = growth_constants(parse_spec("sigma(n) = n*(n+1)"), 10000);
  CHECK(beta.estimate == doctest::Approx(2.0).epsilon(1e-3));
  CHECK_FALSE(beta.divergent);
  GrowthEstimate sq = growth_constants(parse_spec("nu(n) = n^2"), 10000);
  CHECK(sq.divergent);
  CHECK(std::isinf(sq.estimate));
  CHECK(growth_constants(parse_spec("nu(n) = 3*n + 7"), 10000).estimate == doctest::Approx(3.0).epsilon(1e-2));
}
