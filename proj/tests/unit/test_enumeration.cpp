#include <doctest.h>

#include <cmath>
#include <vector>

#include "ccmsel/enumeration.hpp"
#include "ccmsel/errors.hpp"
#include "ccmsel/random.hpp"
#include "sis.hpp"

using namespace ccmsel;

namespace {
using Seq = std::vector<std::int64_t>;
SamplingOptions sampled(std::int64_t samples, std::uint64_t seed = 1) {
  SamplingOptions o;
  o.samples = samples;
  o.seed = seed;
  o.oracle_limit = 0;
  return o;
}
}  // namespace

TEST_SUITE("enumeration") {
  TEST_CASE("edge volumes") {
    CHECK(log_volume_edges(3, 3).log_count.log() == doctest::Approx(0.0));
    CHECK(log_volume_edges(4, 2).log_count.log() == doctest::Approx(2.70805).epsilon(1e-5));
    const auto wy = log_volume_edges(1283, 12749);
    CHECK(wy.log_count.log() == doctest::Approx(65766.28).epsilon(1e-6));
    CHECK(wy.method == VolumeMethod::Exact);
    CHECK(wy.std_error_log == 0.0);
    CHECK_THROWS_AS(log_volume_edges(3, 4), DomainError);
  }

  TEST_CASE("type mixing volumes") {
    CHECK(log_volume_type_mixing(1, 1, {0, 1, 0}).log_count.log() == doctest::Approx(0.0));
    CHECK(log_volume_type_mixing(2, 2, {1, 0, 1}).log_count.log() == doctest::Approx(0.0));
    CHECK(log_volume_type_mixing(2, 2, {0, 2, 0}).log_count.log() ==
          doctest::Approx(std::log(6.0)));
    CHECK_THROWS_AS(log_volume_type_mixing(2, 2, {2, 0, 0}), DomainError);
  }

  TEST_CASE("degree sequence volumes") {
    CHECK(log_volume_degree_sequence(Seq{1, 1, 0}).log_count.log() == doctest::Approx(0.0));
    CHECK(log_volume_degree_sequence(Seq{1, 1, 1, 1}).log_count.log() ==
          doctest::Approx(std::log(3.0)));
    CHECK(log_volume_degree_sequence(Seq{2, 2, 2, 2, 2}).log_count.log() ==
          doctest::Approx(std::log(12.0)));
    CHECK(log_volume_degree_sequence(Seq{2, 2, 2, 2, 2}).method == VolumeMethod::Oracle);
    try {
      log_volume_degree_sequence(Seq{3, 3, 1, 1});
      FAIL("expected a domain error");
    } catch (const DomainError& e) {
      CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
  }

  TEST_CASE("degree distribution volumes") {
    CHECK(log_volume_degree_distribution({1, 2}).log_count.log() ==
          doctest::Approx(std::log(3.0)));
    CHECK(log_volume_degree_distribution({0, 0, 3}).log_count.log() == doctest::Approx(0.0));
    CHECK_THROWS_AS(log_volume_degree_distribution({0, 1}), DomainError);
  }

  TEST_CASE("degree mixing volumes") {
    CHECK(log_volume_degree_mixing({{{1, 1}, 1}}, 2).log_count.log() == doctest::Approx(0.0));
    CHECK(log_volume_degree_mixing({{{1, 2}, 2}}, 3).log_count.log() ==
          doctest::Approx(std::log(3.0)));
    CHECK(log_volume_degree_mixing({{{1, 1}, 1}}, 4).log_count.log() ==
          doctest::Approx(std::log(6.0)));
    CHECK_THROWS_AS(log_volume_degree_mixing({{{1, 2}, 1}}, 3), DomainError);
  }

  TEST_CASE("oracle_enumerate examples") {
    CHECK(oracle_enumerate(3, StatisticKind::EdgeCount, StatisticValue(std::int64_t{1})) == 3);
    CHECK(oracle_enumerate(4, StatisticKind::EdgeCount, StatisticValue(std::int64_t{2})) == 15);
    CHECK(oracle_enumerate(4, StatisticKind::DegreeDistribution,
                           StatisticValue(DegreeDistribution{0, 4})) == 3);
    CHECK_THROWS_AS(enumerate_classes(9, StatisticKind::EdgeCount), RefusalError);
  }

  TEST_CASE("importance sampling agrees with exact counts") {
    const std::vector<Seq> cases{{2, 2, 2, 2, 2}, {3, 3, 2, 2, 1, 1}, {4, 3, 3, 2, 2, 2, 1, 1},
                                 {3, 3, 3, 3, 3, 3, 3, 3}};
    for (const auto& d : cases) {
      const auto exact = std::log(double(count_degree_sequence_exact(d)));
      const auto est = log_volume_degree_sequence(d, sampled(20000));
      CHECK(est.method == VolumeMethod::ImportanceSampling);
      CHECK(std::abs(est.log_count.log() - exact) <= 3.0 * est.std_error_log + 1e-12);
    }
  }

  TEST_CASE("degree mixing sampler agrees with exact counts") {
    const Seq d{3, 2, 2, 2, 1, 1, 1};
    const DegreeMixingMatrix dmm{{{1, 2}, 2}, {{1, 3}, 1}, {{2, 2}, 1}, {{2, 3}, 2}};
    const auto exact = std::log(double(count_degree_mixing_exact(d, dmm)));
    const auto multi = std::log(140.0);  // 7! / (3! 3! 1!)
    const auto est = log_volume_degree_mixing(dmm, 7, sampled(20000));
    CHECK(std::abs(est.log_count.log() - (exact + multi)) <= 3.0 * est.std_error_log + 1e-12);
  }

  TEST_CASE("estimates are reproducible and independent of job count") {
    const Seq d{4, 4, 3, 3, 3, 2, 2, 2, 1, 1, 1};
    auto o = sampled(400, 9);
    const auto a = log_volume_degree_sequence(d, o);
    o.jobs = 3;
    const auto b = log_volume_degree_sequence(d, o);
    CHECK(a.log_count == b.log_count);
    CHECK(a.std_error_log == b.std_error_log);
  }

  TEST_CASE("standard error shrinks with the sample count") {
    const Seq d{5, 4, 4, 3, 3, 3, 2, 2, 2, 2, 1, 1};
    const auto a = log_volume_degree_sequence(d, sampled(2000, 3));
    const auto b = log_volume_degree_sequence(d, sampled(8000, 3));
    CHECK(b.std_error_log < a.std_error_log);
    CHECK(b.std_error_log == doctest::Approx(a.std_error_log / 2.0).epsilon(0.35));
  }

  TEST_CASE("binary search eligibility matches the linear scan") {
    const Seq d{6, 5, 5, 4, 4, 3, 3, 3, 2, 2, 2, 1, 1, 1};
    detail::DegreeSequenceSampler fast(d), slow(d, true);
    CHECK(slow.linear_scan());
    for (std::uint64_t s = 0; s < 200; ++s) {
      auto r1 = make_stream(5, s), r2 = make_stream(5, s);
      detail::EdgeList e1, e2;
      const double w1 = fast.sample_log_weight(r1, &e1);
      const double w2 = slow.sample_log_weight(r2, &e2);
      CHECK(w1 == w2);
      CHECK(e1 == e2);
    }
    const Seq rows{3, 2, 2, 1}, cols{2, 2, 2, 1, 1};
    detail::BipartiteSampler bf(rows, cols), bs(rows, cols, true);
    for (std::uint64_t s = 0; s < 200; ++s) {
      auto r1 = make_stream(6, s), r2 = make_stream(6, s);
      CHECK(bf.sample_log_weight(r1) == bs.sample_log_weight(r2));
    }
  }

  TEST_CASE("degree distribution minus multinomial is representative invariant") {
    const Seq a{3, 2, 2, 1, 1, 1}, b{1, 2, 1, 3, 1, 2};
    const auto va = log_volume_degree_sequence(a);
    const auto vb = log_volume_degree_sequence(b);
    CHECK(va.log_count == vb.log_count);
  }
}
