#include "homwit/interference.hpp"
#include "homwit/rng.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <map>

namespace itf = homwit::interference;
using homwit::OverlapTriple;

namespace {

// Sub-matrix M with M(j, k) = U(pattern mode k, input j), the amplitude
// bookkeeping used by both permanent limits.
Eigen::Matrix3cd pattern_matrix(const itf::Interferometer& net, const std::array<int, 3>& modes) {
  Eigen::Matrix3cd m;
  for (int j = 0; j < 3; ++j)
    for (int k = 0; k < 3; ++k)
      m(j, k) = net.unitary(modes[static_cast<std::size_t>(k)],
                            net.input_modes[static_cast<std::size_t>(j)]);
  return m;
}

double multiplicity_factorial(const itf::PatternInfo& p) {
  std::map<int, int> mult;
  for (const int m : p.modes) ++mult[m];
  double f = 1.0;
  for (const auto& [_, n] : mult) {
    for (int i = 2; i <= n; ++i) f *= i;
  }
  return f;
}

}  // namespace

TEST_SUITE("interference") {

TEST_CASE("network satisfies its structural invariants") {
  const auto net = itf::build_network();
  CHECK_NOTHROW(net.validate());
  CHECK((net.unitary.adjoint() * net.unitary - itf::Matrix6cd::Identity()).norm() < 1e-12);
  CHECK(net.input_modes == std::array<int, 3>{0, 2, 4});
  // pair outputs tile all six modes
  std::array<int, 6> seen{};
  for (const auto& pair : net.pair_outputs)
    for (const int m : pair) ++seen[static_cast<std::size_t>(m)];
  for (const int s : seen) CHECK(s == 1);
}

TEST_CASE("pattern enumeration and classification") {
  const auto net = itf::build_network();
  const auto patterns = itf::enumerate_patterns(net);
  REQUIRE(patterns.size() == itf::kPatterns);

  int per_tag[4] = {0, 0, 0, 0};
  for (std::size_t i = 0; i < patterns.size(); ++i) {
    const auto& p = patterns[i];
    CHECK(p.modes[0] <= p.modes[1]);
    CHECK(p.modes[1] <= p.modes[2]);
    ++per_tag[static_cast<int>(p.tag)];
    if (i > 0) CHECK(patterns[i - 1].modes < p.modes);  // strict lexicographic order
    CHECK(p.bunched == (p.doubly_occupied > 0 || p.triply_occupied > 0));
  }
  CHECK(per_tag[0] == 12);  // AB
  CHECK(per_tag[1] == 12);  // BC
  CHECK(per_tag[2] == 12);  // AC
  CHECK(per_tag[3] == 20);  // insensitive

  // spot checks
  const auto find = [&](std::array<int, 3> m) {
    for (const auto& p : patterns)
      if (p.modes == m) return p;
    REQUIRE(false);
    return patterns[0];
  };
  CHECK(find({0, 0, 2}).tag == itf::PairTag::AB);   // two photons in AB's outputs
  CHECK(find({0, 0, 2}).bunched);
  CHECK(find({0, 1, 4}).tag == itf::PairTag::AB);
  CHECK_FALSE(find({0, 1, 4}).bunched);
  CHECK(find({2, 3, 5}).tag == itf::PairTag::BC);
  CHECK(find({0, 4, 5}).tag == itf::PairTag::AC);
  CHECK(find({0, 2, 4}).tag == itf::PairTag::Insensitive);
  CHECK(find({0, 0, 1}).tag == itf::PairTag::Insensitive);  // all three at one pair
  CHECK(find({0, 0, 0}).triply_occupied == 1);
}

TEST_CASE("hom bunching law") {
  CHECK(itf::hom_bunching_probability(1.0) == doctest::Approx(1.0));
  CHECK(itf::hom_bunching_probability(0.0) == doctest::Approx(0.5));
  CHECK(itf::hom_bunching_probability(0.648) == doctest::Approx(0.824));
  CHECK_THROWS_AS(itf::hom_bunching_probability(-0.1), std::invalid_argument);
  CHECK_THROWS_AS(itf::hom_bunching_probability(1.1), std::invalid_argument);
}

TEST_CASE("gram matrix construction and validation") {
  const auto g = itf::GramMatrix::from_triple(OverlapTriple(0.648, 0.63, 0.14));
  const auto r = g.overlaps();
  CHECK(r.ab == doctest::Approx(0.648).epsilon(1e-12));
  CHECK(r.bc == doctest::Approx(0.63).epsilon(1e-12));
  CHECK(r.ac == doctest::Approx(0.14).epsilon(1e-12));
  for (int i = 0; i < 3; ++i) CHECK(g.matrix()(i, i) == std::complex<double>(1.0));

  // a triple that no states realize has no Gram matrix
  CHECK_THROWS_AS(itf::GramMatrix::from_triple(OverlapTriple(1, 1, 0)), std::invalid_argument);

  Eigen::Matrix3cd bad = Eigen::Matrix3cd::Identity();
  bad(0, 1) = 0.5;  // not hermitian
  CHECK_THROWS_AS(itf::GramMatrix::from_matrix(bad), std::invalid_argument);

  CHECK(itf::GramMatrix::identity().overlaps().ab == doctest::Approx(0.0));
  CHECK(itf::GramMatrix::all_ones().overlaps().ac == doctest::Approx(1.0));

  // scaling interpolates the off-diagonals
  const auto half = g.scaled(0.5);
  CHECK(half.overlaps().ab == doctest::Approx(0.25 * 0.648).epsilon(1e-12));
}

TEST_CASE("distribution normalization, positivity, classification reuse") {
  const auto net = itf::build_network();
  homwit::rng::Stream rng(0x60a7);
  for (int trial = 0; trial < 200; ++trial) {
    itf::Interferometer random_net = net;
    random_net.unitary = oracles::random_unitary(rng, 6);
    const auto gram = itf::GramMatrix::from_matrix(oracles::random_gram(rng, 3));
    const auto dist = itf::output_distribution(random_net, gram);
    REQUIRE(dist.size() == itf::kPatterns);
    double sum = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
      CHECK(dist.prob(i) >= 0.0);
      sum += dist.prob(i);
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("all-ones gram reproduces ideal-boson permanents") {
  homwit::rng::Stream rng(0xb050);
  for (int trial = 0; trial < 25; ++trial) {
    auto net = itf::build_network();
    net.unitary = oracles::random_unitary(rng, 6);
    const auto dist = itf::output_distribution(net, itf::GramMatrix::all_ones());
    const auto patterns = dist.patterns();
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      const auto m = pattern_matrix(net, patterns[i].modes);
      const double expected = std::norm(oracles::permanent(m)) / multiplicity_factorial(patterns[i]);
      CHECK(std::abs(dist.prob(i) - expected) <= 1e-12);
    }
  }
}

TEST_CASE("identity gram reproduces distinguishable-particle permanents") {
  homwit::rng::Stream rng(0xd157);
  for (int trial = 0; trial < 25; ++trial) {
    auto net = itf::build_network();
    net.unitary = oracles::random_unitary(rng, 6);
    const auto dist = itf::output_distribution(net, itf::GramMatrix::identity());
    const auto patterns = dist.patterns();
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      const Eigen::Matrix3cd m = pattern_matrix(net, patterns[i].modes);
      const Eigen::Matrix3cd mod2 = m.cwiseAbs2().cast<std::complex<double>>();
      const double expected =
          oracles::permanent(mod2).real() / multiplicity_factorial(patterns[i]);
      CHECK(std::abs(dist.prob(i) - expected) <= 1e-12);
    }
  }
}

TEST_CASE("distribution matches the independent Fock-space oracle") {
  homwit::rng::Stream rng(0xf0c5);
  for (int trial = 0; trial < 40; ++trial) {
    auto net = itf::build_network();
    if (trial % 2 == 0) net.unitary = oracles::random_unitary(rng, 6);
    const Eigen::Matrix3cd s = oracles::random_gram(rng, 3);
    const auto dist = itf::output_distribution(net, itf::GramMatrix::from_matrix(s));
    const auto expected = oracles::fock_distribution(net, s);
    REQUIRE(expected.size() == dist.size());
    for (std::size_t i = 0; i < dist.size(); ++i) {
      CHECK(std::abs(dist.prob(i) - expected[i]) <= 1e-12);
    }
  }
}

TEST_CASE("conditional bunching reproduces the pairwise hom law") {
  const auto net = itf::build_network();
  homwit::rng::Stream rng(0x4a11);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Matrix3cd s = oracles::random_gram(rng, 3);
    const auto gram = itf::GramMatrix::from_matrix(s);
    const auto r = gram.overlaps();
    const auto dist = itf::output_distribution(net, gram);
    const auto cond = itf::pair_conditionals(dist);
    const std::array<double, 3> overlap{r.ab, r.bc, r.ac};
    for (int pair = 0; pair < 3; ++pair) {
      const auto& c = cond[static_cast<std::size_t>(pair)];
      const double total = c.bunched + c.antibunched;
      CHECK(total > 0.0);
      const double pb = c.bunched / total;
      CHECK(std::abs(pb - itf::hom_bunching_probability(overlap[static_cast<std::size_t>(pair)])) <=
            1e-9);
    }
  }
}

TEST_CASE("overlap recovery round-trips through the distribution") {
  const auto net = itf::build_network();
  homwit::rng::Stream rng(0x07e4);
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::Matrix3cd s = oracles::random_gram(rng, 3);
    const auto gram = itf::GramMatrix::from_matrix(s);
    const auto truth = gram.overlaps();
    const auto rec = itf::overlaps_from_distribution(itf::output_distribution(net, gram));
    CHECK(std::abs(rec.triple.ab - truth.ab) <= 1e-9);
    CHECK(std::abs(rec.triple.bc - truth.bc) <= 1e-9);
    CHECK(std::abs(rec.triple.ac - truth.ac) <= 1e-9);
    CHECK_FALSE(rec.clamped[0]);
    CHECK_FALSE(rec.clamped[1]);
    CHECK_FALSE(rec.clamped[2]);
  }

  // exact limits
  const auto ones = itf::overlaps_from_distribution(
      itf::output_distribution(net, itf::GramMatrix::all_ones()));
  CHECK(ones.triple.ab == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ones.triple.bc == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ones.triple.ac == doctest::Approx(1.0).epsilon(1e-12));
  const auto zeros = itf::overlaps_from_distribution(
      itf::output_distribution(net, itf::GramMatrix::identity()));
  CHECK(zeros.triple.ab == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(zeros.triple.bc == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(zeros.triple.ac == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("bunching interpolates monotonically in the gram scale") {
  const auto net = itf::build_network();
  const auto gram = itf::GramMatrix::from_triple(OverlapTriple(0.648, 0.63, 0.14));
  std::array<double, 3> prev{-1.0, -1.0, -1.0};
  for (double lambda = 0.0; lambda <= 1.0 + 1e-12; lambda += 0.1) {
    const auto dist = itf::output_distribution(net, gram.scaled(lambda));
    const auto cond = itf::pair_conditionals(dist);
    for (int pair = 0; pair < 3; ++pair) {
      const auto& c = cond[static_cast<std::size_t>(pair)];
      const double pb = c.bunched / (c.bunched + c.antibunched);
      CHECK(pb >= prev[static_cast<std::size_t>(pair)] - 1e-12);
      prev[static_cast<std::size_t>(pair)] = pb;
    }
  }
  CHECK(prev[0] == doctest::Approx(itf::hom_bunching_probability(0.648)).epsilon(1e-9));
}

TEST_CASE("relabeling photons consistently leaves the distribution unchanged") {
  homwit::rng::Stream rng(0x9e57);
  const auto base = itf::build_network();
  const Eigen::Matrix3cd s = oracles::random_gram(rng, 3);
  const auto ref = itf::output_distribution(base, itf::GramMatrix::from_matrix(s));

  const std::array<std::array<int, 3>, 5> perms{
      std::array<int, 3>{0, 2, 1}, std::array<int, 3>{1, 0, 2}, std::array<int, 3>{1, 2, 0},
      std::array<int, 3>{2, 0, 1}, std::array<int, 3>{2, 1, 0}};
  for (const auto& perm : perms) {
    auto net = base;
    Eigen::Matrix3cd sp;
    for (int i = 0; i < 3; ++i) {
      net.input_modes[static_cast<std::size_t>(i)] =
          base.input_modes[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
      for (int j = 0; j < 3; ++j) {
        sp(i, j) = s(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
      }
    }
    const auto dist = itf::output_distribution(net, itf::GramMatrix::from_matrix(sp));
    for (std::size_t i = 0; i < dist.size(); ++i) {
      CHECK(std::abs(dist.prob(i) - ref.prob(i)) <= 1e-12);
    }
  }
}

TEST_CASE("triple occupancy is unreachable in the pairwise network") {
  const auto net = itf::build_network();
  homwit::rng::Stream rng(0x3e3e);
  for (int trial = 0; trial < 10; ++trial) {
    const auto gram = itf::GramMatrix::from_matrix(oracles::random_gram(rng, 3));
    const auto dist = itf::output_distribution(net, gram);
    const auto& patterns = dist.patterns();
    for (std::size_t i = 0; i < dist.size(); ++i) {
      if (patterns[i].triply_occupied > 0) CHECK(dist.prob(i) <= 1e-14);
    }
  }
}

TEST_CASE("dip curve") {
  CHECK(itf::dip_curve(0.0, 1000.0, 0.944, 8.7e-5) == doctest::Approx(1000.0 * (1 - 0.944)));
  CHECK(itf::dip_curve(1e6, 1000.0, 0.944, 8.7e-5) == doctest::Approx(1000.0));
  CHECK(itf::dip_curve(100.0, 1.0, 0.944, 8.7e-5) ==
        doctest::Approx(1.0 - 0.944 * std::exp(-0.87)).epsilon(1e-12));
}

}  // TEST_SUITE
