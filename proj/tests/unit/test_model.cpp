#include <doctest.h>

#include <random>

#include "chirocool/model.hpp"
#include "oracles.hpp"

using namespace chirocool;

namespace {

ChainConfig random_config(int n, unsigned seed) {
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ChainConfig c;
  c.n_ions = n;
  c.omega.resize(static_cast<std::size_t>(n));
  for (auto& w : c.omega) w = 0.05 + u(gen);
  c.gamma_r = 0.1 * u(gen);
  c.gamma_l = 0.1 * u(gen);
  c.gamma_ng = 0.05 * u(gen);
  c.xi = 2.0 * std::numbers::pi * u(gen);
  c.eta = 0.02 + 0.05 * u(gen);
  c.n_max = 1 + static_cast<int>(gen() % 2);
  return c;
}

}  // namespace

TEST_CASE("hamiltonian matches the oracle for random configs") {
  for (unsigned seed = 1; seed <= 6; ++seed) {
    const ChainConfig c = random_config(seed % 3 == 0 ? 3 : 2, seed);
    const Matrix h = Matrix(build_hamiltonian(c, make_space(c)));
    const Matrix ref = oracle::hamiltonian(c);
    CHECK((h - ref).norm() <= 1e-14 * (1.0 + ref.norm()));
    CHECK((h - h.adjoint()).norm() == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("single ion has no coupling terms") {
  ChainConfig c;
  c.n_ions = 1;
  c.omega = {0.3};
  c.gamma_r = 0.2;
  c.gamma_l = 0.7;
  const SpaceDescriptor space = make_space(c);
  const Matrix h = Matrix(build_hamiltonian(c, space));
  const Matrix s = Matrix(embed(local_lowering_spin(), 1, SiteFactor::kSpin, space));
  const Matrix a = Matrix(embed(local_annihilation(1), 1, SiteFactor::kPhonon, space));
  const Matrix ref = s.adjoint() * s + a.adjoint() * a + 0.5 * c.eta * 0.3 * (s + s.adjoint()) * (a + a.adjoint());
  CHECK((h - ref).norm() < 1e-15);
}

TEST_CASE("two ions at xi = 2 pi couple with unit phase") {
  ChainConfig c;
  c.gamma_r = 0.07;
  c.gamma_l = 0.03;
  c.omega = {0.0, 0.0};
  const SpaceDescriptor space = make_space(c);
  const Matrix h = Matrix(build_hamiltonian(c, space));
  const Matrix s1 = Matrix(embed(local_lowering_spin(), 1, SiteFactor::kSpin, space));
  const Matrix s2 = Matrix(embed(local_lowering_spin(), 2, SiteFactor::kSpin, space));
  const Matrix a1 = Matrix(embed(local_annihilation(1), 1, SiteFactor::kPhonon, space));
  const Matrix a2 = Matrix(embed(local_annihilation(1), 2, SiteFactor::kPhonon, space));
  const cplx i{0.0, 1.0};
  const Matrix coupling = -i * (0.03 / 2) * (s1.adjoint() * s2 - s2.adjoint() * s1) -
                          i * (0.07 / 2) * (s2.adjoint() * s1 - s1.adjoint() * s2);
  const Matrix local = s1.adjoint() * s1 + s2.adjoint() * s2 + a1.adjoint() * a1 + a2.adjoint() * a2;
  CHECK((h - local - coupling).norm() < 1e-14);
}

TEST_CASE("dissipators follow the channel conventions") {
  SUBCASE("single ion has total rate Gamma on the diagonal") {
    ChainConfig c;
    c.n_ions = 1;
    c.omega = {1.0};
    c.gamma_r = 0.03;
    c.gamma_l = 0.05;
    c.gamma_ng = 0.02;
    const auto ch = build_dissipators(c);
    double total = 0.0;
    for (const auto& d : ch) total += d.coefficients(0, 0).real();
    CHECK(total == doctest::Approx(0.1));
  }
  SUBCASE("xi = 2 pi gives all-ones matrices") {
    ChainConfig c;
    c.n_ions = 3;
    c.omega = {1.0, 0.1, 0.1};
    c.gamma_r = 0.06;
    c.gamma_l = 0.04;
    c.gamma_ng = 0.01;
    const auto ch = build_dissipators(c);
    REQUIRE(ch.size() == 3);
    CHECK(ch[0].channel == Channel::kLeft);
    CHECK(ch[1].channel == Channel::kRight);
    CHECK(ch[2].channel == Channel::kNonguided);
    CHECK((ch[0].coefficients - Matrix::Constant(3, 3, 0.04)).norm() < 1e-14);
    CHECK((ch[1].coefficients - Matrix::Constant(3, 3, 0.06)).norm() < 1e-14);
    CHECK((ch[2].coefficients - 0.01 * Matrix::Identity(3, 3)).norm() < 1e-15);
  }
  SUBCASE("guided channels are rank one and PSD for any phase") {
    for (unsigned seed = 11; seed < 17; ++seed) {
      const ChainConfig c = random_config(3, seed);
      const auto ch = build_dissipators(c);
      for (int k = 0; k < 3; ++k) {
        for (int mu = 1; mu <= 3; ++mu)
          for (int nu = 1; nu <= 3; ++nu)
            CHECK(std::abs(ch[k].coefficients(mu - 1, nu - 1) - oracle::coefficient(c, mu, nu, k)) < 1e-14);
        Eigen::SelfAdjointEigenSolver<Matrix> es(ch[k].coefficients);
        CHECK(es.eigenvalues().minCoeff() >= -1e-12 * c.total_decay());
        if (k < 2) {
          int rank = 0;
          for (long i = 0; i < 3; ++i) rank += es.eigenvalues()(i) > 1e-12 ? 1 : 0;
          CHECK(rank == 1);
        }
      }
    }
  }
}

TEST_CASE("unidirectional coupling drops the left channel") {
  ChainConfig c;
  c.gamma_r = 0.1;
  c.gamma_l = 0.0;
  const auto ch = build_dissipators(c);
  CHECK(ch[0].coefficients.norm() == 0.0);
  c.omega = {0.0, 0.0};
  const SpaceDescriptor space = make_space(c);
  const Matrix h = Matrix(build_hamiltonian(c, space));
  const Matrix s1 = Matrix(embed(local_lowering_spin(), 1, SiteFactor::kSpin, space));
  const Matrix s2 = Matrix(embed(local_lowering_spin(), 2, SiteFactor::kSpin, space));
  const cplx i{0.0, 1.0};
  const Matrix right = -i * 0.05 * (s2.adjoint() * s1 - s1.adjoint() * s2);
  const Matrix diag = Matrix(h.diagonal().asDiagonal());
  CHECK((h - diag - right).norm() < 1e-15);
}

TEST_CASE("explicit phases override xi") {
  ChainConfig c;
  c.n_ions = 3;
  c.omega = {1.0, 0.1, 0.1};
  c.phases = std::vector<double>{0.0, 1.0, 2.5};
  CHECK(c.phase(3) == 2.5);
  const Matrix h = Matrix(build_hamiltonian(c, make_space(c)));
  CHECK((h - oracle::hamiltonian(c)).norm() < 1e-14);
}

TEST_CASE("validation") {
  ChainConfig c;
  c.gamma_r = -0.1;
  auto r = validate_config(c);
  REQUIRE_FALSE(r.ok());
  CHECK(r.errors[0].find("negative rate") != std::string::npos);
  CHECK_THROWS_AS(require_valid(c), InvalidArgument);

  ChainConfig fig;
  fig.omega = {1.0, 0.1};
  fig.gamma_r = 0.05;
  fig.gamma_l = 0.05;
  r = validate_config(fig);
  CHECK(r.ok());
  CHECK(r.warnings.empty());

  fig.detuning = 0.0;
  r = validate_config(fig);
  CHECK(r.ok());
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("resolved-sideband condition violated") != std::string::npos);

  ChainConfig bad;
  bad.eta = 0.0;
  bad.n_max = 0;
  bad.omega = {1.0};
  r = validate_config(bad);
  CHECK(r.errors.size() == 3);

  ChainConfig unsorted;
  unsorted.phases = std::vector<double>{1.0, 0.5};
  CHECK_FALSE(validate_config(unsorted).ok());

  ChainConfig dark;
  dark.gamma_r = dark.gamma_l = 0.0;
  CHECK_FALSE(validate_config(dark).ok());
}

TEST_CASE("beta and total decay") {
  ChainConfig c;
  c.gamma_r = 0.06;
  c.gamma_l = 0.02;
  c.gamma_ng = 0.02;
  CHECK(c.gamma() == doctest::Approx(0.08));
  CHECK(c.total_decay() == doctest::Approx(0.1));
  CHECK(c.beta() == doctest::Approx(0.8));
}
