#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include "biochar/equilibria.hpp"
#include "biochar/integrate.hpp"
#include "biochar/nondim.hpp"

using namespace biochar;

namespace {

using Cplx = std::complex<double>;

// Independent eigenvalue oracle: Durand-Kerner iteration on the
// characteristic polynomial lambda^3 + c2 l^2 + c1 l + c0 of the matrix.
std::array<Cplx, 3> durand_kerner_eigenvalues(const Mat3& j) {
  const double tr = j[0][0] + j[1][1] + j[2][2];
  const double minors = j[0][0] * j[1][1] - j[0][1] * j[1][0] +
                        j[0][0] * j[2][2] - j[0][2] * j[2][0] +
                        j[1][1] * j[2][2] - j[1][2] * j[2][1];
  const double det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) -
                     j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0]) +
                     j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
  const double c2 = -tr, c1 = minors, c0 = -det;
  const auto poly = [&](Cplx x) { return ((x + c2) * x + c1) * x + c0; };

  // Scale-aware starting points on a perturbed circle.
  const double radius = 1.0 + std::max({std::fabs(c2), std::fabs(c1), std::fabs(c0)});
  std::array<Cplx, 3> r{Cplx(0.4, 0.9) * radius,
                        Cplx(-0.8, 0.3) * radius,
                        Cplx(0.3, -0.8) * radius};
  for (int iter = 0; iter < 500; ++iter) {
    double move = 0.0;
    for (int i = 0; i < 3; ++i) {
      Cplx denom = 1.0;
      for (int k = 0; k < 3; ++k) {
        if (k != i) denom *= r[i] - r[k];
      }
      const Cplx step = poly(r[i]) / denom;
      r[i] -= step;
      move = std::max(move, std::abs(step));
    }
    if (move < 1e-14 * radius) break;
  }
  return r;
}

// Multiset comparison of eigenvalue triples.
double eigen_distance(std::array<Cplx, 3> a, std::array<Cplx, 3> b) {
  std::array<int, 3> perm{0, 1, 2};
  double best = std::numeric_limits<double>::infinity();
  std::sort(perm.begin(), perm.end());
  do {
    double worst = 0.0;
    for (int i = 0; i < 3; ++i) worst = std::max(worst, std::abs(a[i] - b[perm[i]]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Reduced (om, microbes, charcoal) right-hand side for finite differences.
std::array<double, 3> reduced_rhs(const Params& p, const std::array<double, 3>& u) {
  const State d = model_rhs(p, {u[0], u[1], u[2], 0.0});
  return {d.organic_matter, d.microbes, d.charcoal};
}

Mat3 finite_difference_jacobian(const Params& p, const std::array<double, 3>& at) {
  Mat3 j{};
  for (int col = 0; col < 3; ++col) {
    const double h = std::max(1e-7 * std::fabs(at[col]), 1e-9);
    std::array<double, 3> up = at, down = at;
    up[col] += h;
    down[col] = std::max(down[col] - h, 0.0);  // stay in the admissible orthant
    const auto f_up = reduced_rhs(p, up);
    const auto f_down = reduced_rhs(p, down);
    for (int row = 0; row < 3; ++row) {
      j[row][col] = (f_up[row] - f_down[row]) / (up[col] - down[col]);
    }
  }
  return j;
}

Params random_valid_params(std::mt19937& rng, bool with_microbial_equilibrium,
                           bool balanced = true) {
  std::uniform_real_distribution<double> coef(0.2, 2.5);
  std::uniform_real_distribution<double> expo(1.0, 4.0);
  std::uniform_real_distribution<double> above(1.3, 3.0);
  std::uniform_real_distribution<double> shrink(0.3, 1.0);
  Params p;
  p.k1 = {coef(rng), coef(rng), coef(rng), coef(rng)};
  p.k2 = {coef(rng), coef(rng), coef(rng), coef(rng)};
  p.k3 = {coef(rng), coef(rng), coef(rng), coef(rng)};
  p.k4 = {0.0, coef(rng), coef(rng), 1.0};
  p.delta = expo(rng);
  p.mu = coef(rng);
  // Balanced draws sit on delta = eta*mu like the studies; otherwise
  // delta > eta*mu strictly.
  p.eta = p.delta / p.mu * (balanced ? 1.0 : shrink(rng));
  p.n_co2 = coef(rng);
  p.ref_microbes = coef(rng);
  const double threshold = p.k1.at_zero() * u1_star(p);
  p.source = with_microbial_equilibrium ? above(rng) * threshold : 0.5 * threshold;
  return p;
}

}  // namespace

TEST_CASE("u1_star on parameter set 1 and simple scalings") {
  const Params p = build_params(parameter_set_1());
  // k4 = 0.1, k3(0) = 0.1, mu = 1, delta = 10 -> exactly 1.
  CHECK(u1_star(p) == doctest::Approx(1.0).epsilon(1e-12));

  Params q = p;
  q.k4.scale = q.mu * q.k3.at_zero();
  q.k4.intercept = 1.0;
  for (double d : {1.0, 2.0, 7.5}) {
    q.delta = d;
    q.eta = d / q.mu;
    CHECK(u1_star(q) == doctest::Approx(1.0).epsilon(1e-12));
  }

  Params lin = p;
  lin.delta = 1.0;
  lin.eta = 1.0;
  const double base = u1_star(lin);
  lin.k4.scale *= 2.0;
  CHECK(u1_star(lin) == doctest::Approx(2.0 * base).epsilon(1e-12));
}

TEST_CASE("bifurcation threshold: set-1 value, linearity in K1, and alpha = 2") {
  const Params p = build_params(parameter_set_1());
  CHECK(bifurcation_threshold(p) == doctest::Approx(0.01).epsilon(1e-12));
  // Set 1 uses s = 2 * threshold, so the microbial equilibrium exists.
  CHECK(p.source == doctest::Approx(2.0 * bifurcation_threshold(p)));
  CHECK(solve_u2_star(p).has_value());

  Params scaled = p;
  scaled.k1.scale *= 3.0;
  CHECK(bifurcation_threshold(scaled) ==
        doctest::Approx(3.0 * bifurcation_threshold(p)).epsilon(1e-12));
}

TEST_CASE("u2_star: set-1 normalization gives exactly U2") {
  const Params p = build_params(parameter_set_1());
  const auto u2 = solve_u2_star(p);
  REQUIRE(u2.has_value());
  CHECK(*u2 == doctest::Approx(p.ref_microbes).epsilon(1e-12));
  // Residual at the root.
  const double resid = -p.k1(*u2) * u1_star(p) -
                       (p.k4.at_zero() / p.mu) * (p.delta - p.eta * p.mu) * *u2 + p.source;
  CHECK(std::fabs(resid) < 1e-12 * p.source);
}

TEST_CASE("u2_star: absent at and below the threshold") {
  Params p = build_params(parameter_set_1());
  p.source = bifurcation_threshold(p);
  CHECK_FALSE(solve_u2_star(p).has_value());
  p.source *= 0.5;
  CHECK_FALSE(solve_u2_star(p).has_value());
}

TEST_CASE("u2_star: bisection agrees with the linear closed form") {
  std::mt19937 rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const Params p = random_valid_params(rng, true);
    const auto u2 = solve_u2_star(p);
    REQUIRE(u2.has_value());
    // With linear k1 the root is closed-form for any delta - eta*mu.
    const double denom = p.k1.derivative() * u1_star(p) +
                         (p.k4.at_zero() / p.mu) * (p.delta - p.eta * p.mu);
    const double closed = (p.source - p.k1.at_zero() * u1_star(p)) / denom;
    CHECK(*u2 == doctest::Approx(closed).epsilon(1e-10));
  }
}

TEST_CASE("microbe-free jacobian is upper triangular with the known diagonal") {
  const Params p = build_params(parameter_set_1());
  const Mat3 j = jacobian_microbe_free(p);
  CHECK(j[1][0] == 0.0);
  CHECK(j[2][0] == 0.0);
  CHECK(j[2][1] == 0.0);
  CHECK(j[0][0] == doctest::Approx(-p.k1.at_zero()));
  const double om = p.source / p.k1.at_zero();
  CHECK(j[1][1] ==
        doctest::Approx(p.mu * p.k3.at_zero() * std::pow(om, p.delta) - p.k4.at_zero()));
  CHECK(j[2][2] == doctest::Approx(-p.k2.at_zero()));

  // Upper-triangular structure means the eigenvalues equal the diagonal
  // entries bit for bit.
  const EigenTriple eig = eigenvalues_3x3(j);
  CHECK(eig[0] == Cplx(j[0][0]));
  CHECK(eig[1] == Cplx(j[1][1]));
  CHECK(eig[2] == Cplx(j[2][2]));
}

TEST_CASE("balanced case collapses the microbial jacobian's (1,2) entry to -k1'*U1") {
  const Params p = build_params(parameter_set_1());  // delta = eta*mu by construction
  const Mat3 j = jacobian_microbial(p);
  CHECK(j[0][1] == doctest::Approx(-p.k1.derivative() * u1_star(p)).epsilon(1e-12));
}

TEST_CASE("analytic jacobians match central finite differences at 20 random draws") {
  std::mt19937 rng(2718);
  for (int trial = 0; trial < 20; ++trial) {
    const Params p = random_valid_params(rng, true, trial % 4 != 0);

    const std::array<double, 3> at_free{p.source / p.k1.at_zero(), 0.0, 0.0};
    const Mat3 analytic_free = jacobian_microbe_free(p);
    const Mat3 fd_free = finite_difference_jacobian(p, at_free);

    const auto u2 = solve_u2_star(p);
    REQUIRE(u2.has_value());
    const std::array<double, 3> at_microbial{u1_star(p), *u2, 0.0};
    const Mat3 analytic_microbial = jacobian_microbial(p);
    const Mat3 fd_microbial = finite_difference_jacobian(p, at_microbial);

    const auto check_close = [](const Mat3& a, const Mat3& fd) {
      double scale = 0.0;
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) scale = std::max(scale, std::fabs(a[r][c]));
      }
      for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) {
          CHECK(std::fabs(a[r][c] - fd[r][c]) <= 1e-6 * scale);
        }
      }
    };
    check_close(analytic_free, fd_free);
    check_close(analytic_microbial, fd_microbial);
  }
}

TEST_CASE("eigenvalues: diagonal, block closed form, and the double root") {
  Mat3 diag{};
  diag[0][0] = -1.0;
  diag[1][1] = -2.0;
  diag[2][2] = -3.0;
  const EigenTriple eig = eigenvalues_3x3(diag);
  CHECK(eig[0].real() == -1.0);
  CHECK(eig[1].real() == -2.0);
  CHECK(eig[2].real() == -3.0);

  // Block shape with A1 = -2, A2 = -1, A3 = 1: discriminant 1 - 1 = 0, so a
  // double eigenvalue -1 next to the decoupled -k2.
  Mat3 blk{};
  blk[0][0] = -2.0;
  blk[0][1] = -1.0;
  blk[1][0] = 1.0;
  blk[2][2] = -0.5;
  const EigenTriple eig2 = eigenvalues_3x3(blk);
  CHECK(eig2[0] == Cplx(-1.0));
  CHECK(eig2[1] == Cplx(-1.0));
  CHECK(eig2[2] == Cplx(-0.5));
}

TEST_CASE("eigenvalues of random block-shaped matrices match the polynomial oracle") {
  std::mt19937 rng(424242);
  std::uniform_real_distribution<double> entry(-3.0, 3.0);
  for (int trial = 0; trial < 200; ++trial) {
    Mat3 j{};
    j[0][0] = entry(rng);
    j[0][1] = entry(rng);
    j[0][2] = entry(rng);
    j[1][0] = entry(rng);
    j[1][1] = 0.0;
    j[1][2] = entry(rng);
    j[2][2] = entry(rng);
    CHECK(eigen_distance(eigenvalues_3x3(j), durand_kerner_eigenvalues(j)) < 1e-10);
  }
}

TEST_CASE("general cubic path: companion matrices with repeated and complex roots") {
  // Companion matrix of l^3 + c2 l^2 + c1 l + c0 exercises the general path
  // (subdiagonal nonzero).
  const auto companion = [](double c2, double c1, double c0) {
    Mat3 j{};
    j[0][2] = -c0;
    j[1][0] = 1.0;
    j[1][2] = -c1;
    j[2][1] = 1.0;
    j[2][2] = -c2;
    return j;
  };
  const auto sorted_real = [](EigenTriple e) {
    std::sort(e.begin(), e.end(),
              [](const Cplx& a, const Cplx& b) { return a.real() < b.real(); });
    return e;
  };

  SUBCASE("triple root (l+2)^3") {
    const auto eig = sorted_real(eigenvalues_3x3(companion(6.0, 12.0, 8.0)));
    for (const auto& ev : eig) {
      CHECK(std::fabs(ev.real() + 2.0) < 2e-4);  // cube-root conditioning
      CHECK(std::fabs(ev.imag()) < 2e-4);
    }
  }
  SUBCASE("double root (l+1)^2 (l-3)") {
    // l^3 - l^2 - 5l - 3
    const auto eig = sorted_real(eigenvalues_3x3(companion(-1.0, -5.0, -3.0)));
    CHECK(std::fabs(eig[0].real() + 1.0) < 1e-6);
    CHECK(std::fabs(eig[1].real() + 1.0) < 1e-6);
    CHECK(eig[2].real() == doctest::Approx(3.0).epsilon(1e-10));
  }
  SUBCASE("complex pair (l+1)(l^2+l+1)") {
    const auto eig = sorted_real(eigenvalues_3x3(companion(2.0, 2.0, 1.0)));
    bool found_real = false, found_pair = false;
    for (const auto& ev : eig) {
      if (std::fabs(ev.imag()) < 1e-12) {
        found_real = std::fabs(ev.real() + 1.0) < 1e-10;
      } else {
        found_pair = std::fabs(ev.real() + 0.5) < 1e-10 &&
                     std::fabs(std::fabs(ev.imag()) - std::sqrt(3.0) / 2.0) < 1e-10;
      }
    }
    CHECK(found_real);
    CHECK(found_pair);
  }
}

TEST_CASE("eigenvalues of fully populated matrices match the polynomial oracle") {
  std::mt19937 rng(777);
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  for (int trial = 0; trial < 200; ++trial) {
    Mat3 j{};
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) j[r][c] = entry(rng);
    }
    if (j[1][0] == 0.0) j[1][0] = 0.5;  // force the general path
    CHECK(eigen_distance(eigenvalues_3x3(j), durand_kerner_eigenvalues(j)) < 1e-9);
  }
}

TEST_CASE("find_equilibria: set 1 has an unstable trivial point and a stable microbial one") {
  const Params p = build_params(parameter_set_1());
  const auto points = find_equilibria(p);
  REQUIRE(points.size() == 2);

  CHECK(points[0].kind == EquilibriumKind::microbe_free);
  CHECK(points[0].verdict == Stability::unstable);
  CHECK(points[0].point[0] == doctest::Approx(p.source / p.k1.at_zero()));

  CHECK(points[1].kind == EquilibriumKind::microbial);
  CHECK(points[1].verdict == Stability::asymptotically_stable);
  CHECK(points[1].point[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(points[1].point[1] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(points[1].point[2] == 0.0);
  for (const auto& ev : points[1].eigenvalues) CHECK(ev.real() < 0.0);

  // The right-hand side vanishes at every returned point.
  for (const auto& pt : points) {
    const State d = model_rhs(p, {pt.point[0], pt.point[1], pt.point[2], 0.0});
    const double scale = std::max(p.source, p.k4.at_zero() * p.ref_microbes);
    CHECK(std::fabs(d.organic_matter) < 1e-10 * scale);
    CHECK(std::fabs(d.microbes) < 1e-10 * scale);
    CHECK(std::fabs(d.charcoal) < 1e-10 * scale);
  }
}

TEST_CASE("find_equilibria: below the threshold only the stable trivial point remains") {
  Params p = build_params(parameter_set_1());
  p.source = 0.005;  // threshold is 0.01
  const auto points = find_equilibria(p);
  REQUIRE(points.size() == 1);
  CHECK(points[0].kind == EquilibriumKind::microbe_free);
  CHECK(points[0].verdict == Stability::asymptotically_stable);
}

TEST_CASE("bifurcation consistency over random parameters") {
  std::mt19937 rng(31415);
  for (int trial = 0; trial < 120; ++trial) {
    const Params p = random_valid_params(rng, trial % 2 == 0, trial % 3 != 0);
    const auto points = find_equilibria(p);
    const bool above = p.source > bifurcation_threshold(p);
    CHECK(points.size() == (above ? 2u : 1u));
    if (above) {
      // Sign conditions A1 < 0, A2 < 0, A3 > 0, hence stability.
      const Mat3 j = points[1].jacobian;
      CHECK(j[0][0] < 0.0);
      CHECK(j[0][1] < 0.0);
      CHECK(j[1][0] > 0.0);
      CHECK(points[1].verdict == Stability::asymptotically_stable);
      for (const auto& ev : points[1].eigenvalues) CHECK(ev.real() < 0.0);
    }
  }
}

TEST_CASE("realistic parameter sets keep clear verdicts despite tiny rates") {
  // Sets 2 and 3 work in per-second units where eigenvalues sit around
  // 1e-8..1e-7, still well outside the 1e-10 marginal band.
  for (int set : {2, 3}) {
    const Params p = build_params(parameter_set(set));
    const auto points = find_equilibria(p);
    REQUIRE(points.size() == 2);
    CHECK(points[0].verdict == Stability::unstable);
    CHECK(points[1].verdict == Stability::asymptotically_stable);
    CHECK(points[1].point[0] == doctest::Approx(p.ref_om).epsilon(1e-10));
    CHECK(points[1].point[1] == doctest::Approx(p.ref_microbes).epsilon(1e-10));
  }
}

TEST_CASE("marginal verdict exactly at the bifurcation point") {
  Params p = build_params(parameter_set_1());
  p.source = bifurcation_threshold(p);
  const auto points = find_equilibria(p);
  REQUIRE(points.size() == 1);
  CHECK(points[0].verdict == Stability::marginal);
}

TEST_CASE("subsystem regimes and the conserved combination") {
  Params p = build_params(parameter_set_1());

  SUBCASE("balanced: degenerate line with c1 = u1_star") {
    // Set 1: delta = 10, eta = 10, mu = 1.
    const SubsystemReport r = analyze_subsystem(p);
    CHECK(r.regime == SubsystemRegime::degenerate_line);
    CHECK(r.conserved);
    REQUIRE(r.equilibrium_line.has_value());
    CHECK(r.c1 == doctest::Approx(r.u1).epsilon(1e-12));
  }
  SUBCASE("consumption-dominated: bounded") {
    p.delta = 3.0;
    p.eta = 1.0;
    p.mu = 1.0;
    const SubsystemReport r = analyze_subsystem(p);
    CHECK(r.regime == SubsystemRegime::bounded);
    CHECK_FALSE(r.conserved);
    CHECK(r.c1 < r.u1);
  }
  SUBCASE("recycling-dominated: blow-up prone") {
    p.delta = 1.0;
    p.eta = 2.0;
    p.mu = 1.0;
    const SubsystemReport r = analyze_subsystem(p);
    CHECK(r.regime == SubsystemRegime::blow_up_prone);
    CHECK_FALSE(r.conserved);
  }
}

TEST_CASE("balanced subsystem conserves om + eta*microbes along trajectories") {
  std::mt19937 rng(5150);
  std::uniform_real_distribution<double> start(0.1, 2.0);
  const Params p = build_params(parameter_set_1());
  const OdeRhs rhs = [&p](double, std::span<const double> y, std::span<double> d) {
    const auto out = subsystem_rhs(p, std::max(y[0], 0.0), std::max(y[1], 0.0));
    d[0] = out[0];
    d[1] = out[1];
  };
  for (int trial = 0; trial < 30; ++trial) {
    const double om0 = start(rng), mic0 = start(rng);
    IntegratorConfig cfg;
    cfg.t_end = 100.0;
    cfg.sample_times = {0.0, 1.0, 10.0, 50.0, 100.0};
    const Trajectory tr = integrate_adaptive(rhs, {om0, mic0}, cfg);
    REQUIRE(tr.ok());
    const double initial = om0 + p.eta * mic0;
    for (const auto& s : tr.states) {
      CHECK(std::fabs(s[0] + p.eta * s[1] - initial) < 1e-8 * initial);
    }
  }
}
