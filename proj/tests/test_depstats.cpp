#include <algorithm>

#include "doctest.h"
#include "helpers.hpp"
#include "netfuse/depstats.hpp"

using namespace netfuse;

namespace {

DistanceMatrix dist(const Dense& x) { return rows_to_distance(SampleMatrix::unlabeled(x)); }

Dense rotation3(double a, double b, double c) {
  Eigen::Matrix3d r = (Eigen::AngleAxisd(a, Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(b, Eigen::Vector3d::UnitY()) *
                       Eigen::AngleAxisd(c, Eigen::Vector3d::UnitX()))
                          .toRotationMatrix();
  return r;
}

// x, y, z, v, w with shared latent factors so no R* is degenerate.
std::vector<Dense> correlated(int k, Eigen::Index n, PortableRng& rng) {
  const Dense f = th::normal(n, 2, rng);
  std::vector<Dense> out;
  for (int i = 0; i < k; ++i) {
    Dense m = th::normal(n, 2, rng);
    m += (0.3 + 0.2 * i) * f;
    out.push_back(m);
  }
  return out;
}

}  // namespace

TEST_CASE("row distances") {
  Dense a(2, 2);
  a << 0, 0, 3, 4;
  CHECK(dist(a).values(0, 1) == 5.0);
  CHECK(dist(Dense::Ones(4, 3)).values.isZero());
  PortableRng rng(1);
  for (int t = 0; t < 10; ++t) {
    const Dense x = th::normal(5, 3, rng);
    CHECK(th::max_abs_diff(th::to_mat(dist(x).values), oracle::distances(th::to_mat(x))) < 1e-12);
  }
}

TEST_CASE("dcor and R* match brute-force oracles") {
  PortableRng rng(2);
  for (int t = 0; t < 10; ++t) {
    const auto v = correlated(2, 30, rng);
    const auto dx = oracle::distances(th::to_mat(v[0])), dy = oracle::distances(th::to_mat(v[1]));
    CHECK(dcor(dist(v[0]), dist(v[1])) == doctest::Approx(oracle::dcor(dx, dy)).epsilon(1e-12));
    CHECK(dcor_star(dist(v[0]), dist(v[1])) == doctest::Approx(oracle::dcor_star(dx, dy)).epsilon(1e-12));
  }
}

TEST_CASE("dcor basic identities") {
  PortableRng rng(3);
  const Dense x = th::normal(50, 1, rng);
  CHECK(std::abs(dcor(dist(x), dist(x)) - 1) < 1e-12);
  CHECK(std::abs(dcor(dist(x), dist((3 * x).array() + 1)) - 1) < 1e-12);
  CHECK(std::abs(dcor_star(dist(x), dist(x)) - 1) < 1e-12);
  CHECK(std::abs(dcor_star(dist(x), dist(-x)) - 1) < 1e-12);
  const Dense y = th::normal(50, 2, rng);
  CHECK(dcor(dist(x), dist(y)) == dcor(dist(y), dist(x)));
  CHECK(dcor_star(dist(x), dist(y)) <= 1 + 1e-12);
}

TEST_CASE("dcor is invariant to rotation and translation") {
  PortableRng rng(4);
  for (int t = 0; t < 5; ++t) {
    const Dense x = th::normal(200, 3, rng), y = th::normal(200, 3, rng) + 0.5 * x;
    const double base = dcor(dist(x), dist(y));
    const double base_star = dcor_star(dist(x), dist(y));
    Dense moved = x * rotation3(0.3 * t + 0.1, 1.1, -0.7).transpose();
    moved.rowwise() += Eigen::RowVector3d(5.0, -3.0, 11.0);
    CHECK(std::abs(dcor(dist(moved), dist(y)) - base) < 1e-9);
    CHECK(std::abs(dcor_star(dist(moved), dist(y)) - base_star) < 1e-9);
  }
}

TEST_CASE("errors") {
  try {
    dcor(dist(Dense::Ones(5, 2)), dist(Dense::Random(5, 2)));
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateSample);
  }
  try {
    dcor_star(dist(Dense::Random(3, 2)), dist(Dense::Random(3, 2)));
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SampleTooSmall);
  }
  PortableRng rng(5);
  const auto v = correlated(2, 40, rng);
  try {
    pdcor(dist(v[0]), dist(v[1]), dist(v[0]));
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateConditioning);
  }
}

TEST_CASE("independent normals stay near zero") {
  PortableRng rng(6);
  for (int t = 0; t < 10; ++t) {
    const Dense x = th::normal(500, 2, rng), y = th::normal(500, 2, rng);
    CHECK(dcor(dist(x), dist(y)) < 0.15);
    CHECK(std::abs(dcor_star(dist(x), dist(y))) < 0.05);
  }
}

TEST_CASE("pdcor matches the projection oracle and the base formula") {
  PortableRng rng(7);
  for (int t = 0; t < 10; ++t) {
    const auto v = correlated(3, 40, rng);
    const auto dx = oracle::distances(th::to_mat(v[0])), dy = oracle::distances(th::to_mat(v[1])),
               dz = oracle::distances(th::to_mat(v[2]));
    const double got = pdcor(dist(v[0]), dist(v[1]), dist(v[2]));
    CHECK(got == doctest::Approx(oracle::projection_pdcor(dx, dy, dz)).epsilon(1e-10));
    const auto r = oracle::rstar_table({dx, dy, dz});
    CHECK(got == doctest::Approx(oracle::partial(r(0, 1), r(0, 2), r(1, 2))).epsilon(1e-12));
    const DistanceMatrix z = dist(v[2]);
    CHECK(pdcor_multi(dist(v[0]), dist(v[1]), {&z}) == got);
  }
  // x = y: numerator and denominator are both 1 - R^2
  const auto v = correlated(2, 40, rng);
  const Dense z = th::normal(40, 2, rng);
  CHECK(pdcor(dist(v[0]), dist(v[0]), dist(z)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("recursion equals the printed k=4 and k=5 expansions") {
  PortableRng rng(8);
  for (int t = 0; t < 10; ++t) {
    const auto v = correlated(5, 60, rng);
    std::vector<oracle::Mat> d;
    std::vector<DistanceMatrix> dm;
    for (const auto& m : v) {
      d.push_back(oracle::distances(th::to_mat(m)));
      dm.push_back(dist(m));
    }
    const auto r4 = oracle::rstar_table({d[0], d[1], d[2], d[3]});
    CHECK(std::abs(pdcor_multi(dm[0], dm[1], {&dm[2], &dm[3]}) - oracle::closed_form_k4(r4)) < 1e-12);
    const auto r5 = oracle::rstar_table(d);
    CHECK(std::abs(pdcor_multi(dm[0], dm[1], {&dm[2], &dm[3], &dm[4]}) - oracle::closed_form_k5(r5)) < 1e-10);
    CHECK(std::abs(pdcor_multi(dm[0], dm[2], {&dm[1], &dm[3], &dm[4]}) - oracle::closed_form_k5_xz(r5)) < 1e-10);
  }
}

TEST_CASE("sample-matrix reports") {
  PortableRng rng(9);
  const auto v = correlated(4, 30, rng);
  std::vector<SampleMatrix> s;
  for (std::size_t i = 0; i < v.size(); ++i) s.push_back(SampleMatrix::unlabeled(v[i], "m" + std::to_string(i)));
  const auto empty = pdcor_multi(s[0], s[1], {});
  CHECK(empty.kind == DcorKind::DcorStar);
  CHECK(empty.value == dcor_star(s[0], s[1]).value);
  const auto rep = pdcor_multi(s[0], s[1], {s[2], s[3]});
  CHECK(rep.kind == DcorKind::Pdcor);
  CHECK(rep.conditioned_on == std::vector<std::string>{"m2", "m3"});
  CHECK(dcor(s[0], s[1]).kind == DcorKind::Dcor);
}

TEST_CASE("elimination-order sensitivity is measured") {
  PortableRng rng(10);
  double worst = 0;
  for (int t = 0; t < 10; ++t) {
    const auto v = correlated(5, 60, rng);
    std::vector<DistanceMatrix> dm;
    for (const auto& m : v) dm.push_back(dist(m));
    std::vector<const DistanceMatrix*> given{&dm[2], &dm[3], &dm[4]};
    std::sort(given.begin(), given.end());
    double lo = 1e300, hi = -1e300;
    do {
      const double r = pdcor_multi(dm[0], dm[1], given);
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    } while (std::next_permutation(given.begin(), given.end()));
    worst = std::max(worst, hi - lo);
  }
  MESSAGE("max spread of pdcor over conditioner orders (k=5, n=60): " << worst);
  CHECK(worst >= 0.0);
}
