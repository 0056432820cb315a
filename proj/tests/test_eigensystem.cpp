#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "blstab/contour.hpp"
#include "blstab/eigensystem.hpp"
#include "oracles.hpp"

using namespace blstab;

namespace {

const LayerParams kInflow = make_layer_params(5.0 / 3.0, 0.1, 0.5, Side::Inflow);
const LayerParams kOutflow = make_layer_params(5.0 / 3.0, 0.1, 0.5, Side::Outflow);

double residual(const Mat3& a, Complex mu, const Vec3& v) {
  const Vec3 r = a * v - mu * v;
  return norm(r) / (norm(v) * std::max(1.0, max_abs(a)));
}

}  // namespace

TEST_CASE("scalar h") {
  for (double g : {1.2, 5.0 / 3.0, 3.0}) {
    const LayerParams p = make_layer_params(g, 0.1, 0.5, Side::Inflow);
    CHECK(scalar_h(1.0, p) == doctest::Approx(p.a * g).epsilon(1e-13));
    const double expect = std::pow(0.1, g) * g * 0.9 / (1.0 - std::pow(0.1, g));
    CHECK(scalar_h(0.1, p) == doctest::Approx(expect).epsilon(1e-13));

    // h / v^g peaks at v+ with value <= gamma
    double best = -1e300, at = 0.0;
    for (int k = 0; k <= 1000; ++k) {
      const double v = 0.1 + 0.9 * k / 1000.0;
      const double r = scalar_h(v, p) / std::pow(v, g);
      if (r > best) best = r, at = v;
    }
    CHECK(at == doctest::Approx(0.1));
    CHECK(best <= g);
  }
  const LayerParams one = make_layer_params(1.0, 0.25, 0.5, Side::Inflow);
  for (double v : {0.3, 0.6, 0.9}) CHECK(scalar_h(v, one) == doctest::Approx(v * (1.25 - v)).epsilon(1e-14));
}

TEST_CASE("scalar f") {
  const LayerParams lim = make_layer_params(5.0 / 3.0, 0.0, 0.5, Side::Inflow);
  for (double v : {0.1, 0.5, 0.9}) CHECK(scalar_f(v, lim) == doctest::Approx(2 * v - 1));

  CHECK(scalar_f(1.0, make_layer_params(1.0, 0.25, 0.5, Side::Inflow)) == doctest::Approx(0.75).epsilon(1e-14));

  for (double vp : {0.25, 0.1, 1e-3}) {
    const LayerParams p = make_layer_params(5.0 / 3.0, vp, 0.5, Side::Inflow);
    CHECK(scalar_f(vp, p) <= vp - 1.0 + 1e-14);
    CHECK(scalar_f(vp, p) <= -0.75);
  }

  for (double g : {1.0, 1.4, 3.0})
    for (double vp : {0.5, 1e-2, 1e-5})
      for (double v : {vp, 0.5 * (1 + vp), 1.0}) {
        const LayerParams p = make_layer_params(g, vp, 0.9, Side::Inflow);
        CHECK(std::abs(scalar_f(v, p) - scalar_f_alt(v, p)) <= 1e-12);
      }
}

TEST_CASE("coefficient matrices") {
  const Profile prof = solve_profile(kInflow);
  const double v = prof.value(1.0);
  const Mat3 a0 = coeff_matrix(1.0, 0.0, prof).entries;
  for (int j = 0; j < 3; ++j) {
    CHECK(a0(0, j) == 0.0);
    CHECK(a0(1, j) == 0.0);
  }
  CHECK(a0(2, 0) == v);
  CHECK(std::abs(a0(2, 2) - scalar_f(v, kInflow)) < 1e-13);
  const auto mu = eigenvalues(a0);
  CHECK(std::abs(mu[0] - scalar_f(v, kInflow)) < 1e-13);
  CHECK(std::abs(mu[1]) < 1e-13);
  CHECK(std::abs(mu[2]) < 1e-13);

  const Complex lam(1.5, -0.7);
  const CoeffMatrix m = coeff_matrix(2.0, lam, prof);
  CHECK(m.kind == MatrixKind::Full);
  const CoeffMatrix ad = adjoint(m);
  CHECK(ad.kind == MatrixKind::Adjoint);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(ad.entries(i, j) == -std::conj(m.entries(j, i)));

  CHECK(coeff_matrix(0.0, lam, limiting_profile(0.5)).kind == MatrixKind::Limiting);

  // Entries approach the endpoint matrices in the far field
  const Mat3 plus = endpoint_matrix(lam, kInflow, End::Plus).entries;
  CHECK(max_abs(coeff_matrix(prof.upper(), lam, prof).entries - plus) < 1e-6);
  const Profile out = solve_profile(kOutflow);
  const Mat3 minus = endpoint_matrix(lam, kOutflow, End::Minus).entries;
  CHECK(max_abs(coeff_matrix(out.lower(), lam, out).entries - minus) < 1e-6);
}

TEST_CASE("adjoint kernel at lambda = 0") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ux(0.0, 18.0), uc(-3.0, 3.0);
  const Profile prof = solve_profile(make_layer_params(5.0 / 3.0, 1e-3, 0.4, Side::Inflow));
  for (int k = 0; k < 100; ++k) {
    const Mat3 ad = adjoint(coeff_matrix(ux(rng), 0.0, prof)).entries;
    const Vec3 w{Complex(uc(rng), uc(rng)), Complex(uc(rng), uc(rng)), 0.0};
    CHECK(norm(ad * w) <= 1e-12);
  }
}

TEST_CASE("limiting plus-end spectrum") {
  const LayerParams lim = make_layer_params(5.0 / 3.0, 0.0, 0.5, Side::Inflow);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ur(0.0, 10.0), ui(-10.0, 10.0);
  for (int k = 0; k < 20; ++k) {
    const Complex lam(ur(rng), ui(rng));
    const Mat3 a = endpoint_matrix(lam, lim, End::Plus).entries;
    const auto mu = eigenvalues(a);
    CHECK(std::abs(mu[0] - (-1.0 - lam)) < 1e-10);
    CHECK(std::abs(mu[1]) < 1e-10);
    CHECK(std::abs(mu[2]) < 1e-10);

    const auto modes = asymptotic_modes(lam, lim, End::Plus);
    CHECK(std::abs(modes[0].mu - (-1.0 - lam)) < 1e-10);
    const Vec3 v3 = limiting_fast_vector(lam);
    CHECK(oracle::angle_between(modes[0].right, v3) < 1e-8);
    CHECK(residual(a, -1.0 - lam, v3) < 1e-12);

    // The limiting adjoint direction spans a kernel vector of -A0+^*
    const Vec3 t = limiting_adjoint_direction(lam);
    CHECK(norm(adjoint(a) * t) < 1e-12);
    CHECK(std::abs(pairing(t, v3)) < 1e-12);
    CHECK(std::abs(pairing(t, Vec3{1.0, 0.0, 0.0})) == 0.0);
  }
  const Vec3 t0 = limiting_adjoint_direction(0.0);
  CHECK(t0[0] == 0.0);
  CHECK(t0[1] == -1.0);
  CHECK(t0[2] == 0.0);
}

TEST_CASE("eigenvalues agree with companion roots") {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ur(0.0, 12.0), ui(-12.0, 12.0);
  for (double vp : {0.1, 1e-3, 1e-6})
    for (int k = 0; k < 30; ++k) {
      const Complex lam(ur(rng), ui(rng));
      const LayerParams p = make_layer_params(5.0 / 3.0, vp, 0.5, Side::Inflow);
      for (End e : {End::Plus, End::Minus}) {
        const Mat3 a = endpoint_matrix(lam, p, e).entries;
        const auto ours = eigenvalues(a);
        const auto ref = oracle::companion_roots(a);
        for (const Complex& r : ref) {
          double best = 1e300;
          for (const Complex& m : ours) best = std::min(best, std::abs(m - r));
          CHECK(best <= 1e-9 * std::max(1.0, std::abs(r)));
        }
        for (std::size_t i = 0; i + 1 < 3; ++i) CHECK(ours[i].real() <= ours[i + 1].real() + 1e-12);
      }
    }
}

TEST_CASE("asymptotic modes") {
  for (double lr : {1e-3, 0.5, 3.0, 10.0}) {
    const auto minus = asymptotic_modes(lr, kInflow, End::Minus);
    CHECK(minus[2].mu.real() > 0.0);
    CHECK(std::abs(minus[2].mu.imag()) < 1e-12);
    CHECK(minus[1].mu.real() < 0.0);
    const auto ref = oracle::companion_roots(endpoint_matrix(lr, kInflow, End::Minus).entries);
    CHECK(std::count_if(ref.begin(), ref.end(), [](Complex z) { return z.real() > 0; }) == 1);
  }
  for (Complex lam : {Complex(0.0, 4.0), Complex(2.0, -3.0), Complex(7.0, 0.0)}) {
    const auto plus = asymptotic_modes(lam, kInflow, End::Plus);
    CHECK(plus[0].mu.real() < 0.0);
    CHECK(plus[1].mu.real() < 0.0);
    CHECK(plus[2].mu.real() > 0.0);
    for (const auto& m : plus) {
      const Mat3 a = endpoint_matrix(lam, kInflow, End::Plus).entries;
      CHECK(residual(a, m.mu, m.right) < 1e-10);
      CHECK(std::abs(bilinear(m.left, m.right) - 1.0) < 1e-10);
    }
  }

  const Mat3 a = endpoint_matrix(10.0, kInflow, End::Plus).entries;
  const auto mu = eigenvalues(a);
  const Complex det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
                      a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  CHECK(std::abs(mu[0] * mu[1] * mu[2] - det) < 1e-9 * std::abs(det));
}

TEST_CASE("shock-form conjugation") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.05, 5.0);
  for (int k = 0; k < 20; ++k) {
    const Complex lam(u(rng), u(rng) - 2.5);
    const double v = 0.1 + 0.8 * (u(rng) / 5.0);
    const Mat3 a = system_matrix(v, lam, kInflow);
    Mat3 d = Mat3::identity(), di = Mat3::identity();
    d(2, 2) = lam;
    di(2, 2) = 1.0 / lam;
    const Mat3 s = d * a * di;
    Mat3 expect;
    expect(0, 1) = lam;
    expect(0, 2) = 1.0;
    expect(1, 2) = 1.0;
    expect(2, 0) = lam * v;
    expect(2, 1) = lam * v;
    expect(2, 2) = scalar_f(v, kInflow) - lam;
    CHECK(max_abs(s - expect) < 1e-13 * std::max(1.0, std::abs(lam)));
  }
}

TEST_CASE("seed frames") {
  const KatoFrame in = seed_frame(kInflow);
  const Mat3 ap = endpoint_matrix(1.0, kInflow, End::Plus).entries;
  CHECK(in.mu == asymptotic_modes(1.0, kInflow, End::Plus)[2].mu);
  CHECK(std::abs(in.dual[1] + 1.0) < 1e-15);
  CHECK(std::abs(pairing(in.dual, in.vector) - 1.0) < 1e-13);
  CHECK(residual(ap, in.mu, in.vector) < 1e-12);
  CHECK(norm(adjoint(ap) * in.dual - std::conj(in.mu) * in.dual) < 1e-12 * norm(in.dual) * max_abs(ap));

  const KatoFrame out = seed_frame(kOutflow);
  CHECK(std::abs(out.vector[2] - 1.0) < 1e-15);
  CHECK(out.mu.real() > 0.0);
  CHECK(residual(endpoint_matrix(1.0, kOutflow, End::Minus).entries, out.mu, out.vector) < 1e-12);
}

TEST_CASE("Kato continuation of a constant family is constant") {
  const Mat3 m = endpoint_matrix(2.0, kInflow, End::Minus).entries;
  const MatrixFamily fam = [&](Complex) { return m; };
  const KatoFrame seed = make_frame(m, 0.0, eigenvalues(m)[2]);
  std::vector<Complex> path;
  for (int k = 0; k <= 16; ++k) path.push_back(Complex(std::cos(k * 0.4), std::sin(k * 0.3)) * 3.0);
  path.front() = 0.0;
  const auto frames = kato_continue(seed, path, fam);
  for (const auto& f : frames) CHECK(norm(f.vector - seed.vector) < 1e-14);
}

TEST_CASE("Kato monodromy on a regular circle") {
  const MatrixFamily fam = [](Complex l) { return endpoint_matrix(l, kInflow, End::Minus).entries; };
  std::vector<Complex> path;
  for (int k = 0; k <= 64; ++k) path.push_back(5.0 + std::polar(1.0, 2 * std::numbers::pi * k / 64));
  const Mat3 a = fam(path.front());
  const KatoFrame seed = make_frame(a, path.front(), eigenvalues(a)[2]);
  const auto frames = kato_continue(seed, path, fam);
  CHECK(norm(frames.back().vector - seed.vector) < 1e-6 * norm(seed.vector));
  CHECK(norm(frames.back().dual - seed.dual) < 1e-6 * norm(seed.dual));
  CHECK(std::abs(frames.back().mu - seed.mu) < 1e-12);
}

TEST_CASE("Kato pairing invariants along the contour") {
  for (const LayerParams& p : {kInflow, kOutflow}) {
    const Contour c = semicircle(10.0, 60, 1e-2);
    const auto frames = frames_along(p, c.points);
    const End e = p.side == Side::Inflow ? End::Plus : End::Minus;
    for (std::size_t k = 0; k < frames.size(); ++k) {
      const auto& f = frames[k];
      CHECK(std::abs(pairing(f.dual, f.vector) - 1.0) < 1e-6);
      CHECK(residual(endpoint_matrix(f.lambda, p, e).entries, f.mu, f.vector) < 1e-10);
      if (k + 1 < frames.size()) {
        // <dual, dV/dlambda> = 0 along the path
        const Complex dl = frames[k + 1].lambda - f.lambda;
        const Vec3 dv = (1.0 / dl) * (frames[k + 1].vector - f.vector);
        const Vec3 mid_d = 0.5 * (f.dual + frames[k + 1].dual);
        CHECK(std::abs(pairing(mid_d, dv)) < 1e-2 * norm(dv) * norm(mid_d) + 1e-6);
      }
    }
    // The frames close up on the contour
    CHECK(norm(frames.back().vector - frames.front().vector) < 1e-6 * norm(frames.front().vector));
  }
}

TEST_CASE("Kato frames match an independent Kato ODE integration") {
  for (const LayerParams& p : {kInflow, kOutflow}) {
    const End e = p.side == Side::Inflow ? End::Plus : End::Minus;
    const MatrixFamily fam = [&](Complex l) { return endpoint_matrix(l, p, e).entries; };
    const KatoFrame seed = seed_frame(p);
    for (Complex target : {Complex(3.0, 4.0), Complex(0.2, -6.0), Complex(9.0, 0.0)}) {
      const Vec3 ref = oracle::kato_rk4(fam, seed.mu, seed.vector, 1.0, target);
      const KatoFrame f = frame_at(p, target);
      CHECK(norm(f.vector - ref) < 1e-7 * norm(ref));
    }
  }
}

TEST_CASE("Kato frames are path independent") {
  for (const LayerParams& p : {kInflow, kOutflow}) {
    const std::vector<Complex> path{1.0, Complex(1.0, 3.0), Complex(6.0, 3.0), Complex(6.0, -2.0)};
    const auto along = frames_along(p, path);
    const KatoFrame direct = frame_at(p, path.back());
    CHECK(norm(along.back().vector - direct.vector) < 1e-8 * norm(direct.vector));
    CHECK(norm(along.back().dual - direct.dual) < 1e-8 * norm(direct.dual));
  }
}

TEST_CASE("inflow frame at the origin is the limit from the right") {
  const LayerParams p = make_layer_params(5.0 / 3.0, 1e-3, 0.4, Side::Inflow);
  const KatoFrame z = frame_at(p, 0.0);
  const KatoFrame n = frame_at(p, 1e-6);
  CHECK(norm(z.dual - n.dual) < 1e-4 * norm(n.dual));
  CHECK(std::abs(z.mu) < 1e-6);
}
