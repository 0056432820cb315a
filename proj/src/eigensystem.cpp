#include "blstab/eigensystem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace blstab {

namespace {

double pressure_ratio(const LayerParams& p) {
  // (1 - v+) / (1 - v+^g) = a v+^-g; equals 1 in the pressureless limit.
  if (p.limiting()) return 1.0;
  if (p.gamma == 1.0) return 1.0;
  return (1.0 - p.v_plus) / -std::expm1(p.gamma * std::log(p.v_plus));
}

bool sort_before(const Complex& x, const Complex& y, double scale) {
  const double tie = 1e-13 * scale;
  if (std::abs(x.real() - y.real()) > tie) return x.real() < y.real();
  return x.imag() < y.imag();
}

struct Invariants {
  Complex trace, minors, det;
};

Invariants invariants(const Mat3& a) {
  Invariants inv;
  inv.trace = a(0, 0) + a(1, 1) + a(2, 2);
  inv.minors = (a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0)) + (a(0, 0) * a(2, 2) - a(0, 2) * a(2, 0)) +
               (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1));
  inv.det = a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
            a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
  return inv;
}

// chi(mu) = mu^3 - tr mu^2 + m2 mu - det and its derivative.
std::pair<Complex, Complex> characteristic(const Invariants& inv, Complex mu) {
  const Complex value = ((mu - inv.trace) * mu + inv.minors) * mu - inv.det;
  const Complex slope = (3.0 * mu - 2.0 * inv.trace) * mu + inv.minors;
  return {value, slope};
}

std::array<Complex, 3> cardano(const Invariants& inv) {
  const Complex a2 = -inv.trace, a1 = inv.minors, a0 = -inv.det;
  const Complex shift = a2 / 3.0;
  const Complex p = a1 - a2 * a2 / 3.0;
  const Complex q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
  const Complex disc = std::sqrt(q * q / 4.0 + p * p * p / 27.0);
  Complex u3 = -q / 2.0 + disc;
  const Complex alt = -q / 2.0 - disc;
  if (std::abs(alt) > std::abs(u3)) u3 = alt;
  std::array<Complex, 3> roots;
  if (std::abs(u3) == 0.0) {
    roots.fill(-shift);
    return roots;
  }
  const Complex u = std::pow(u3, 1.0 / 3.0);
  const Complex omega(-0.5, std::sqrt(3.0) / 2.0);
  Complex uk = u;
  for (auto& r : roots) {
    r = uk - p / (3.0 * uk) - shift;
    uk *= omega;
  }
  return roots;
}

// Newton refinement of each root on the characteristic cubic. A step is kept
// only if it lowers the residual and stays closer to its own root than half
// the distance to the nearest other root, so nearby roots cannot merge.
void polish(const Invariants& inv, std::array<Complex, 3>& roots) {
  for (std::size_t i = 0; i < 3; ++i) {
    for (int it = 0; it < 8; ++it) {
      auto [val, der] = characteristic(inv, roots[i]);
      if (val == 0.0 || der == 0.0) break;
      const Complex step = val / der;
      double sep = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < 3; ++j)
        if (j != i) sep = std::min(sep, std::abs(roots[j] - roots[i]));
      if (std::abs(step) >= 0.5 * sep) break;
      const Complex cand = roots[i] - step;
      if (std::abs(characteristic(inv, cand).first) >= std::abs(val)) break;
      roots[i] = cand;
      if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(cand)) break;
    }
  }
}

// Null vector of the rows of b via the largest bilinear cross product; falls
// back to a vector orthogonal to the dominant row when the rank drops to one.
Vec3 null_vector(const Vec3& r0, const Vec3& r1, const Vec3& r2) {
  const std::array<Vec3, 3> cands{cross(r0, r1), cross(r0, r2), cross(r1, r2)};
  const Vec3* best = &cands[0];
  for (const auto& c : cands)
    if (norm(c) > norm(*best)) best = &c;
  const double scale = std::max({norm(r0), norm(r1), norm(r2)});
  Vec3 v = *best;
  if (norm(v) <= 1e-14 * scale * scale || norm(v) == 0.0) {
    if (scale == 0.0) return {1.0, 0.0, 0.0};
    const Vec3& dom = norm(r0) == scale ? r0 : (norm(r1) == scale ? r1 : r2);
    const std::array<Vec3, 3> units{Vec3{1.0, 0.0, 0.0}, Vec3{0.0, 1.0, 0.0}, Vec3{0.0, 0.0, 1.0}};
    v = cross(dom, units[0]);
    for (const auto& e : units) {
      const Vec3 c = cross(dom, e);
      if (norm(c) > norm(v)) v = c;
    }
  }
  return (1.0 / norm(v)) * v;
}

Mat3 outer(const Vec3& x, const Vec3& y) {
  Mat3 m;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) m(i, j) = x[i] * y[j];
  return m;
}

double relative_diff(const Vec3& x, const Vec3& y) {
  const double s = std::max(norm(x), norm(y));
  return s == 0.0 ? 0.0 : norm(x - y) / s;
}

KatoFrame frame_for(const Mat3& a, Complex lambda, const std::array<Complex, 3>& mus, std::size_t sel, double gap_tol) {
  double gap = std::numeric_limits<double>::infinity(), scale = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    scale = std::max(scale, std::abs(mus[i]));
    if (i != sel) gap = std::min(gap, std::abs(mus[i] - mus[sel]));
  }
  if (!(gap > gap_tol * scale)) {
    std::ostringstream msg;
    msg << "eigenvalue collision at lambda = " << lambda << " (gap " << gap << ")";
    throw CollisionError(msg.str());
  }
  KatoFrame f;
  f.lambda = lambda;
  f.mu = mus[sel];
  const Vec3 r = right_eigenvector(a, f.mu);
  const Vec3 l = left_eigenvector(a, f.mu);
  const Complex s = bilinear(l, r);
  if (std::abs(s) <= 1e-14) throw CollisionError("selected eigenvalue is defective");
  f.projector = (1.0 / s) * outer(r, l);
  f.vector = r;
  f.dual = std::conj(1.0 / s) * conj(l);
  return f;
}

Complex trace_of_product(const Mat3& x, const Mat3& y) {
  Complex t = 0.0;
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t k = 0; k < 3; ++k) t += x(i, k) * y(k, i);
  return t;
}

// Substep march from `from` to `to`. The eigenvalue at each new point is the
// one nearest the first-order prediction mu + tr(P A') dl; returns false when
// that match is ambiguous so the caller refines the substeps.
bool segment(const KatoFrame& from, Complex to, std::size_t n, const MatrixFamily& family, double gap_tol,
             KatoFrame& out) {
  KatoFrame cur = from;
  for (std::size_t k = 1; k <= n; ++k) {
    const Complex lam = k == n ? to : from.lambda + (to - from.lambda) * (static_cast<double>(k) / n);
    const Complex dl = lam - cur.lambda;
    const Complex h = 1e-6 * std::max(1.0, std::abs(cur.lambda)) * (dl / std::abs(dl));
    Mat3 da = family(cur.lambda + h) - family(cur.lambda - h);
    da = (0.5 / h) * da;
    const Complex predicted = cur.mu + trace_of_product(cur.projector, da) * dl;

    const Mat3 a = family(lam);
    const auto mus = eigenvalues(a);
    std::array<double, 3> dist;
    for (std::size_t i = 0; i < 3; ++i) dist[i] = std::abs(mus[i] - predicted);
    const std::size_t sel = static_cast<std::size_t>(std::min_element(dist.begin(), dist.end()) - dist.begin());
    double second = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < 3; ++i)
      if (i != sel) second = std::min(second, dist[i]);
    if (!(dist[sel] < 0.5 * second)) return false;

    KatoFrame next = frame_for(a, lam, mus, sel, gap_tol);
    const Complex before = pairing(cur.dual, cur.vector);
    Vec3 v = next.projector * cur.vector;
    Vec3 d = adjoint(next.projector) * cur.dual;
    const Complex r = pairing(d, v) / before;
    const Complex sc = 1.0 / std::sqrt(r);
    next.vector = sc * v;
    next.dual = std::conj(sc) * d;
    cur = next;
  }
  out = cur;
  return true;
}

}  // namespace

double scalar_h(double v, const LayerParams& p) {
  return -std::pow(v, p.gamma + 1.0) + p.a * (p.gamma - 1.0) + (p.a + 1.0) * std::pow(v, p.gamma);
}

double scalar_f(double v, const LayerParams& p) {
  if (p.limiting()) return 2.0 * v - 1.0;
  return 2.0 * v - p.a * (p.gamma - 1.0) * std::pow(v, -p.gamma) - (p.a + 1.0);
}

double scalar_f_alt(double v, const LayerParams& p) {
  if (p.limiting()) return 2.0 * v - 1.0;
  const double c = pressure_ratio(p);
  return 2.0 * v - (p.gamma - 1.0) * c * std::pow(p.v_plus / v, p.gamma) - c * std::pow(p.v_plus, p.gamma) - 1.0;
}

Mat3 system_matrix(double vhat, Complex lambda, const LayerParams& p) {
  Mat3 m;
  m(0, 1) = m(0, 2) = m(1, 2) = lambda;
  m(2, 0) = m(2, 1) = vhat;
  m(2, 2) = scalar_f_alt(vhat, p) - lambda;
  return m;
}

CoeffMatrix coeff_matrix(double x, Complex lambda, const Profile& profile) {
  const LayerParams& p = profile.params();
  return {system_matrix(profile.value(x), lambda, p), p.limiting() ? MatrixKind::Limiting : MatrixKind::Full};
}

CoeffMatrix adjoint(const CoeffMatrix& m) { return {Complex(-1.0) * adjoint(m.entries), MatrixKind::Adjoint}; }

CoeffMatrix endpoint_matrix(Complex lambda, const LayerParams& p, End end) {
  const double v = end == End::Plus ? p.v_plus : 1.0;
  return {system_matrix(v, lambda, p), end == End::Plus ? MatrixKind::AsymptoticPlus : MatrixKind::AsymptoticMinus};
}

std::array<Complex, 3> eigenvalues(const Mat3& a) {
  const Invariants inv = invariants(a);
  auto roots = cardano(inv);
  // Keep only the dominant root from the closed form; near-double pairs lose
  // half their digits there, so the remaining two come from the deflated
  // quadratic (sum and product of the pair) before polishing.
  std::size_t big = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (std::abs(roots[i]) > std::abs(roots[big])) big = i;
  std::array<Complex, 3> single{roots[big], Complex(std::numeric_limits<double>::infinity()),
                                Complex(std::numeric_limits<double>::infinity())};
  polish(inv, single);
  const Complex mu1 = single[0];
  if (mu1 == 0.0) return {Complex(0.0), Complex(0.0), Complex(0.0)};
  const Complex sum = inv.trace - mu1;
  const Complex prod = inv.det / mu1;
  const Complex disc = std::sqrt(sum * sum - 4.0 * prod);
  const Complex q = 0.5 * (sum + (std::real(std::conj(sum) * disc) >= 0.0 ? disc : -disc));
  roots = {mu1, q, q == 0.0 ? Complex(0.0) : prod / q};
  polish(inv, roots);
  double scale = 0.0;
  for (const auto& r : roots) scale = std::max(scale, std::abs(r));
  std::sort(roots.begin(), roots.end(), [&](const Complex& x, const Complex& y) { return sort_before(x, y, scale); });
  return roots;
}

Vec3 right_eigenvector(const Mat3& a, Complex mu) {
  Mat3 b = a;
  for (std::size_t i = 0; i < 3; ++i) b(i, i) -= mu;
  return null_vector({b(0, 0), b(0, 1), b(0, 2)}, {b(1, 0), b(1, 1), b(1, 2)}, {b(2, 0), b(2, 1), b(2, 2)});
}

Vec3 left_eigenvector(const Mat3& a, Complex mu) {
  Mat3 b = a;
  for (std::size_t i = 0; i < 3; ++i) b(i, i) -= mu;
  return null_vector({b(0, 0), b(1, 0), b(2, 0)}, {b(0, 1), b(1, 1), b(2, 1)}, {b(0, 2), b(1, 2), b(2, 2)});
}

std::array<Mode, 3> asymptotic_modes(Complex lambda, const LayerParams& p, End end) {
  const Mat3 a = endpoint_matrix(lambda, p, end).entries;
  const auto mus = eigenvalues(a);
  std::array<Mode, 3> modes;
  for (std::size_t i = 0; i < 3; ++i) {
    Mode& m = modes[i];
    m.mu = mus[i];
    m.right = right_eigenvector(a, mus[i]);
    m.left = left_eigenvector(a, mus[i]);
    const Complex s = bilinear(m.left, m.right);
    m.defective = std::abs(s) <= 1e-10;
    if (!m.defective) m.left = (1.0 / s) * m.left;
  }

  const bool check = std::abs(lambda) > 1e-10 && lambda.real() >= 0.0 && !(end == End::Plus && p.limiting());
  if (check) {
    int unstable = 0, stable = 0;
    for (const auto& m : modes) {
      if (m.mu.real() > 0.0) ++unstable;
      if (m.mu.real() < 0.0) ++stable;
    }
    const bool ok = end == End::Minus ? unstable == 1 && stable == 2 : stable == 2 && unstable == 1;
    if (!ok) {
      std::ostringstream msg;
      msg << "consistent splitting fails at lambda = " << lambda << " (" << (end == End::Plus ? "plus" : "minus")
          << " end: " << stable << " stable, " << unstable << " unstable)";
      throw SplittingError(msg.str());
    }
  }
  return modes;
}

Vec3 limiting_adjoint_direction(Complex lambda) {
  const Complex mu = -1.0 - lambda;
  return {0.0, -1.0, std::conj(lambda / mu)};
}

Vec3 limiting_fast_vector(Complex lambda) {
  const Complex r = lambda / (-1.0 - lambda);
  return {r * (r + 1.0), r, 1.0};
}

KatoFrame make_frame(const Mat3& a, Complex lambda, Complex mu_guess, double gap_tol) {
  const auto mus = eigenvalues(a);
  std::size_t sel = 0;
  for (std::size_t i = 1; i < 3; ++i)
    if (std::abs(mus[i] - mu_guess) < std::abs(mus[sel] - mu_guess)) sel = i;
  return frame_for(a, lambda, mus, sel, gap_tol);
}

KatoFrame kato_step(const KatoFrame& from, Complex to, const MatrixFamily& family, const KatoOptions& opt) {
  if (to == from.lambda) return from;
  std::size_t n = 1;
  KatoFrame coarse, fine;
  bool have_coarse = segment(from, to, n, family, opt.gap_tol, coarse);
  for (std::size_t h = 0; h < opt.max_halvings; ++h) {
    n *= 2;
    const bool have_fine = segment(from, to, n, family, opt.gap_tol, fine);
    if (have_coarse && have_fine && relative_diff(fine.vector, coarse.vector) <= opt.tol &&
        relative_diff(fine.dual, coarse.dual) <= opt.tol)
      return fine;
    coarse = fine;
    have_coarse = have_fine;
  }
  std::ostringstream msg;
  msg << "Kato continuation from " << from.lambda << " to " << to << " did not converge";
  throw RefinementCapError(msg.str());
}

std::vector<KatoFrame> kato_continue(const KatoFrame& seed, std::span<const Complex> path, const MatrixFamily& family,
                                     const KatoOptions& opt) {
  std::vector<KatoFrame> frames;
  if (path.empty()) return frames;
  frames.reserve(path.size());
  frames.push_back(seed.lambda == path[0] ? seed : kato_step(seed, path[0], family, opt));
  for (std::size_t k = 1; k < path.size(); ++k) frames.push_back(kato_step(frames.back(), path[k], family, opt));
  return frames;
}

KatoFrame seed_frame(const LayerParams& p, Complex lambda_ref) {
  if (p.side == Side::Inflow && p.limiting())
    throw DomainError("the limiting inflow system uses the exact kernel direction, not a Kato frame");
  const End end = p.side == Side::Inflow ? End::Plus : End::Minus;
  const Mat3 a = endpoint_matrix(lambda_ref, p, end).entries;
  const auto mus = eigenvalues(a);
  KatoFrame f = make_frame(a, lambda_ref, mus[2]);
  if (p.side == Side::Inflow) {
    const Complex c = -1.0 / f.dual[1];
    f.dual = c * f.dual;
    f.vector = (1.0 / std::conj(c)) * f.vector;
  } else {
    const Complex c = 1.0 / f.vector[2];
    f.vector = c * f.vector;
    f.dual = (1.0 / std::conj(c)) * f.dual;
  }
  return f;
}

namespace {

constexpr double kOriginRadius = 1e-12;
constexpr double kOriginStep = 1e-8;

MatrixFamily endpoint_family(const LayerParams& p) {
  const End end = p.side == Side::Inflow ? End::Plus : End::Minus;
  return [p, end](Complex lam) { return endpoint_matrix(lam, p, end).entries; };
}

}  // namespace

KatoFrame frame_at(const LayerParams& p, Complex lambda, Complex lambda_ref, const KatoOptions& opt) {
  if (p.side == Side::Inflow && std::abs(lambda) < kOriginRadius) {
    // The slow pair of A_+ collides at 0; the continued frame is analytic
    // through the (semisimple) crossing and is extrapolated from the right.
    const KatoFrame a = frame_at(p, kOriginStep, lambda_ref, opt);
    const KatoFrame b = frame_at(p, 2.0 * kOriginStep, lambda_ref, opt);
    KatoFrame f;
    f.lambda = lambda;
    f.mu = 2.0 * a.mu - b.mu;
    f.vector = 2.0 * a.vector - b.vector;
    f.dual = 2.0 * a.dual - b.dual;
    f.projector = 2.0 * a.projector - b.projector;
    return f;
  }
  const MatrixFamily family = endpoint_family(p);
  KatoFrame f = kato_step(seed_frame(p, lambda_ref), lambda, family, opt);
  if (lambda.real() >= 0.0 && lambda != 0.0) {
    const auto mus = eigenvalues(family(lambda));
    if (std::abs(f.mu - mus[2]) > 1e-10 * std::max(1.0, std::abs(mus[2]))) {
      std::ostringstream msg;
      msg << "continued eigenvalue " << f.mu << " at lambda = " << lambda << " is not the unstable mode " << mus[2];
      throw SplittingError(msg.str());
    }
  }
  return f;
}

std::vector<KatoFrame> frames_along(const LayerParams& p, std::span<const Complex> path, Complex lambda_ref,
                                    const KatoOptions& opt) {
  return kato_continue(seed_frame(p, lambda_ref), path, endpoint_family(p), opt);
}

}  // namespace blstab
