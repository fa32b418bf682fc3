#include <cmath>
#include <random>

#include "doctest.h"
#include "ncfa/dualconv.hpp"
#include "ncfa/error.hpp"
#include "ncfa/rep.hpp"
#include "ncfa/transform.hpp"

using namespace ncfa;

namespace {

TruncatedOperator random_trig(int N, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  auto a = TruncatedOperator::zero(BasisDescriptor::trig(N));
  for (int i = 0; i < a.size(); ++i)
    for (int j = 0; j < a.size(); ++j) a.entries(i, j) = Complex(g(rng), g(rng));
  return a;
}

TruncatedOperator rank_one_trig(int N, int m, int n) {
  auto a = TruncatedOperator::zero(BasisDescriptor::trig(N));
  a.at(m, n) = 1.0;
  return a;
}

double linf_norm(const KernelFunction& k) {
  double m = 0.0;
  for (int i = 0; i < 96; ++i)
    for (int j = 0; j < 96; ++j)
      m = std::max(m, std::abs(k.eval(kTwoPi * i / 96.0, kTwoPi * j / 96.0)));
  return m;
}

// One-component M(2) field on [lo, hi]: A(rho) = B g(rho) + C h(rho) with
// smooth scalar profiles, exact evaluator attached.
OperatorField smooth_m2_field(double lo, double hi, int rule_n, int N,
                              unsigned seed) {
  std::mt19937_64 rng(seed);
  auto B = random_trig(N, rng), C = random_trig(N, rng);
  double c = 0.5 * (lo + hi);
  auto ev = [B, C, c](double rho) {
    auto v = TruncatedOperator::zero(B.basis);
    v.entries = B.entries * std::exp(-(rho - c) * (rho - c)) +
                C.entries * (std::sin(rho) * std::exp(-0.5 * rho));
    return v;
  };
  OperatorField f;
  f.group = {GroupTag::M2, {}};
  FieldComponent fc;
  fc.measure.lo = lo;
  fc.measure.hi = hi;
  fc.measure.density = [](double rho) { return rho; };
  fc.measure.label_of = [](double rho) { return m2_label(rho); };
  fc.measure.rule = gauss_legendre(rule_n, lo, hi);
  fc.evaluator = ev;
  for (int i = 0; i < fc.measure.size(); ++i)
    fc.values.push_back(ev(fc.measure.rule.nodes[i]));
  f.components.push_back(std::move(fc));
  return f;
}

double field_value_gap(const OperatorField& a, const OperatorField& b) {
  REQUIRE(a.components.size() == b.components.size());
  double gap = 0.0;
  for (size_t c = 0; c < a.components.size(); ++c) {
    const auto& ca = a.components[c];
    const auto& cb = b.components[c];
    REQUIRE(ca.values.size() == cb.values.size());
    for (size_t i = 0; i < ca.values.size(); ++i) {
      int w = std::max(ca.values[i].basis.trunc_n, cb.values[i].basis.trunc_n);
      gap = std::max(gap, (embed_window(ca.values[i], w).entries -
                           embed_window(cb.values[i], w).entries)
                              .cwiseAbs()
                              .maxCoeff());
    }
  }
  return gap;
}

}  // namespace

TEST_CASE("m2_angle: polar split of rho1 + rho2 e^{i mu}") {
  auto p = m2_angle(1.0, 1.0, 0.0);
  CHECK(p.rho == doctest::Approx(2.0));
  CHECK(p.phi == doctest::Approx(0.0));
  auto q = m2_angle(1.0, 1.0, kPi / 2.0);
  CHECK(q.rho == doctest::Approx(std::sqrt(2.0)));
  CHECK(q.phi == doctest::Approx(kPi / 4.0));
  CHECK_THROWS_AS(m2_angle(1.0, 1.0, kPi), DegenerateGeometryError);
}

TEST_CASE("theta0 maps rank-one pairs to rank-one with the kernel scalar") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.3, 2.5), um(0.2, kPi - 0.2);
  for (int rep = 0; rep < 20; ++rep) {
    double r1 = u(rng), r2 = u(rng), mu = um(rng);
    int m1 = rep % 3 - 1, n1 = (rep / 3) % 3 - 1;
    int m2 = (rep / 9) % 3 - 1, n2 = rep % 2;
    auto a1 = rank_one_trig(2, m1, n1);
    auto a2 = rank_one_trig(2, m2, n2);
    auto th = m2_theta0(a1, a2, r1, r2, mu);
    double phi = m2_angle(r1, r2, mu).phi;
    // conj(k1(phi, phi)) k2(mu - phi, mu - phi)
    Complex scalar = std::exp(Complex(0.0, -(m1 - n1) * phi)) *
                     std::exp(Complex(0.0, (m2 - n2) * (mu - phi)));
    auto want = TruncatedOperator::zero(BasisDescriptor::trig(4));
    want.at(m1 + m2, n1 + n2) = scalar;
    CHECK((th.op.entries - want.entries).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("mu-averaged theta0 trace factorizes") {
  std::mt19937_64 rng(12);
  auto a1 = random_trig(3, rng), a2 = random_trig(2, rng);
  auto rule = periodic_trapezoid(64, 0.0, kTwoPi);
  Complex avg = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    auto th = m2_theta0(a1, a2, 1.3, 0.8, rule.nodes[i]);
    avg += rule.weights[i] / kTwoPi * op_trace(th.op);
  }
  Complex want = op_trace(a1) * op_trace(a2);
  CHECK(std::abs(avg - want) < 1e-10 * std::abs(want));
}

TEST_CASE("theta trace against the half-K rho measure factorizes") {
  std::mt19937_64 rng(13);
  auto a1 = random_trig(2, rng), a2 = random_trig(2, rng);
  double r1 = 1.3, r2 = 0.9;
  auto msr = mu_substituted_rule(r1, r2, 48);
  Complex acc = 0.0;
  for (int i = 0; i < msr.rule.size(); ++i) {
    auto th = m2_theta(a1, a2, r1, r2, msr.rule.nodes[i]);
    acc += msr.rule.weights[i] * op_trace(th.op);
  }
  Complex want = op_trace(a1) * op_trace(a2);
  CHECK(std::abs(acc - want) < 1e-8 * std::abs(want));
}

TEST_CASE("theta of rank-one inputs has rank at most two") {
  auto a1 = rank_one_trig(2, 1, -1);
  auto a2 = rank_one_trig(2, 0, 2);
  auto th = m2_theta(a1, a2, 1.1, 0.7, 1.5);
  auto sv = singular_values(th.op);
  REQUIRE(sv.size() >= 3);
  CHECK(sv[2] < 1e-10 * sv[0]);
  CHECK(sv[0] > 1e-3);
}

TEST_CASE("symmetric point: branches sit at mu = pi/2, 3pi/2, phi = +-pi/4") {
  auto a = rank_one_trig(1, 0, 0);
  auto th = m2_theta(a, a, 1.0, 1.0, std::sqrt(2.0));
  REQUIRE(th.branch_count == 2);
  CHECK(th.mus[0] == doctest::Approx(kPi / 2.0));
  CHECK(th.mus[1] == doctest::Approx(3.0 * kPi / 2.0));
  CHECK(th.phis[0] == doctest::Approx(kPi / 4.0));
  CHECK(th.phis[1] == doctest::Approx(-kPi / 4.0));
}

TEST_CASE("theta propagates out-of-support and degenerate errors") {
  auto a = rank_one_trig(1, 0, 0);
  CHECK_THROWS_AS(m2_theta(a, a, 1.0, 0.4, 1.5), InvalidOperandError);
  CHECK_THROWS_AS(m2_theta0(a, a, 1.0, 1.0, kPi), DegenerateGeometryError);
}

TEST_CASE("kernel inequalities: L1/Linf bounds on theta") {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(0.4, 2.0);
  for (int rep = 0; rep < 100; ++rep) {
    auto a1 = random_trig(2, rng), a2 = random_trig(2, rng);
    double r1 = u(rng), r2 = u(rng);
    double rho = std::abs(r1 - r2) + (r1 + r2 - std::abs(r1 - r2)) *
                                         std::uniform_real_distribution<double>(
                                             0.1, 0.9)(rng);
    auto k1 = KernelFunction::from_trig(a1);
    auto k2 = KernelFunction::from_trig(a2);
    double tr1 = op_norm(a1, OperatorNorm::Trace);
    double tr2 = op_norm(a2, OperatorNorm::Trace);
    double sup1 = linf_norm(k1), sup2 = linf_norm(k2);
    double l1_2 = k1.l1_norm(96), l2_2 = k2.l1_norm(96);
    // (a) kernel L1 below the trace norm
    CHECK(l1_2 <= tr2 * (1.0 + 1e-9));
    auto th = m2_theta_kernel(k1, k2, r1, r2, rho);
    double tl1 = th.l1_norm(96);
    const double slack = 1.0 + 1e-6;
    // (b), (c), (d)
    CHECK(tl1 <= 2.0 * tr1 * tr2 * slack);
    CHECK(tl1 <= 2.0 * sup1 * l2_2 * slack);
    CHECK(tl1 <= 2.0 * sup1 * sup2 * slack);
    // single-branch version of (c) without the factor 2
    double mu = std::uniform_real_distribution<double>(0.2, kPi - 0.2)(rng);
    auto th0 = m2_theta0(a1, a2, r1, r2, mu);
    CHECK(KernelFunction::from_trig(th0.op).l1_norm(96) <=
          sup1 * l2_2 * slack);
  }
}

TEST_CASE("m2_dualconv: support window and zero absorbing") {
  auto s = smooth_m2_field(1.0, 2.0, 8, 1, 21);
  auto t = smooth_m2_field(3.0, 4.0, 8, 1, 22);
  DualConvOptions o;
  o.outer_n = 8;
  o.mu_n = 8;
  o.out_n = 8;
  auto c = m2_dualconv(s, t, o);
  REQUIRE(c.components.size() == 1);
  CHECK(c.components[0].measure.lo == doctest::Approx(1.0));
  CHECK(c.components[0].measure.hi == doctest::Approx(6.0));
  // vanishes at sampled rho outside (1, 6)
  for (double rho : {0.5, 0.9, 6.05, 7.0}) {
    auto v = c.components[0].evaluator(rho);
    CHECK(v.entries.cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK(c.components[0].evaluator(4.0).entries.cwiseAbs().maxCoeff() > 1e-6);

  auto z = smooth_m2_field(3.0, 4.0, 8, 1, 23);
  for (auto& v : z.components[0].values) v.entries.setZero();
  z.components[0].evaluator = [b = z.components[0].values[0].basis](double) {
    return TruncatedOperator::zero(b);
  };
  auto cz = m2_dualconv(s, z, o);
  for (const auto& v : cz.components[0].values)
    CHECK(v.entries.cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("m2_dualconv: pointwise products of inverted fields") {
  GroupId id{GroupTag::M2, {}};
  auto s = smooth_m2_field(0.5, 1.5, 20, 2, 31);
  auto t = smooth_m2_field(1.0, 2.0, 20, 2, 32);
  auto c = m2_dualconv(s, t);
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> uv(-0.8, 0.8), ua(0.0, kTwoPi);
  for (int i = 0; i < 50; ++i) {
    auto x = m2_element(uv(rng), uv(rng), ua(rng));
    Complex lhs = inverse_A(id, c, x);
    Complex rhs = inverse_A(id, s, x) * inverse_A(id, t, x);
    CHECK(std::abs(lhs - rhs) <= 1e-6 * std::max(1e-3, std::abs(rhs)));
  }
}

TEST_CASE("m2_dualconv: associativity on bounded supports") {
  auto s1 = smooth_m2_field(1.0, 2.0, 12, 1, 41);
  auto s2 = smooth_m2_field(1.0, 2.0, 12, 1, 42);
  auto t = smooth_m2_field(1.0, 2.0, 12, 1, 43);
  DualConvOptions o;
  o.outer_n = 12;
  o.mu_n = 12;
  o.out_n = 6;
  auto lhs = m2_dualconv(m2_dualconv(s1, s2, o), t, o);
  auto rhs = m2_dualconv(s1, m2_dualconv(s2, t, o), o);
  double scale = 0.0;
  for (const auto& v : lhs.components[0].values)
    scale = std::max(scale, v.entries.cwiseAbs().maxCoeff());
  for (double rho : {1.5, 2.5, 4.0}) {
    auto a = lhs.components[0].evaluator(rho);
    auto b = rhs.components[0].evaluator(rho);
    CHECK((a.entries - b.entries).cwiseAbs().maxCoeff() < 1e-5 * scale);
  }
}

TEST_CASE("m2_dualconv: twist equivariance S # M_n(T) = M_n(S # T)") {
  auto s = smooth_m2_field(1.0, 2.0, 10, 1, 51);
  auto t = smooth_m2_field(1.0, 2.0, 10, 1, 52);
  int n = 2;
  auto mt = map_field(t, [n](const IrrepLabel&, const TruncatedOperator& v) {
    return mn_twist(embed_window(v, v.basis.trunc_n + n), n);
  });
  DualConvOptions o;
  o.outer_n = 10;
  o.mu_n = 10;
  o.out_n = 8;
  auto lhs = m2_dualconv(s, mt, o);
  auto conv = m2_dualconv(s, t, o);
  auto rhs = map_field(conv, [n](const IrrepLabel&,
                                 const TruncatedOperator& v) {
    return mn_twist(embed_window(v, v.basis.trunc_n + n), n);
  });
  CHECK(field_value_gap(lhs, rhs) < 1e-10);
}

// ---- Heisenberg -------------------------------------------------------------

namespace {

const BasisDescriptor& heis_grid() {
  static BasisDescriptor g = BasisDescriptor::uniform_grid(193, 6.0);
  return g;
}

// Sum of R complex-weighted Gaussian bumps in two variables, well inside the
// grid window so tail truncation is negligible.
std::function<Complex(double, double)> random_gauss2(int R,
                                                     std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> up(-1.5, 1.5), us(0.8, 1.3);
  struct Term {
    Complex a;
    double p, q, s;
  };
  std::vector<Term> ts;
  for (int r = 0; r < R; ++r)
    ts.push_back({Complex(g(rng), g(rng)), up(rng), up(rng), us(rng)});
  return [ts](double x, double y) {
    Complex acc{};
    for (const auto& t : ts)
      acc += t.a * std::exp(-((x - t.p) * (x - t.p) + (y - t.q) * (y - t.q)) /
                            (2.0 * t.s * t.s));
    return acc;
  };
}

// Smooth localized profile (c0 + c1 x) e^{-(x-p)^2 / 2 s^2}.
std::function<Complex(double)> random_profile(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> up(-1.5, 1.5), us(0.7, 1.2);
  Complex c0(g(rng), g(rng)), c1(g(rng), g(rng));
  double p = up(rng), s = us(rng);
  return [c0, c1, p, s](double x) {
    return (c0 + c1 * x) * std::exp(-(x - p) * (x - p) / (2.0 * s * s));
  };
}

// Grid operator with kernel of rank <= R built from separable smooth profiles.
TruncatedOperator rank_grid_op(int R, std::mt19937_64& rng) {
  const auto& b = heis_grid();
  Matrix k = Matrix::Zero(b.size(), b.size());
  for (int r = 0; r < R; ++r) {
    auto f = random_profile(rng);
    auto h = random_profile(rng);
    Vector fv(b.size()), hv(b.size());
    for (int i = 0; i < b.size(); ++i) {
      fv[i] = f(b.nodes[i]);
      hv[i] = std::conj(h(b.nodes[i]));
    }
    k += fv * hv.transpose();
  }
  return {k * b.weights.asDiagonal(), b};
}

Complex pair_trace(const TruncatedOperator& a, const TruncatedOperator& pi) {
  return op_trace(compose(a, adjoint(pi)));
}

}  // namespace

TEST_CASE("heis_theta: trace is multiplicative and parameters are guarded") {
  std::mt19937_64 rng(101);
  auto k1 = KernelFunction::callable(random_gauss2(2, rng),
                                     KernelFunction::Domain::Line, -6.0, 6.0);
  auto k2 = KernelFunction::callable(random_gauss2(2, rng),
                                     KernelFunction::Domain::Line, -6.0, 6.0);
  auto th = heis_theta(k1, k2, 0.9, 0.6, heis_grid(), 128);
  Complex lhs = op_trace(th);
  Complex rhs = k1.diagonal_integral(256) * k2.diagonal_integral(256);
  CHECK(std::abs(lhs - rhs) <= 1e-6 * std::abs(rhs));

  CHECK_THROWS_AS(heis_theta(k1, k2, 1.0, -1.0, heis_grid(), 32),
                  ExcludedParameterError);
  CHECK_THROWS_AS(heis_theta(k1, k2, 0.0, 1.0, heis_grid(), 32),
                  ExcludedParameterError);
}

TEST_CASE("heis_theta: lattice fast path matches the callable path") {
  std::mt19937_64 rng(113);
  auto k1 = KernelFunction::callable(random_gauss2(2, rng),
                                     KernelFunction::Domain::Line, -6.0, 6.0);
  auto k2 = KernelFunction::callable(random_gauss2(2, rng),
                                     KernelFunction::Domain::Line, -6.0, 6.0);
  auto slow = heis_theta(k1, k2, 1.2, -0.5, heis_grid(), 96);
  auto g1 = KernelFunction::from_grid(k1.to_operator(heis_grid()));
  auto g2 = KernelFunction::from_grid(k2.to_operator(heis_grid()));
  auto fast = heis_theta(g1, g2, 1.2, -0.5, heis_grid(), 96);
  double scale = slow.entries.cwiseAbs().maxCoeff();
  CHECK((fast.entries - slow.entries).cwiseAbs().maxCoeff() <= 5e-3 * scale);
}

TEST_CASE("heis_theta: operator norm bounded by |t1+t2|/|t2| tr-norm times op-norm") {
  // The constant |t1+t2|/|t2| is forced by scaling: as t2 -> 0 theta tends to
  // a nonzero Hadamard-type product, so no bound vanishing with t2 can hold.
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> ut(0.3, 2.0);
  std::bernoulli_distribution flip(0.5);
  for (int it = 0; it < 100; ++it) {
    auto a1 = rank_grid_op(1 + it % 3, rng);
    auto a2 = rank_grid_op(1 + (it / 3) % 3, rng);
    double t1 = (flip(rng) ? 1.0 : -1.0) * ut(rng);
    double t2 = (flip(rng) ? 1.0 : -1.0) * ut(rng);
    while (std::abs(t1 + t2) < 0.3) t1 = (flip(rng) ? 1.0 : -1.0) * ut(rng);
    auto th = heis_theta(KernelFunction::from_grid(a1),
                         KernelFunction::from_grid(a2), t1, t2, heis_grid(),
                         64);
    double bound = std::abs(t1 + t2) / std::abs(t2) *
                   op_norm(a1, OperatorNorm::Trace) *
                   op_norm(a2, OperatorNorm::Op);
    CHECK(op_norm(th, OperatorNorm::Op) <= bound * (1.0 + 1e-4));
  }
}

TEST_CASE("heis_theta: coefficient products match at lattice group elements") {
  GroupId id{GroupTag::HEIS, {}};
  const auto& grid = heis_grid();
  double sp = grid.spacing();
  std::mt19937_64 rng(307);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto k1 = KernelFunction::callable(random_gauss2(2, rng),
                                     KernelFunction::Domain::Line, -6.0, 6.0);
  auto k2 = KernelFunction::callable(random_gauss2(2, rng),
                                     KernelFunction::Domain::Line, -6.0, 6.0);
  double t1 = 0.8, t2 = 1.1;
  auto a1 = k1.to_operator(grid);
  auto a2 = k2.to_operator(grid);
  auto th = heis_theta(k1, k2, t1, t2, grid, 128);
  for (int m : {-12, -5, 0, 3, 9}) {
    auto h = heis_element(u(rng), u(rng), m * sp);
    Complex lhs = pair_trace(a1, rep_matrix(id, heis_label(t1), h, grid)) *
                  pair_trace(a2, rep_matrix(id, heis_label(t2), h, grid));
    Complex rhs =
        pair_trace(th, rep_matrix(id, heis_label(t1 + t2), h, grid));
    CHECK(std::abs(lhs - rhs) <= 1e-4 * std::max(1e-4, std::abs(lhs)));
  }
}

namespace {

// One-component Heisenberg field on [lo, hi] with smooth scalar profiles in t
// times fixed smooth grid kernels, exact evaluator attached.
OperatorField smooth_heis_field(double lo, double hi, int rule_n,
                                unsigned seed) {
  std::mt19937_64 rng(seed);
  auto B = rank_grid_op(2, rng), C = rank_grid_op(2, rng);
  double c = 0.5 * (lo + hi);
  auto ev = [B, C, c](double t) {
    auto v = TruncatedOperator::zero(B.basis);
    v.entries = B.entries * std::exp(-2.0 * (t - c) * (t - c)) +
                C.entries * (std::sin(t) * std::exp(-0.5 * std::abs(t)));
    return v;
  };
  OperatorField f;
  f.group = {GroupTag::HEIS, {}};
  FieldComponent fc;
  fc.measure.lo = lo;
  fc.measure.hi = hi;
  fc.measure.density = [](double t) { return std::abs(t) / kFourPiSq; };
  fc.measure.label_of = [](double t) { return heis_label(t); };
  fc.measure.rule = gauss_legendre(rule_n, lo, hi);
  fc.evaluator = ev;
  for (int i = 0; i < fc.measure.size(); ++i)
    fc.values.push_back(ev(fc.measure.rule.nodes[i]));
  f.components.push_back(std::move(fc));
  return f;
}

}  // namespace

TEST_CASE("heis_dualconv: support additivity and excluded parameters") {
  auto s = smooth_heis_field(1.0, 2.0, 8, 41);
  auto t = smooth_heis_field(1.0, 2.0, 8, 42);
  DualConvOptions o;
  o.outer_n = 8;
  o.out_n = 4;
  o.s_n = 32;
  auto c = heis_dualconv(s, t, o);
  REQUIRE(c.components.size() == 1);
  CHECK(c.components[0].measure.lo == doctest::Approx(2.0));
  CHECK(c.components[0].measure.hi == doctest::Approx(4.0));
  CHECK(c.components[0].evaluator(4.5).entries.cwiseAbs().maxCoeff() == 0.0);

  auto z = smooth_heis_field(-0.5, 0.5, 8, 43);
  CHECK_THROWS_AS(heis_dualconv(z, t, o), ExcludedParameterError);
  CHECK_THROWS_AS(heis_dualconv(s, z, o), ExcludedParameterError);

  for (auto& v : t.components[0].values) v.entries.setZero();
  t.components[0].evaluator = [&t](double) {
    return TruncatedOperator::zero(t.components[0].values[0].basis);
  };
  auto zc = heis_dualconv(s, t, o);
  double m = 0.0;
  for (const auto& v : zc.components[0].values)
    m = std::max(m, v.entries.cwiseAbs().maxCoeff());
  CHECK(m < 1e-14);
}

TEST_CASE("heis_dualconv: pointwise products of inverted fields at lattice points") {
  GroupId id{GroupTag::HEIS, {}};
  auto s = smooth_heis_field(0.8, 1.6, 20, 51);
  auto t = smooth_heis_field(1.0, 2.0, 20, 52);
  DualConvOptions o;
  o.outer_n = 16;
  o.out_n = 10;
  o.s_n = 64;
  auto c = heis_dualconv(s, t, o);
  double sp = heis_grid().spacing();
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int m : {-10, -4, 0, 2, 7}) {
    auto h = heis_element(u(rng), u(rng), m * sp);
    Complex lhs = inverse_A(id, c, h);
    Complex rhs = inverse_A(id, s, h) * inverse_A(id, t, h);
    CHECK(std::abs(lhs - rhs) <= 1e-4 * std::max(1e-5, std::abs(rhs)));
  }
}

// ---- twisted variants --------------------------------------------------------

namespace {

IntVector coef1(int a) {
  IntVector c(1);
  c << a;
  return c;
}

IntVector coef2(int a, int b) {
  IntVector c(2);
  c << a, b;
  return c;
}

// M(2)_K-style field: one smooth rho component tagged with a fixed Gamma
// coefficient vector.
OperatorField m2k_field(const GroupId& id, const IntVector& coef, double lo,
                        double hi, int rule_n, int N, unsigned seed) {
  auto f = smooth_m2_field(lo, hi, rule_n, N, seed);
  f.group = id;
  f.components[0].measure.label_of = [id, coef](double rho) {
    return m2_k_label(id, coef, rho);
  };
  return f;
}

// M2-tilde field on the periodic grid t = k / tn with weight 1/tn per node.
OperatorField m2t_field(int tn, double lo, double hi, int rule_n, int N,
                        unsigned seed) {
  OperatorField f;
  f.group = {GroupTag::M2_TILDE, {}};
  for (int k = 0; k < tn; ++k) {
    auto part = smooth_m2_field(lo, hi, rule_n, N, seed + 100 * k);
    auto& fc = part.components[0];
    double tk = static_cast<double>(k) / tn;
    double wt = 1.0 / tn;
    fc.measure.density = [wt](double rho) { return wt * rho; };
    fc.measure.label_of = [tk](double rho) { return m2_tilde_label(tk, rho); };
    f.components.push_back(std::move(fc));
  }
  return f;
}

}  // namespace

TEST_CASE("twist cocycle: integer jumps of the fractional-part section") {
  auto c = TwistCocycle::standard();
  CHECK(c.n(0.6, 0.7) == 1);
  CHECK(c.n(0.2, 0.3) == 0);
  CHECK(c.n(-0.4, -0.8) == 0);
  CHECK(c.n(-0.3, -0.2) == 1);
  CHECK(c.n(1.25, 2.5) == 0);
}

TEST_CASE("twisted_dualconv: integer Gamma reduces to the plain convolution") {
  GroupId id{GroupTag::M2_K, {}};
  id.params.gamma = {1.0};
  DualConvOptions o;
  o.outer_n = 10;
  o.mu_n = 10;
  o.out_n = 8;
  auto s = m2k_field(id, coef1(2), 1.0, 2.0, 12, 1, 61);
  auto t = m2k_field(id, coef1(3), 1.0, 2.0, 12, 1, 62);
  auto tw = twisted_dualconv(s, t, id, TwistCocycle::standard(), o);
  REQUIRE(tw.components.size() == 1);
  auto lab = tw.components[0].measure.label_of(1.0);
  REQUIRE(lab.gcoef.size() == 1);
  CHECK(lab.gcoef[0] == 5);

  auto plain = m2_dualconv(smooth_m2_field(1.0, 2.0, 12, 1, 61),
                           smooth_m2_field(1.0, 2.0, 12, 1, 62), o);
  CHECK(field_value_gap(tw, plain) < 1e-13);
}

TEST_CASE("twisted_dualconv: representatives summing to the unit pick up M_{-1}") {
  GroupId id{GroupTag::M2_K, {}};
  id.params.gamma = {1.0, std::sqrt(2.0)};
  DualConvOptions o;
  o.outer_n = 10;
  o.mu_n = 10;
  o.out_n = 8;
  // t1 = sqrt(2) - 1 and t2 = 2 - sqrt(2) sum to 1 exactly in the lattice
  auto s = m2k_field(id, coef2(-1, 1), 1.0, 2.0, 12, 1, 63);
  auto t = m2k_field(id, coef2(2, -1), 1.0, 2.0, 12, 1, 64);
  auto tw = twisted_dualconv(s, t, id, TwistCocycle::standard(), o);
  REQUIRE(tw.components.size() == 1);
  auto lab = tw.components[0].measure.label_of(1.0);
  CHECK((lab.gcoef.array() == 0).all());

  auto plain = m2_dualconv(smooth_m2_field(1.0, 2.0, 12, 1, 63),
                           smooth_m2_field(1.0, 2.0, 12, 1, 64), o);
  auto expect = map_field(plain, [](const IrrepLabel&,
                                    const TruncatedOperator& v) {
    return mn_twist(embed_window(v, v.basis.trunc_n + 1), -1);
  });
  CHECK(field_value_gap(tw, expect) < 1e-13);
}

TEST_CASE("twisted_dualconv: pointwise products of inverted fields (M2_K)") {
  GroupId id{GroupTag::M2_K, {}};
  id.params.gamma = {1.0, std::sqrt(2.0)};
  auto s = m2k_field(id, coef2(-1, 1), 0.5, 1.5, 20, 2, 71);
  auto t = m2k_field(id, coef2(2, -1), 1.0, 2.0, 20, 2, 72);
  auto tw = twisted_dualconv(s, t, id);
  std::mt19937_64 rng(73);
  std::uniform_real_distribution<double> uv(-0.8, 0.8), uz(-3.0, 3.0);
  for (int it = 0; it < 20; ++it) {
    auto x = m2_k_element(id, uv(rng), uv(rng), uz(rng));
    Complex lhs = inverse_A(id, tw, x);
    Complex rhs = inverse_A(id, s, x) * inverse_A(id, t, x);
    CHECK(std::abs(lhs - rhs) <= 1e-5 * std::max(1e-3, std::abs(rhs)));
  }
}

TEST_CASE("twisted_dualconv: periodic t grid and pointwise oracle (M2_TILDE)") {
  GroupId id{GroupTag::M2_TILDE, {}};
  int tn = 4;
  auto s = m2t_field(tn, 0.5, 1.5, 16, 1, 81);
  auto t = m2t_field(tn, 1.0, 2.0, 16, 1, 82);
  auto tw = twisted_dualconv(s, t, id);
  REQUIRE(tw.components.size() == static_cast<size_t>(tn));
  std::mt19937_64 rng(83);
  std::uniform_real_distribution<double> uv(-0.8, 0.8), ua(-3.0, 3.0);
  for (int it = 0; it < 10; ++it) {
    auto x = m2_tilde_element(uv(rng), uv(rng), ua(rng));
    Complex lhs = inverse_A(id, tw, x);
    Complex rhs = inverse_A(id, s, x) * inverse_A(id, t, x);
    CHECK(std::abs(lhs - rhs) <= 1e-5 * std::max(1e-3, std::abs(rhs)));
  }

  auto bad = m2t_field(3, 1.0, 2.0, 16, 1, 84);
  CHECK_THROWS_AS(twisted_dualconv(s, bad, id), GridIncompatibleError);

  GroupId m2{GroupTag::M2, {}};
  CHECK_THROWS_AS(twisted_dualconv(s, t, m2), UnsupportedOperationError);

  GroupId nounit{GroupTag::M2_K, {}};
  nounit.params.gamma = {2.0, std::sqrt(2.0)};
  CHECK_THROWS_AS(twisted_dualconv(s, t, nounit, TwistCocycle::standard()),
                  ConfigError);
}

// ---- Grelaud ----------------------------------------------------------------

namespace {

// Piecewise Gauss-Legendre with sin^2 endpoint clustering, for integrands
// with inverse-square-root turning points at the panel edges.
QuadratureRule clustered_panels(double lo, double hi, std::vector<double> cuts,
                                int per_panel) {
  cuts.push_back(lo);
  cuts.push_back(hi);
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> ps;
  for (double c : cuts) {
    double v = std::min(hi, std::max(lo, c));
    if (ps.empty() || v > ps.back() + 1e-12) ps.push_back(v);
  }
  auto gl = gauss_legendre(per_panel, 0.0, 1.0);
  std::vector<double> ns, ws;
  for (size_t p = 0; p + 1 < ps.size(); ++p) {
    double A = ps[p], B = ps[p + 1];
    for (int i = 0; i < gl.size(); ++i) {
      double sn = std::sin(kPi * gl.nodes[i] / 2.0);
      ns.push_back(A + (B - A) * sn * sn);
      ws.push_back(gl.weights[i] * (B - A) * (kPi / 2.0) *
                   std::sin(kPi * gl.nodes[i]));
    }
  }
  QuadratureRule out;
  out.nodes = Eigen::Map<RealVector>(ns.data(), ns.size());
  out.weights = Eigen::Map<RealVector>(ws.data(), ws.size());
  return out;
}

// Local unfolded spiral value continued from the branch at phi0.
double unfolded_b(double b1, double b2, double mu, double a, double phi0) {
  Complex z = b1 + b2 * std::exp(-Complex(a, 1.0) * mu);
  double phi = -std::arg(z);
  phi += kTwoPi * std::round((phi0 - phi) / kTwoPi);
  return std::abs(z) * std::exp(a * phi);
}

}  // namespace

TEST_CASE("grelaud_spiral: folding into one period and degeneracy") {
  double a = 0.1;
  auto p = grelaud_spiral(1.0, 1.0, 0.0, a);
  CHECK(p.b == doctest::Approx(2.0 * std::exp(-0.2 * kPi)));
  CHECK(p.b >= 1.0);
  CHECK(p.b < std::exp(kTwoPi * a));

  auto q = grelaud_spiral(1.3, 0.0, 0.7, a);
  CHECK(q.b == doctest::Approx(1.3));

  // r = 0 needs the spiral decay to cancel the radius ratio exactly
  CHECK_THROWS_AS(grelaud_spiral(std::exp(-a * kPi), 1.0, kPi, a),
                  DegenerateGeometryError);
}

TEST_CASE("grelaud_spiral_jacobian: matches central differences of b(mu)") {
  double a = 0.15;
  const double eps = 1e-6;
  struct Pt {
    double b1, b2, mu;
  };
  for (auto [b1, b2, mu] : {Pt{1.2, 0.7, 0.5}, Pt{1.0, 1.0, 2.0},
                            Pt{0.8, 1.5, -1.3}}) {
    auto p = grelaud_spiral(b1, b2, mu, a);
    double fd = (unfolded_b(b1, b2, mu + eps, a, p.phi) -
                 unfolded_b(b1, b2, mu - eps, a, p.phi)) /
                (2.0 * eps);
    double jac = grelaud_spiral_jacobian(b1, b2, mu, a);
    CHECK(std::abs(fd - jac) <= 1e-5 * std::abs(jac));
  }
}

TEST_CASE("grelaud_theta: trace against b db / 4 pi^2 factorizes") {
  double a = 0.4, b1 = 1.3, b2 = 0.9;
  std::mt19937_64 rng(401);
  auto k1 = KernelFunction::callable(random_gauss2(2, rng),
                                     KernelFunction::Domain::Line, -6.0, 6.0);
  auto k2 = KernelFunction::callable(random_gauss2(2, rng),
                                     KernelFunction::Domain::Line, -6.0, 6.0);
  CHECK_THROWS_AS(grelaud_theta(k1, k2, b1, b2, 0.5, a),
                  InvalidOperandError);

  int M = 6;
  double bhi = std::exp(kTwoPi * a);
  // branch creation points (sin mu = 0) are inverse-sqrt kinks in b
  std::vector<double> cuts;
  for (int k = -M; k <= M; ++k)
    cuts.push_back(grelaud_spiral(b1, b2, k * kPi, a).b);
  auto rule = clustered_panels(1.0, bhi, cuts, 12);
  Complex acc{};
  double tail = 0.0;
  for (int i = 0; i < rule.size(); ++i) {
    double b = rule.nodes[i];
    auto th = grelaud_theta(k1, k2, b1, b2, b, a, M);
    REQUIRE(th.has_kernel);
    // outside the attained arc of the folded spiral there are no branches
    acc += rule.weights[i] * th.kernel.diagonal_integral(256) * b / kFourPiSq;
    tail += rule.weights[i] * th.tail_estimate * b / kFourPiSq;
  }
  Complex expect = k1.diagonal_integral(256) * k2.diagonal_integral(256);
  CHECK(std::abs(acc - expect) <= 1e-3 * std::abs(expect) + tail);

  // a point on the spiral arc itself carries at least one branch
  auto on = grelaud_theta(k1, k2, b1, b2,
                          grelaud_spiral(b1, b2, 0.5, a).b, a, M);
  CHECK(on.branch_count > 0);
}

TEST_CASE("grelaud_theta: widening the branch window moves the trace less than the tail hint") {
  double a = 0.4, b1 = 1.3, b2 = 0.9, b = 1.7;
  std::mt19937_64 rng(409);
  auto k1 = KernelFunction::callable(random_gauss2(2, rng),
                                     KernelFunction::Domain::Line, -6.0, 6.0);
  auto k2 = KernelFunction::callable(random_gauss2(2, rng),
                                     KernelFunction::Domain::Line, -6.0, 6.0);
  auto t6 = grelaud_theta(k1, k2, b1, b2, b, a, 6);
  auto t12 = grelaud_theta(k1, k2, b1, b2, b, a, 12);
  CHECK(t12.branch_count >= t6.branch_count);
  Complex d = t12.kernel.diagonal_integral(512) -
              t6.kernel.diagonal_integral(512);
  double scale = std::abs(t6.kernel.diagonal_integral(512));
  CHECK(std::abs(d) <= 2.0 * t6.tail_estimate + 1e-9 * scale);
}
