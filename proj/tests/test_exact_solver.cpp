#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sscat/exact_solver.hpp"
#include "sscat/random_potential.hpp"

using namespace sscat;
using doctest::Approx;

namespace {
double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

ScatterResult solve(Family f, double d, double e, Backend b, Incidence inc = Incidence::FromLeft) {
  SolveOptions o;
  o.backend = b;
  o.incidence = inc;
  return reflectance_exact(make_spec(f, d, e), o);
}
}  // namespace

TEST_CASE("closed forms against frozen high-precision values") {
  // mpmath, 40 digits
  CHECK(rel(reflectance_closed_form(make_spec(Family::FermiStep, 0.5, 1.0)), 9.7906179206279482037e-5) < 1e-13);
  CHECK(rel(reflectance_closed_form(make_spec(Family::FermiStep, 0.9, 0.3)), 1.7671916775034521798e-6) < 1e-12);
  CHECK(rel(reflectance_closed_form(make_spec(Family::FermiStep, 0.1, 2.0)), 5.7402145889408726758e-5) < 1e-12);
  CHECK(rel(reflectance_closed_form(make_spec(Family::SechSquared, 0.5, 0.5)), 0.014008276175006746405) < 1e-13);
  CHECK(rel(reflectance_closed_form(make_spec(Family::SechSquared, 0.1, 1.0)), 9.004835427326445019e-4) < 1e-13);
  CHECK(rel(reflectance_closed_form(make_spec(Family::SechSquared, 0.25, 1.0)), 7.4419501427962134523e-3) < 1e-13);
  CHECK(reflectance_closed_form(make_spec(Family::FermiStep, 0.0, 1.0)) == 0.0);
  CHECK_THROWS_AS(reflectance_closed_form(make_spec(Family::GaussianBump, 0.1, 1.0)), UsageError);
}

TEST_CASE("sech2 closed form is continuous across its branch point") {
  const double e = 0.8;
  const double d0 = e * e / 4.0;
  const double lo = reflectance_closed_form(make_spec(Family::SechSquared, d0 * (1.0 - 1e-13), e));
  const double at = reflectance_closed_form(make_spec(Family::SechSquared, d0, e));
  const double hi = reflectance_closed_form(make_spec(Family::SechSquared, d0 * (1.0 + 1e-13), e));
  CHECK(rel(lo, at) < 1e-12);
  CHECK(rel(hi, at) < 1e-12);
}

TEST_CASE("closed forms: small-delta and small-eps limits") {
  // δ → 0: (πδ/ε)²/(4 sh²(2π/ε)) up to O(δ)
  const double e = 0.7, d = 1e-6;
  const double born = std::pow(std::numbers::pi * d / e, 2) / (4.0 * std::pow(std::sinh(2.0 * std::numbers::pi / e), 2));
  CHECK(rel(reflectance_closed_form(make_spec(Family::FermiStep, d, e)), born) < 1e-5);
  // δ = 0.9, ε = 0.05: ln R within 1% of −4π√(1−δ)/ε
  const double lr = log_reflectance_closed_form(make_spec(Family::FermiStep, 0.9, 0.05));
  const double w = -4.0 * std::numbers::pi * std::sqrt(0.1) / 0.05;
  CHECK(std::abs(lr - w) / std::abs(w) < 0.01);
  CHECK(std::isfinite(log_reflectance_closed_form(make_spec(Family::SechSquared, 0.5, 0.005))));
}

TEST_CASE("closed forms increase with delta") {
  for (Family f : {Family::FermiStep, Family::SechSquared})
    for (double e : {0.3, 0.5, 1.0, 2.0}) {
      double prev = -INFINITY;
      for (double d = 0.01; d < 0.995; d += 0.01) {
        const double v = log_reflectance_closed_form(make_spec(f, d, e));
        CHECK(v > prev);
        prev = v;
      }
    }
}

TEST_CASE("delta = 0 is free propagation") {
  for (Backend b : {Backend::TransferMatrix, Backend::InvariantEmbedding}) {
    const ScatterResult r = solve(Family::GaussianBump, 0.0, 1.0, b);
    CHECK(r.R == 0.0);
    CHECK(r.T == 1.0);
  }
}

TEST_CASE("exact solve matches the closed forms") {
  for (Backend b : {Backend::TransferMatrix, Backend::InvariantEmbedding}) {
    ScatterResult r = solve(Family::FermiStep, 0.5, 1.0, b);
    CHECK(r.status == SolveStatus::Ok);
    CHECK(rel(r.R, 9.7906179206279482037e-5) < 1e-6);
    r = solve(Family::SechSquared, 0.5, 0.5, b);
    CHECK(r.status == SolveStatus::Ok);
    CHECK(rel(r.R, 0.014008276175006746405) < 1e-6);
    CHECK(r.k_minus == 1.0);
  }
  const ScatterResult f = solve(Family::FermiStep, 0.75, 1.0, Backend::InvariantEmbedding);
  CHECK(f.k_plus == Approx(0.5));
}

TEST_CASE("gaussian bump against a frozen direct ODE solve") {
  // scipy DOP853, rtol 1e-13, no closed form involved
  for (Backend b : {Backend::TransferMatrix, Backend::InvariantEmbedding}) {
    CHECK(rel(solve(Family::GaussianBump, 0.5, 1.0, b).R, 0.05520573620496394) < 1e-9);
    CHECK(rel(solve(Family::GaussianBump, 0.3, 0.7, b).R, 0.007536111194531578) < 1e-9);
  }
}

TEST_CASE("flux conservation, backend agreement and incidence symmetry") {
  for (Family f : {Family::FermiStep, Family::SechSquared, Family::GaussianBump})
    for (double d : {0.1, 0.3, 0.5, 0.7, 0.9})
      for (double e : {0.3, 0.5, 1.0, 2.0}) {
        CAPTURE(d);
        CAPTURE(e);
        const ScatterResult ie = solve(f, d, e, Backend::InvariantEmbedding);
        const ScatterResult tm = solve(f, d, e, Backend::TransferMatrix);
        if (ie.status == SolveStatus::Ok) CHECK(std::abs(ie.R + ie.T - 1.0) < 1e-10);
        if (tm.status == SolveStatus::Ok) CHECK(std::abs(tm.R + tm.T - 1.0) < 1e-10);
        if (ie.status == SolveStatus::Ok && tm.status == SolveStatus::Ok) CHECK(rel(tm.R, ie.R) < 1e-6);
        if (ie.status == SolveStatus::Ok) {
          const ScatterResult back = solve(f, d, e, Backend::InvariantEmbedding, Incidence::FromRight);
          CHECK(rel(back.R, ie.R) < 1e-8);
        }
        CHECK(ie.R >= 0.0);
        CHECK(ie.R <= 1.0);
      }
}

TEST_CASE("floor certification") {
  // R ~ e^{−4π/ε}·… far below any double-precision floor
  const ScatterResult r = solve(Family::SechSquared, 0.1, 0.05, Backend::TransferMatrix);
  CHECK(r.status == SolveStatus::BelowNumericFloor);
  CHECK_THROWS_AS(solve(Family::FermiStep, 1.0, 1.0, Backend::Auto), DomainError);
}

TEST_CASE("sampled shapes: cell backends agree and conserve flux") {
  SynthesisOptions o;
  o.length = 400.0;
  o.seed = 11;
  const PotentialSpec s = synthesize_random({0.5}, 0.3, o);
  SolveOptions so;
  so.backend = Backend::InvariantEmbedding;
  const ScatterResult ie = reflectance_exact(s, so);
  so.backend = Backend::TransferMatrix;
  const ScatterResult tm = reflectance_exact(s, so);
  CHECK(std::abs(ie.R + ie.T - 1.0) < 1e-10);
  CHECK(rel(tm.R, ie.R) < 1e-6);
  CHECK(tm.log_T == Approx(ie.log_T).epsilon(1e-8));
  // reciprocity: the mirrored sample transmits identically
  so.backend = Backend::InvariantEmbedding;
  const ScatterResult m = reflectance_exact(mirrored(s), so);
  CHECK(std::abs(m.log_T - ie.log_T) < 1e-8);

  // a fine tabulation of a smooth bump reproduces the analytic solve
  PotentialSpec tab;
  tab.family = Family::Tabulated;
  tab.delta = 0.5;
  tab.eps = 1.0;
  for (double z = -10.0; z <= 10.0 + 1e-12; z += 0.01) {
    tab.table.z.push_back(z);
    tab.table.u.push_back(std::exp(-z * z));
  }
  so.sample_step = 0.005;
  const ScatterResult t = reflectance_exact(tab, so);
  CHECK(rel(t.R, 0.05520573620496394) < 1e-3);
}
