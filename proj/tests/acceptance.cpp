// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "qmctree/error.hpp"
#include "qmctree/models.hpp"
#include "qmctree/oracle.hpp"
#include "qmctree/recurrence.hpp"
#include "support/random_walks.hpp"

using namespace qmctree;
using qmctree::testing::Rng;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

Matrix normalized(const Matrix& m) { return m / op_norm(m); }

Complex unit_phase(Rng& rng) {
  return std::polar(1.0, testing::uniform(rng, 0.0, 2.0 * std::numbers::pi));
}

Vector unit2(Complex x, Complex y) {
  Vector v(2);
  v << x, y;
  return v;
}

Vector random_unit2(Rng& rng) {
  const double t = testing::uniform(rng, 0.0, std::numbers::pi / 2.0);
  return unit2(std::cos(t) * unit_phase(rng), std::sin(t) * unit_phase(rng));
}

ProductObservable random_product(Rng& rng, const std::vector<Vertex>& sites, Eigen::Index d) {
  ProductObservable a;
  for (const auto& u : sites) a.set(u, normalized(testing::gaussian(rng, d, d)));
  return a;
}

Ray random_ray(Rng& rng, int k) {
  auto draw = [&](std::size_t len) {
    std::vector<int> out(len);
    for (auto& x : out) x = static_cast<int>(testing::pick(rng, 1, static_cast<std::size_t>(k)));
    return out;
  };
  return Ray(draw(testing::pick(rng, 0, 3)), draw(testing::pick(rng, 1, 2)));
}

/// Two-label walk with random moduli and phases subject to |a|^2 + |c|^2 =
/// |b|^2 + |d|^2 = 1.
models::TwoLabelParams random_two_label(Rng& rng) {
  const double s = testing::uniform(rng, 0.0, std::numbers::pi / 2.0);
  const double t = testing::uniform(rng, 0.0, std::numbers::pi / 2.0);
  return {std::cos(s) * unit_phase(rng), std::cos(t) * unit_phase(rng),
          std::sin(s) * unit_phase(rng), std::sin(t) * unit_phase(rng)};
}

Outcome transition_expectation_forms() {
  Rng rng(1001);
  const auto start = Clock::now();
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const WalkSpec spec = testing::random_small_walk(rng, 3, 3);
    const int k = static_cast<int>(testing::pick(rng, 1, 2));
    const TreeChain chain(spec, k);
    const auto d = static_cast<Eigen::Index>(spec.site_dim());
    const Matrix root = normalized(testing::gaussian(rng, d, d));
    std::vector<Matrix> children;
    Matrix dense = root;
    for (int l = 0; l < k; ++l) {
      children.push_back(normalized(testing::gaussian(rng, d, d)));
      dense = kron(dense, children.back());
    }
    worst = std::max(worst, op_norm(chain.transition_expectation(root, children) -
                                    chain.transition_expectation_kraus(dense)));
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-10 && elapsed < 30.0,
          fmt("max deviation %.3e over 200 specs, %.2f s", worst, elapsed)};
}

Outcome factored_vs_nested() {
  Rng rng(1002);
  const auto start = Clock::now();
  double worst = 0.0;
  std::ostringstream per_scope;
  const std::vector<oracle::DenseScope> scopes = {{2, 1}, {1, 2}, {1, 3}, {1, 4}};
  for (const auto& scope : scopes) {
    double scope_worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const WalkSpec spec = scope.k == 2 ? testing::random_small_walk(rng, 3, 3)
                                         : testing::random_walk(rng, 2, 2);
      const TreeChain chain(spec, scope.k);
      const ProductObservable a =
          random_product(rng, scope.sites(), static_cast<Eigen::Index>(spec.site_dim()));
      const Matrix nested =
          oracle::nested_conditional(spec, scope, oracle::densify(a, scope, spec.site_dim()));
      scope_worst = std::max(scope_worst, op_norm(nested - chain.conditional_expectation_root(a)));
    }
    per_scope << " k=" << scope.k << ",depth=" << scope.depth << ':' << fmt("%.2e", scope_worst);
    worst = std::max(worst, scope_worst);
  }
  const double elapsed = seconds_since(start);
  return {worst <= 1e-9 && elapsed < 60.0,
          fmt("max deviation %.3e, %.2f s;", worst, elapsed) + per_scope.str()};
}

Outcome two_label_psi_formulas() {
  Rng rng(1003);
  double stated = 0.0;
  double derived = 0.0;
  for (int t = 0; t < 100; ++t) {
    const models::TwoLabelParams p = random_two_label(rng);
    const TreeChain chain(models::two_label_walk(p), 2);
    const double eps = testing::uniform(rng);
    const Vector xi = random_unit2(rng);
    const Matrix e = models::rank1_site_projection(eps, unit_phase(rng), xi).matrix();
    const double a2 = std::norm(p.a), c2 = std::norm(p.c);
    const double x1 = std::norm(xi(0)), x2 = std::norm(xi(1));
    const double psi1 = chain.psi(0, e).real(), psi2 = chain.psi(1, e).real();
    stated = std::max({stated, std::abs(psi1 - eps * a2 * x1),
                       std::abs(psi2 - eps * (c2 * x1 + x2))});
    derived = std::max({derived, std::abs(psi1 - eps * (a2 * x1 + c2 * x2)),
                        std::abs(psi2 - eps * x2)});
  }
  return {stated <= 1e-12,
          fmt("max deviation from the stated formulas %.3e; from "
              "psi_1 = eps(|a|^2|xi_1|^2 + |c|^2|xi_2|^2), psi_2 = eps|xi_2|^2: %.3e",
              stated, derived)};
}

Outcome two_label_verdicts() {
  std::ostringstream out;
  bool pass = true;
  auto check = [&](bool ok, const std::string& what) {
    pass = pass && ok;
    out << (ok ? "[ok] " : "[mismatch] ") << what << "; ";
  };

  const models::TwoLabelParams base{0.6, 0.8, 0.8, 0.6};
  {
    const TreeChain chain(models::two_label_walk(base), 2);
    const Projection e = models::rank1_site_projection(0.5, 1.0, unit2(1, 0)).complement();
    const RecurrenceReport r = decide_E_recurrence(chain, e);
    check(r.verdict == Verdict::Recurrent && r.bound_p < 1.0,
          fmt("eps=0.5 %s with p=%.4f", std::string(to_string(r.verdict)).c_str(), r.bound_p));
  }
  {
    const TreeChain chain(models::two_label_walk({1.0, 0.6, 0.0, 0.8}), 2);
    const Matrix e1 = kron(models::upper_projector(), ket_bra(2, 0, 0));
    const RecurrenceReport r = decide_E_recurrence(chain, Projection::from_matrix(identity(4) - e1));
    check(r.verdict == Verdict::NotRecurrent,
          std::string("eps=|a|=|xi_1|=1 ") + std::string(to_string(r.verdict)));
    const Matrix displayed = kron(Matrix(models::lower_projector() * 0.36), ket_bra(2, 0, 0)) +
                             kron(Matrix(models::lower_projector() * 0.64), ket_bra(2, 1, 1));
    const Matrix computed_form = kron(models::lower_projector(), ket_bra(2, 0, 0));
    check(op_norm(r.residual - displayed) <= 1e-12,
          fmt("residual vs diag(0,|b|^2)(x)|1><1| + diag(0,|d|^2)(x)|2><2|: deviation %.3e "
              "(residual norm %.4f, deviation from diag(0,1)(x)|1><1| %.3e)",
              op_norm(r.residual - displayed), r.residual_norm,
              op_norm(r.residual - computed_form)));
  }
  {
    const TreeChain chain(models::two_label_walk(base), 2);
    const Projection e1 =
        Projection::from_matrix(kron(models::upper_projector(), ket_bra(2, 0, 0)));
    const Projection sigma = Projection::from_matrix(models::position_projector(2, 2, 0));
    const auto omega =
        DensityOperator::from_matrix(kron(models::lower_projector(), identity(2)) / 2.0);
    const AccessibilityReport acc = decide_E_accessibility(chain, e1, sigma);
    const AccessibilityReport phi = decide_phi_accessibility(chain, e1, sigma, omega);
    check(acc.verdict == Reachability::Accessible,
          fmt("e_1 E-accessible from 1(x)|1><1|, max magnitude %.4f", acc.max_magnitude));
    check(phi.verdict == Reachability::NotAccessible,
          fmt("e_1 not phi-accessible for omega on the lower block, max magnitude %.3e",
              phi.max_magnitude));
    bool none = true;
    const Projection zero_eps = models::rank1_site_projection(0.0, 1.0, unit2(0.6, 0.8));
    for (const Projection& target : {e1, sigma, Projection::from_matrix(identity(4))}) {
      none = none &&
             decide_E_accessibility(chain, target, zero_eps).verdict == Reachability::NotAccessible;
    }
    check(none, "nothing accessible from e(0,z,xi)");
  }
  return {pass, out.str()};
}

Outcome tail_bound() {
  Rng rng(1005);
  double worst_excess = -1.0;
  int cases = 0;
  for (int t = 0; t < 50; ++t) {
    const WalkSpec spec = testing::random_nontrivial_walk(rng, 3, 3);
    const int k = static_cast<int>(testing::pick(rng, 1, 2));
    const TreeChain chain(spec, k);
    const Projection e = Projection::from_matrix(
        testing::random_projection(rng, static_cast<Eigen::Index>(spec.site_dim())));
    const Matrix perp = e.complement().matrix();
    double p = 0.0;
    for (std::size_t j = 0; j < chain.num_labels(); ++j) p = std::max(p, chain.psi(j, perp).real());
    const Ray ray = random_ray(rng, k);
    for (std::size_t n = 0; n <= 20; ++n) {
      const double norm = op_norm(chain.conditional_expectation_root(stopping_tail(e, ray, n)));
      worst_excess = std::max(worst_excess, norm - std::pow(p, static_cast<double>(n)));
    }
    ++cases;
  }
  return {worst_excess <= 1e-12,
          fmt("max of ||E(tail_n)|| - p^n over %d cases, n <= 20: %.3e", cases, worst_excess)};
}

Outcome hitting_sum_identity() {
  Rng rng(1006);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const WalkSpec spec = testing::random_nontrivial_walk(rng, 3, 3);
    const int k = static_cast<int>(testing::pick(rng, 1, 3));
    const TreeChain chain(spec, k);
    const Projection e = Projection::from_matrix(
        testing::random_projection(rng, static_cast<Eigen::Index>(spec.site_dim())));
    const Ray ray = random_ray(rng, k);
    for (std::size_t n = 0; n <= 12; ++n) {
      const Matrix sum = chain.conditional_expectation_root(hitting_decomposition(e, ray, n));
      worst = std::max(worst, op_norm(sum - identity(spec.site_dim())));
    }
  }
  return {worst <= 1e-11, fmt("max ||E(sum tau_n + tail_N) - 1|| for N <= 12: %.3e", worst)};
}

Outcome channel_cptp() {
  Rng rng(1007);
  double drift = 0.0;
  double min_eig = 1.0;
  double path_sum = 0.0;
  for (int t = 0; t < 50; ++t) {
    const WalkSpec spec = testing::random_small_walk(rng, 3, 3);
    std::vector<Matrix> blocks = spec.initial_blocks;
    auto total = [](const std::vector<Matrix>& b) {
      double s = 0.0;
      for (const auto& m : b) s += m.trace().real();
      return s;
    };
    double previous = total(blocks);
    for (int s = 0; s < 50; ++s) {
      blocks = channel_step(spec, blocks);
      const double now = total(blocks);
      drift = std::max(drift, std::abs(now - previous));
      previous = now;
      for (const auto& m : blocks) min_eig = std::min(min_eig, min_eigenvalue(m));
    }
    const std::size_t n = spec.num_labels();
    for (std::size_t len = 0; len <= 4; ++len) {
      std::size_t count = 1;
      for (std::size_t i = 0; i <= len; ++i) count *= n;
      double sum = 0.0;
      for (std::size_t code = 0; code < count; ++code) {
        sum += path_probability(spec, decode_path(code, n, len));
      }
      path_sum = std::max(path_sum, std::abs(sum - 1.0));
    }
  }
  return {drift <= 1e-12 && min_eig >= -1e-10 && path_sum <= 1e-10,
          fmt("trace drift %.3e, min eigenvalue %.3e, path sum deviation %.3e", drift, min_eig,
              path_sum)};
}

Outcome sampler() {
  const WalkSpec model = models::two_label_walk({0.6, 0.8, 0.8, 0.6});
  const auto exact = oracle::enumerate_path_distribution(model, 4);
  const auto start = Clock::now();
  const auto first = sample_trajectories(model, 4, 1'000'000, 20261015);
  const double elapsed = seconds_since(start);
  const auto again = sample_trajectories(model, 4, 1'000'000, 20261015, {}, 1);
  const double tv = total_variation(first, exact);
  const bool same = first.counts == again.counts;
  return {tv < 0.02 && same && elapsed < 60.0,
          fmt("TV %.4e, identical rerun with one thread: %s, %.2f s", tv, same ? "yes" : "no",
              elapsed)};
}

Outcome structural_identities() {
  Rng rng(1009);
  double phi_unit = 0.0, idempotent = 0.0, scale = 0.0, homogeneity = 0.0;
  for (int t = 0; t < 100; ++t) {
    const WalkSpec spec = testing::random_small_walk(rng, 3, 3);
    const int k = static_cast<int>(testing::pick(rng, 1, 2));
    const TreeChain chain(spec, k);
    const std::size_t n = spec.num_labels();
    const auto d = static_cast<Eigen::Index>(spec.site_dim());
    const Matrix one = identity(spec.site_dim());

    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t j2 = 0; j2 < n; ++j2) {
        phi_unit = std::max(phi_unit, std::abs(chain.phi_pair(j, j2, one) - (j == j2 ? 1.0 : 0.0)));
      }
    }

    const Matrix b = normalized(testing::gaussian(rng, d, d));
    const Matrix pb = chain.backward_operator(b);
    idempotent = std::max(idempotent, op_norm(chain.backward_operator(pb) - pb));

    WalkSpec scaled = spec;
    for (auto& rho : scaled.initial_blocks) rho *= testing::uniform(rng, 0.1, 10.0);
    const TreeChain scaled_chain(scaled, k);
    for (std::size_t j = 0; j < n; ++j) {
      scale = std::max(scale, std::abs(chain.psi(j, b) - scaled_chain.psi(j, b)));
    }

    const DensityOperator omega = chain.homogeneous_initial_state();
    const ProductObservable a = random_product(rng, ball(2, chain.shape()), d);
    Vertex g;
    const std::size_t g_level = testing::pick(rng, 1, 2);
    for (std::size_t l = 0; l < g_level; ++l) {
      g = g.child(static_cast<int>(testing::pick(rng, 1, static_cast<std::size_t>(k))));
    }
    homogeneity = std::max(homogeneity, std::abs(chain.qmc_state(omega, a.shifted(g)) -
                                                 chain.qmc_state(omega, a)));
  }
  const double worst = std::max({phi_unit, idempotent, scale, homogeneity});
  return {worst <= 1e-12,
          fmt("phi_jj'(1) %.2e, P.P - P %.2e, psi scaling %.2e, shift invariance %.2e", phi_unit,
              idempotent, scale, homogeneity)};
}

Outcome faithfulness_direction() {
  Rng rng(1010);
  int e_recurrent = 0, phi_recurrent = 0, not_recurrent = 0, violations = 0, skipped = 0;
  for (int t = 0; t < 100; ++t) {
    WalkSpec spec;
    Projection e = Projection::from_matrix(identity(1));
    if (t % 2 == 0) {
      spec = testing::random_nontrivial_walk(rng, 3, 3);
      e = Projection::from_matrix(
          testing::random_projection(rng, static_cast<Eigen::Index>(spec.site_dim())));
    } else {
      models::TwoLabelParams p = random_two_label(rng);
      if (t % 4 == 1) {
        p.a = unit_phase(rng);
        p.c = 0.0;
      }
      spec = models::two_label_walk(p);
      const double eps = t % 4 == 1 ? 1.0 : testing::uniform(rng);
      const Vector xi = t % 4 == 1 ? unit2(1, 0) : random_unit2(rng);
      e = models::rank1_site_projection(eps, 1.0, xi).complement();
    }
    const TreeChain chain(spec, static_cast<int>(testing::pick(rng, 1, 2)));
    const auto d = static_cast<Eigen::Index>(spec.site_dim());
    const Eigen::Index rank = static_cast<Eigen::Index>(testing::pick(rng, 1, spec.site_dim()));
    const DensityOperator omega = DensityOperator::from_matrix(
        [&] {
          const Matrix m = testing::random_psd(rng, d, rank);
          return Matrix(m / m.trace().real());
        }());
    try {
      const RecurrenceReport er = decide_E_recurrence(chain, e);
      const RecurrenceReport pr = decide_phi_recurrence(chain, e, omega);
      if (er.verdict == Verdict::Recurrent) ++e_recurrent;
      if (er.verdict == Verdict::NotRecurrent) ++not_recurrent;
      if (pr.verdict == Verdict::Recurrent) ++phi_recurrent;
      if (er.verdict == Verdict::Recurrent && pr.verdict != Verdict::Recurrent) ++violations;
    } catch (const Error&) {
      ++skipped;
    }
  }

  const TreeChain gap_chain(models::two_label_walk({1.0, 0.6, 0.0, 0.8}), 2);
  const Projection e =
      Projection::from_matrix(identity(4) - kron(models::upper_projector(), ket_bra(2, 0, 0)));
  const auto rank_deficient = DensityOperator::from_matrix(
      kron(models::upper_projector(), ket_bra(2, 1, 1)));
  const auto faithful = DensityOperator::from_matrix(identity(4) / 4.0);
  const bool gap = decide_E_recurrence(gap_chain, e).verdict == Verdict::NotRecurrent &&
                   decide_phi_recurrence(gap_chain, e, rank_deficient).verdict ==
                       Verdict::Recurrent &&
                   decide_phi_recurrence(gap_chain, e, faithful).verdict == Verdict::NotRecurrent;
  return {violations == 0 && gap && skipped == 0,
          fmt("E-recurrent %d, phi-recurrent %d, E-not-recurrent %d, violations %d, skipped %d; "
              "rank-deficient gap example: %s",
              e_recurrent, phi_recurrent, not_recurrent, violations, skipped,
              gap ? "phi-recurrent, not E-recurrent" : "not reproduced")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"closed-form vs Kraus transition expectation", transition_expectation_forms},
      {"factored vs nested conditional expectation", factored_vs_nested},
      {"two-label psi formulas", two_label_psi_formulas},
      {"two-label recurrence and accessibility verdicts", two_label_verdicts},
      {"tail bound p^n", tail_bound},
      {"hitting-sum identity", hitting_sum_identity},
      {"channel CPTP and path normalization", channel_cptp},
      {"trajectory sampler", sampler},
      {"structural identities", structural_identities},
      {"E-recurrence implies phi-recurrence", faithfulness_direction},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("%s %zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
