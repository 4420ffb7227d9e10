#include "qmctree/recurrence.hpp"

#include <algorithm>
#include <cmath>

#include "qmctree/error.hpp"

namespace qmctree {

namespace {

constexpr std::size_t kRayCheckDepth = 6;

void check_projection(const TreeChain& chain, const Projection& e) {
  if (e.dim() != chain.site_dim()) {
    throw Error(ErrorCode::DimensionMismatch, "projection does not act on a single site");
  }
}

/// E(a_root; c at child slot `slot`, identity elsewhere).
Matrix expectation_with_child(const TreeChain& chain, const Matrix& a_root,
                              const Matrix& child, int slot) {
  const auto d = static_cast<Eigen::Index>(chain.site_dim());
  std::vector<Matrix> children(static_cast<std::size_t>(chain.k()), Matrix::Identity(d, d));
  children[static_cast<std::size_t>(slot)] = child;
  return chain.transition_expectation(a_root, children);
}

std::vector<double> complement_weights(const TreeChain& chain, const Projection& e) {
  const Matrix perp = e.complement().matrix();
  std::vector<double> w(chain.num_labels());
  for (std::size_t j = 0; j < w.size(); ++j) w[j] = chain.psi(j, perp).real();
  return w;
}

double ray_consistency(const TreeChain& chain, const Projection& e, const Ray& ray) {
  double worst = 0.0;
  for (std::size_t n = 0; n <= kRayCheckDepth; ++n) {
    const Matrix closed = tail_conditional(chain, e, n);
    const Matrix explicit_tail = chain.conditional_expectation_root(stopping_tail(e, ray, n));
    worst = std::max(worst, op_norm(closed - explicit_tail));
  }
  return worst;
}

Verdict verdict_from(ZeroTest t) {
  switch (t) {
    case ZeroTest::Zero: return Verdict::Recurrent;
    case ZeroTest::Marginal: return Verdict::Inconclusive;
    case ZeroTest::Nonzero: return Verdict::NotRecurrent;
  }
  return Verdict::Inconclusive;
}

Reachability reach_from(ZeroTest t) {
  switch (t) {
    case ZeroTest::Zero: return Reachability::NotAccessible;
    case ZeroTest::Marginal: return Reachability::Inconclusive;
    case ZeroTest::Nonzero: return Reachability::Accessible;
  }
  return Reachability::Inconclusive;
}

RecurrenceReport conditional_report(const TreeChain& chain, const Projection& e,
                                    const Ray& ray) {
  check_projection(chain, e);
  ray.check(chain.shape());
  const Tolerances& tol = chain.tolerances();

  RecurrenceReport report;
  report.tolerances = tol;
  report.psi_complement = complement_weights(chain, e);
  report.bound_p = *std::max_element(report.psi_complement.begin(), report.psi_complement.end());
  report.tail_limit = tail_limit(chain, e);
  report.residual =
      expectation_with_child(chain, e.matrix(), report.tail_limit, ray.direction(0) - 1);
  report.residual_norm = op_norm(report.residual);
  report.ray_check = ray_consistency(chain, e, ray);
  return report;
}

}  // namespace

std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::Recurrent: return "Recurrent";
    case Verdict::NotRecurrent: return "NotRecurrent";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

std::string_view to_string(Criterion c) noexcept {
  return c == Criterion::SufficientBound ? "SufficientBound" : "ExactTailLimit";
}

std::string_view to_string(Reachability r) noexcept {
  switch (r) {
    case Reachability::Accessible: return "Accessible";
    case Reachability::NotAccessible: return "NotAccessible";
    case Reachability::Inconclusive: return "Inconclusive";
  }
  return "Inconclusive";
}

ZeroTest classify(double value, const Tolerances& tol) noexcept {
  if (value <= tol.zero_tol) return ZeroTest::Zero;
  if (value <= Tolerances::kMarginFactor * tol.zero_tol) return ZeroTest::Marginal;
  return ZeroTest::Nonzero;
}

ProductObservable stopping_time(const Projection& e, const Ray& ray, std::size_t n) {
  ProductObservable out;
  const Matrix perp = e.complement().matrix();
  for (std::size_t m = 0; m < n; ++m) out.set(ray.vertex(m), perp);
  out.set(ray.vertex(n), e.matrix());
  return out;
}

ProductObservable stopping_tail(const Projection& e, const Ray& ray, std::size_t n) {
  ProductObservable out;
  const Matrix perp = e.complement().matrix();
  for (std::size_t m = 0; m <= n; ++m) out.set(ray.vertex(m), perp);
  return out;
}

ObservableSum hitting_decomposition(const Projection& e, const Ray& ray, std::size_t n_max) {
  ObservableSum out;
  for (std::size_t n = 0; n <= n_max; ++n) out.add(1.0, stopping_time(e, ray, n));
  out.add(1.0, stopping_tail(e, ray, n_max));
  return out;
}

Matrix tail_conditional(const TreeChain& chain, const Projection& e, std::size_t n) {
  check_projection(chain, e);
  const Matrix perp = e.complement().matrix();
  const auto d = static_cast<Eigen::Index>(chain.site_dim());
  Matrix out = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < chain.num_labels(); ++j) {
    const Complex base = chain.psi(j, perp);
    Complex w(1.0);
    for (std::size_t s = 0; s < n; ++s) w *= base;
    if (w == Complex(0.0)) continue;
    out += w * chain.mj_map(j, perp);
  }
  return out;
}

Matrix tail_limit(const TreeChain& chain, const Projection& e) {
  check_projection(chain, e);
  const Matrix perp = e.complement().matrix();
  const auto d = static_cast<Eigen::Index>(chain.site_dim());
  Matrix out = Matrix::Zero(d, d);
  for (std::size_t j = 0; j < chain.num_labels(); ++j) {
    if (std::abs(chain.psi(j, perp) - 1.0) <= chain.tolerances().one_tol) {
      out += chain.mj_map(j, perp);
    }
  }
  return out;
}

RecurrenceReport decide_E_recurrence(const TreeChain& chain, const Projection& e,
                                     const Ray& ray) {
  check_projection(chain, e);
  const double mass = chain.forward_operator(e.matrix()).trace().real();
  if (mass <= chain.tolerances().trace_floor) {
    throw Error(ErrorCode::DegenerateProjection, "Tr(T(e)) vanishes");
  }
  RecurrenceReport report = conditional_report(chain, e, ray);
  report.kind = RecurrenceReport::Kind::Conditional;
  if (report.bound_p < 1.0 - chain.tolerances().one_tol) {
    report.criterion = Criterion::SufficientBound;
    report.verdict = Verdict::Recurrent;
  } else {
    report.criterion = Criterion::ExactTailLimit;
    report.verdict = verdict_from(classify(report.residual_norm, chain.tolerances()));
  }
  return report;
}

RecurrenceReport decide_phi_recurrence(const TreeChain& chain, const Projection& e,
                                       const DensityOperator& omega, const Ray& ray) {
  check_projection(chain, e);
  chain.check_state(omega);
  ProductObservable at_root;
  at_root.set(Vertex::root(), e.matrix());
  if (std::abs(chain.qmc_state(omega, at_root)) <= chain.tolerances().zero_tol) {
    throw Error(ErrorCode::DegenerateProjection, "phi(e at the root) vanishes");
  }
  RecurrenceReport report = conditional_report(chain, e, ray);
  report.kind = RecurrenceReport::Kind::State;
  report.state_value = trace_product(omega.matrix(), report.residual);
  if (report.bound_p < 1.0 - chain.tolerances().one_tol) {
    report.criterion = Criterion::SufficientBound;
    report.verdict = Verdict::Recurrent;
  } else {
    report.criterion = Criterion::ExactTailLimit;
    report.verdict = verdict_from(classify(std::abs(report.state_value), chain.tolerances()));
  }
  return report;
}

namespace {

struct Transport {
  std::vector<Matrix> b;  // b[m - 1] = P^{m-1}(T(f))
  double collapse = 0.0;
};

Transport transport(const TreeChain& chain, const Projection& f, std::size_t m_max) {
  Transport out;
  Matrix b = chain.forward_operator(f.matrix());
  for (std::size_t m = 1; m <= m_max; ++m) {
    if (m > 1) b = chain.backward_operator(b);
    out.b.push_back(b);
    if (m > 2) out.collapse = std::max(out.collapse, op_norm(b - out.b[1]));
  }
  return out;
}

void check_accessibility_inputs(const TreeChain& chain, const Projection& e,
                                const Projection& f, std::size_t m_max, const Ray& ray) {
  check_projection(chain, e);
  check_projection(chain, f);
  ray.check(chain.shape());
  if (m_max < 1) throw Error(ErrorCode::InvalidSpec, "m_max must be >= 1");
  const double z = chain.tolerances().zero_tol;
  if (op_norm(e.matrix()) <= z || op_norm(f.matrix()) <= z) {
    throw Error(ErrorCode::ZeroProjection, "accessibility needs nonzero projections");
  }
}

ProductObservable pair_observable(const Projection& e, const Projection& f, const Ray& ray,
                                  std::size_t m) {
  ProductObservable out;
  out.set(Vertex::root(), e.matrix());
  out.set(ray.vertex(m), f.matrix());
  return out;
}

}  // namespace

AccessibilityReport decide_E_accessibility(const TreeChain& chain, const Projection& e,
                                           const Projection& f, std::size_t m_max,
                                           const Ray& ray) {
  check_accessibility_inputs(chain, e, f, m_max, ray);
  AccessibilityReport report;
  report.kind = RecurrenceReport::Kind::Conditional;
  report.tolerances = chain.tolerances();
  const Transport tr = transport(chain, f, m_max);
  report.collapse_residual = tr.collapse;
  const int slot = ray.direction(0) - 1;
  for (std::size_t m = 1; m <= m_max; ++m) {
    const Matrix value = expectation_with_child(chain, e.matrix(), tr.b[m - 1], slot);
    const double r = op_norm(value);
    report.per_m.push_back({m, r, Complex(r)});
    report.max_magnitude = std::max(report.max_magnitude, r);
    const Matrix direct = chain.conditional_expectation_root(pair_observable(e, f, ray, m));
    report.definition_check = std::max(report.definition_check, op_norm(value - direct));
  }
  report.verdict = reach_from(classify(report.max_magnitude, chain.tolerances()));
  return report;
}

AccessibilityReport decide_phi_accessibility(const TreeChain& chain, const Projection& e,
                                             const Projection& f,
                                             const DensityOperator& omega, std::size_t m_max,
                                             const Ray& ray) {
  check_accessibility_inputs(chain, e, f, m_max, ray);
  chain.check_state(omega);
  AccessibilityReport report;
  report.kind = RecurrenceReport::Kind::State;
  report.tolerances = chain.tolerances();
  const Transport tr = transport(chain, f, m_max);
  report.collapse_residual = tr.collapse;
  const int slot = ray.direction(0) - 1;
  for (std::size_t m = 1; m <= m_max; ++m) {
    const Matrix value = expectation_with_child(chain, e.matrix(), tr.b[m - 1], slot);
    const Complex s = trace_product(omega.matrix(), value);
    report.per_m.push_back({m, std::abs(s), s});
    report.max_magnitude = std::max(report.max_magnitude, std::abs(s));
    const Complex direct = chain.qmc_state(omega, pair_observable(e, f, ray, m));
    report.definition_check = std::max(report.definition_check, std::abs(s - direct));
  }
  report.verdict = reach_from(classify(report.max_magnitude, chain.tolerances()));
  return report;
}

CompleteAccessibilityReport decide_E_complete_accessibility(const TreeChain& chain,
                                                            const Projection& e) {
  CompleteAccessibilityReport report;
  report.tail_limit = tail_limit(chain, e);
  report.magnitude = op_norm(report.tail_limit);
  // Completely accessible means the "never hit" event has vanishing weight.
  switch (classify(report.magnitude, chain.tolerances())) {
    case ZeroTest::Zero: report.verdict = Reachability::Accessible; break;
    case ZeroTest::Marginal: report.verdict = Reachability::Inconclusive; break;
    case ZeroTest::Nonzero: report.verdict = Reachability::NotAccessible; break;
  }
  return report;
}

CompleteAccessibilityReport decide_phi_complete_accessibility(const TreeChain& chain,
                                                              const Projection& e,
                                                              const DensityOperator& omega) {
  chain.check_state(omega);
  CompleteAccessibilityReport report;
  report.tail_limit = tail_limit(chain, e);
  report.magnitude = std::abs(trace_product(omega.matrix(), report.tail_limit));
  switch (classify(report.magnitude, chain.tolerances())) {
    case ZeroTest::Zero: report.verdict = Reachability::Accessible; break;
    case ZeroTest::Marginal: report.verdict = Reachability::Inconclusive; break;
    case ZeroTest::Nonzero: report.verdict = Reachability::NotAccessible; break;
  }
  return report;
}

}  // namespace qmctree
