#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "qmctree/opalg.hpp"
#include "qmctree/qmc.hpp"
#include "qmctree/tolerances.hpp"
#include "qmctree/treegeo.hpp"

namespace qmctree {

// Hitting events of a site projection e along a ray r = (u_0 = o, u_1, ...):
//   tau_n      = e^perp at u_0..u_{n-1}, e at u_n        (first hit at step n)
//   tail_n     = e^perp at u_0..u_n                      (no hit up to step n)
// and sum_{n <= N} tau_n + tail_N = 1.

ProductObservable stopping_time(const Projection& e, const Ray& ray, std::size_t n);
ProductObservable stopping_tail(const Projection& e, const Ray& ray, std::size_t n);

/// sum_{n <= N} tau_n + tail_N as an explicit observable sum.
ObservableSum hitting_decomposition(const Projection& e, const Ray& ray, std::size_t n_max);

/// Closed form of E_o](tail_n) = sum_j M_j(e^perp) psi_j(e^perp)^n. Depends on n
/// only, not on the ray.
Matrix tail_conditional(const TreeChain& chain, const Projection& e, std::size_t n);

/// lim_n E_o](tail_n): only labels with psi_j(e^perp) == 1 (within one_tol)
/// survive.
Matrix tail_limit(const TreeChain& chain, const Projection& e);

enum class Verdict { Recurrent, NotRecurrent, Inconclusive };
enum class Criterion { SufficientBound, ExactTailLimit };
enum class Reachability { Accessible, NotAccessible, Inconclusive };
enum class ZeroTest { Zero, Marginal, Nonzero };

std::string_view to_string(Verdict v) noexcept;
std::string_view to_string(Criterion c) noexcept;
std::string_view to_string(Reachability r) noexcept;

/// value <= zero_tol is Zero; within a factor kMarginFactor above it Marginal.
ZeroTest classify(double value, const Tolerances& tol) noexcept;

struct RecurrenceReport {
  enum class Kind { Conditional, State };

  Kind kind = Kind::Conditional;
  Verdict verdict = Verdict::Inconclusive;
  Criterion criterion = Criterion::ExactTailLimit;
  double bound_p = 0.0;               ///< max_j psi_j(e^perp)
  std::vector<double> psi_complement; ///< psi_j(e^perp) per label
  Matrix tail_limit;                  ///< lim E_o](tail_n)
  Matrix residual;                    ///< E(e (x) tail_limit; 1, ..., 1)
  double residual_norm = 0.0;
  Complex state_value{0.0};           ///< Tr(omega residual), State kind only
  /// max deviation between the closed-form tail and E_o] evaluated on the
  /// explicit stopping-time observables along the requested ray
  double ray_check = 0.0;
  Tolerances tolerances;
};

/// Decides E-recurrence: recurrent iff E(e (x) lim E_o](tail)) = 0. When
/// max_j psi_j(e^perp) < 1 the sufficient bound already decides it.
/// Throws DegenerateProjection if Tr(T(e)) vanishes.
RecurrenceReport decide_E_recurrence(const TreeChain& chain, const Projection& e,
                                     const Ray& ray = Ray::canonical());

/// Decides phi-recurrence for the initial state omega: recurrent iff
/// Tr(omega E(e (x) lim E_o](tail))) = 0. Throws DegenerateProjection when
/// phi(e at the root) vanishes.
RecurrenceReport decide_phi_recurrence(const TreeChain& chain, const Projection& e,
                                       const DensityOperator& omega,
                                       const Ray& ray = Ray::canonical());

struct AccessibilityReport {
  struct Step {
    std::size_t m = 0;
    double magnitude = 0.0;  ///< ||E(e (x) b_m)|| or |phi value|
    Complex value{0.0};      ///< state value (State kind only)
  };
  RecurrenceReport::Kind kind = RecurrenceReport::Kind::Conditional;
  Reachability verdict = Reachability::Inconclusive;
  std::vector<Step> per_m;
  double max_magnitude = 0.0;
  /// max_{m >= 2} ||b_m - b_2||; zero because the backward operator is idempotent
  double collapse_residual = 0.0;
  /// max deviation from E_o] / phi evaluated on the observable e at the root
  /// and f at the ray vertex x_m
  double definition_check = 0.0;
  Tolerances tolerances;
};

/// For m = 1..m_max, b_m = P^{m-1}(T(f)) and r_m = ||E(e (x) b_m; 1, ..., 1)||.
/// e is reached from f when some r_m is nonzero. Throws ZeroProjection.
AccessibilityReport decide_E_accessibility(const TreeChain& chain, const Projection& e,
                                           const Projection& f, std::size_t m_max = 8,
                                           const Ray& ray = Ray::canonical());

/// Same with s_m = Tr(omega E(e (x) b_m; 1, ..., 1)).
AccessibilityReport decide_phi_accessibility(const TreeChain& chain, const Projection& e,
                                             const Projection& f,
                                             const DensityOperator& omega,
                                             std::size_t m_max = 8,
                                             const Ray& ray = Ray::canonical());

struct CompleteAccessibilityReport {
  Reachability verdict = Reachability::Inconclusive;
  Matrix tail_limit;
  double magnitude = 0.0;  ///< ||tail_limit|| or |Tr(omega tail_limit)|
};

/// e is completely accessible when lim E_o](tail_n) = 0.
CompleteAccessibilityReport decide_E_complete_accessibility(const TreeChain& chain,
                                                            const Projection& e);
CompleteAccessibilityReport decide_phi_complete_accessibility(const TreeChain& chain,
                                                              const Projection& e,
                                                              const DensityOperator& omega);

}  // namespace qmctree
