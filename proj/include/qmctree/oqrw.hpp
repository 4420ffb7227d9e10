#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qmctree/opalg.hpp"
#include "qmctree/tolerances.hpp"

namespace qmctree {

/// An open quantum random walk on a finite label set.
///
/// Positions live in K = C^|labels| with basis |i>, internal degrees of
/// freedom in H = C^dim_internal. The walker jumping from label j to label i
/// is acted on by B_j^i (stored as jump(j, i)). Site operators act on H (x) K
/// with the internal factor first, so the index of (h, i) is h * |labels| + i.
struct WalkSpec {
  std::vector<std::string> labels;
  std::size_t dim_internal = 0;
  /// transitions[from * |labels| + to] = B_from^to
  std::vector<Matrix> transitions;
  /// initial_blocks[j] = rho_j
  std::vector<Matrix> initial_blocks;

  /// Zero transitions and zero blocks of the right shapes.
  static WalkSpec zeros(std::vector<std::string> labels, std::size_t dim_internal);

  std::size_t num_labels() const noexcept { return labels.size(); }
  std::size_t site_dim() const noexcept { return dim_internal * labels.size(); }

  const Matrix& jump(std::size_t from, std::size_t to) const;
  Matrix& jump(std::size_t from, std::size_t to);

  /// Throws UnknownLabel.
  std::size_t label_index(std::string_view label) const;

  /// Throws DimensionMismatch/InvalidSpec when matrix shapes are inconsistent.
  void check_shapes() const;
};

struct ValidationReport {
  /// ||sum_i B_j^i* B_j^i - 1|| per source label j
  std::vector<double> kraus_residuals;
  /// max(0, -min eigenvalue(rho_j)) plus hermitian residual, per j
  std::vector<double> psd_residuals;
  std::vector<double> block_traces;
  /// |sum_j Tr(rho_j) - 1|
  double total_trace_residual = 0.0;
  bool unit_trace_required = true;
  std::vector<std::string> failures;

  bool passed() const noexcept { return failures.empty(); }
};

/// Checks the completeness relation, positivity and nonvanishing of every
/// initial block and (optionally) unit total trace. Never throws for
/// numerically invalid specs; shape errors are reported as failures too.
ValidationReport validate(const WalkSpec& spec, const Tolerances& tol = {},
                          bool require_unit_trace = true);

/// M_j^i = B_j^i (x) |i><j| on H (x) K.
struct LiftedJump {
  std::size_t from;
  std::size_t to;
  Matrix op;
};

LiftedJump lift_jump(const WalkSpec& spec, std::size_t from, std::size_t to);
std::vector<LiftedJump> lifted_jumps(const WalkSpec& spec);

/// sum_i rho_i (x) |i><i|
Matrix assemble_blocks(const WalkSpec& spec, std::span<const Matrix> blocks);

/// Full map rho -> sum_{i,j} M_j^i rho M_j^i* on H (x) K.
Matrix dense_channel(const WalkSpec& spec, const Matrix& rho);

/// One walk step on position-diagonal states: block i of the output is
/// sum_j B_j^i rho_j B_j^i*.
std::vector<Matrix> channel_step(const WalkSpec& spec, std::span<const Matrix> blocks);

/// P(i_0, ..., i_n) = Tr(B_{i_{n-1}}^{i_n} ... B_{i_0}^{i_1} rho_{i_0} ... *).
double path_probability(const WalkSpec& spec, std::span<const std::size_t> path);

/// Paths of a fixed length are indexed by their base-|labels| code, i_0 most
/// significant.
std::size_t encode_path(std::span<const std::size_t> path, std::size_t num_labels);
std::vector<std::size_t> decode_path(std::size_t code, std::size_t num_labels,
                                     std::size_t length);
std::string format_path(const WalkSpec& spec, std::span<const std::size_t> path);

struct EmpiricalDistribution {
  std::size_t num_labels = 0;
  std::size_t length = 0;  ///< number of jumps; paths have length + 1 labels
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  double frequency(std::size_t code) const {
    return total ? static_cast<double>(counts[code]) / static_cast<double>(total) : 0.0;
  }
};

/// Monte-Carlo unraveling of the walk. Each trajectory draws from its own
/// SplitMix64 stream keyed by (seed, trajectory index), so results do not
/// depend on the number of worker threads.
EmpiricalDistribution sample_trajectories(const WalkSpec& spec, std::size_t length,
                                          std::uint64_t count, std::uint64_t seed,
                                          const Tolerances& tol = {},
                                          unsigned threads = 0);

/// 0.5 * sum |p_hat - p| over all paths.
double total_variation(const EmpiricalDistribution& empirical,
                       std::span<const double> exact);

/// SplitMix64: small counter-based generator used for per-trajectory streams.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace qmctree
