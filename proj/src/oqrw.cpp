#include "qmctree/oqrw.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "qmctree/error.hpp"

namespace qmctree {

WalkSpec WalkSpec::zeros(std::vector<std::string> labels, std::size_t dim_internal) {
  WalkSpec spec;
  spec.labels = std::move(labels);
  spec.dim_internal = dim_internal;
  const auto d = static_cast<Eigen::Index>(dim_internal);
  const std::size_t n = spec.labels.size();
  spec.transitions.assign(n * n, Matrix::Zero(d, d));
  spec.initial_blocks.assign(n, Matrix::Zero(d, d));
  return spec;
}

const Matrix& WalkSpec::jump(std::size_t from, std::size_t to) const {
  return transitions.at(from * labels.size() + to);
}

Matrix& WalkSpec::jump(std::size_t from, std::size_t to) {
  return transitions.at(from * labels.size() + to);
}

std::size_t WalkSpec::label_index(std::string_view label) const {
  const auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) {
    throw Error(ErrorCode::UnknownLabel, "unknown label '" + std::string(label) + "'");
  }
  return static_cast<std::size_t>(it - labels.begin());
}

void WalkSpec::check_shapes() const {
  if (labels.empty()) throw Error(ErrorCode::InvalidSpec, "label set is empty");
  if (dim_internal == 0) throw Error(ErrorCode::InvalidSpec, "dim_internal must be >= 1");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      if (labels[i] == labels[j]) {
        throw Error(ErrorCode::InvalidSpec, "duplicate label '" + labels[i] + "'");
      }
    }
  }
  const std::size_t n = labels.size();
  if (transitions.size() != n * n) {
    throw Error(ErrorCode::DimensionMismatch, "expected |labels|^2 transition operators");
  }
  if (initial_blocks.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "expected |labels| initial blocks");
  }
  const auto d = static_cast<Eigen::Index>(dim_internal);
  for (const auto& b : transitions) {
    if (b.rows() != d || b.cols() != d) {
      throw Error(ErrorCode::DimensionMismatch, "transition operator has wrong shape");
    }
  }
  for (const auto& r : initial_blocks) {
    if (r.rows() != d || r.cols() != d) {
      throw Error(ErrorCode::DimensionMismatch, "initial block has wrong shape");
    }
  }
}

ValidationReport validate(const WalkSpec& spec, const Tolerances& tol,
                          bool require_unit_trace) {
  ValidationReport report;
  report.unit_trace_required = require_unit_trace;
  try {
    spec.check_shapes();
  } catch (const Error& e) {
    report.failures.emplace_back(e.what());
    return report;
  }

  const std::size_t n = spec.num_labels();
  const Matrix id = identity(spec.dim_internal);
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    Matrix sum = Matrix::Zero(id.rows(), id.cols());
    for (std::size_t i = 0; i < n; ++i) sum += spec.jump(j, i).adjoint() * spec.jump(j, i);
    const double res = op_norm(sum - id);
    report.kraus_residuals.push_back(res);
    if (res > tol.zero_tol) {
      std::ostringstream msg;
      msg << "completeness fails at label " << spec.labels[j] << ": residual " << res;
      report.failures.push_back(msg.str());
    }

    const Matrix& rho = spec.initial_blocks[j];
    const double psd = std::max(0.0, -min_eigenvalue(rho)) + hermitian_residual(rho);
    report.psd_residuals.push_back(psd);
    if (psd > tol.psd_tol) {
      std::ostringstream msg;
      msg << "initial block " << spec.labels[j] << " is not PSD: residual " << psd;
      report.failures.push_back(msg.str());
    }
    const double tr = rho.trace().real();
    report.block_traces.push_back(tr);
    total += tr;
    if (tr <= tol.trace_floor) {
      report.failures.push_back("initial block " + spec.labels[j] + " vanishes");
    }
  }
  report.total_trace_residual = std::abs(total - 1.0);
  if (require_unit_trace && report.total_trace_residual > tol.zero_tol) {
    std::ostringstream msg;
    msg << "initial blocks have total trace " << total << ", expected 1";
    report.failures.push_back(msg.str());
  }
  return report;
}

LiftedJump lift_jump(const WalkSpec& spec, std::size_t from, std::size_t to) {
  return {from, to, kron(spec.jump(from, to), ket_bra(spec.num_labels(), to, from))};
}

std::vector<LiftedJump> lifted_jumps(const WalkSpec& spec) {
  std::vector<LiftedJump> out;
  const std::size_t n = spec.num_labels();
  out.reserve(n * n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(lift_jump(spec, j, i));
  }
  return out;
}

Matrix assemble_blocks(const WalkSpec& spec, std::span<const Matrix> blocks) {
  if (blocks.size() != spec.num_labels()) {
    throw Error(ErrorCode::DimensionMismatch, "expected one block per label");
  }
  const auto dim = static_cast<Eigen::Index>(spec.site_dim());
  Matrix out = Matrix::Zero(dim, dim);
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    out += kron(blocks[i], ket_bra(spec.num_labels(), i, i));
  }
  return out;
}

Matrix dense_channel(const WalkSpec& spec, const Matrix& rho) {
  const auto dim = static_cast<Eigen::Index>(spec.site_dim());
  if (rho.rows() != dim || rho.cols() != dim) {
    throw Error(ErrorCode::DimensionMismatch, "dense_channel: wrong operator size");
  }
  Matrix out = Matrix::Zero(dim, dim);
  for (const auto& m : lifted_jumps(spec)) out += m.op * rho * m.op.adjoint();
  return out;
}

std::vector<Matrix> channel_step(const WalkSpec& spec, std::span<const Matrix> blocks) {
  const std::size_t n = spec.num_labels();
  const auto d = static_cast<Eigen::Index>(spec.dim_internal);
  if (blocks.size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "expected one block per label");
  }
  for (const auto& b : blocks) {
    if (b.rows() != d || b.cols() != d) {
      throw Error(ErrorCode::DimensionMismatch, "block has wrong shape");
    }
  }
  std::vector<Matrix> out(n, Matrix::Zero(d, d));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Matrix& b = spec.jump(j, i);
      out[i] += b * blocks[j] * b.adjoint();
    }
  }
  return out;
}

double path_probability(const WalkSpec& spec, std::span<const std::size_t> path) {
  if (path.empty()) throw Error(ErrorCode::InvalidSpec, "path must be nonempty");
  const std::size_t n = spec.num_labels();
  for (std::size_t i : path) {
    if (i >= n) throw Error(ErrorCode::UnknownLabel, "path label index out of range");
  }
  Matrix sigma = spec.initial_blocks[path[0]];
  for (std::size_t m = 1; m < path.size(); ++m) {
    const Matrix& b = spec.jump(path[m - 1], path[m]);
    sigma = b * sigma * b.adjoint();
  }
  return sigma.trace().real();
}

std::size_t encode_path(std::span<const std::size_t> path, std::size_t num_labels) {
  std::size_t code = 0;
  for (std::size_t i : path) code = code * num_labels + i;
  return code;
}

std::vector<std::size_t> decode_path(std::size_t code, std::size_t num_labels,
                                     std::size_t length) {
  std::vector<std::size_t> path(length + 1);
  for (std::size_t m = path.size(); m-- > 0;) {
    path[m] = code % num_labels;
    code /= num_labels;
  }
  return path;
}

std::string format_path(const WalkSpec& spec, std::span<const std::size_t> path) {
  std::string out;
  for (std::size_t m = 0; m < path.size(); ++m) {
    if (m) out += '-';
    out += spec.labels.at(path[m]);
  }
  return out;
}

namespace {

std::size_t checked_table_size(std::size_t num_labels, std::size_t length,
                               std::size_t cap) {
  std::size_t size = 1;
  for (std::size_t m = 0; m <= length; ++m) {
    if (size > cap / num_labels) {
      throw Error(ErrorCode::SizeOverflow, "path table exceeds the enumeration cap");
    }
    size *= num_labels;
  }
  return size;
}

struct SamplerTables {
  std::vector<Matrix> effects;  // B_j^i* B_j^i, same indexing as transitions
  std::vector<double> initial_weights;
  std::vector<Matrix> initial_states;  // rho_j / Tr rho_j
};

void sample_range(const WalkSpec& spec, const SamplerTables& tables, std::size_t length,
                  std::uint64_t begin, std::uint64_t end, std::uint64_t seed,
                  const Tolerances& tol, std::vector<std::uint64_t>& counts) {
  const std::size_t n = spec.num_labels();
  const auto d = static_cast<Eigen::Index>(spec.dim_internal);
  Matrix sigma(d, d), tmp(d, d);
  std::vector<double> weights(n);
  std::vector<std::size_t> path(length + 1);

  auto pick = [&](SplitMix64& rng, std::span<const double> w) {
    double total = 0.0;
    for (double x : w) total += x;
    if (total <= tol.trace_floor) {
      throw Error(ErrorCode::ZeroWeightState, "trajectory weight underflow");
    }
    const double u = rng.uniform() * total;
    double acc = 0.0;
    std::size_t last = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (w[i] <= 0.0) continue;
      acc += w[i];
      last = i;
      if (u < acc) return i;
    }
    return last;
  };

  for (std::uint64_t t = begin; t < end; ++t) {
    // Stream key for trajectory t: t-th output of the seed stream.
    SplitMix64 rng(SplitMix64(seed + t * 0x9e3779b97f4a7c15ULL)());
    const std::size_t i0 = pick(rng, tables.initial_weights);
    path[0] = i0;
    sigma = tables.initial_states[i0];
    for (std::size_t m = 1; m <= length; ++m) {
      const std::size_t j = path[m - 1];
      for (std::size_t i = 0; i < n; ++i) {
        weights[i] = std::max(
            0.0, (tables.effects[j * n + i].cwiseProduct(sigma.transpose())).sum().real());
      }
      const std::size_t i = pick(rng, weights);
      const Matrix& b = spec.jump(j, i);
      tmp.noalias() = b * sigma;
      sigma.noalias() = tmp * b.adjoint();
      const double w = sigma.trace().real();
      if (w <= tol.trace_floor) {
        throw Error(ErrorCode::ZeroWeightState, "trajectory weight underflow");
      }
      sigma /= w;
      path[m] = i;
    }
    ++counts[encode_path(path, n)];
  }
}

}  // namespace

EmpiricalDistribution sample_trajectories(const WalkSpec& spec, std::size_t length,
                                          std::uint64_t count, std::uint64_t seed,
                                          const Tolerances& tol, unsigned threads) {
  if (count < 1) throw Error(ErrorCode::InvalidSpec, "trajectory count must be >= 1");
  spec.check_shapes();
  const std::size_t n = spec.num_labels();
  const std::size_t table = checked_table_size(n, length, tol.enumeration_cap);

  SamplerTables tables;
  tables.effects.reserve(n * n);
  for (const auto& b : spec.transitions) tables.effects.push_back(b.adjoint() * b);
  for (const auto& rho : spec.initial_blocks) {
    const double tr = rho.trace().real();
    tables.initial_weights.push_back(std::max(0.0, tr));
    tables.initial_states.push_back(tr > tol.trace_floor ? Matrix(rho / tr) : rho);
  }

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, count));

  std::vector<std::vector<std::uint64_t>> partial(threads, std::vector<std::uint64_t>(table, 0));
  if (threads == 1) {
    sample_range(spec, tables, length, 0, count, seed, tol, partial[0]);
  } else {
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(threads);
    const std::uint64_t chunk = (count + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
      const std::uint64_t begin = std::min<std::uint64_t>(count, w * chunk);
      const std::uint64_t end = std::min<std::uint64_t>(count, begin + chunk);
      workers.emplace_back([&, w, begin, end] {
        try {
          sample_range(spec, tables, length, begin, end, seed, tol, partial[w]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : workers) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  EmpiricalDistribution out;
  out.num_labels = n;
  out.length = length;
  out.counts.assign(table, 0);
  out.total = count;
  for (const auto& p : partial) {
    for (std::size_t c = 0; c < table; ++c) out.counts[c] += p[c];
  }
  return out;
}

double total_variation(const EmpiricalDistribution& empirical,
                       std::span<const double> exact) {
  if (exact.size() != empirical.counts.size()) {
    throw Error(ErrorCode::DimensionMismatch, "distribution tables differ in size");
  }
  double tv = 0.0;
  for (std::size_t c = 0; c < exact.size(); ++c) {
    tv += std::abs(empirical.frequency(c) - exact[c]);
  }
  return 0.5 * tv;
}

}  // namespace qmctree
