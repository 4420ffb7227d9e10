// Command-line front end: walk validation, evolution, path distributions,
// sampling, recurrence and accessibility reports.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "qmctree/io.hpp"
#include "qmctree/models.hpp"
#include "qmctree/oracle.hpp"
#include "qmctree/recurrence.hpp"

namespace fs = std::filesystem;
using namespace qmctree;
using io::json;

namespace {

struct Options {
  std::string config;
  std::string out = ".";
  std::string ray;
  std::size_t steps = 10;
  std::size_t length = 4;
  std::uint64_t count = 100000;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string projection;
  std::string e_spec;
  std::string f_spec;
  std::size_t max_m = 8;
};

/// Raised when a command's own assertions fail (paper-examples).
struct AssertionFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

io::RunConfig load_config(const Options& opt) {
  if (opt.config.empty()) throw Error(ErrorCode::Schema, "--config is required");
  std::ifstream in(opt.config);
  if (!in) throw Error(ErrorCode::Schema, "cannot read config " + opt.config);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Schema, std::string("config is not JSON: ") + e.what());
  }
  io::RunConfig config = io::config_from_json(doc);
  config.tolerances = io::apply_environment(config.tolerances);
  return config;
}

/// "2,1:1" is the prefix (2, 1) followed by 1 repeated; "1" alone is periodic.
Ray parse_ray(const std::string& text) {
  if (text.empty()) return Ray::canonical();
  auto parse_list = [](const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      try {
        out.push_back(std::stoi(item));
      } catch (const std::exception&) {
        throw Error(ErrorCode::Schema, "--ray expects comma-separated branch indices");
      }
    }
    return out;
  };
  const auto colon = text.find(':');
  if (colon == std::string::npos) return Ray({}, parse_list(text));
  return Ray(parse_list(text.substr(0, colon)), parse_list(text.substr(colon + 1)));
}

/// A named projection from the config or an inline JSON specification.
Projection resolve_projection(const io::RunConfig& config, const std::string& spec) {
  if (spec.empty()) throw Error(ErrorCode::Schema, "missing projection specification");
  const auto named = config.projections.find(spec);
  if (named != config.projections.end()) return io::projection_from_json(named->second, config.walk);
  json doc;
  try {
    doc = json::parse(spec);
  } catch (const json::parse_error&) {
    throw Error(ErrorCode::Schema, "projection '" + spec + "' is neither a name nor JSON");
  }
  return io::projection_from_json(doc, config.walk);
}

fs::path output_dir(const Options& opt) {
  fs::path dir(opt.out);
  fs::create_directories(dir);
  return dir;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  out << doc.dump(2) << '\n';
}

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path);
  out << std::setprecision(17);
  return out;
}

int run_validate(const Options& opt) {
  const io::RunConfig config = load_config(opt);
  const ValidationReport report = validate(config.walk, config.tolerances);
  write_json(output_dir(opt) / "validate.json", io::to_json(report));
  if (!report.passed()) {
    std::ostringstream msg;
    for (const auto& f : report.failures) msg << f << "; ";
    throw Error(ErrorCode::InvalidSpec, msg.str());
  }
  return 0;
}

int run_step(const Options& opt) {
  const io::RunConfig config = load_config(opt);
  const WalkSpec& walk = config.walk;
  std::ofstream csv = open_csv(output_dir(opt) / "step.csv");
  csv << "step,label,trace,min_eigenvalue\n";
  std::vector<Matrix> blocks = walk.initial_blocks;
  for (std::size_t s = 0; s <= opt.steps; ++s) {
    if (s > 0) blocks = channel_step(walk, blocks);
    for (std::size_t i = 0; i < blocks.size(); ++i) {
      csv << s << ',' << walk.labels[i] << ',' << blocks[i].trace().real() << ','
          << min_eigenvalue(blocks[i]) << '\n';
    }
  }
  return 0;
}

void require_valid(const io::RunConfig& config) {
  const ValidationReport report = validate(config.walk, config.tolerances);
  if (!report.passed()) throw Error(ErrorCode::InvalidSpec, report.failures.front());
}

int run_pathdist(const Options& opt) {
  const io::RunConfig config = load_config(opt);
  require_valid(config);
  const auto table = oracle::enumerate_path_distribution(config.walk, opt.length, config.tolerances);
  std::ofstream csv = open_csv(output_dir(opt) / "pathdist.csv");
  csv << "path,probability\n";
  const std::size_t n = config.walk.num_labels();
  for (std::size_t code = 0; code < table.size(); ++code) {
    csv << format_path(config.walk, decode_path(code, n, opt.length)) << ',' << table[code] << '\n';
  }
  return 0;
}

int run_sample(const Options& opt) {
  const io::RunConfig config = load_config(opt);
  require_valid(config);
  const auto dist = sample_trajectories(config.walk, opt.length, opt.count, opt.seed,
                                        config.tolerances, opt.threads);
  const auto exact = oracle::enumerate_path_distribution(config.walk, opt.length, config.tolerances);
  const fs::path dir = output_dir(opt);
  std::ofstream csv = open_csv(dir / "sample.csv");
  csv << "path,probability,count\n";
  const std::size_t n = config.walk.num_labels();
  for (std::size_t code = 0; code < dist.counts.size(); ++code) {
    csv << format_path(config.walk, decode_path(code, n, opt.length)) << ','
        << dist.frequency(code) << ',' << dist.counts[code] << '\n';
  }
  write_json(dir / "sample_summary.json", {{"length", opt.length},
                                           {"count", opt.count},
                                           {"seed", opt.seed},
                                           {"total_variation", total_variation(dist, exact)}});
  return 0;
}

int run_recurrence(const Options& opt) {
  const io::RunConfig config = load_config(opt);
  const TreeChain chain(config.walk, config.k, config.tolerances);
  const Projection e = resolve_projection(config, opt.projection);
  const Ray ray = parse_ray(opt.ray);
  ray.check(chain.shape());
  json doc = {{"E", io::to_json(decide_E_recurrence(chain, e, ray))},
              {"complete_E", io::to_json(decide_E_complete_accessibility(chain, e))}};
  if (config.omega0) {
    const auto omega = DensityOperator::from_matrix(*config.omega0, config.tolerances.psd_tol);
    doc["phi"] = io::to_json(decide_phi_recurrence(chain, e, omega, ray));
    doc["complete_phi"] = io::to_json(decide_phi_complete_accessibility(chain, e, omega));
  }
  write_json(output_dir(opt) / "recurrence.json", doc);
  return 0;
}

int run_accessibility(const Options& opt) {
  const io::RunConfig config = load_config(opt);
  const TreeChain chain(config.walk, config.k, config.tolerances);
  const Projection e = resolve_projection(config, opt.e_spec);
  const Projection f = resolve_projection(config, opt.f_spec);
  const Ray ray = parse_ray(opt.ray);
  json doc = {{"E", io::to_json(decide_E_accessibility(chain, e, f, opt.max_m, ray))}};
  if (config.omega0) {
    const auto omega = DensityOperator::from_matrix(*config.omega0, config.tolerances.psd_tol);
    doc["phi"] = io::to_json(decide_phi_accessibility(chain, e, f, omega, opt.max_m, ray));
  }
  write_json(output_dir(opt) / "accessibility.json", doc);
  return 0;
}

Vector unit2(Complex x, Complex y) {
  Vector v(2);
  v << x, y;
  return v;
}

int run_paper_examples(const Options& opt) {
  json doc = json::array();
  bool all_pass = true;
  auto record = [&](const std::string& name, bool pass, json details) {
    details["example"] = name;
    details["pass"] = pass;
    all_pass = all_pass && pass;
    std::cout << (pass ? "PASS " : "FAIL ") << name << '\n';
    doc.push_back(std::move(details));
  };

  // e(eps, z, xi)^perp is E-recurrent whenever eps < 1.
  {
    const TreeChain chain(models::two_label_walk({0.6, 0.8, 0.8, 0.6}), 2);
    bool pass = true;
    json cases = json::array();
    for (double eps : {0.0, 0.25, 0.5, 0.9}) {
      const Projection e = models::rank1_site_projection(eps, 1.0, unit2(1, 0)).complement();
      const RecurrenceReport r = decide_E_recurrence(chain, e);
      pass = pass && r.verdict == Verdict::Recurrent;
      cases.push_back({{"eps", eps}, {"report", io::to_json(r)}});
    }
    record("recurrent for eps < 1", pass, {{"cases", cases}});
  }

  // eps = |a| = |xi_1| = 1: e = e(1, z, xi)^perp is not E-recurrent.
  {
    const TreeChain chain(models::two_label_walk({1.0, 0.6, 0.0, 0.8}), 2);
    const Matrix e1 = kron(models::upper_projector(), ket_bra(2, 0, 0));
    const Projection e = Projection::from_matrix(identity(4) - e1);
    const RecurrenceReport r = decide_E_recurrence(chain, e);
    const Matrix displayed = kron(Matrix(models::lower_projector() * 0.36), ket_bra(2, 0, 0)) +
                             kron(Matrix(models::lower_projector() * 0.64), ket_bra(2, 1, 1));
    record("not recurrent for eps = |a| = |xi_1| = 1", r.verdict == Verdict::NotRecurrent,
           {{"report", io::to_json(r)},
            {"residual_minus_displayed_norm", op_norm(r.residual - displayed)}});
  }

  // e_1 is E-accessible from 1 (x) |1><1| but not phi-accessible for omega
  // supported on the lower internal block; nothing is accessible from e(0, z, xi).
  {
    const TreeChain chain(models::two_label_walk({0.6, 0.8, 0.8, 0.6}), 2);
    const Projection e1 = Projection::from_matrix(kron(models::upper_projector(), ket_bra(2, 0, 0)));
    const Projection sigma = Projection::from_matrix(models::position_projector(2, 2, 0));
    const auto omega =
        DensityOperator::from_matrix(kron(models::lower_projector(), identity(2)) / 2.0);
    const AccessibilityReport acc = decide_E_accessibility(chain, e1, sigma);
    const AccessibilityReport phi = decide_phi_accessibility(chain, e1, sigma, omega);
    bool none_from_zero = true;
    const Projection zero_eps = models::rank1_site_projection(0.0, 1.0, unit2(0.6, 0.8));
    for (const Projection& target : {e1, sigma, Projection::from_matrix(identity(4))}) {
      none_from_zero = none_from_zero && decide_E_accessibility(chain, target, zero_eps).verdict ==
                                             Reachability::NotAccessible;
    }
    record("accessibility of e_1 from 1 (x) |1><1|",
           acc.verdict == Reachability::Accessible &&
               phi.verdict == Reachability::NotAccessible && none_from_zero,
           {{"E", io::to_json(acc)}, {"phi", io::to_json(phi)},
            {"nothing_accessible_from_eps_zero", none_from_zero}});
  }

  write_json(output_dir(opt) / "paper_examples.json", doc);
  if (!all_pass) throw AssertionFailure("a worked-example verdict did not match");
  return 0;
}

void report_error(const std::string& code, const std::string& message) {
  std::cerr << json{{"error", code}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum Markov chains on Cayley trees built from open quantum random walks"};
  app.require_subcommand(1);
  Options opt;

  auto common = [&](CLI::App* cmd, bool needs_config) {
    auto* c = cmd->add_option("--config", opt.config, "walk/config JSON document");
    if (needs_config) c->required();
    cmd->add_option("--out", opt.out, "directory for report files");
    cmd->add_option("--ray", opt.ray, "ray as prefix:period branch lists, e.g. 2,1:1");
  };

  auto* validate_cmd = app.add_subcommand("validate", "check the walk specification");
  common(validate_cmd, true);
  auto* step_cmd = app.add_subcommand("step", "iterate the channel, per-label traces to CSV");
  common(step_cmd, true);
  step_cmd->add_option("--n", opt.steps, "number of steps");
  auto* path_cmd = app.add_subcommand("pathdist", "exact path distribution to CSV");
  common(path_cmd, true);
  path_cmd->add_option("--len", opt.length, "number of jumps");
  auto* sample_cmd = app.add_subcommand("sample", "Monte-Carlo path distribution");
  common(sample_cmd, true);
  sample_cmd->add_option("--len", opt.length, "number of jumps");
  sample_cmd->add_option("--count", opt.count, "number of trajectories")->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", opt.seed, "RNG seed");
  sample_cmd->add_option("--threads", opt.threads, "worker threads (0 = hardware)");
  auto* rec_cmd = app.add_subcommand("recurrence", "E- and phi-recurrence report");
  common(rec_cmd, true);
  rec_cmd->add_option("--projection", opt.projection, "projection name or JSON spec")->required();
  auto* acc_cmd = app.add_subcommand("accessibility", "accessibility of e from f");
  common(acc_cmd, true);
  acc_cmd->add_option("--e", opt.e_spec, "target projection name or JSON spec")->required();
  acc_cmd->add_option("--f", opt.f_spec, "source projection name or JSON spec")->required();
  acc_cmd->add_option("--max-m", opt.max_m, "largest transport depth");
  auto* paper_cmd = app.add_subcommand("paper-examples", "run the worked two-label examples");
  common(paper_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error("Usage", e.what());
    return 2;
  }

  try {
    if (*validate_cmd) return run_validate(opt);
    if (*step_cmd) return run_step(opt);
    if (*path_cmd) return run_pathdist(opt);
    if (*sample_cmd) return run_sample(opt);
    if (*rec_cmd) return run_recurrence(opt);
    if (*acc_cmd) return run_accessibility(opt);
    if (*paper_cmd) return run_paper_examples(opt);
  } catch (const Error& e) {
    report_error(std::string(to_string(e.code())), e.what());
    return 1;
  } catch (const AssertionFailure& e) {
    report_error("AssertionFailed", e.what());
    return 1;
  } catch (const std::exception& e) {
    report_error("Internal", e.what());
    return 1;
  }
  return 0;
}
