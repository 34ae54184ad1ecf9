// oseledets-lab: command-line front end.
//
// Exit codes: 0 success or pass, 1 input error, 2 not found, 3 verification
// failure or numerical failure.

#include "oslab/serialize.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

using namespace oslab;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNotFound = 2;
constexpr int kExitFail = 3;

struct Options {
  std::string config_path;
  std::string output_path;
  std::string format;
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  std::string point;
  bool audit = false;
};

Point parse_point(const std::string& text, int d) {
  std::vector<double> xs;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw InputError("--point: cannot parse '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos) throw InputError("--point: cannot parse '" + item + "'");
    xs.push_back(v);
  }
  if (static_cast<int>(xs.size()) != d) {
    throw InputError("--point: expected " + std::to_string(d) + " coordinates, got " + std::to_string(xs.size()));
  }
  return Eigen::Map<const Vector>(xs.data(), d);
}

class Emitter {
 public:
  explicit Emitter(const RunConfig& cfg) : cfg_(cfg) {}

  void json(const Json& doc) {
    write([&](std::ostream& out) { out << doc.dump(2) << '\n'; });
  }
  template <typename Fn>
  void write(Fn&& fn) {
    if (cfg_.output_path.empty()) {
      fn(std::cout);
      std::cout.flush();
      return;
    }
    std::ofstream out(cfg_.output_path, std::ios::binary);
    if (!out) throw InputError("cannot open output file '" + cfg_.output_path + "'");
    fn(out);
    if (!out) throw InputError("failed writing '" + cfg_.output_path + "'");
  }
  bool csv() const { return cfg_.format == OutputFormat::csv; }

 private:
  const RunConfig& cfg_;
};

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return kExitOk;
    case Verdict::not_found:
      return kExitNotFound;
    case Verdict::fail:
      return kExitFail;
  }
  return kExitFail;
}

int cmd_exponents(const System& sys, const RunConfig& cfg, Emitter& out) {
  const Point x0 = seeded_start(sys, cfg.verify.seed);
  const ExponentEstimate e = lyapunov_qr(sys, x0, cfg.verify.orbit_horizon, cfg.renorm_period);
  if (out.csv()) {
    out.write([&](std::ostream& o) { write_exponents_csv(o, e); });
  } else {
    out.json(exponents_document(e, sys.spec()));
  }
  return kExitOk;
}

int cmd_splitting(const System& sys, const RunConfig& cfg, const Point& x, Emitter& out) {
  SplittingOptions so;
  so.gap = cfg.verify.block_gap;
  const SplittingSample s = estimate_splitting(sys, x, cfg.verify.splitting_horizon, so);
  if (out.csv()) {
    out.write([&](std::ostream& o) { write_splitting_csv(o, s); });
  } else {
    out.json(splitting_document(s, sys.spec()));
  }
  return kExitOk;
}

int cmd_periodic(const System& sys, const RunConfig& cfg, Emitter& out) {
  const Point x0 = seeded_start(sys, cfg.verify.seed);
  const std::vector<PeriodicOrbit> orbits = find_periodic_orbits(sys, x0, cfg.verify.search, cfg.verify.threads);
  if (out.csv()) {
    out.write([&](std::ostream& o) { write_periodic_csv(o, orbits); });
  } else {
    out.json(periodic_document(orbits, sys.spec()));
  }
  return orbits.empty() ? kExitNotFound : kExitOk;
}

int cmd_pesin(const System& sys, const RunConfig& cfg, const Point& x, bool audit, Emitter& out) {
  SplittingOptions so;
  so.gap = cfg.verify.block_gap;
  const SplittingSample s = estimate_splitting(sys, x, cfg.verify.splitting_horizon, so);
  const auto [stable, unstable] = stable_unstable(s, cfg.verify.block_gap);
  PesinOptions po;
  po.audit = audit;
  const PesinReport r = pesin_check(sys, s.base, stable, unstable, cfg.verify.pesin, po);
  if (out.csv()) {
    out.write([&](std::ostream& o) { write_pesin_csv(o, r); });
  } else {
    out.json(pesin_document(r, s.base, sys.spec()));
  }
  return r.pass ? kExitOk : kExitFail;
}

int cmd_verify(const System& sys, const RunConfig& cfg, Emitter& out) {
  const ApproximationReport r = run_full_verification(sys, cfg.verify);
  if (out.csv()) {
    out.write([&](std::ostream& o) { write_coverage_csv(o, r.splitting); });
  } else {
    out.json(verify_document(r));
  }
  for (const auto& e : r.errors) std::cerr << "oseledets-lab: stage failure: " << e << '\n';
  return exit_code(r.overall());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Oseledets splittings, Pesin blocks and periodic-orbit approximation"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--config", opt.config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--output", opt.output_path, "Output path (default: standard output)");
  app.add_option("--format", opt.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", opt.seed, "Seed, overrides the config");

  auto* exponents = app.add_subcommand("exponents", "Lyapunov spectrum by the QR method");
  auto* splitting = app.add_subcommand("splitting", "Oseledets splitting at a point");
  splitting->add_option("--point", opt.point, "Comma-separated coordinates")->required();
  auto* periodic = app.add_subcommand("periodic", "Hyperbolic periodic orbits up to max_period");
  auto* pesin = app.add_subcommand("pesin", "Pesin block check at a point");
  pesin->add_option("--point", opt.point, "Comma-separated coordinates")->required();
  pesin->add_flag("--audit", opt.audit, "Dump margins for every (m, n)");
  auto* verify = app.add_subcommand("verify", "End-to-end verification of the approximation theorem");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  RunConfig cfg;
  try {
    cfg = load_config(opt.config_path);
    if (!opt.output_path.empty()) cfg.output_path = opt.output_path;
    if (!opt.format.empty()) cfg.format = opt.format == "csv" ? OutputFormat::csv : OutputFormat::json;
    if (opt.threads) cfg.verify.threads = *opt.threads;
    if (opt.seed) cfg.verify.seed = *opt.seed;
  } catch (const Error& e) {
    std::cerr << "oseledets-lab: " << opt.config_path << ": " << e.what() << '\n';
    return kExitInput;
  }

  std::optional<System> sys;
  try {
    sys.emplace(cfg.system);
  } catch (const Error& e) {
    std::cerr << "oseledets-lab: invalid system: " << e.what() << '\n';
    return kExitInput;
  }

  Emitter out(cfg);
  try {
    if (*exponents) return cmd_exponents(*sys, cfg, out);
    if (*periodic) return cmd_periodic(*sys, cfg, out);
    if (*verify) return cmd_verify(*sys, cfg, out);
    const Point x = parse_point(opt.point, sys->dim());
    if (*splitting) return cmd_splitting(*sys, cfg, sys->reduce(x), out);
    if (*pesin) return cmd_pesin(*sys, cfg, sys->reduce(x), opt.audit, out);
  } catch (const InputError& e) {
    std::cerr << "oseledets-lab: " << e.what() << '\n';
    return kExitInput;
  } catch (const Error& e) {
    std::cerr << "oseledets-lab: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitInput;
}
