#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sbmm/counting.hpp"
#include "sbmm/cp.hpp"
#include "sbmm/experiment.hpp"
#include "sbmm/model.hpp"
#include "sbmm/pattern.hpp"

namespace sbmm {

namespace {

// Malformed or unreadable input; maps to exit status 1.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw io_error("cannot write '" + path + "'");
  out << text;
  if (!out) throw io_error("failed writing '" + path + "'");
}

bool looks_inline(const std::string& s) {
  const auto p = s.find_first_not_of(" \t\r\n");
  return p != std::string::npos && (s[p] == '{' || s[p] == '[');
}

// A JSON document given inline or as a file path.
nlohmann::json load_json(const std::string& arg) {
  const std::string text = looks_inline(arg) ? arg : read_file(arg);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw io_error("invalid JSON in '" + arg + "': " + e.what());
  }
}

PatternGraph load_pattern(const std::string& arg) {
  if (!looks_inline(arg) && std::filesystem::is_regular_file(arg)) return pattern_from_json(load_json(arg));
  return parse_pattern(arg);
}

SbmmSpec load_spec(const std::string& arg) { return spec_from_json(load_json(arg)); }

std::string rational_text(const Rational& r) { return to_string(r); }

std::string table1_csv() {
  std::ostringstream out;
  out << "graph,v,d,alpha,gamma,mu1_scaling_exponent,rate_exponent\n";
  struct Family {
    const char* name;
    PatternGraph (*make)(int);
  };
  const Family families[] = {
      {"G1", &PatternGraph::path},
      {"G2", &PatternGraph::cycle},
      {"G3", &PatternGraph::complete_minus_edge},
      {"G4", &PatternGraph::complete},
  };
  for (const auto& fam : families) {
    for (int v = 3; v <= 6; ++v) {
      const auto p = balancedness_profile(fam.make(v));
      const Rational d = p.density;
      const Rational alpha = *p.alpha;
      const Rational gamma = *p.gamma;
      // rate exponent of max{n^-1, min(n^{1-alpha/d}, n^{-gamma/d})}
      const Rational rate = std::max(Rational(-1), std::min(Rational(1) - alpha / d, -gamma / d));
      out << fam.name << ',' << v << ',' << rational_text(d) << ',' << rational_text(alpha) << ','
          << rational_text(gamma) << ',' << rational_text(-1 / d) << ',' << rational_text(rate) << '\n';
    }
  }
  return out.str();
}

nlohmann::ordered_json analyze_json(const PatternGraph& g) {
  nlohmann::ordered_json j;
  j["pattern"] = pattern_to_json(g);
  j["v"] = g.vertex_count();
  j["e"] = g.edge_count();
  j["f"] = g.pair_count();
  j["t"] = g.max_multiplicity();
  j["s"] = g.self_loop_count();
  j["automorphisms"] = automorphism_count(g);
  j["rho"] = rho(g);
  j["profile"] = profile_to_json(balancedness_profile(g));
  return j;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subgraph counts in stochastic block multigraph models"};
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "worker threads (results do not depend on it)")->check(CLI::PositiveNumber);

  std::string pattern_arg;
  std::string spec_arg;
  auto* analyze = app.add_subcommand("analyze", "balancedness profile of a pattern");
  analyze->add_option("pattern", pattern_arg, "shortcut, inline JSON or file")->required();

  std::string variant_arg;
  std::optional<double> c_override;
  std::optional<double> regime_lower;
  std::optional<double> regime_upper;
  double eps = 1e-10;
  auto* bound = app.add_subcommand("bound", "total-variation bound report");
  bound->add_option("--spec", spec_arg)->required();
  bound->add_option("--pattern", pattern_arg)->required();
  bound->add_option("--variant", variant_arg)->required();
  bound->add_option("--c-override", c_override);
  bound->add_option("--regime-lower", regime_lower);
  bound->add_option("--regime-upper", regime_upper);
  bound->add_option("--eps", eps);

  int kmax = 50;
  std::string csv_path;
  auto* lambda = app.add_subcommand("lambda", "compound Poisson parameters and pmf");
  lambda->add_option("--spec", spec_arg)->required();
  lambda->add_option("--pattern", pattern_arg)->required();
  lambda->add_option("--eps", eps);
  lambda->add_option("--kmax", kmax)->check(CLI::NonNegativeNumber);
  lambda->add_option("--csv", csv_path, "write the CP pmf as CSV here");

  std::uint64_t seed = 0;
  std::string out_path;
  auto* sample = app.add_subcommand("sample", "draw one graph as an edge list");
  sample->add_option("--spec", spec_arg)->required();
  sample->add_option("--seed", seed);
  sample->add_option("--out", out_path);

  std::string graph_path;
  bool bruteforce = false;
  auto* count = app.add_subcommand("count", "copies of a pattern in an edge-list graph");
  count->add_option("--graph", graph_path)->required();
  count->add_option("--pattern", pattern_arg)->required();
  count->add_flag("--bruteforce", bruteforce, "use the injective-map oracle (n <= 9)");

  std::string config_arg;
  auto* experiment = app.add_subcommand("experiment", "run a validation experiment");
  experiment->add_option("--config", config_arg)->required();
  experiment->add_option("--out", out_path);
  experiment->add_option("--csv", csv_path, "write the observed pmf as CSV here");

  auto* table1 = app.add_subcommand("table1", "structural constants of the four graph families, v = 3..6");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 1;
  }

  try {
    if (analyze->parsed()) {
      out << analyze_json(load_pattern(pattern_arg)).dump(2) << '\n';
    } else if (bound->parsed()) {
      BoundOptions options;
      options.c_override = c_override;
      options.regime_lower = regime_lower;
      options.regime_upper = regime_upper;
      options.eps = eps;
      const auto r = tv_bound(load_spec(spec_arg), load_pattern(pattern_arg), parse_bound_variant(variant_arg), options);
      out << report_to_json(r).dump(2) << '\n';
    } else if (lambda->parsed()) {
      const auto params = lambda_params(load_spec(spec_arg), load_pattern(pattern_arg), eps);
      const auto pmf = cp_pmf(params, kmax);
      nlohmann::ordered_json j = params_to_json(params);
      j["pmf"] = pmf;
      out << j.dump(2) << '\n';
      if (!csv_path.empty()) {
        Pmf dense;
        for (std::size_t k = 0; k < pmf.size(); ++k) dense[k] = pmf[k];
        write_file(csv_path, pmf_to_csv(dense));
      }
    } else if (sample->parsed()) {
      const auto g = sample_graph(load_spec(spec_arg), seed);
      if (out_path.empty()) {
        write_edge_list(out, g);
      } else {
        std::ostringstream s;
        write_edge_list(s, g);
        write_file(out_path, s.str());
      }
    } else if (count->parsed()) {
      std::ifstream in(graph_path);
      if (!in) throw io_error("cannot read '" + graph_path + "'");
      const auto g = read_edge_list(in);
      const auto p = load_pattern(pattern_arg);
      out << (bruteforce ? count_copies_bruteforce(g, p) : count_copies(g, p)) << '\n';
    } else if (experiment->parsed()) {
      const auto report = run_experiment(load_json(config_arg), threads);
      const std::string text = report.dump(2) + "\n";
      if (out_path.empty()) {
        out << text;
      } else {
        write_file(out_path, text);
      }
      if (!csv_path.empty()) {
        Pmf observed;
        for (const auto& atom : report["observed_pmf"]) observed[atom[0].get<std::uint64_t>()] = atom[1].get<double>();
        write_file(csv_path, pmf_to_csv(observed));
      }
    } else if (table1->parsed()) {
      out << table1_csv();
    }
  } catch (const precondition_error& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace sbmm
