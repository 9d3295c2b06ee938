#pragma once

#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pwts/data_model.hpp"
#include "pwts/errors.hpp"
#include "pwts/grid_search.hpp"
#include "pwts/json_io.hpp"
#include "pwts/synthetic.hpp"

namespace pwts {

/// Exit codes of the pwts command.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,   // I/O problems writing output
  kExitBadInput = 2,  // unreadable or malformed table, JSON, flags, unknown dataset or pane
  kExitInfeasible = 3,
};

namespace detail {

inline std::string read_all(std::istream& in) {
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline std::string read_input(const std::string& path, std::istream& in) {
  if (path == "-") return read_all(in);
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read '" + path + "'");
  return read_all(f);
}

inline std::string describe(const ParseError& e) {
  return std::string(to_string(e.kind())) + ": " + e.what();
}

}  // namespace detail

/// The whole command line tool. `args` excludes the program name.
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
  CLI::App app{"Piecewise-linear modal Theil-Sen analysis", "pwts"};
  app.require_subcommand(1);

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Run the hyperparameter grid on a table and print results JSON");
  std::string input;
  std::optional<std::string> dataset_name;
  GridConfig grid;
  std::string rule = "either";
  std::string out_path;
  bool with_affinity = false;
  analyze->add_option("input", input, "Table file, or - for standard input");
  analyze->add_option("--dataset", dataset_name, "Use a canned dataset instead of an input file");
  analyze->add_option("--scale-steps", grid.scale_steps)->delimiter(',');
  analyze->add_option("--precision-steps", grid.precision_steps)->delimiter(',');
  analyze->add_option("--parsimony-steps", grid.parsimony_steps)->delimiter(',');
  analyze->add_option("--axes", grid.axes)->delimiter(',');
  analyze->add_option("--subset-size", grid.subset_size, "Points per candidate subset (0: k+1, or k+3 when parsimony > 0)");
  analyze->add_option("--budget", grid.budget, "Maximum subsets per candidate run");
  analyze->add_option("--seed", grid.seed, "Sampling seed; also seeds --dataset");
  analyze->add_option("--threads", grid.threads, "Worker threads (0: all cores)");
  analyze->add_option("--overlap-rule", rule, "either | both");
  analyze->add_flag("--with-affinity", with_affinity, "Embed every cell's affinity matrix");
  analyze->add_option("--out", out_path, "Write JSON here instead of standard output");

  // dataset
  auto* dataset = app.add_subcommand("dataset", "Print a canned dataset as a table");
  std::string kind;
  std::uint64_t dataset_seed = 1;
  std::optional<std::size_t> size;
  std::optional<double> noise;
  dataset->add_option("kind", kind, "Dataset name")->required();
  dataset->add_option("--seed", dataset_seed);
  dataset->add_option("--size", size, "Override the point count of generated datasets");
  dataset->add_option("--noise", noise, "Gaussian noise in y units");
  dataset->add_flag_callback("--list", [&] {
    for (const auto& info : dataset_catalog()) out << info.name << '\t' << info.description << '\n';
    throw CLI::Success();
  }, "List dataset names and exit");

  // heatmap
  auto* heatmap = app.add_subcommand("heatmap", "Render one pane of a results file as a text grid");
  std::string results_path;
  std::size_t axis = 1;
  double parsimony = 0.0;
  heatmap->add_option("results", results_path, "Results JSON, or - for standard input")->required();
  heatmap->add_option("--axis", axis);
  heatmap->add_option("--parsimony", parsimony);

  std::vector<const char*> argv{"pwts"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::Success&) {
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "pwts: " << e.what() << '\n';
    return kExitBadInput;
  }

  try {
    if (analyze->parsed()) {
      grid.rule = parse_overlap_rule(rule);
      DataTable table = [&] {
        if (dataset_name) {
          if (!input.empty()) throw ConfigError("give either an input file or --dataset, not both");
          SyntheticSpec spec{parse_kind(*dataset_name)};
          spec.seed = analyze->count("--seed") ? grid.seed : dataset_info(spec.kind).default_seed;
          return generate_synthetic(spec);
        }
        if (input.empty()) throw ConfigError("missing input file (use - for standard input)");
        return parse_table(detail::read_input(input, in));
      }();
      const auto result = run_grid(table, grid);
      const std::string doc = dump_result(result, JsonOptions{with_affinity});
      if (out_path.empty()) {
        out << doc;
      } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!(f << doc)) {
          err << "pwts: cannot write '" << out_path << "'\n";
          return kExitFailure;
        }
      }
      return kExitOk;
    }
    if (dataset->parsed()) {
      SyntheticSpec spec{parse_kind(kind)};
      spec.seed = dataset_seed;
      spec.size_override = size;
      spec.noise = noise;
      out << serialize_table(generate_synthetic(spec));
      return kExitOk;
    }
    if (heatmap->parsed()) {
      json doc;
      try {
        doc = json::parse(detail::read_input(results_path, in));
      } catch (const json::parse_error& e) {
        err << "pwts: malformed results JSON: " << e.what() << '\n';
        return kExitBadInput;
      }
      out << render_heatmap(doc, axis, parsimony);
      return kExitOk;
    }
  } catch (const ParseError& e) {
    err << "pwts: " << detail::describe(e) << '\n';
    return kExitBadInput;
  } catch (const AllInfeasible& e) {
    err << "pwts: " << e.what() << " (try larger scale steps)\n";
    return kExitInfeasible;
  } catch (const Error& e) {
    err << "pwts: " << e.what() << '\n';
    return kExitBadInput;
  } catch (const std::invalid_argument& e) {
    err << "pwts: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitBadInput;
}

}  // namespace pwts
