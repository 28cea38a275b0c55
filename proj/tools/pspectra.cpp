#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pspectra/acceptance.hpp"
#include "pspectra/bounds.hpp"
#include "pspectra/cheeger.hpp"
#include "pspectra/eigensolver.hpp"
#include "pspectra/error.hpp"
#include "pspectra/functionals.hpp"
#include "pspectra/generators.hpp"
#include "pspectra/ghseq.hpp"
#include "pspectra/serialize.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pspectra;

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NumericalFailure:
    case ErrorKind::DegenerateField:
    case ErrorKind::DegenerateSpace:
    case ErrorKind::Disconnected:
      return kExitNumerical;
    default:
      return kExitValidation;
  }
}

struct Common {
  std::uint64_t seed = kDefaultSeed;
  int threads = 0;
  std::string out;
  std::string format = "json";
};

int resolved_threads(const Common& c) {
  if (c.threads > 0) return c.threads;
  if (const char* env = std::getenv("PSPECTRA_THREADS")) {
    try {
      const int t = std::stoi(env);
      if (t > 0) return t;
    } catch (const std::exception&) {
    }
    throw Error(ErrorKind::InvalidArgument, "cli", "threads", std::string("PSPECTRA_THREADS is not a positive integer: ") + env);
  }
  return 1;
}

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
  } else {
    write_file_atomic(c.out, text);
  }
}

void emit_json(const Common& c, const json& j) { emit(c, j.dump(2) + "\n"); }

void require_file(const std::string& path, const char* op) {
  if (!fs::exists(path)) throw Error(ErrorKind::IoError, "cli", op, "input file not found: " + path);
}

Space load(const std::string& path, const char* op) {
  require_file(path, op);
  return load_space(path);
}

json read_json(const std::string& path, const char* op) {
  require_file(path, op);
  std::ifstream in(path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::ParseError, "cli", op, path + ": " + e.what());
  }
}

// A field file is a JSON array of numbers or an object with a "values" array.
ScalarField read_field(const std::string& path, const char* op) {
  const json j = read_json(path, op);
  const json& arr = j.is_object() && j.contains("values") ? j["values"] : j;
  if (!arr.is_array()) throw Error(ErrorKind::ParseError, "cli", op, path + ": expected an array of numbers");
  Vector v(static_cast<Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number()) throw Error(ErrorKind::ParseError, "cli", op, path + ": non-numeric entry");
    v(static_cast<Index>(i)) = arr[i].get<double>();
  }
  return ScalarField(std::move(v));
}

void add_common(CLI::App* cmd, Common& c, bool with_format) {
  cmd->add_option("--seed", c.seed, "random seed (default " + std::to_string(kDefaultSeed) + ")");
  cmd->add_option("--threads", c.threads, "worker cap (default: PSPECTRA_THREADS or 1)")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "output file (default: stdout)");
  if (with_format) cmd->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
}

std::vector<double> p_values(std::optional<double> p, const std::vector<double>& grid, std::vector<double> fallback) {
  if (!grid.empty()) return grid;
  if (p) return {*p};
  return fallback;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"p-spectra of finite metric measure spaces"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  Common common;

  // gen
  ModelSpec gen_spec;
  std::string gen_model = "circle";
  auto* gen = app.add_subcommand("gen", "sample a model space");
  gen->add_option("--model", gen_model, "circle, interval, sphere, flat_torus or suspension")
      ->check(CLI::IsMember({"circle", "interval", "sphere", "flat_torus", "suspension"}));
  gen->add_option("--r", gen_spec.r, "circle or sphere radius");
  gen->add_option("--n", gen_spec.dim, "sphere dimension");
  gen->add_option("--a", gen_spec.a, "torus side a");
  gen->add_option("--b", gen_spec.b, "torus side b");
  gen->add_option("--L", gen_spec.length, "interval length");
  gen->add_option("--m", gen_spec.m, "suspension weight exponent (default: base dimension)");
  gen->add_option("--N", gen_spec.sample_count, "sample count (suspension: base circle size)");
  gen->add_option("--slices", gen_spec.slices, "suspension time slices");
  gen->add_flag("!--random", gen_spec.grid, "torus: seeded uniform points instead of a grid");
  add_common(gen, common, false);

  // eig
  std::string eig_space;
  std::optional<double> eig_p, eig_h;
  std::vector<double> eig_grid;
  SolveOptions solve_opts;
  auto* eig = app.add_subcommand("eig", "first p-eigenvalue");
  eig->add_option("--space", eig_space, "space file")->required();
  eig->add_option("--p", eig_p, "exponent");
  eig->add_option("--p-grid", eig_grid, "increasing exponents (continuation)")->delimiter(',');
  eig->add_option("--h", eig_h, "Lip scale (default: 3 x fill radius)");
  eig->add_option("--max-iter", solve_opts.max_iter, "descent iteration cap");
  eig->add_option("--restarts", solve_opts.restarts, "random restarts");
  add_common(eig, common, false);

  // cheeger
  std::string ch_space, ch_hint;
  std::optional<double> ch_eps;
  bool ch_exact = false;
  auto* ch = app.add_subcommand("cheeger", "Minkowski-Cheeger constant");
  ch->add_option("--space", ch_space, "space file")->required();
  ch->add_option("--epsilon", ch_eps, "Minkowski scale (default: 3 x fill radius)");
  ch->add_option("--hint-field", ch_hint, "field file seeding the sweep");
  ch->add_flag("--exact", ch_exact, "exhaustive search (n <= 20)");
  add_common(ch, common, false);

  // bounds
  std::string b_space;
  std::vector<std::string> b_family, b_suite{"matei", "buser", "valtorta", "gallot", "monotone"};
  std::vector<double> b_grid{1.5, 2.0, 3.0};
  std::optional<double> b_h, b_eps, b_tau;
  auto* bnd = app.add_subcommand("bounds", "inequality suite");
  auto* b_space_opt = bnd->add_option("--space", b_space, "space file");
  auto* b_family_opt = bnd->add_option("--family", b_family, "comma list of space files")->delimiter(',');
  b_space_opt->excludes(b_family_opt);
  bnd->add_option("--suite", b_suite,
                  "comma list of matei, buser, valtorta, gallot, monotone, liyaq, lich_obata, grosjean, "
                  "right_continuity, tau")
      ->delimiter(',');
  bnd->add_option("--p-grid", b_grid, "exponents")->delimiter(',');
  bnd->add_option("--h", b_h, "Lip scale (default: 3 x fill radius)");
  bnd->add_option("--epsilon", b_eps, "Minkowski scale (default: 3 x fill radius)");
  bnd->add_option("--tau", b_tau, "segment constant for the tau check");
  add_common(bnd, common, true);

  // gh-seq
  std::string gh_specs;
  std::vector<double> gh_grid{2.0};
  auto* gh = app.add_subcommand("gh-seq", "F along a sequence of sampled spaces");
  gh->add_option("--specs", gh_specs, "JSON list of model specs; the last one is the limit proxy")->required();
  gh->add_option("--p-grid", gh_grid, "exponents")->delimiter(',');
  add_common(gh, common, true);

  // centered-norm
  std::string cn_field, cn_space;
  double cn_p = 2.0;
  auto* cn = app.add_subcommand("centered-norm", "c_p and a_p of a field");
  cn->add_option("--field-file", cn_field, "field file")->required();
  cn->add_option("--p", cn_p, "exponent >= 1");
  cn->add_option("--space", cn_space, "space file supplying the measure (default: uniform)");
  add_common(cn, common, false);

  // reproduce
  std::string rep_suite = "all";
  auto* rep = app.add_subcommand("reproduce", "run the acceptance experiments");
  rep->add_option("--suite", rep_suite, "all or a comma list of criterion numbers");
  add_common(rep, common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  try {
    solve_opts.seed = common.seed;
    solve_opts.threads = resolved_threads(common);

    if (*gen) {
      gen_spec.model = model_from_string(gen_model);
      gen_spec.seed = common.seed;
      const Space space = generate(gen_spec);
      emit(common, space_to_json(space).dump() + "\n");
    } else if (*eig) {
      const Space space = load(eig_space, "eig");
      const double h = eig_h ? *eig_h : default_scale(space);
      const auto grid = p_values(eig_p, eig_grid, {2.0});
      for (double p : grid) {
        if (!(p >= 1.1) || !std::isfinite(p)) {
          throw Error(ErrorKind::InvalidExponent, "cli", "eig", "p must satisfy 1.1 <= p < inf, got " + std::to_string(p));
        }
      }
      json out = json::array();
      bool failed = false;
      for (const auto& r : sweep_p(space, grid, h, solve_opts)) {
        failed = failed || !r.error.empty();
        out.push_back(to_json(r));
      }
      emit_json(common, out);
      if (failed) {
        std::cerr << "error [NumericalFailure] cli::eig: at least one grid point failed (see \"error\" fields)\n";
        return kExitNumerical;
      }
    } else if (*ch) {
      const Space space = load(ch_space, "cheeger");
      const double eps = ch_eps ? *ch_eps : default_scale(space);
      CutResult cut;
      if (ch_exact) {
        if (space.size() > 20) throw Error(ErrorKind::TooLarge, "cli", "cheeger", "--exact needs n <= 20");
        cut = exact_cheeger(space, eps);
      } else {
        std::optional<ScalarField> hint;
        if (!ch_hint.empty()) hint = read_field(ch_hint, "cheeger");
        cut = cheeger(space, eps, hint, common.seed);
      }
      emit_json(common, to_json(cut));
    } else if (*bnd) {
      if (b_space.empty() && b_family.empty()) {
        throw Error(ErrorKind::InvalidArgument, "cli", "bounds", "one of --space or --family is required");
      }
      std::vector<std::string> paths = b_family.empty() ? std::vector<std::string>{b_space} : b_family;
      std::vector<std::unique_ptr<Space>> spaces;
      std::vector<std::unique_ptr<Analysis>> analyses;
      std::vector<Analysis*> family;
      for (const auto& path : paths) {
        spaces.push_back(std::make_unique<Space>(load(path, "bounds")));
        const Space& s = *spaces.back();
        analyses.push_back(std::make_unique<Analysis>(s, b_h ? *b_h : default_scale(s), b_eps ? *b_eps : default_scale(s),
                                                      solve_opts, path));
        family.push_back(analyses.back().get());
      }
      std::unique_ptr<Space> sphere_space;
      std::unique_ptr<Analysis> sphere;
      std::vector<InequalityReport> reports;
      for (const auto& name : b_suite) {
        const Inequality which = inequality_from_string(name);
        if (which == Inequality::buser && family.size() > 1) {
          reports.push_back(check_buser(std::span<Analysis* const>(family), b_grid));
          continue;
        }
        if (which == Inequality::liyaq) {
          reports.push_back(check_liyaq(std::span<Analysis* const>(family), b_grid));
          continue;
        }
        for (Analysis* an : family) {
          switch (which) {
            case Inequality::matei: reports.push_back(check_matei(*an, b_grid)); break;
            case Inequality::buser: reports.push_back(check_buser(*an, b_grid)); break;
            case Inequality::valtorta: reports.push_back(check_valtorta(*an, b_grid)); break;
            case Inequality::gallot: reports.push_back(check_gallot(*an)); break;
            case Inequality::monotone: reports.push_back(check_monotone(*an, b_grid)); break;
            case Inequality::grosjean:
              reports.push_back(grosjean_limit(*an, b_grid, an->space().model() == "circle"));
              break;
            case Inequality::right_continuity: {
              const std::vector<double> deltas{0.2, 0.1, 0.05};
              reports.push_back(right_continuity_probe(*an, b_grid.front(), deltas));
              break;
            }
            case Inequality::tau:
              if (!b_tau) throw Error(ErrorKind::InvalidArgument, "cli", "bounds", "the tau check needs --tau");
              for (double p : b_grid) reports.push_back(check_tau_bound(*an, *b_tau, p));
              break;
            case Inequality::lich_obata:
              if (!sphere) {
                sphere_space = std::make_unique<Space>(gen_sphere(2, 1.0, 2000, common.seed));
                const double s = default_scale(*sphere_space);
                sphere = std::make_unique<Analysis>(*sphere_space, s, s, solve_opts, "sphere baseline");
              }
              reports.push_back(check_lichnerowicz_obata(*an, *sphere, b_grid));
              break;
            default: break;
          }
        }
      }
      if (common.format == "csv") {
        emit(common, to_csv(reports));
      } else {
        json out = json::array();
        for (const auto& r : reports) out.push_back(to_json(r));
        emit_json(common, out);
      }
    } else if (*gh) {
      const json list = read_json(gh_specs, "gh-seq");
      if (!list.is_array() || list.size() < 2) {
        throw Error(ErrorKind::ValidationError, "cli", "gh-seq", gh_specs + ": expected a list of at least two specs");
      }
      std::vector<ModelSpec> specs;
      for (const auto& j : list) specs.push_back(model_spec_from_json(j));
      ConvergenceOptions options;
      options.solve = solve_opts;
      const ConvergenceReport report = run_convergence_experiment(specs, gh_grid, options);
      emit(common, common.format == "csv" ? to_csv(report) : to_json(report).dump(2) + "\n");
    } else if (*cn) {
      const ScalarField f = read_field(cn_field, "centered-norm");
      CenteredNorm result;
      if (cn_space.empty()) {
        result = centered_norm(Vector::Constant(f.size(), 1.0 / static_cast<double>(f.size())), f.values(), cn_p);
      } else {
        result = centered_norm(load(cn_space, "centered-norm"), f, cn_p);
      }
      emit_json(common, to_json(result));
    } else if (*rep) {
      AcceptanceOptions options;
      options.seed = common.seed;
      options.threads = solve_opts.threads;
      options.progress = &std::cerr;
      if (rep_suite != "all") {
        std::stringstream ss(rep_suite);
        std::string item;
        while (std::getline(ss, item, ',')) {
          try {
            options.only.insert(std::stoi(item));
          } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidArgument, "cli", "reproduce", "bad criterion number: " + item);
          }
        }
      }
      const auto results = run_acceptance(options);
      for (const auto& r : results) std::cout << format_line(r) << "\n";
      json report = {{"seed", common.seed}, {"criteria", to_json(results)}};
      if (!common.out.empty()) write_file_atomic(common.out, report.dump(2) + "\n");
    }
  } catch (const Error& e) {
    std::cerr << "error [" << to_string(e.kind()) << "] " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error [cli] " << e.what() << "\n";
    return kExitNumerical;
  }
  return EXIT_SUCCESS;
}
