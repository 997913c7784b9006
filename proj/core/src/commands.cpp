#include "nlplap/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <vector>

#include "json.hpp"
#include "nlplap/experiment.hpp"
#include "nlplap/kernel.hpp"
#include "nlplap/solver.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace nlplap {

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

void check_keys(const json& obj, const char* section, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw ConfigError(std::string(section) + ": expected an object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        known = true;
        break;
      }
    if (!known) throw ConfigError(std::string(section) + ": unknown key '" + it.key() + "'");
  }
}

const json& require_section(const json& root, const char* key) {
  if (!root.contains(key)) throw ConfigError(std::string("missing required section '") + key + "'");
  return root.at(key);
}

double get_num(const json& obj, const char* section, const char* key) {
  if (!obj.contains(key))
    throw ConfigError(std::string(section) + ": missing key '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(std::string(section) + ": '" + key + "' must be a number");
  return v.get<double>();
}

double get_num_or(const json& obj, const char* section, const char* key, double dflt) {
  return obj.contains(key) ? get_num(obj, section, key) : dflt;
}

int get_int(const json& obj, const char* section, const char* key) {
  if (!obj.contains(key))
    throw ConfigError(std::string(section) + ": missing key '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_number_integer())
    throw ConfigError(std::string(section) + ": '" + key + "' must be an integer");
  return v.get<int>();
}

int get_int_or(const json& obj, const char* section, const char* key, int dflt) {
  return obj.contains(key) ? get_int(obj, section, key) : dflt;
}

std::string get_str(const json& obj, const char* section, const char* key) {
  if (!obj.contains(key))
    throw ConfigError(std::string(section) + ": missing key '" + key + "'");
  const json& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(std::string(section) + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

void check_top_level(const json& root) {
  check_keys(root, "config", {"kernel", "mesh", "quadrature", "coefficient", "sequence",
                              "functional", "solver", "poincare", "validate", "experiment",
                              "seed"});
  if (root.contains("seed") && !root.at("seed").is_number_integer())
    throw ConfigError("config: 'seed' must be an integer");
}

Kernel parse_kernel(const json& root) {
  const json& k = require_section(root, "kernel");
  check_keys(k, "kernel", {"family", "p", "s", "c0", "delta"});
  std::string family = get_str(k, "kernel", "family");
  double p = get_num(k, "kernel", "p");
  double c0 = get_num(k, "kernel", "c0");
  double delta = get_num(k, "kernel", "delta");
  if (family == "truncated_fractional") {
    double s = get_num(k, "kernel", "s");
    return Kernel::truncated_fractional(p, s, c0, delta);
  }
  if (family == "truncated_constant") {
    // s calibrates only the lower-bound check for this family
    double s = get_num_or(k, "kernel", "s", 0.5);
    return Kernel::truncated_constant(p, s, c0, delta);
  }
  throw ConfigError("kernel: unknown family '" + family + "'");
}

MeshPtr parse_mesh(const json& root, const Kernel& kernel) {
  const json& m = require_section(root, "mesh");
  check_keys(m, "mesh", {"a", "b", "n_cells"});
  Interval omega{get_num(m, "mesh", "a"), get_num(m, "mesh", "b")};
  return build_mesh(omega, get_int(m, "mesh", "n_cells"), kernel);
}

void parse_quadrature(const json& root, int& levels, int& order) {
  levels = 6;
  order = 3;
  if (!root.contains("quadrature")) return;
  const json& q = root.at("quadrature");
  check_keys(q, "quadrature", {"near_diag_levels", "gauss_order"});
  levels = get_int_or(q, "quadrature", "near_diag_levels", 6);
  order = get_int_or(q, "quadrature", "gauss_order", 3);
}

CoefficientField parse_coefficient(const json& root) {
  const json& c = require_section(root, "coefficient");
  std::string family = get_str(c, "coefficient", "family");
  if (family == "constant") {
    check_keys(c, "coefficient", {"family", "value"});
    return CoefficientField::constant(get_num(c, "coefficient", "value"));
  }
  if (family == "separable_oscillation") {
    check_keys(c, "coefficient", {"family", "alpha", "beta", "freq"});
    return CoefficientField::separable_oscillation(get_num(c, "coefficient", "alpha"),
                                                   get_num(c, "coefficient", "beta"),
                                                   get_int(c, "coefficient", "freq"));
  }
  if (family == "checkerboard") {
    check_keys(c, "coefficient", {"family", "lo", "hi", "cells_per_unit"});
    return CoefficientField::checkerboard(get_num(c, "coefficient", "lo"),
                                          get_num(c, "coefficient", "hi"),
                                          get_int(c, "coefficient", "cells_per_unit"));
  }
  throw ConfigError("coefficient: unknown family '" + family + "'");
}

CoefficientSequence parse_sequence(const json& root) {
  const json& c = require_section(root, "sequence");
  std::string family = get_str(c, "sequence", "family");
  if (family == "constant") {
    check_keys(c, "sequence", {"family", "value"});
    return CoefficientSequence::constant(get_num(c, "sequence", "value"));
  }
  if (family == "separable_oscillation") {
    check_keys(c, "sequence", {"family", "alpha", "beta"});
    return CoefficientSequence::separable_oscillation(get_num(c, "sequence", "alpha"),
                                                      get_num(c, "sequence", "beta"));
  }
  if (family == "checkerboard") {
    check_keys(c, "sequence", {"family", "lo", "hi"});
    return CoefficientSequence::checkerboard(get_num(c, "sequence", "lo"),
                                             get_num(c, "sequence", "hi"));
  }
  throw ConfigError("sequence: unknown family '" + family + "'");
}

double parse_functional_density(const json& root) {
  const json& f = require_section(root, "functional");
  check_keys(f, "functional", {"density"});
  return get_num(f, "functional", "density");
}

SolveOptions parse_solver(const json& root) {
  SolveOptions opts;
  if (!root.contains("solver")) return opts;
  const json& s = root.at("solver");
  check_keys(s, "solver", {"tol", "max_iters", "method"});
  opts.tol = get_num_or(s, "solver", "tol", opts.tol);
  opts.max_iters = get_int_or(s, "solver", "max_iters", opts.max_iters);
  if (s.contains("method")) {
    std::string m = get_str(s, "solver", "method");
    if (m == "auto_linear")
      opts.method = SolveMethod::AutoLinear;
    else if (m == "descent")
      opts.method = SolveMethod::Descent;
    else
      throw ConfigError("solver: unknown method '" + m + "'");
  }
  if (!(opts.tol > 0.0)) throw ConfigError("solver: tol must be positive");
  if (opts.max_iters < 1) throw ConfigError("solver: max_iters must be at least 1");
  return opts;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
}

fs::path prepare_out_dir(const CommandOptions& opts) {
  fs::path dir(opts.out_dir);
  fs::create_directories(dir);
  return dir;
}

int run_guarded(const CommandOptions& opts, int (*body)(const CommandOptions&, const json&)) {
  try {
    json root = load_config(opts.config_path);
    check_top_level(root);
    return body(opts, root);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int cmd_validate_kernel(const CommandOptions& opts) {
  return run_guarded(opts, [](const CommandOptions& o, const json& root) {
    Kernel kernel = parse_kernel(root);
    double epsilon = kernel.delta / 10.0;
    int samples = 200;
    if (root.contains("validate")) {
      const json& v = root.at("validate");
      check_keys(v, "validate", {"epsilon", "samples"});
      epsilon = get_num_or(v, "validate", "epsilon", epsilon);
      samples = get_int_or(v, "validate", "samples", samples);
    }
    KernelValidationReport rep = validate_kernel(kernel, epsilon, samples);
    fs::path dir = prepare_out_dir(o);
    write_file(dir / "kernel_report.json", rep.to_json(kernel) + "\n");
    if (rep.degenerate) {
      std::cerr << "validate-kernel: degenerate input (epsilon >= delta), checks vacuous\n";
      return 1;
    }
    bool ok = true;
    if (!rep.tail_finite) {
      std::cerr << "validate-kernel: tail integral check FAILED\n";
      ok = false;
    }
    if (!rep.lower_bound_pass) {
      std::cerr << "validate-kernel: pointwise lower bound check FAILED (min ratio "
                << rep.lower_bound_min_ratio << ")\n";
      ok = false;
    }
    if (!rep.l1_finite) {
      std::cerr << "validate-kernel: integrability check FAILED\n";
      ok = false;
    }
    std::cout << (ok ? "all kernel checks passed\n" : "kernel checks failed\n");
    return ok ? 0 : 1;
  });
}

int cmd_solve(const CommandOptions& opts) {
  return run_guarded(opts, [](const CommandOptions& o, const json& root) {
    Kernel kernel = parse_kernel(root);
    MeshPtr mesh = parse_mesh(root, kernel);
    int levels, order;
    parse_quadrature(root, levels, order);
    CoefficientField h = parse_coefficient(root);
    Functional f = Functional::density(mesh, parse_functional_density(root));
    SolveOptions sopts = parse_solver(root);

    QuadraturePtr quad = assemble_quadrature(mesh, kernel, levels, order, o.threads);
    SolveResult res = solve(quad, h, f, kernel.p, sopts);

    fs::path dir = prepare_out_dir(o);
    std::string csv = "x,u\n";
    char line[80];
    for (int i = 0; i < mesh->n_nodes(); ++i) {
      std::snprintf(line, sizeof line, "%.17e,%.17e\n", mesh->node(i), res.u.value(i));
      csv += line;
    }
    write_file(dir / "solution.csv", csv);
    SolveReport stamped = res.report;
    std::cerr << "solve wall time: " << stamped.wall_time << " s\n";
    stamped.wall_time = 0.0;  // artifacts stay byte-reproducible
    write_file(dir / "solve_report.json", stamped.to_json() + "\n");

    if (!res.report.converged) {
      std::cerr << "solve: did not converge within " << sopts.max_iters
                << " iterations (residual " << res.report.final_residual_norm << ")\n";
      return 1;
    }
    std::cout << "converged in " << res.report.iterations << " iterations\n";
    return 0;
  });
}

int cmd_poincare(const CommandOptions& opts) {
  return run_guarded(opts, [](const CommandOptions& o, const json& root) {
    Kernel kernel = parse_kernel(root);
    MeshPtr mesh = parse_mesh(root, kernel);
    int levels, order;
    parse_quadrature(root, levels, order);
    PoincareOptions popts;
    if (root.contains("poincare")) {
      const json& p = root.at("poincare");
      check_keys(p, "poincare", {"grad_tol", "max_iters"});
      popts.grad_tol = get_num_or(p, "poincare", "grad_tol", popts.grad_tol);
      popts.max_iters = get_int_or(p, "poincare", "max_iters", popts.max_iters);
    }

    QuadraturePtr quad = assemble_quadrature(mesh, kernel, levels, order, o.threads);
    PoincareReport rep = poincare_estimate(quad, kernel.p, popts);

    fs::path dir = prepare_out_dir(o);
    PoincareReport stamped = rep;
    std::cerr << "poincare wall time: " << stamped.wall_time << " s\n";
    stamped.wall_time = 0.0;
    write_file(dir / "poincare.json", stamped.to_json() + "\n");

    std::cout << "poincare estimate: " << rep.estimate << "\n";
    if (!rep.converged) {
      std::cerr << "poincare: descent did not converge\n";
      return 1;
    }
    return rep.estimate > 0.0 ? 0 : 1;
  });
}

namespace {

struct TrendCheck {
  bool pass = true;
  std::vector<std::string> failing;
};

TrendCheck evaluate_trend(const ExperimentReport& rep, bool null_sequence, double tol) {
  TrendCheck tc;
  auto column = [&](const std::string& name, auto getter) {
    if (null_sequence) {
      for (const ExperimentRow& r : rep.rows)
        if (getter(r) > 10.0 * tol) {
          tc.pass = false;
          tc.failing.push_back(name);
          return;
        }
    } else {
      if (!(getter(rep.rows.back()) < getter(rep.rows.front()))) {
        tc.pass = false;
        tc.failing.push_back(name);
      }
    }
  };
  column("lp_error", [](const ExperimentRow& r) { return r.lp_error; });
  column("x0_error", [](const ExperimentRow& r) { return r.x0_error; });
  column("energy_gap", [](const ExperimentRow& r) { return r.energy_gap; });
  column("min_gap", [](const ExperimentRow& r) { return r.min_gap; });
  for (int g = 0; g < rep.n_flux; ++g)
    column("flux_gap_" + std::to_string(g + 1), [g](const ExperimentRow& r) {
      return r.flux_gaps[static_cast<std::size_t>(g)];
    });
  return tc;
}

std::string plot_file(const ExperimentReport& rep, auto getter) {
  std::string out;
  char line[48];
  for (const ExperimentRow& r : rep.rows) {
    std::snprintf(line, sizeof line, "%d %.17e\n", r.j, getter(r));
    out += line;
  }
  return out;
}

}  // namespace

int cmd_experiment(const CommandOptions& opts) {
  return run_guarded(opts, [](const CommandOptions& o, const json& root) {
    ExperimentSpec spec;
    spec.kernel = parse_kernel(root);
    spec.p = spec.kernel.p;
    const json& m = require_section(root, "mesh");
    check_keys(m, "mesh", {"a", "b", "n_cells"});
    spec.omega = Interval{get_num(m, "mesh", "a"), get_num(m, "mesh", "b")};
    spec.n_cells = get_int(m, "mesh", "n_cells");
    parse_quadrature(root, spec.near_diag_levels, spec.gauss_order);
    spec.threads = o.threads;
    spec.f_density = parse_functional_density(root);
    spec.sequence = parse_sequence(root);
    spec.solver = parse_solver(root);

    const json& e = require_section(root, "experiment");
    check_keys(e, "experiment", {"indices", "test_functions"});
    if (!e.contains("indices") || !e.at("indices").is_array())
      throw ConfigError("experiment: 'indices' must be an array");
    spec.indices.clear();
    for (const json& v : e.at("indices")) {
      if (!v.is_number_integer()) throw ConfigError("experiment: indices must be integers");
      spec.indices.push_back(v.get<int>());
    }
    if (spec.indices.size() < 2)
      throw ConfigError("experiment: need at least two indices");
    for (std::size_t i = 0; i < spec.indices.size(); ++i) {
      if (spec.indices[i] < 1) throw ConfigError("experiment: indices start at 1");
      if (i > 0 && spec.indices[i] <= spec.indices[i - 1])
        throw ConfigError("experiment: indices must be strictly increasing");
    }
    if (e.contains("test_functions")) {
      if (!e.at("test_functions").is_array())
        throw ConfigError("experiment: 'test_functions' must be an array");
      spec.test_functions.clear();
      for (const json& g : e.at("test_functions")) {
        check_keys(g, "experiment.test_functions",
                   {"xp_center", "xp_halfwidth", "x_center", "x_halfwidth"});
        TwoPointBump b;
        b.xp_center = get_num(g, "test_functions", "xp_center");
        b.xp_halfwidth = get_num(g, "test_functions", "xp_halfwidth");
        b.x_center = get_num(g, "test_functions", "x_center");
        b.x_halfwidth = get_num(g, "test_functions", "x_halfwidth");
        if (!(b.xp_halfwidth > 0.0) || !(b.x_halfwidth > 0.0))
          throw ConfigError("test_functions: halfwidths must be positive");
        spec.test_functions.push_back(b);
      }
      if (spec.test_functions.empty())
        throw ConfigError("experiment: test_functions cannot be an empty array");
    }

    ExperimentReport rep = run_experiment(spec);

    double total_time = 0.0;
    for (const ExperimentRow& r : rep.rows) total_time += r.wall_time;
    std::cerr << "experiment solve wall time: " << total_time << " s\n";

    ExperimentReport stamped = rep;
    for (ExperimentRow& r : stamped.rows) r.wall_time = 0.0;

    bool null_sequence = spec.sequence.family_name() == "constant";
    TrendCheck tc = evaluate_trend(stamped, null_sequence, spec.solver.tol);
    bool all_converged = stamped.limit_converged;
    for (const ExperimentRow& r : stamped.rows) all_converged = all_converged && r.converged;

    fs::path dir = prepare_out_dir(o);
    write_file(dir / "experiment.csv", report_to_csv(stamped));
    json envelope;
    envelope["seed"] = o.seed;
    envelope["report"] = json::parse(stamped.to_json());
    envelope["trend"] = {{"pass", tc.pass}, {"failing_columns", tc.failing}};
    envelope["all_converged"] = all_converged;
    write_file(dir / "experiment.json", envelope.dump(2) + "\n");

    write_file(dir / "plot_lp_error.dat",
               plot_file(stamped, [](const ExperimentRow& r) { return r.lp_error; }));
    write_file(dir / "plot_x0_error.dat",
               plot_file(stamped, [](const ExperimentRow& r) { return r.x0_error; }));
    write_file(dir / "plot_energy_gap.dat",
               plot_file(stamped, [](const ExperimentRow& r) { return r.energy_gap; }));
    write_file(dir / "plot_min_gap.dat",
               plot_file(stamped, [](const ExperimentRow& r) { return r.min_gap; }));
    for (int g = 0; g < stamped.n_flux; ++g)
      write_file(dir / ("plot_flux_gap_" + std::to_string(g + 1) + ".dat"),
                 plot_file(stamped, [g](const ExperimentRow& r) {
                   return r.flux_gaps[static_cast<std::size_t>(g)];
                 }));

    if (!all_converged) {
      std::cerr << "experiment: at least one solve did not converge\n";
      return 1;
    }
    if (!tc.pass) {
      std::cerr << "experiment: trend check failed for column(s):";
      for (const std::string& c : tc.failing) std::cerr << " " << c;
      std::cerr << "\n";
      return 1;
    }
    std::cout << "experiment passed: " << stamped.rows.size() << " indices, "
              << stamped.n_flux << " flux pairings\n";
    return 0;
  });
}

}  // namespace nlplap
