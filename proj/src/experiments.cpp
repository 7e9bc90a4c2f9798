#include "qmelab/experiments.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <sstream>
#include <thread>

#include "qmelab/rng.hpp"

namespace qmelab {

namespace {

constexpr double kWeakCouplingWarnThreshold = 0.3;

std::string fmt(double v) { return format_double(v); }

SpinChainSystem system_from(const ExperimentConfig& cfg, double g) {
  return build_xxz(cfg.n_sites, cfg.fields, g, cfg.delta);
}

std::vector<Matrix> state_panel(const ExperimentConfig& cfg, int dim, int n) {
  Rng rng(cfg.seed);
  std::vector<Matrix> states;
  states.reserve(n);
  for (int i = 0; i < n; ++i) states.push_back(rng.density_matrix(dim));
  return states;
}

struct PointObservables {
  double thermal_distance = std::nan("");
  std::vector<double> bonds;
  double ib_l = std::nan(""), ib_r = std::nan("");
  double jb_l = std::nan(""), jb_r = std::nan("");
  std::vector<double> continuity = {std::nan(""), std::nan(""), std::nan("")};
  double conservation_residual = std::nan("");
  double dissipator_norm = 0.0;
  double kossakowski_min = 0.0;
  double gap = 0.0;
  double residual = 0.0;
  bool unique = false;
  std::vector<double> sz;
};

PointObservables measure_point(const ExperimentConfig& cfg,
                               const SpinChainSystem& sys,
                               const GeneratorParts& parts) {
  PointObservables obs;
  const SteadyStateReport ness = solve_ness(parts);
  obs.gap = ness.gap;
  obs.residual = ness.residual;
  obs.unique = ness.unique;

  if (cfg.equilibrium())
    obs.thermal_distance = trace_distance(
        ness.rho, gibbs_state(sys, cfg.baths[0].beta, cfg.baths[0].mu));

  const CurrentReport currents = current_report(parts, sys, ness.rho);
  obs.bonds = currents.bond_currents;
  obs.ib_l = currents.boundary_left;
  obs.jb_l = currents.energy_left;
  if (sys.terminals.size() > 1) {
    obs.ib_r = currents.boundary_right;
    obs.jb_r = currents.energy_right;
  }
  if (!currents.continuity_residuals.empty())
    obs.continuity = currents.continuity_residuals;

  const std::vector<Matrix> ops = conserved_test_operators(sys);
  obs.dissipator_norm = parts.dissipator.matrix.norm();
  if (!ops.empty()) {
    const std::vector<Matrix> panel = state_panel(cfg, sys.dim(), 20);
    obs.conservation_residual = conservation_audit(parts, sys, ops, panel);
  }
  obs.kossakowski_min = extract_kossakowski(parts).min_eigenvalue;

  for (int s = 1; s <= sys.n_sites; ++s) {
    const Matrix sz = site_operator(sys.n_sites, s, pauli_z());
    obs.sz.push_back((ness.rho * sz).trace().real());
  }
  return obs;
}

std::vector<std::string> point_columns(const ExperimentConfig& cfg) {
  std::vector<std::string> cols = {"row", "qme", "g", "epsilon",
                                   "thermal_distance"};
  for (int j = 1; j <= cfg.n_sites - 1; ++j)
    cols.push_back("I" + std::to_string(j));
  cols.insert(cols.end(),
              {"IB_L", "IB_R", "JB_L", "JB_R", "cont_I1_IBL", "cont_Ilast_IBR",
               "cont_IBL_IBR", "conservation_residual", "dissipator_norm",
               "kossakowski_min", "gap", "residual", "unique"});
  for (int s = 1; s <= cfg.n_sites; ++s)
    cols.push_back("sz" + std::to_string(s));
  cols.insert(cols.end(), {"slope_observable", "slope", "slope_stderr"});
  return cols;
}

std::vector<std::string> point_row(const ExperimentConfig& cfg,
                                   const std::string& qme, double g,
                                   double epsilon,
                                   const PointObservables& obs) {
  std::vector<std::string> row = {"point", qme, fmt(g), fmt(epsilon),
                                  fmt(obs.thermal_distance)};
  for (int j = 0; j < cfg.n_sites - 1; ++j)
    row.push_back(fmt(j < static_cast<int>(obs.bonds.size())
                          ? obs.bonds[j]
                          : std::nan("")));
  row.insert(row.end(),
             {fmt(obs.ib_l), fmt(obs.ib_r), fmt(obs.jb_l), fmt(obs.jb_r),
              fmt(obs.continuity[0]), fmt(obs.continuity[1]),
              fmt(obs.continuity[2]), fmt(obs.conservation_residual),
              fmt(obs.dissipator_norm), fmt(obs.kossakowski_min), fmt(obs.gap),
              fmt(obs.residual), obs.unique ? "1" : "0"});
  for (int s = 0; s < cfg.n_sites; ++s)
    row.push_back(fmt(s < static_cast<int>(obs.sz.size()) ? obs.sz[s]
                                                          : std::nan("")));
  row.insert(row.end(), {"", "nan", "nan"});
  return row;
}

std::vector<std::string> summary_row(const ExperimentConfig& cfg,
                                     const std::string& kind,
                                     const std::string& qme,
                                     const std::string& observable,
                                     double value, double stderr_) {
  std::vector<std::string> row = {kind, qme, "nan", "nan", "nan"};
  for (int j = 1; j <= cfg.n_sites - 1; ++j) row.push_back("nan");
  for (int i = 0; i < 13; ++i) row.push_back("nan");
  for (int s = 1; s <= cfg.n_sites; ++s) row.push_back("nan");
  row.insert(row.end(), {observable, fmt(value), fmt(stderr_)});
  return row;
}

void warn_weak_coupling(const ExperimentConfig& cfg, CommandResult& result) {
  double max_eps = cfg.epsilon;
  for (double e : cfg.epsilon_grid) max_eps = std::max(max_eps, e);
  if (cfg.sweep_variable == "epsilon")
    for (double e : cfg.sweep_grid) max_eps = std::max(max_eps, e);
  if (max_eps >= kWeakCouplingWarnThreshold) {
    std::ostringstream msg;
    msg << "warning: weak-coupling regime questionable (epsilon = " << max_eps
        << ")";
    result.messages.push_back(msg.str());
  }
}

void run_parallel(int n, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count_from_env(), std::max(1, n));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace

int worker_count_from_env() {
  const char* env = std::getenv("QMELAB_WORKERS");
  if (!env) return 1;
  const int n = std::atoi(env);
  return n >= 1 ? n : 1;
}

GeneratorParts build_generator(QmeKind kind, const SpinChainSystem& system,
                               const std::vector<BathSpec>& baths,
                               double epsilon, const PvQuadrature& quad,
                               double secular_tol) {
  switch (kind) {
    case QmeKind::redfield:
      return build_redfield(system, baths, epsilon, quad);
    case QmeKind::local_lindblad:
      return build_local_lindblad(system, baths, epsilon, quad);
    case QmeKind::eigenbasis_lindblad:
      return build_eigenbasis_lindblad(system, baths, epsilon, quad,
                                       secular_tol);
    case QmeKind::universal_lindblad:
      return build_ule(system, baths, epsilon, quad);
  }
  throw ConfigError("build_generator: unknown kind");
}

CommandResult cmd_ness(const ExperimentConfig& cfg) {
  CommandResult result;
  warn_weak_coupling(cfg, result);
  result.table.provenance = provenance_header(
      "ness", cfg.canonical_json, cfg.seed, "");
  result.table.columns = point_columns(cfg);

  const SpinChainSystem sys = system_from(cfg, cfg.g);
  for (QmeKind kind : cfg.qmes) {
    const GeneratorParts parts = build_generator(
        kind, sys, cfg.baths, cfg.epsilon, cfg.quadrature,
        cfg.secular_tolerance);
    const PointObservables obs = measure_point(cfg, sys, parts);
    result.table.add_row(
        point_row(cfg, qme_label(kind), cfg.g, cfg.epsilon, obs));
  }
  return result;
}

CommandResult cmd_sweep(const ExperimentConfig& cfg) {
  if (cfg.sweep_variable.empty())
    throw ConfigError("config: sweep: missing (required by the sweep command)");
  CommandResult result;
  warn_weak_coupling(cfg, result);
  result.table.provenance = provenance_header(
      "sweep", cfg.canonical_json, cfg.seed,
      "sweep: variable=" + cfg.sweep_variable);
  result.table.columns = point_columns(cfg);

  const int n_points = static_cast<int>(cfg.sweep_grid.size());
  const int n_qmes = static_cast<int>(cfg.qmes.size());
  std::vector<PointObservables> observations(n_points * n_qmes);

  if (cfg.sweep_variable == "g") {
    run_parallel(n_points, [&](int i) {
      const SpinChainSystem sys = system_from(cfg, cfg.sweep_grid[i]);
      for (int k = 0; k < n_qmes; ++k) {
        const GeneratorParts parts = build_generator(
            cfg.qmes[k], sys, cfg.baths, cfg.epsilon, cfg.quadrature,
            cfg.secular_tolerance);
        observations[i * n_qmes + k] = measure_point(cfg, sys, parts);
      }
    });
    for (int i = 0; i < n_points; ++i)
      for (int k = 0; k < n_qmes; ++k)
        result.table.add_row(point_row(cfg, qme_label(cfg.qmes[k]),
                                       cfg.sweep_grid[i], cfg.epsilon,
                                       observations[i * n_qmes + k]));
    // boundary current from the universal Lindblad equation tracks the
    // Redfield bond current; report the worst relative deviation
    const auto re_it =
        std::find(cfg.qmes.begin(), cfg.qmes.end(), QmeKind::redfield);
    const auto ule_it = std::find(cfg.qmes.begin(), cfg.qmes.end(),
                                  QmeKind::universal_lindblad);
    if (re_it != cfg.qmes.end() && ule_it != cfg.qmes.end() &&
        cfg.n_sites >= 2) {
      const int kre = static_cast<int>(re_it - cfg.qmes.begin());
      const int kule = static_cast<int>(ule_it - cfg.qmes.begin());
      double worst = 0.0;
      for (int i = 0; i < n_points; ++i) {
        const double i1 = observations[i * n_qmes + kre].bonds[0];
        const double ib = observations[i * n_qmes + kule].ib_l;
        worst = std::max(worst, std::abs(i1 + ib) /
                                    std::max({std::abs(i1), std::abs(ib),
                                              1e-14}));
      }
      result.table.add_row(summary_row(cfg, "compare", "re+ule",
                                       "max_reldev(I1[re],-IB_L[ule])", worst,
                                       std::nan("")));
    }
  } else {  // epsilon sweep
    const SpinChainSystem sys = system_from(cfg, cfg.g);
    std::vector<GeneratorParts> base;
    for (QmeKind kind : cfg.qmes)
      base.push_back(build_generator(kind, sys, cfg.baths, cfg.epsilon,
                                     cfg.quadrature, cfg.secular_tolerance));
    run_parallel(n_points, [&](int i) {
      for (int k = 0; k < n_qmes; ++k) {
        const GeneratorParts parts =
            with_epsilon(base[k], cfg.sweep_grid[i]);
        observations[i * n_qmes + k] = measure_point(cfg, sys, parts);
      }
    });
    for (int i = 0; i < n_points; ++i)
      for (int k = 0; k < n_qmes; ++k)
        result.table.add_row(point_row(cfg, qme_label(cfg.qmes[k]), cfg.g,
                                       cfg.sweep_grid[i],
                                       observations[i * n_qmes + k]));
    // slope summaries per QME and observable
    for (int k = 0; k < n_qmes; ++k) {
      std::vector<std::pair<std::string, std::vector<double>>> series;
      auto collect = [&](const std::string& name, auto&& getter) {
        std::vector<double> ys;
        for (int i = 0; i < n_points; ++i)
          ys.push_back(std::abs(getter(observations[i * n_qmes + k])));
        series.emplace_back(name, std::move(ys));
      };
      collect("thermal_distance",
              [](const PointObservables& o) { return o.thermal_distance; });
      if (cfg.n_sites >= 2) {
        collect("I1", [](const PointObservables& o) { return o.bonds.front(); });
        collect("Ilast",
                [](const PointObservables& o) { return o.bonds.back(); });
        collect("IB_L", [](const PointObservables& o) { return o.ib_l; });
        collect("IB_R", [](const PointObservables& o) { return o.ib_r; });
        collect("bond_mismatch", [](const PointObservables& o) {
          return o.bonds.front() - o.bonds.back();
        });
      }
      for (auto& [name, ys] : series) {
        bool all_nan = true;
        for (double y : ys) all_nan &= std::isnan(y);
        if (all_nan) continue;
        try {
          const SlopeFit fit = scaling_slope(cfg.sweep_grid, ys);
          result.table.add_row(summary_row(cfg, "slope",
                                           qme_label(cfg.qmes[k]), name,
                                           fit.slope, fit.stderr_));
        } catch (const InsufficientData&) {
          result.table.add_row(summary_row(cfg, "slope",
                                           qme_label(cfg.qmes[k]), name,
                                           std::nan(""), std::nan("")));
        }
      }
    }
  }
  return result;
}

CommandResult cmd_check(const ExperimentConfig& cfg) {
  CommandResult result;
  warn_weak_coupling(cfg, result);
  result.table.provenance =
      provenance_header("check", cfg.canonical_json, cfg.seed, "");
  result.table.columns = {
      "row",           "qme",
      "conservation",  "expected_conservation",
      "thermalization", "expected_thermalization",
      "complete_positivity", "expected_complete_positivity",
      "bond_currents_zero",
      "conservation_residual", "dissipator_norm", "thermal_distance",
      "thermal_slope", "kossakowski_min", "max_bond_current"};

  const SpinChainSystem sys = system_from(cfg, cfg.g);
  const bool trivial = cfg.n_sites < 3;  // no interior conservation probes

  // equalized baths for the thermalization audit
  std::vector<BathSpec> eq_baths;
  for (const BathSpec& b : cfg.baths) {
    BathSpec e = b;
    e.beta = cfg.baths[0].beta;
    e.mu = cfg.baths[0].mu;
    eq_baths.push_back(e);
  }

  auto expected = [&](QmeKind kind, const char* what) -> bool {
    if (cfg.n_sites == 1) return true;  // every audit passes trivially
    const std::string w(what);
    switch (kind) {
      case QmeKind::redfield:
        return w == "cp" ? false : true;
      case QmeKind::local_lindblad:
        return w == "therm" ? false : true;
      case QmeKind::eigenbasis_lindblad:
        return w == "cons" ? (trivial ? true : false) : true;
      case QmeKind::universal_lindblad:
        return w == "cons" ? (trivial ? true : false) : true;
    }
    return true;
  };

  bool all_match = true;
  for (QmeKind kind : cfg.qmes) {
    const std::string label = qme_label(kind);
    const GeneratorParts parts = build_generator(
        kind, sys, cfg.baths, cfg.epsilon, cfg.quadrature,
        cfg.secular_tolerance);

    // complete positivity
    const double koss_min = extract_kossakowski(parts).min_eigenvalue;
    const bool cp_pass = koss_min >= -1e-10;

    // local conservation laws
    const std::vector<Matrix> ops = conserved_test_operators(sys);
    const double diss_norm = parts.dissipator.matrix.norm();
    double residual = 0.0;
    bool cons_pass = true;
    if (!ops.empty()) {
      residual = conservation_audit(parts, sys, ops,
                                    state_panel(cfg, sys.dim(), 20));
      if (residual < 1e-12 * diss_norm) {
        cons_pass = true;
      } else if (residual > 1e-6) {
        cons_pass = false;
      } else {
        cons_pass = false;
        result.messages.push_back("check: " + label +
                                  ".conservation residual is ambiguous");
      }
    }

    // thermalization against the equal-bath Gibbs state
    const GeneratorParts eq_base = build_generator(
        kind, sys, eq_baths, cfg.epsilon, cfg.quadrature,
        cfg.secular_tolerance);
    std::vector<double> distances;
    for (double e : cfg.epsilon_grid) {
      const GeneratorParts scaled = with_epsilon(eq_base, e);
      distances.push_back(thermalization_check(scaled, sys, eq_baths[0].beta,
                                               eq_baths[0].mu));
    }
    const double max_distance =
        *std::max_element(distances.begin(), distances.end());
    double slope = std::nan("");
    if (max_distance >= 1e-8) {
      try {
        slope = scaling_slope(cfg.epsilon_grid, distances).slope;
      } catch (const InsufficientData&) {
      }
    }
    const bool therm_pass = max_distance < 1e-8 || slope >= 1.7;

    // bond currents at the configured steady state (exactly zero for the
    // secular generator)
    double max_bond = 0.0;
    if (cfg.n_sites >= 2) {
      const SteadyStateReport ness = solve_ness(parts);
      for (int j = 1; j <= cfg.n_sites - 1; ++j)
        max_bond = std::max(max_bond,
                            std::abs(bond_current(ness.rho, sys, j)));
    }
    const bool bonds_zero = max_bond < 1e-12;

    const bool cons_expected = expected(kind, "cons");
    const bool therm_expected = expected(kind, "therm");
    const bool cp_expected = expected(kind, "cp");

    auto pf = [](bool b) { return std::string(b ? "pass" : "fail"); };
    result.table.add_row({"check", label, pf(cons_pass), pf(cons_expected),
                          pf(therm_pass), pf(therm_expected), pf(cp_pass),
                          pf(cp_expected), bonds_zero ? "1" : "0",
                          fmt(residual), fmt(diss_norm), fmt(max_distance),
                          fmt(slope), fmt(koss_min), fmt(max_bond)});

    auto mismatch = [&](const char* what, bool got, bool want) {
      if (got != want && all_match) {
        std::ostringstream msg;
        msg << "check mismatch: " << label << "." << what << " expected "
            << (want ? "pass" : "fail") << " got " << (got ? "pass" : "fail");
        result.messages.push_back(msg.str());
      }
      if (got != want) all_match = false;
    };
    mismatch("conservation", cons_pass, cons_expected);
    mismatch("thermalization", therm_pass, therm_expected);
    mismatch("complete_positivity", cp_pass, cp_expected);
    if (kind == QmeKind::eigenbasis_lindblad && cfg.n_sites >= 2)
      mismatch("bond_currents_zero", bonds_zero, true);
  }
  result.exit_code = all_match ? 0 : 1;
  return result;
}

CommandResult cmd_evolve(const ExperimentConfig& cfg) {
  CommandResult result;
  warn_weak_coupling(cfg, result);
  result.table.provenance =
      provenance_header("evolve", cfg.canonical_json, cfg.seed, "");
  result.table.columns = {"row", "qme", "t", "trace", "min_eigenvalue",
                          "distance_to_ness"};

  const SpinChainSystem sys = system_from(cfg, cfg.g);
  const int d = sys.dim();

  Matrix rho0;
  if (cfg.evolve_initial == "maximally_mixed") {
    rho0 = Matrix::Identity(d, d) / static_cast<double>(d);
  } else if (cfg.evolve_initial == "gibbs_left") {
    rho0 = gibbs_state(sys, cfg.baths[0].beta, cfg.baths[0].mu);
  } else if (cfg.evolve_initial.rfind("superposition:", 0) == 0) {
    const std::string spec = cfg.evolve_initial.substr(14);
    const auto comma = spec.find(',');
    if (comma == std::string::npos)
      throw ConfigError("config: evolve.initial: superposition needs 'a,b'");
    const int a = std::stoi(spec.substr(0, comma));
    const int b = std::stoi(spec.substr(comma + 1));
    const EigenBasis basis = eigendecompose(sys, cfg.degeneracy_tolerance);
    if (a < 0 || b < 0 || a >= d || b >= d)
      throw ConfigError("config: evolve.initial: eigenstate index out of "
                        "range");
    const Vector psi =
        (basis.vectors.col(a) + basis.vectors.col(b)) / std::sqrt(2.0);
    rho0 = psi * psi.adjoint();
  } else {
    throw ConfigError("config: evolve.initial: unknown initial state '" +
                      cfg.evolve_initial + "'");
  }

  for (QmeKind kind : cfg.qmes) {
    const GeneratorParts parts = build_generator(
        kind, sys, cfg.baths, cfg.epsilon, cfg.quadrature,
        cfg.secular_tolerance);
    const SteadyStateReport ness = solve_ness(parts);
    const double t_max =
        cfg.evolve_t_max > 0 ? cfg.evolve_t_max : 100.0 / ness.gap;
    const Matrix liou = parts.liouvillian();
    const Matrix step = (t_max / cfg.evolve_steps * liou).exp();
    Vector v = vectorize(rho0);
    for (int i = 0; i <= cfg.evolve_steps; ++i) {
      const double t = t_max * i / cfg.evolve_steps;
      Matrix rho = unvectorize(v);
      rho = 0.5 * (rho + rho.adjoint()).eval();
      result.table.add_row({"evolve", qme_label(kind), fmt(t),
                            fmt(rho.trace().real()), fmt(min_eigenvalue(rho)),
                            fmt(trace_distance(rho, ness.rho))});
      if (i < cfg.evolve_steps) v = step * v;
    }
  }
  return result;
}

}  // namespace qmelab
