#include "ringbec/harness.hpp"

#include "ringbec/errors.hpp"

#include "json.hpp"

#include <chrono>
#include <iomanip>
#include <cmath>
#include <set>
#include <sstream>

namespace ringbec {

namespace {

void say(const Logger& log, const std::string& msg) {
  if (log) log(msg);
}

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(name) + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string(name) + ": " + e.what());
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string(name) + ": " + e.what());
  }
}

std::string step_tag(int step) {
  std::ostringstream s;
  s << "step" << std::setw(6) << std::setfill('0') << step;
  return s.str();
}

}  // namespace

RingMesh make_mesh(const RunConfig& config) { return build_ring_mesh(config.mesh); }

GroundStateResult make_ground_state(const RunConfig& config, const RingMesh& mesh,
                                    const LaplacianOperator& op) {
  const PotentialParams pot = config.physics.potential();
  EnergyFunctional functional(mesh, op, eval_trap(mesh, pot), config.physics.m, config.physics.gamma);
  GroundStateResult gs = compute_ground_state(config.flow, functional);
  if (!gs.converged) {
    std::ostringstream msg;
    msg << "gradient flow stopped after " << gs.iterations << " iterations with residual "
        << gs.residual << " > " << config.flow.epsilon << ": " << gs.diagnostic;
    throw NumericalError(msg.str());
  }
  return gs;
}

Field make_initial_state(const RunConfig& config, const RingMesh& mesh, const Field& ground_state) {
  if (config.split.initial == InitialState::Unstable) return make_unstable_state(mesh, ground_state);
  return ground_state;
}

std::vector<VortexRecord> detect_all(const RingMesh& mesh, const Field& u, const DetectionParams& params) {
  std::vector<VortexRecord> out = detect_by_density(mesh, u, params);
  for (const auto& r : detect_by_vorticity(mesh, regularized_vorticity(mesh, u, params.delta),
                                           params.vort_threshold,
                                           DetectionMethod::RegularizedVorticity)) {
    out.push_back(r);
  }
  for (const auto& r : detect_by_vorticity(mesh, pseudo_vorticity(mesh, u), params.vort_threshold,
                                           DetectionMethod::PseudoVorticity)) {
    out.push_back(r);
  }
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (den == 0.0) throw std::invalid_argument("fit_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / den;
}

SpaceConvergenceResult run_space_convergence(const RunConfig& config, const Logger& log) {
  const auto& hs = config.harness.space_h;
  if (std::set<double>(hs.begin(), hs.end()).size() < 3) {
    throw ConfigError("harness.space_h needs at least 3 distinct resolutions");
  }
  if (config.harness.space_beta.empty()) throw ConfigError("harness.space_beta is empty");
  int beta_max = 0;
  for (int b : config.harness.space_beta) beta_max = std::max(beta_max, b);
  const auto pairs = annulus_eigenpairs(0, beta_max, config.mesh.r_min, config.mesh.r_max);

  SpaceConvergenceResult result;
  for (double h : hs) {
    MeshParams mp = config.mesh;
    mp.h = h;
    mp.n_circles.reset();
    mp.n_points.reset();
    const RingMesh mesh = build_ring_mesh(mp);
    const LaplacianOperator op = assemble_laplacian(mesh, BoundaryCondition::Dirichlet);
    for (int beta : config.harness.space_beta) {
      const AnnulusEigenpair& pair = pairs[beta - 1];
      const Field u = annulus_eigenfunction_field(mesh, pair, 1);
      const Field r = -op.apply(u) - pair.lambda * u;
      SpaceConvergenceRow row{h, beta, mesh.num_triangles(), pair.lambda, norm(mesh, r)};
      std::ostringstream msg;
      msg << "conv-space h=" << h << " N=" << row.n_triangles << " beta=" << beta
          << " residual=" << row.residual;
      say(log, msg.str());
      result.rows.push_back(row);
    }
  }
  for (int beta : config.harness.space_beta) {
    std::vector<double> x, y;
    for (const auto& row : result.rows) {
      if (row.beta != beta) continue;
      x.push_back(std::log(row.h));
      y.push_back(std::log(row.residual));
    }
    result.slopes[beta] = fit_slope(x, y);
  }
  return result;
}

std::vector<TimeConvergenceRow> run_time_convergence(const RunConfig& config, const RingMesh& mesh,
                                                     const LaplacianOperator& op, const Field& u0,
                                                     const Logger& log) {
  if (config.harness.time_k.empty()) throw ConfigError("harness.time_k is empty");
  PotentialParams pot = config.physics.potential();
  pot.V_p = 0.0;
  const PotentialEvaluator potential(mesh, pot);
  const double t_max = config.harness.time_t_max;

  std::map<int, Field> finals;  // step count -> y
  auto solve = [&](int steps) -> const Field& {
    auto it = finals.find(steps);
    if (it != finals.end()) return it->second;
    SplitStepConfig sc = config.split_config();
    sc.tau = t_max / steps;
    sc.t_max = t_max;
    sc.snapshot_stride = 0;
    const StrangStepper stepper(mesh, op, potential, sc);
    Field y = stepper.advance(u0, 0.0, steps);
    if (!y.allFinite()) throw NumericalError("time harness: non-finite state with J=" + std::to_string(steps));
    return finals.emplace(steps, std::move(y)).first->second;
  };

  std::vector<TimeConvergenceRow> rows;
  for (int k : config.harness.time_k) {
    const int steps = 1 << k;
    TimeConvergenceRow row;
    row.k = k;
    row.steps = steps;
    row.tau = t_max / steps;
    const Field& y2 = solve(steps / 2);
    const Field& y1 = solve(steps);
    const Field& yh = solve(steps * 2);
    row.diff_coarse = norm(mesh, Field(y2 - y1));
    row.diff_fine = norm(mesh, Field(y1 - yh));
    row.m_phi = order_estimate(mesh, y2, y1, yh);
    std::ostringstream msg;
    msg << "conv-time k=" << k << " m_phi=" << row.m_phi;
    say(log, msg.str());
    rows.push_back(row);
  }
  return rows;
}

std::vector<TimeConvergenceRow> run_time_convergence(const RunConfig& config, const Logger& log) {
  const RingMesh mesh = make_mesh(config);
  const LaplacianOperator op = assemble_laplacian(mesh, config.physics.bc);
  const GroundStateResult gs = make_ground_state(config, mesh, op);
  Field u0 = gs.state;
  if (config.harness.time_kick != 0.0) {
    for (int k = 0; k < mesh.num_triangles(); ++k) {
      u0[k] *= std::polar(1.0, config.harness.time_kick * mesh.circumcenters()[k].x());
    }
  }
  return run_time_convergence(config, mesh, op, u0, log);
}

PipelineResult run_pipeline(const RunConfig& config, const fs::path& out_dir, PipelineStage last,
                            const Logger& log) {
  config.validate();
  using clock = std::chrono::steady_clock;
  const auto t_start = clock::now();
  fs::create_directories(out_dir);
  Manifest manifest(out_dir);
  PipelineResult result;
  nlohmann::ordered_json summary;

  const RingMesh mesh = stage("mesh", [&] {
    RingMesh m = make_mesh(config);
    write_mesh_csv(m, out_dir / "mesh_triangles.csv", out_dir / "mesh_edges.csv",
                   out_dir / "mesh_vertices.csv");
    manifest.add(out_dir / "mesh_triangles.csv", "mesh");
    manifest.add(out_dir / "mesh_edges.csv", "mesh");
    manifest.add(out_dir / "mesh_vertices.csv", "mesh");
    if (config.output.vtk) {
      write_vtk(m, out_dir / "mesh.vtk", {{"area", Eigen::Map<const RealField>(m.areas().data(), m.num_triangles())}});
      manifest.add(out_dir / "mesh.vtk", "mesh");
    }
    return m;
  });
  const auto& layout = *mesh.layout();
  result.counts = {static_cast<int>(layout.radii.size()), layout.n_points};
  result.n_triangles = mesh.num_triangles();
  summary["mesh"] = {{"n_circles", result.counts.n_circles},
                     {"n_points", result.counts.n_points},
                     {"n_triangles", result.n_triangles}};
  say(log, "mesh: N=" + std::to_string(result.n_triangles));

  const LaplacianOperator op = stage("laplacian", [&] {
    LaplacianOperator o = assemble_laplacian(mesh, config.physics.bc);
    write_triplets_csv(o.flux, out_dir / "laplacian_triplets.csv");
    manifest.add(out_dir / "laplacian_triplets.csv", "operator");
    return o;
  });

  auto finish = [&] {
    summary["elapsed_s"] = std::chrono::duration<double>(clock::now() - t_start).count();
    result.manifest = manifest.write(serialize_config(config), summary.dump());
    return result;
  };
  if (last == PipelineStage::Mesh) return finish();

  result.ground_state = stage("ground_state", [&] {
    GroundStateResult gs = make_ground_state(config, mesh, op);
    write_field_csv(mesh, gs.state, out_dir / "ground_state.csv");
    manifest.add(out_dir / "ground_state.csv", "field");
    {
      std::vector<ObservableSample> hist;
      for (std::size_t i = 0; i < gs.energy_history.size(); ++i) {
        hist.push_back({static_cast<double>(i), 1.0, gs.energy_history[i], std::nullopt});
      }
      write_observables_csv(hist, out_dir / "ground_state_energy.csv");
      manifest.add(out_dir / "ground_state_energy.csv", "observables");
    }
    if (config.output.vtk) {
      write_vtk(mesh, out_dir / "ground_state.vtk", field_cell_data(gs.state));
      manifest.add(out_dir / "ground_state.vtk", "field");
    }
    return gs;
  });
  summary["ground_state"] = {{"iterations", result.ground_state.iterations},
                             {"rejected_steps", result.ground_state.rejected_steps},
                             {"residual", result.ground_state.residual},
                             {"energy", result.ground_state.energy_history.back()}};
  say(log, "ground_state: iterations=" + std::to_string(result.ground_state.iterations));
  if (last == PipelineStage::GroundState) return finish();

  const bool analyze = last == PipelineStage::Full;
  std::optional<ModeBasis> basis;
  if (analyze && config.modes.enabled) {
    basis = stage("modes", [&] {
      ModeBasis b = mode_basis(mesh, config.modes.P, config.modes.L, config.modes.n, config.radial_params());
      std::vector<EigenvalueRow> rows;
      for (int p = 0; p <= b.P; ++p) {
        for (int l = -b.L; l <= b.L; ++l) rows.push_back({l, p, b.eigenvalue(p, l)});
      }
      write_eigenvalues_csv(rows, "l", "p", out_dir / "mode_eigenvalues.csv");
      manifest.add(out_dir / "mode_eigenvalues.csv", "modes");
      return b;
    });
  }

  const int total_steps = config.split_config().num_steps();
  stage("evolve", [&] {
    const PotentialEvaluator potential(mesh, config.physics.potential());
    const Field u0 = make_initial_state(config, mesh, result.ground_state.state);
    EvolveOptions opts;
    opts.reference = &result.ground_state.state;
    opts.keep_snapshots = false;
    opts.observer = [&](const Snapshot& snap, const ObservableSample&) {
      const bool last_snap = snap.step == total_steps;
      const std::string tag = step_tag(snap.step);
      if (config.output.all_snapshots || snap.step == 0 || last_snap) {
        const fs::path f = out_dir / "snapshots" / (tag + ".csv");
        write_field_csv(mesh, snap.state, f);
        manifest.add(f, "snapshot");
        if (config.output.vtk) {
          const fs::path v = out_dir / "snapshots" / (tag + ".vtk");
          write_vtk(mesh, v, field_cell_data(snap.state));
          manifest.add(v, "snapshot");
        }
      }
      if (analyze) {
        for (const auto& r : detect_all(mesh, snap.state, config.detect)) {
          result.vortices.push_back({snap.t, r});
          if (last_snap) result.final_vortices[r.method].push_back(r);
        }
        if (basis) {
          const fs::path f = out_dir / "modes" / (tag + ".csv");
          write_mode_coefficients_csv(decompose(mesh, snap.state, *basis), f);
          manifest.add(f, "modes");
        }
      }
      say(log, "evolve: t=" + format_double(snap.t));
    };
    EvolveResult ev = evolve(mesh, op, potential, config.split_config(), u0, opts);
    result.observables = ev.observables;
    result.final_state = std::move(ev.final_state);
    write_observables_csv(result.observables, out_dir / "observables.csv");
    manifest.add(out_dir / "observables.csv", "observables");
    return 0;
  });
  {
    const auto& first = result.observables.front();
    const auto& final = result.observables.back();
    double max_err = 0.0;
    for (const auto& o : result.observables) max_err = std::max(max_err, o.err_gs.value_or(0.0));
    summary["evolve"] = {{"steps", total_steps},
                         {"t_final", final.t},
                         {"mass_drift", std::abs(final.mass - first.mass)},
                         {"max_err_gs", max_err}};
  }
  if (!analyze) return finish();

  stage("vortices", [&] {
    write_vortices_csv(result.vortices, out_dir / "vortices.csv");
    manifest.add(out_dir / "vortices.csv", "vortices");
    return 0;
  });
  nlohmann::ordered_json vj = nlohmann::ordered_json::object();
  for (DetectionMethod m : {DetectionMethod::Density, DetectionMethod::RegularizedVorticity,
                            DetectionMethod::PseudoVorticity}) {
    int pos = 0, neg = 0;
    for (const auto& r : result.final_vortices[m]) (r.index > 0 ? pos : neg) += 1;
    vj[to_string(m)] = {{"count", pos + neg}, {"positive", pos}, {"negative", neg}};
  }
  summary["final_vortices"] = vj;
  return finish();
}

}  // namespace ringbec
