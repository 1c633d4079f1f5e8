#include "ringbec/config.hpp"
#include "ringbec/errors.hpp"
#include "ringbec/harness.hpp"
#include "ringbec/io.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

#include <fstream>
#include <iostream>

using namespace ringbec;

namespace {

struct Options {
  std::string config_path;
  std::string out;
  std::string preset;
  int threads = 0;
  std::string field;
  bool quiet = false;
};

RunConfig resolve_config(const Options& opt) {
  if (!opt.config_path.empty() && !opt.preset.empty()) {
    throw ConfigError("--config and --preset are mutually exclusive");
  }
  RunConfig c;
  if (!opt.preset.empty()) {
    c = preset_config(opt.preset);
  } else if (!opt.config_path.empty()) {
    c = load_config(opt.config_path);
  }
  if (!opt.out.empty()) c.output.dir = opt.out;
  c.validate();
  return c;
}

Logger make_logger(const Options& opt) {
  if (opt.quiet) return {};
  return [](const std::string& msg) { std::cerr << msg << '\n'; };
}

void write_text(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

int cmd_stage(const Options& opt, PipelineStage last) {
  const RunConfig c = resolve_config(opt);
  const PipelineResult r = run_pipeline(c, c.output.dir, last, make_logger(opt));
  std::cout << "manifest: " << r.manifest.string() << '\n';
  if (last == PipelineStage::Full) {
    for (const auto& [method, recs] : r.final_vortices) {
      std::cout << to_string(method) << ": " << recs.size() << " vortices at t=" << c.split.t_max << '\n';
    }
  }
  return 0;
}

int cmd_vortices(const Options& opt) {
  const RunConfig c = resolve_config(opt);
  if (opt.field.empty()) throw ConfigError("vortices: --field is required");
  const RingMesh mesh = make_mesh(c);
  const Field u = read_field_csv(opt.field);
  if (u.size() != mesh.num_triangles()) {
    throw ConfigError("vortices: field has " + std::to_string(u.size()) + " values but the mesh has " +
                      std::to_string(mesh.num_triangles()) + " triangles");
  }
  const fs::path out = c.output.dir;
  Manifest manifest(out);
  std::vector<TimedVortex> list;
  for (const auto& r : detect_all(mesh, u, c.detect)) list.push_back({0.0, r});
  write_vortices_csv(list, out / "vortices.csv");
  manifest.add(out / "vortices.csv", "vortices");
  manifest.write(serialize_config(c), "");
  std::cout << list.size() << " detections written to " << (out / "vortices.csv").string() << '\n';
  return 0;
}

int cmd_modes(const Options& opt) {
  const RunConfig c = resolve_config(opt);
  const fs::path out = c.output.dir;
  Manifest manifest(out);
  std::vector<EigenvalueRow> bessel;
  for (int alpha = 0; alpha <= 3; ++alpha) {
    for (const auto& p : annulus_eigenpairs(alpha, 3, c.mesh.r_min, c.mesh.r_max)) {
      bessel.push_back({p.alpha, p.beta, p.lambda});
    }
  }
  write_eigenvalues_csv(bessel, "alpha", "beta", out / "annulus_eigenvalues.csv");
  manifest.add(out / "annulus_eigenvalues.csv", "modes");

  std::vector<EigenvalueRow> radial;
  for (int l = 0; l <= c.modes.L; ++l) {
    const RadialModes rm = radial_modes(l, c.modes.P, c.modes.n, c.radial_params());
    for (int p = 0; p <= c.modes.P; ++p) radial.push_back({l, p, rm.eigenvalues[p]});
  }
  write_eigenvalues_csv(radial, "l", "p", out / "mode_eigenvalues.csv");
  manifest.add(out / "mode_eigenvalues.csv", "modes");

  if (!opt.field.empty()) {
    const RingMesh mesh = make_mesh(c);
    const Field u = read_field_csv(opt.field);
    if (u.size() != mesh.num_triangles()) throw ConfigError("modes: field size does not match the mesh");
    const ModeBasis basis = mode_basis(mesh, c.modes.P, c.modes.L, c.modes.n, c.radial_params());
    write_mode_coefficients_csv(decompose(mesh, u, basis), out / "mode_coefficients.csv");
    manifest.add(out / "mode_coefficients.csv", "modes");
  }
  manifest.write(serialize_config(c), "");
  std::cout << "eigenvalue tables written to " << out.string() << '\n';
  return 0;
}

int cmd_conv_space(const Options& opt) {
  const RunConfig c = resolve_config(opt);
  const SpaceConvergenceResult r = run_space_convergence(c, make_logger(opt));
  const fs::path out = c.output.dir;
  std::ostringstream table;
  table << std::setprecision(17) << "h,beta,n_triangles,lambda,residual\n";
  for (const auto& row : r.rows) {
    table << row.h << ',' << row.beta << ',' << row.n_triangles << ',' << row.lambda << ','
          << row.residual << '\n';
  }
  std::ostringstream slopes;
  slopes << std::setprecision(17) << "beta,slope\n";
  for (const auto& [beta, s] : r.slopes) {
    slopes << beta << ',' << s << '\n';
    std::cout << "beta=" << beta << " slope=" << s << '\n';
  }
  write_text(out / "conv_space.csv", table.str());
  write_text(out / "conv_space_slopes.csv", slopes.str());
  Manifest manifest(out);
  manifest.add(out / "conv_space.csv", "harness");
  manifest.add(out / "conv_space_slopes.csv", "harness");
  manifest.write(serialize_config(c), "");
  return 0;
}

int cmd_conv_time(const Options& opt) {
  const RunConfig c = resolve_config(opt);
  const auto rows = run_time_convergence(c, make_logger(opt));
  const fs::path out = c.output.dir;
  std::ostringstream table;
  table << std::setprecision(17) << "k,steps,tau,diff_coarse,diff_fine,m_phi\n";
  for (const auto& row : rows) {
    table << row.k << ',' << row.steps << ',' << row.tau << ',' << row.diff_coarse << ','
          << row.diff_fine << ',' << row.m_phi << '\n';
    std::cout << "k=" << row.k << " m_phi=" << row.m_phi << '\n';
  }
  write_text(out / "conv_time.csv", table.str());
  Manifest manifest(out);
  manifest.add(out / "conv_time.csv", "harness");
  manifest.write(serialize_config(c), "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-volume Gross-Pitaevskii solver on a ring"};
  app.require_subcommand(1);
  app.fallthrough();
  Options opt;
  app.add_option("--config", opt.config_path, "INI configuration file");
  app.add_option("--out", opt.out, "Output directory (overrides output.dir)");
  app.add_option("--threads", opt.threads, "OpenMP threads (0: runtime default)")->check(CLI::NonNegativeNumber);
  app.add_option("--preset", opt.preset, "Named configuration")
      ->check(CLI::IsMember({"paper62", "unstable-dirichlet", "unstable-neumann"}));
  app.add_flag("--quiet", opt.quiet, "Suppress progress messages");

  auto* mesh = app.add_subcommand("mesh", "Build the triangulation and TPFA operator");
  auto* gs = app.add_subcommand("ground-state", "Compute the ground state");
  auto* ev = app.add_subcommand("evolve", "Ground state followed by the split-step evolution");
  auto* vort = app.add_subcommand("vortices", "Detect vortices in a field CSV");
  vort->add_option("--field", opt.field, "Field CSV (id,x,y,re,im)")->required();
  auto* modes = app.add_subcommand("modes", "Eigenvalue tables and optional mode decomposition");
  modes->add_option("--field", opt.field, "Field CSV to decompose");
  auto* cs = app.add_subcommand("conv-space", "Space-order convergence harness");
  auto* ct = app.add_subcommand("conv-time", "Time-order convergence harness");
  auto* pipe = app.add_subcommand("pipeline", "Full run: mesh, ground state, evolution, analysis");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
#ifdef _OPENMP
    if (opt.threads > 0) omp_set_num_threads(opt.threads);
#endif
    if (mesh->parsed()) return cmd_stage(opt, PipelineStage::Mesh);
    if (gs->parsed()) return cmd_stage(opt, PipelineStage::GroundState);
    if (ev->parsed()) return cmd_stage(opt, PipelineStage::Evolve);
    if (pipe->parsed()) return cmd_stage(opt, PipelineStage::Full);
    if (vort->parsed()) return cmd_vortices(opt);
    if (modes->parsed()) return cmd_modes(opt);
    if (cs->parsed()) return cmd_conv_space(opt);
    if (ct->parsed()) return cmd_conv_time(opt);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
