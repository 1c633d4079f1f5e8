#include "ringbec/io.hpp"

#include "ringbec/config.hpp"
#include "ringbec/errors.hpp"

#include "json.hpp"
#include <openssl/evp.h>

#include <array>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>

namespace ringbec {

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

void write_mesh_csv(const RingMesh& mesh, const fs::path& triangles, const fs::path& edges,
                    const fs::path& vertices) {
  {
    auto out = open_out(triangles);
    out << "id,v0,v1,v2,cx,cy,area\n";
    for (int k = 0; k < mesh.num_triangles(); ++k) {
      const auto& t = mesh.triangles()[k];
      out << k << ',' << t[0] << ',' << t[1] << ',' << t[2] << ',' << mesh.circumcenters()[k].x()
          << ',' << mesh.circumcenters()[k].y() << ',' << mesh.areas()[k] << '\n';
    }
    finish(out, triangles);
  }
  {
    auto out = open_out(edges);
    out << "id,K,L,length,d,nx,ny\n";
    for (int e = 0; e < mesh.num_edges(); ++e) {
      const Edge& ed = mesh.edges()[e];
      out << e << ',' << ed.first << ',' << ed.second << ',' << ed.length << ',' << ed.distance
          << ',' << ed.normal.x() << ',' << ed.normal.y() << '\n';
    }
    finish(out, edges);
  }
  auto out = open_out(vertices);
  out << "id,x,y\n";
  for (int v = 0; v < mesh.num_vertices(); ++v) {
    out << v << ',' << mesh.vertices()[v].x() << ',' << mesh.vertices()[v].y() << '\n';
  }
  finish(out, vertices);
}

void write_vtk(const RingMesh& mesh, const fs::path& path, const std::vector<CellData>& cells) {
  auto out = open_out(path);
  out << "# vtk DataFile Version 3.0\nringbec\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const Vec2& v : mesh.vertices()) out << v.x() << ' ' << v.y() << " 0\n";
  const int nt = mesh.num_triangles();
  out << "CELLS " << nt << ' ' << 4 * nt << '\n';
  for (const auto& t : mesh.triangles()) out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out << "CELL_TYPES " << nt << '\n';
  for (int k = 0; k < nt; ++k) out << "5\n";
  if (!cells.empty()) out << "CELL_DATA " << nt << '\n';
  for (const auto& c : cells) {
    check_size(mesh, c.values.size(), "write_vtk");
    out << "SCALARS " << c.name << " double 1\nLOOKUP_TABLE default\n";
    for (int k = 0; k < nt; ++k) out << c.values[k] << '\n';
  }
  finish(out, path);
}

std::vector<CellData> field_cell_data(const Field& u) {
  RealField phase(u.size());
  for (Eigen::Index k = 0; k < u.size(); ++k) phase[k] = std::arg(u[k]);
  return {{"density", u.cwiseAbs2()}, {"phase", phase}, {"re", u.real()}, {"im", u.imag()}};
}

void write_field_csv(const RingMesh& mesh, const Field& u, const fs::path& path) {
  check_size(mesh, u.size(), "write_field_csv");
  auto out = open_out(path);
  out << "id,x,y,re,im\n";
  for (int k = 0; k < mesh.num_triangles(); ++k) {
    const Vec2& x = mesh.circumcenters()[k];
    out << k << ',' << x.x() << ',' << x.y() << ',' << u[k].real() << ',' << u[k].imag() << '\n';
  }
  finish(out, path);
}

Field read_field_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open field file " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "id,x,y,re,im") throw ConfigError(path.string() + ": unexpected field CSV header");
  std::vector<Complex> values;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::array<double, 5> v{};
    for (int i = 0; i < 5; ++i) {
      if (!std::getline(ss, cell, ',')) {
        throw ConfigError(path.string() + ": line " + std::to_string(line_no) + ": expected 5 columns");
      }
      v[i] = std::stod(cell);
    }
    if (static_cast<int>(v[0]) != static_cast<int>(values.size())) {
      throw ConfigError(path.string() + ": line " + std::to_string(line_no) + ": ids must be consecutive");
    }
    values.emplace_back(v[3], v[4]);
  }
  Field u(static_cast<Eigen::Index>(values.size()));
  for (std::size_t k = 0; k < values.size(); ++k) u[k] = values[k];
  return u;
}

void write_observables_csv(const std::vector<ObservableSample>& samples, const fs::path& path) {
  auto out = open_out(path);
  out << "t,mass,energy,err_gs\n";
  for (const auto& s : samples) {
    out << s.t << ',' << s.mass << ',' << s.energy << ',';
    if (s.err_gs) out << *s.err_gs;
    out << '\n';
  }
  finish(out, path);
}

void write_vortices_csv(const std::vector<TimedVortex>& vortices, const fs::path& path) {
  auto out = open_out(path);
  out << "t,method,x,y,index,lambda,extremum,triangle,unreliable\n";
  for (const auto& v : vortices) {
    const auto& r = v.record;
    out << v.t << ',' << to_string(r.method) << ',' << r.position.x() << ',' << r.position.y()
        << ',' << r.index << ',' << r.characteristic_length << ',' << r.extremum_value << ','
        << r.triangle << ',' << (r.unreliable ? 1 : 0) << '\n';
  }
  finish(out, path);
}

void write_mode_coefficients_csv(const ModeCoefficients& c, const fs::path& path) {
  auto out = open_out(path);
  out << "p,l,re,im,abs2\n";
  for (int p = 0; p <= c.P; ++p) {
    for (int l = -c.L; l <= c.L; ++l) {
      const Complex v = c.at(p, l);
      out << p << ',' << l << ',' << v.real() << ',' << v.imag() << ',' << std::norm(v) << '\n';
    }
  }
  finish(out, path);
}

void write_eigenvalues_csv(const std::vector<EigenvalueRow>& rows, const std::string& order_name,
                           const std::string& index_name, const fs::path& path) {
  auto out = open_out(path);
  out << order_name << ',' << index_name << ",lambda\n";
  for (const auto& r : rows) out << r.order << ',' << r.index << ',' << r.lambda << '\n';
  finish(out, path);
}

void write_triplets_csv(const SparseMatrix& m, const fs::path& path) {
  auto out = open_out(path);
  out << "row,col,value\n";
  for (const auto& t : to_triplets(m)) out << t.row() << ',' << t.col() << ',' << t.value() << '\n';
  finish(out, path);
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string() + " for hashing");
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest initialization failed");
  }
  std::array<char, 1 << 16> buf{};
  while (in) {
    in.read(buf.data(), buf.size());
    const auto got = in.gcount();
    if (got > 0 && EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(got)) != 1) {
      throw std::runtime_error("sha256: digest update failed");
    }
  }
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_DigestFinal_ex(ctx.get(), md.data(), &len) != 1) {
    throw std::runtime_error("sha256: digest finalization failed");
  }
  std::ostringstream hex;
  hex << std::hex << std::setfill('0');
  for (unsigned int i = 0; i < len; ++i) hex << std::setw(2) << static_cast<int>(md[i]);
  return hex.str();
}

void Manifest::add(const fs::path& file, const std::string& kind) {
  Entry e;
  e.path = fs::relative(file, root_).generic_string();
  e.kind = kind;
  e.sha256 = sha256_file(file);
  e.bytes = fs::file_size(file);
  entries_.push_back(std::move(e));
}

fs::path Manifest::write(const std::string& config_text, const std::string& summary_json) const {
  nlohmann::ordered_json j;
  j["config"] = config_text;
  j["summary"] = summary_json.empty() ? nlohmann::ordered_json::object()
                                      : nlohmann::ordered_json::parse(summary_json);
  j["files"] = nlohmann::ordered_json::array();
  for (const auto& e : entries_) {
    j["files"].push_back({{"path", e.path}, {"kind", e.kind}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  }
  const fs::path path = root_ / "manifest.json";
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  finish(out, path);
  return path;
}

}  // namespace ringbec
