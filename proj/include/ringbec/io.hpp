#pragma once

#include "ringbec/dynamics.hpp"
#include "ringbec/fv.hpp"
#include "ringbec/mesh.hpp"
#include "ringbec/spectral.hpp"
#include "ringbec/vortex.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace ringbec {

namespace fs = std::filesystem;

/// Triangles (id, v0, v1, v2, cx, cy, area), edges (id, K, L or -1, length,
/// d, nx, ny) and vertices (id, x, y).
void write_mesh_csv(const RingMesh& mesh, const fs::path& triangles, const fs::path& edges,
                    const fs::path& vertices);

struct CellData {
  std::string name;
  RealField values;
};

/// Legacy ASCII VTK unstructured grid with per-triangle scalars.
void write_vtk(const RingMesh& mesh, const fs::path& path, const std::vector<CellData>& cells);

/// Convenience cell data for a complex field: density, phase, Re, Im.
std::vector<CellData> field_cell_data(const Field& u);

/// id, x, y, re, im.
void write_field_csv(const RingMesh& mesh, const Field& u, const fs::path& path);
Field read_field_csv(const fs::path& path);

void write_observables_csv(const std::vector<ObservableSample>& samples, const fs::path& path);

struct TimedVortex {
  double t = 0.0;
  VortexRecord record;
};

/// t, method, x, y, index, lambda, extremum, triangle, unreliable.
void write_vortices_csv(const std::vector<TimedVortex>& vortices, const fs::path& path);

/// p, l, re, im, abs2.
void write_mode_coefficients_csv(const ModeCoefficients& c, const fs::path& path);

struct EigenvalueRow {
  int order = 0;  // alpha or l
  int index = 0;  // beta or p
  double lambda = 0.0;
};
void write_eigenvalues_csv(const std::vector<EigenvalueRow>& rows, const std::string& order_name,
                           const std::string& index_name, const fs::path& path);

/// row, col, value.
void write_triplets_csv(const SparseMatrix& m, const fs::path& path);

/// Lowercase hex SHA-256 of the file contents.
std::string sha256_file(const fs::path& path);

/// Records every written file with its content hash.
class Manifest {
 public:
  explicit Manifest(fs::path root) : root_(std::move(root)) {}

  void add(const fs::path& file, const std::string& kind);
  /// Writes manifest.json in the root directory; `config_text` is echoed.
  fs::path write(const std::string& config_text, const std::string& summary_json) const;

  struct Entry {
    std::string path;
    std::string kind;
    std::string sha256;
    std::uintmax_t bytes = 0;
  };
  const std::vector<Entry>& entries() const { return entries_; }
  const fs::path& root() const { return root_; }

 private:
  fs::path root_;
  std::vector<Entry> entries_;
};

}  // namespace ringbec
