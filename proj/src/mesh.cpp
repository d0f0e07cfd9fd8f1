#include "obs/mesh.hpp"

#include "obs/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <unordered_map>

namespace obs::mesh {

namespace {

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

// Sorted facet tuple packed into 64 bits; supports up to 2^21 vertices.
std::uint64_t facet_key(std::span<const int> f) {
  std::array<std::uint64_t, 3> v{0, 0, 0};
  for (std::size_t i = 0; i < f.size(); ++i) v[i] = static_cast<std::uint64_t>(f[i]) + 1;
  std::sort(v.begin(), v.begin() + static_cast<long>(f.size()));
  return (v[0] << 42) | (v[1] << 21) | v[2];
}

double simplex_signed_volume(const Eigen::MatrixXd& pts, std::span<const int> idx) {
  const int n = static_cast<int>(pts.rows());
  Eigen::MatrixXd J(n, n);
  for (int k = 0; k < n; ++k) J.col(k) = pts.col(idx[k + 1]) - pts.col(idx[0]);
  return J.determinant() / geometry::factorial(n);
}

class MidpointTable {
 public:
  explicit MidpointTable(Eigen::MatrixXd& pts) : pts_(pts), count_(static_cast<int>(pts.cols())) {}

  int get(int a, int b) {
    const auto key = edge_key(a, b);
    if (auto it = table_.find(key); it != table_.end()) return it->second;
    if (count_ == pts_.cols()) pts_.conservativeResize(Eigen::NoChange, std::max<Eigen::Index>(8, 2 * count_));
    pts_.col(count_) = 0.5 * (pts_.col(a) + pts_.col(b));
    table_.emplace(key, count_);
    return count_++;
  }

  int lookup(int a, int b) const {
    auto it = table_.find(edge_key(a, b));
    if (it == table_.end()) throw MeshError("boundary facet edge has no midpoint in its cell");
    return it->second;
  }

  int count() const { return count_; }

 private:
  Eigen::MatrixXd& pts_;
  int count_;
  std::unordered_map<std::uint64_t, int> table_;
};

}  // namespace

SimplicialMesh::SimplicialMesh(geometry::Simplex domain, int level, Eigen::MatrixXd vertices,
                               std::vector<int> cells, std::vector<std::uint8_t> parity, std::vector<int> facets,
                               std::vector<int> facet_face)
    : domain_(std::move(domain)),
      dim_(domain_.dim()),
      level_(level),
      vertices_(std::move(vertices)),
      cells_(std::move(cells)),
      parity_(std::move(parity)),
      facets_(std::move(facets)),
      facet_face_(std::move(facet_face)) {
  if (dim_ != 2 && dim_ != 3) throw UnsupportedDimension("meshes are available for n = 2 and n = 3 only");
  if (vertices_.cols() >= (1 << 21)) throw MeshError("mesh too large for facet keys");

  std::unordered_map<std::uint64_t, int> owner;
  owner.reserve(facet_face_.size());
  for (int f = 0; f < facet_count(); ++f) owner.emplace(facet_key(facet(f)), f);
  facet_cell_.assign(facet_face_.size(), -1);

  std::array<int, 3> local{};
  for (int c = 0; c < cell_count(); ++c) {
    const auto cv = cell(c);
    for (int skip = 0; skip <= dim_; ++skip) {
      int k = 0;
      for (int i = 0; i <= dim_; ++i)
        if (i != skip) local[k++] = cv[i];
      auto it = owner.find(facet_key(std::span<const int>(local.data(), static_cast<std::size_t>(dim_))));
      if (it == owner.end()) continue;
      if (facet_cell_[it->second] != -1) throw MeshError("boundary facet shared by two cells");
      facet_cell_[it->second] = c;
    }
  }
}

SimplicialMesh base_mesh(const geometry::Simplex& s) {
  const int n = s.dim();
  if (n != 2 && n != 3) throw UnsupportedDimension("meshing supports n = 2 and n = 3 only");
  Eigen::MatrixXd pts(n, n + 1);
  for (int j = 0; j <= n; ++j) pts.col(j) = s.vertex(j);

  std::vector<int> cell(n + 1);
  for (int j = 0; j <= n; ++j) cell[j] = j;
  if (s.signed_det() < 0) std::swap(cell[n - 1], cell[n]);

  std::vector<int> facets;
  std::vector<int> tags;
  for (int j = 0; j <= n; ++j) {
    for (int v = 0; v <= n; ++v)
      if (v != j) facets.push_back(v);
    tags.push_back(j);
  }
  std::vector<std::uint8_t> parity(1, static_cast<std::uint8_t>(n == 3 && s.signed_det() < 0));
  return SimplicialMesh(s, 0, std::move(pts), std::move(cell), std::move(parity), std::move(facets), std::move(tags));
}

SimplicialMesh refine(const SimplicialMesh& m) {
  const int n = m.dim();
  Eigen::MatrixXd pts = m.vertices();
  MidpointTable mid(pts);

  std::vector<int> cells;
  std::vector<std::uint8_t> parity;
  const int children = n == 2 ? 4 : 8;
  cells.reserve(static_cast<std::size_t>(m.cell_count()) * children * (n + 1));
  parity.reserve(static_cast<std::size_t>(m.cell_count()) * children);

  for (int c = 0; c < m.cell_count(); ++c) {
    const auto cv = m.cell(c);
    if (n == 2) {
      const int a = cv[0], b = cv[1], d = cv[2];
      const int ab = mid.get(a, b), ad = mid.get(a, d), bd = mid.get(b, d);
      for (int v : {a, ab, ad, ab, b, bd, ad, bd, d, bd, ad, ab}) cells.push_back(v);
      parity.insert(parity.end(), 4, 0);
      continue;
    }
    std::array<int, 4> x{cv[0], cv[1], cv[2], cv[3]};
    if (m.bey_parity(c)) std::swap(x[2], x[3]);
    const int x01 = mid.get(x[0], x[1]), x02 = mid.get(x[0], x[2]), x03 = mid.get(x[0], x[3]);
    const int x12 = mid.get(x[1], x[2]), x13 = mid.get(x[1], x[3]), x23 = mid.get(x[2], x[3]);
    const std::array<std::array<int, 4>, 8> kids{{
        {x[0], x01, x02, x03},
        {x01, x[1], x12, x13},
        {x02, x12, x[2], x23},
        {x03, x13, x23, x[3]},
        {x01, x02, x03, x13},
        {x01, x02, x12, x13},
        {x02, x03, x13, x23},
        {x02, x12, x13, x23},
    }};
    for (auto kid : kids) {
      const bool flip = simplex_signed_volume(pts, kid) < 0.0;
      if (flip) std::swap(kid[2], kid[3]);
      cells.insert(cells.end(), kid.begin(), kid.end());
      parity.push_back(static_cast<std::uint8_t>(flip));
    }
  }

  std::vector<int> facets;
  std::vector<int> tags;
  for (int f = 0; f < m.facet_count(); ++f) {
    const auto fv = m.facet(f);
    const int tag = m.facet_face(f);
    if (n == 2) {
      const int ab = mid.lookup(fv[0], fv[1]);
      for (int v : {fv[0], ab, ab, fv[1]}) facets.push_back(v);
      tags.insert(tags.end(), 2, tag);
      continue;
    }
    const int a = fv[0], b = fv[1], d = fv[2];
    const int ab = mid.lookup(a, b), ad = mid.lookup(a, d), bd = mid.lookup(b, d);
    for (int v : {a, ab, ad, ab, b, bd, ad, bd, d, ab, bd, ad}) facets.push_back(v);
    tags.insert(tags.end(), 4, tag);
  }

  pts.conservativeResize(Eigen::NoChange, mid.count());
  return SimplicialMesh(m.domain(), m.level() + 1, std::move(pts), std::move(cells), std::move(parity),
                        std::move(facets), std::move(tags));
}

SimplicialMesh uniform_mesh(const geometry::Simplex& s, int level) {
  if (level < 0) throw InvalidInput("refinement level must be non-negative");
  SimplicialMesh m = base_mesh(s);
  for (int l = 0; l < level; ++l) m = refine(m);
  return m;
}

std::vector<bool> boundary_vertex_mask(const SimplicialMesh& m) {
  std::vector<bool> mask(m.vertex_count(), false);
  for (int v : m.facet_data()) mask[v] = true;
  return mask;
}

std::vector<int> interior_vertices(const SimplicialMesh& m) {
  const auto mask = boundary_vertex_mask(m);
  std::vector<int> out;
  for (int v = 0; v < m.vertex_count(); ++v)
    if (!mask[v]) out.push_back(v);
  return out;
}

double facet_area(const SimplicialMesh& m, int f) {
  const auto fv = m.facet(f);
  const int n = m.dim();
  Eigen::MatrixXd span(n, n - 1);
  for (int k = 1; k < n; ++k) span.col(k - 1) = m.vertex(fv[k]) - m.vertex(fv[0]);
  return geometry::gram_volume(span) / geometry::factorial(n - 1);
}

std::vector<FacetArea> facets_of_face(const SimplicialMesh& m, int j) {
  if (j < 0 || j > m.dim()) throw InvalidInput("face index " + std::to_string(j) + " out of range");
  std::vector<FacetArea> out;
  for (int f = 0; f < m.facet_count(); ++f)
    if (m.facet_face(f) == j) out.push_back({f, facet_area(m, f)});
  return out;
}

double signed_cell_volume(const SimplicialMesh& m, int c) { return simplex_signed_volume(m.vertices(), m.cell(c)); }

double total_volume(const SimplicialMesh& m) {
  double sum = 0.0;
  for (int c = 0; c < m.cell_count(); ++c) sum += signed_cell_volume(m, c);
  return sum;
}

void validate(const SimplicialMesh& m) {
  const int n = m.dim();
  for (int c = 0; c < m.cell_count(); ++c)
    if (!(signed_cell_volume(m, c) > 0.0)) throw MeshError("cell " + std::to_string(c) + " is not positively oriented");

  const double vol = geometry::volume(m.domain());
  if (std::abs(total_volume(m) - vol) > 1e-12 * vol) throw MeshError("cell volumes do not sum to the domain volume");

  // every cell face is shared by two cells, or is exactly one tagged boundary facet
  std::unordered_map<std::uint64_t, int> uses;
  std::array<int, 3> local{};
  for (int c = 0; c < m.cell_count(); ++c) {
    const auto cv = m.cell(c);
    for (int skip = 0; skip <= n; ++skip) {
      int k = 0;
      for (int i = 0; i <= n; ++i)
        if (i != skip) local[k++] = cv[i];
      ++uses[facet_key(std::span<const int>(local.data(), static_cast<std::size_t>(n)))];
    }
  }
  std::size_t open = 0;
  for (const auto& [key, count] : uses) {
    if (count > 2) throw MeshError("non-conforming mesh: a face is shared by more than two cells");
    if (count == 1) ++open;
  }
  if (open != static_cast<std::size_t>(m.facet_count()))
    throw MeshError("boundary facets do not match the open faces of the mesh");

  const auto faces = geometry::faces(m.domain());
  const double tol = 1e-10 * m.domain().max_edge_length();
  for (int f = 0; f < m.facet_count(); ++f) {
    if (m.facet_cell(f) < 0) throw MeshError("boundary facet " + std::to_string(f) + " has no adjoining cell");
    if (uses[facet_key(m.facet(f))] != 1) throw MeshError("tagged facet is interior");
    const auto& face = faces[m.facet_face(f)];
    for (int v : m.facet(f))
      if (std::abs(face.normal.dot(m.vertex(v) - face.centroid)) > tol)
        throw MeshError("facet " + std::to_string(f) + " is off the plane of its parent face");
  }
}

std::string to_json(const SimplicialMesh& m) {
  nlohmann::json verts = nlohmann::json::array();
  for (int v = 0; v < m.vertex_count(); ++v) {
    const Eigen::VectorXd p = m.vertex(v);
    verts.push_back(std::vector<double>(p.data(), p.data() + p.size()));
  }
  nlohmann::json cells = nlohmann::json::array();
  for (int c = 0; c < m.cell_count(); ++c) {
    const auto cv = m.cell(c);
    cells.push_back(std::vector<int>(cv.begin(), cv.end()));
  }
  nlohmann::json facets = nlohmann::json::array();
  for (int f = 0; f < m.facet_count(); ++f) {
    const auto fv = m.facet(f);
    facets.push_back({{"vertices", std::vector<int>(fv.begin(), fv.end())}, {"face", m.facet_face(f)}});
  }
  return nlohmann::json{{"dim", m.dim()}, {"level", m.level()}, {"vertices", verts}, {"cells", cells},
                        {"boundary_facets", facets}}
      .dump();
}

}  // namespace obs::mesh
