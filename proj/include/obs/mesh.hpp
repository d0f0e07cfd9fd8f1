#pragma once

#include "obs/geometry.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace obs::mesh {

/// Conforming simplicial mesh of a triangle or tetrahedron.
///
/// Cells are stored positively oriented. In 3D each cell also carries a parity
/// bit: when set, the vertex order used by Bey's refinement is the stored order
/// with the last two vertices exchanged. Boundary facets carry the index of the
/// face of the parent simplex they lie on, and the cell they bound.
class SimplicialMesh {
 public:
  SimplicialMesh(geometry::Simplex domain, int level, Eigen::MatrixXd vertices, std::vector<int> cells,
                 std::vector<std::uint8_t> parity, std::vector<int> facets, std::vector<int> facet_face);

  int dim() const { return dim_; }
  int level() const { return level_; }
  const geometry::Simplex& domain() const { return domain_; }

  int vertex_count() const { return static_cast<int>(vertices_.cols()); }
  int cell_count() const { return static_cast<int>(cells_.size()) / (dim_ + 1); }
  int facet_count() const { return static_cast<int>(facet_face_.size()); }

  const Eigen::MatrixXd& vertices() const { return vertices_; }
  auto vertex(int v) const { return vertices_.col(v); }

  std::span<const int> cell(int c) const {
    return {cells_.data() + static_cast<std::size_t>(c) * (dim_ + 1), static_cast<std::size_t>(dim_ + 1)};
  }
  std::span<const int> facet(int f) const {
    return {facets_.data() + static_cast<std::size_t>(f) * dim_, static_cast<std::size_t>(dim_)};
  }
  int facet_face(int f) const { return facet_face_[f]; }
  /// Index of the unique cell adjoining boundary facet f, or -1.
  int facet_cell(int f) const { return facet_cell_[f]; }
  bool bey_parity(int c) const { return !parity_.empty() && parity_[c] != 0; }

  const std::vector<int>& cell_data() const { return cells_; }
  const std::vector<int>& facet_data() const { return facets_; }
  const std::vector<int>& facet_faces() const { return facet_face_; }

 private:
  geometry::Simplex domain_;
  int dim_;
  int level_;
  Eigen::MatrixXd vertices_;
  std::vector<int> cells_;
  std::vector<std::uint8_t> parity_;
  std::vector<int> facets_;
  std::vector<int> facet_face_;
  std::vector<int> facet_cell_;
};

using MeshPtr = std::shared_ptr<const SimplicialMesh>;

/// One cell, n+1 tagged boundary facets. Throws UnsupportedDimension unless n is 2 or 3.
SimplicialMesh base_mesh(const geometry::Simplex& s);

/// Red refinement: 4 similar children per triangle, 8 Bey children per tetrahedron.
SimplicialMesh refine(const SimplicialMesh& m);

/// base_mesh refined `level` times.
SimplicialMesh uniform_mesh(const geometry::Simplex& s, int level);

std::vector<int> interior_vertices(const SimplicialMesh& m);
std::vector<bool> boundary_vertex_mask(const SimplicialMesh& m);

struct FacetArea {
  int facet = 0;
  double area = 0.0;
};

/// Boundary facets lying on face j of the parent simplex, with their (n-1)-volumes.
std::vector<FacetArea> facets_of_face(const SimplicialMesh& m, int j);

double facet_area(const SimplicialMesh& m, int f);
double signed_cell_volume(const SimplicialMesh& m, int c);
double total_volume(const SimplicialMesh& m);

/// Checks orientation, volume, conformity and facet tagging; throws MeshError.
void validate(const SimplicialMesh& m);

/// {"vertices": [...], "cells": [...], "boundary_facets": [{"vertices": [...], "face": j}, ...]}
std::string to_json(const SimplicialMesh& m);

}  // namespace obs::mesh
