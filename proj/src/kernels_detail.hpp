#pragma once

#include "obs/kernels.hpp"

namespace obs::kernels::detail {

void element_block(const mesh::SimplicialMesh& m, int c, const Eigen::MatrixXd& metric, double scale,
                   double mass_factor, double* K, double* M);
double mass_factor(int n);
Eigen::VectorXd trace_row(const mesh::SimplicialMesh& m, int facet, const Eigen::VectorXd& normal,
                          const Eigen::MatrixXd& values);
std::complex<double> pair_row(const Eigen::VectorXcd& c, const Eigen::MatrixXd& G, const Eigen::VectorXd& lambda,
                              double T, Eigen::Index k);
void vertex_cells(const mesh::SimplicialMesh& m, std::vector<int>& start, std::vector<int>& cells);
Eigen::MatrixXd cell_value_gradient(const mesh::SimplicialMesh& m, int c, const Eigen::MatrixXd& values,
                                    double& volume);

}  // namespace obs::kernels::detail
