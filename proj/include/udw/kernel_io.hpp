#pragma once

#include <filesystem>
#include <string>

#include <Eigen/Dense>

#include "udw/kernels.hpp"

namespace udw {

// Row-major CSV without header, one matrix row per line.
void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_matrix_csv(const std::filesystem::path& path);

// Writes <stem>.json plus <stem>_{H,E,GR,Delta,Wdiag}.csv into dir; returns the JSON path.
std::filesystem::path write_kernel_matrix(const KernelMatrix& k, const std::filesystem::path& dir,
                                          const std::string& stem = "kernels");

// Reads the JSON envelope and the CSV files it names (paths relative to the
// envelope). E, Delta and Wdiag are optional and derived from H and GR when
// absent; when present they must agree with the invariants to `tol` relative.
KernelMatrix read_kernel_matrix(const std::filesystem::path& json_path, double tol = 1e-12);

}  // namespace udw
