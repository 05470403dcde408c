#pragma once

#include <complex>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "udw/detector.hpp"

namespace udw {

enum class Regime { spacelike, causal };

const char* to_string(Regime r);

// Pair-level inputs to the causal correction from one third detector k.
struct CausalTerm {
    std::size_t k = 0;
    double yx_ik = 0.0;  // <Y_i X_k>
    double zi = 1.0;
    double xy_kj = 0.0;  // <X_k Y_j>
    double zj = 1.0;
};

std::vector<CausalTerm> causal_terms(const CorrelationRecord& rec);

// H_ij = (1/2) arctanh(yy / zz).
double reconstruct_spacelike(const CorrelationRecord& rec);

// C_ij = (1/2) sum_k arctanh[(yx_ik / zi) (xy_kj / zj)].
double causal_correction(const std::vector<CausalTerm>& terms);

// H_ij = (1/2) arctanh(yy / zz) - C_ij.
double reconstruct_general(const CorrelationRecord& rec, double correction);
double reconstruct_general(const CorrelationRecord& rec);

// W_ij = H_ij / 2 + i E_ij / 2.
std::complex<double> assemble_wightman(double H, double E);

struct ReconstructionResult {
    std::size_t i = 0;
    std::size_t j = 0;
    double H_reconstructed = 0.0;
    std::optional<double> H_true;
    double C_ij = 0.0;
    std::complex<double> W;
    Regime regime = Regime::spacelike;
    std::vector<std::string> flags;
};

// Reconstructs one pair. Errors from the inversion are recorded as flags with
// H_reconstructed = NaN rather than thrown.
ReconstructionResult reconstruct_pair(const CorrelationRecord& rec, double E_ij, std::optional<double> H_true = {});

// All pairs i < j of an observable table, in row-major order.
std::vector<ReconstructionResult> reconstruct_all(const ObservableTable& table, const Eigen::MatrixXd& E,
                                                  const std::optional<Eigen::MatrixXd>& H_true = {});

// Largest |H_reconstructed - H_true| over results that carry both; NaN entries count as infinite.
double max_abs_error(const std::vector<ReconstructionResult>& results);
double rms_error(const std::vector<ReconstructionResult>& results);

// With max_error set, a final row "summary" carries max |H_rec - H_true| in the
// H_reconstructed column.
void write_reconstruction_csv(const std::filesystem::path& path, const std::vector<ReconstructionResult>& results,
                              std::optional<double> max_error = std::nullopt);

}  // namespace udw
