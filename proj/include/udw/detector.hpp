#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "udw/kernels.hpp"

namespace udw {

inline constexpr std::size_t max_qubits = 12;

struct DensityMatrixDiagnostics {
    double hermiticity_error = 0.0;  // max |rho - rho^dagger|
    double trace_error = 0.0;        // |Tr rho - 1|
    double min_eigenvalue = 0.0;
};

// Joint detector state in the mu-basis |mu_1 ... mu_n>, mu = +/-1, with qubit 1
// the most significant bit and + before -.
struct DensityMatrix {
    std::size_t n_qubits = 0;
    Eigen::MatrixXcd entries;

    DensityMatrixDiagnostics diagnostics() const;
    // Throws ConsistencyError outside Hermitian 1e-12, trace 1e-12, eigenvalue -1e-10.
    void check_invariants() const;
};

// Exact final state of n gapless detectors coupled to a quasifree field, all
// starting in the ground state. Throws CapacityError for n > max_qubits.
DensityMatrix density_matrix(const KernelMatrix& kernels, unsigned threads = 1);

enum class Axis { I, X, Y, Z };

struct PauliLabel {
    Axis axis = Axis::I;
    std::size_t qubit = 1;  // 1-based
};

// Tr(rho * tensor product of the labels); identity on unlisted qubits.
double pauli_ev_oracle(const DensityMatrix& rho, const std::vector<PauliLabel>& ops);

enum class CorrelatorKind { ZZ, YY, Zi, Zj, YiXj, XiYj };

const char* to_string(CorrelatorKind kind);

// Closed-form Pauli expectation values; i, j are 0-based detector indices.
double pauli_ev_closed(const KernelMatrix& kernels, std::size_t i, std::size_t j, CorrelatorKind kind);

// Mean of `shots` +/-1 outcomes with P(+1) = (1 + exact_ev)/2.
double sample_correlator(double exact_ev, std::uint64_t shots, std::uint64_t seed);

// Independent per-observable seed from a base seed and an observable index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

// Valid random kernels for testing: GR strictly lower triangular in [-0.3, 0.3],
// E and Delta from GR, H = A A^T / n plus a diagonal boost large enough that
// H + iE is positive definite.
KernelMatrix random_kernels(std::size_t n, std::uint64_t seed);

// The correlators used to reconstruct one pair (i, j).
struct CorrelationRecord {
    std::size_t i = 0;
    std::size_t j = 0;
    double zz = 1.0;
    double yy = 0.0;
    double zi = 1.0;
    double zj = 1.0;
    // Indexed by the third detector k; entries at k = i and k = j are unused.
    std::vector<double> yx_ik;  // <Y_i X_k>
    std::vector<double> xy_kj;  // <X_k Y_j>
    std::optional<std::uint64_t> shots;  // empty: exact
};

// Every distinct observable of the protocol for n detectors. Each is measured
// (or sampled) once and shared by all pair records that use it.
struct ObservableTable {
    std::size_t n = 0;
    Eigen::VectorXd z;    // <Z_i>
    Eigen::MatrixXd zz;   // <Z_i Z_j>, symmetric, diagonal unused
    Eigen::MatrixXd yy;   // <Y_i Y_j>, symmetric, diagonal unused
    Eigen::MatrixXd yx;   // yx(i, k) = <Y_i X_k>, diagonal unused
    std::optional<std::uint64_t> shots;
    std::uint64_t seed = 0;

    CorrelationRecord record(std::size_t i, std::size_t j) const;
};

ObservableTable exact_observables(const KernelMatrix& kernels);
ObservableTable sample_observables(const ObservableTable& exact, std::uint64_t shots, std::uint64_t seed);

// CSV with columns i,j,kind,exact,sampled,shots,seed (indices 0-based). The
// seed column holds the per-observable derived seed.
void write_correlations_csv(const std::filesystem::path& path, const ObservableTable& exact,
                            const ObservableTable& sampled);

}  // namespace udw
