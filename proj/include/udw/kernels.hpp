#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "udw/numerics.hpp"
#include "udw/smearing.hpp"
#include "udw/spacetime.hpp"

namespace udw {

enum class StateTag { vacuum, thermal, coherent, one_particle };

const char* to_string(StateTag tag);
StateTag state_tag_from_string(const std::string& name);

struct FieldState {
    StateTag tag = StateTag::vacuum;
    double beta = 0.0;   // thermal only
    double delta = 0.0;  // coherent and one_particle only

    static FieldState vacuum() { return {}; }
    static FieldState thermal(double beta) { return {StateTag::thermal, beta, 0.0}; }
    static FieldState coherent(double delta) { return {StateTag::coherent, 0.0, delta}; }
    static FieldState one_particle(double delta) { return {StateTag::one_particle, 0.0, delta}; }

    bool operator==(const FieldState&) const = default;
};

// Throws DomainError unless exactly the parameters of the tag are set, positive and finite.
void validate(const FieldState& state);

// Real part of the pointlike Wightman function W(a, b) (half the Hadamard function).
// Throws SingularityError on the light cone.
double hadamard_point(const FieldState& state, const Event& a, const Event& b);

// Classical field of the Gaussian source centered at the spatial origin.
double phi0_coherent(double delta, const Event& x);

// Smeared classical field phi0(Lambda) for a Gaussian region of width ell.
double phi0_coherent_smeared(double delta, const GaussianRegion& region);

// Mode function F(x) = <0|phi(x)|1_f> of the one-particle wavepacket centered at the origin.
numerics::complex F_oneparticle(double delta, const Event& x);

// F(Lambda) for a Gaussian region, by radial momentum quadrature.
numerics::complex F_oneparticle_smeared(double delta, const GaussianRegion& region, double tol);

// Smeared Wightman function W(Lambda_i, Lambda_j) by momentum-space quadrature.
numerics::complex wightman_smeared_quadrature(const FieldState& state, const GaussianRegion& ri,
                                              const GaussianRegion& rj, double tol = numerics::default_tol);

// Closed form where one exists: vacuum at equal time or equal position, and
// coherent states built on those. Empty otherwise.
std::optional<numerics::complex> wightman_smeared_closed(const FieldState& state, const GaussianRegion& ri,
                                                         const GaussianRegion& rj);

// Smeared causal propagator E(Lambda_i, Lambda_j) = 2 Im W, valid for every state.
double causal_smeared(const GaussianRegion& ri, const GaussianRegion& rj);

struct RetardedValue {
    double value = 0.0;
    // Both centers within 5 ell of each other's light cone and in time: the
    // G_R / E identification is unreliable there.
    bool precision_warning = false;
};

RetardedValue retarded_smeared(const GaussianRegion& ri, const GaussianRegion& rj);

struct KernelMatrix {
    std::size_t n = 0;
    Eigen::MatrixXd H;
    Eigen::MatrixXd E;
    Eigen::MatrixXd GR;
    Eigen::MatrixXd Delta;
    Eigen::VectorXd Wdiag;
    double lambda = 1.0;
    std::optional<FieldState> state;
    std::vector<std::string> warnings;

    // Builds Delta and Wdiag from H, E and GR.
    static KernelMatrix from_parts(Eigen::MatrixXd H, Eigen::MatrixXd GR, double lambda);

    // Throws ConsistencyError when an invariant is violated beyond tol.
    void check_invariants(double tol = 1e-12) const;
};

// lambda^2-scaled kernels for a list of equal-width regions. Only zero-mean
// quasifree states (vacuum, thermal) are accepted.
KernelMatrix assemble_kernels(const FieldState& state, const std::vector<GaussianRegion>& regions,
                              double lambda, double tol = numerics::default_tol, unsigned threads = 1);

}  // namespace udw
