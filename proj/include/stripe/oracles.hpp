#pragma once

// Brute-force verifiers for the test suites. They deliberately share no code path with
// the production solvers they check: the spectrum comes from a finite-difference
// matrix on a truncated line, the energy from a fresh ODE integration.

#include <cstddef>
#include <utility>
#include <vector>

#include "stripe/profile_solver.hpp"

namespace stripe::oracles {

/// Dirichlet truncation of the full-line operator to [-L, L] with about N interior nodes.
struct DenseOperatorSpec {
    double L = 0.0;
    std::size_t N = 4000;

    /// L = R + 12/sqrt(alpha), N = 4000.
    static DenseOperatorSpec defaults_for(const Params& p);
    /// Throws Error unless L >= R + 12/sqrt(alpha) and N >= 4000.
    void validate(const Params& p) const;
};

struct DenseSpectrum {
    /// Eigenvalues >= -tol_edge.
    int count = 0;
    /// Those eigenvalues, largest first.
    std::vector<double> top;
    std::size_t nodes = 0;
    double spacing = 0.0;
};

/// Eigenvalues of phi'' + (f'(V) 1_{|y|<=R} - alpha 1_{|y|>R}) phi on the truncated line,
/// counted by Sturm sequences of the symmetric tridiagonal matrix.
DenseSpectrum dense_spectrum(const Profile& V, const DenseOperatorSpec& spec, double tol_edge = 1e-6);

/// Top eigenvalue extrapolated from N and 2N (Richardson, second order).
double richardson_top_eigenvalue(const Profile& V, const DenseOperatorSpec& spec);

struct ScanBracket {
    double lo = 0.0;
    double hi = 0.0;
};

/// Residual sign changes on a uniform grid of n points over [0, 2]; n >= 10^4.
std::vector<ScanBracket> brute_profile_scan(const Params& p, std::size_t n);

/// Energy on (-R, R) by composite Gauss-Legendre on `panels` panels, integrating the
/// profile ODE afresh from (s, sqrt(alpha) s).
double quadrature_energy(const Profile& V, std::size_t panels = 256);

}  // namespace stripe::oracles
