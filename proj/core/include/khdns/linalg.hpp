#pragma once

#include "khdns/assembly.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace khdns {

/// Diagnostics of one linear solve.
struct SolveReport {
    int refine_steps = 0;
    double initial_residual = 0.0; ///< relative, straight after backsolve
    double final_residual = 0.0;   ///< relative, after refinement
};

/// Direct factorization of the (velocity, pressure, multiplier) saddle
/// system with iterative refinement.
///
/// The matrix is symmetric indefinite, so plain Cholesky cannot apply
/// (see spd_factorization_succeeds) and unpivoted LDL^T needs an ordering
/// that keeps every pivot nonzero -- constraining the ordering that much
/// ruins the fill (orders of magnitude in factor time on fine meshes).
/// Sparse LU with COLAMD and partial pivoting handles the zero pressure
/// diagonal without ordering constraints and stays deterministic.
///
/// With single_precision_factor the factorization runs in float and the
/// refinement loop recovers double accuracy; residuals are accumulated in
/// extended precision in both modes, so rtol is meaningful down to ~1e-14.
class SaddleSolver {
public:
    struct Options {
        double rtol = 1e-12; ///< relative residual target
        int max_refine = 10;
        bool single_precision_factor = false;
        /// Adds -pressure_shift to every pressure diagonal entry before
        /// factorizing (a regularized variant of the solve).
        double pressure_shift = 0.0;
        /// false: single backsolve, no residual check at all.
        bool refine = true;
    };

    SaddleSolver(SpMat S, const VelocitySpace& sp, Options opt);

    /// Solve S x = b.  Throws std::runtime_error if the refinement stalls
    /// above rtol.
    Vec solve(const Vec& b, SolveReport* rep = nullptr) const;

    const Options& options() const { return opt_; }
    int size() const { return static_cast<int>(S_.rows()); }

    long total_solves() const { return solves_; }
    long total_refine_steps() const { return refines_; }
    double worst_residual() const { return worst_residual_; }

private:
    Vec backsolve(const Vec& bp) const;

    Options opt_;
    SpMat S_; ///< kept for residual evaluation
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
    Eigen::SparseLU<Eigen::SparseMatrix<float>, Eigen::COLAMDOrdering<int>>
        lu_f_;
    mutable long solves_ = 0;
    mutable long refines_ = 0;
    mutable double worst_residual_ = 0.0;
};

/// Attempt a plain sparse Cholesky (LLT) factorization.  Saddle systems
/// must make this fail; kept as a structural cross-check so a change that
/// accidentally made the system definite (or lost the constraint block)
/// gets noticed.
bool spd_factorization_succeeds(const SpMat& S);

} // namespace khdns
