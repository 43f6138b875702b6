#include "khdns/linalg.hpp"

#include <stdexcept>
#include <utility>
#include <vector>

namespace khdns {

namespace {

/// r = b - S x with extended-precision accumulation (column sweep over the
/// compressed storage, fixed order).
Vec residual_ld(const SpMat& S, const Vec& x, const Vec& b)
{
    const int n = static_cast<int>(S.rows());
    std::vector<long double> acc(n);
    for (int i = 0; i < n; ++i)
        acc[i] = static_cast<long double>(b[i]);
    for (int j = 0; j < S.outerSize(); ++j) {
        const long double xj = x[j];
        for (SpMat::InnerIterator it(S, j); it; ++it)
            acc[it.row()] -= static_cast<long double>(it.value()) * xj;
    }
    Vec r(n);
    for (int i = 0; i < n; ++i)
        r[i] = static_cast<double>(acc[i]);
    return r;
}

} // namespace

SaddleSolver::SaddleSolver(SpMat S, const VelocitySpace& sp, Options opt)
    : opt_(opt)
{
    const int nsys = sp.num_system_dofs();
    if (S.rows() != nsys || S.cols() != nsys)
        throw std::invalid_argument("SaddleSolver: matrix/space size mismatch");
    const int nvel = sp.num_velocity_dofs();
    const int npres = sp.num_pressure_dofs();
    if (npres < 2)
        throw std::invalid_argument(
            "SaddleSolver: needs at least two pressure dofs");

    if (opt_.pressure_shift != 0.0) {
        for (int p = 0; p < npres; ++p)
            S.coeffRef(nvel + p, nvel + p) -= opt_.pressure_shift;
    }

    S.makeCompressed();
    S_ = std::move(S);

    if (opt_.single_precision_factor) {
        const Eigen::SparseMatrix<float> Sf = S_.cast<float>();
        lu_f_.analyzePattern(Sf);
        lu_f_.factorize(Sf);
        if (lu_f_.info() != Eigen::Success)
            throw std::runtime_error(
                "SaddleSolver: single precision factorization failed");
    } else {
        lu_.analyzePattern(S_);
        lu_.factorize(S_);
        if (lu_.info() != Eigen::Success)
            throw std::runtime_error("SaddleSolver: factorization failed");
    }
}

Vec SaddleSolver::backsolve(const Vec& bp) const
{
    if (opt_.single_precision_factor) {
        const Eigen::VectorXf xf = lu_f_.solve(bp.cast<float>());
        return xf.cast<double>();
    }
    return lu_.solve(bp);
}

Vec SaddleSolver::solve(const Vec& b, SolveReport* rep) const
{
    ++solves_;
    Vec x = backsolve(b);

    SolveReport local;
    if (opt_.refine) {
        const double bnorm = b.norm();
        const double scale = bnorm > 0.0 ? bnorm : 1.0;
        Vec r = residual_ld(S_, x, b);
        double res = r.norm() / scale;
        local.initial_residual = res;
        double prev = res;
        while (res > opt_.rtol) {
            if (local.refine_steps >= opt_.max_refine)
                throw std::runtime_error(
                    "SaddleSolver: refinement did not reach rtol");
            x += backsolve(r);
            ++local.refine_steps;
            r = residual_ld(S_, x, b);
            res = r.norm() / scale;
            if (res >= 0.5 * prev && res > opt_.rtol)
                throw std::runtime_error(
                    "SaddleSolver: refinement stalled at relative residual " +
                    std::to_string(res));
            prev = res;
        }
        local.final_residual = res;
        refines_ += local.refine_steps;
        worst_residual_ = std::max(worst_residual_, res);
    }
    if (rep)
        *rep = local;
    return x;
}

bool spd_factorization_succeeds(const SpMat& S)
{
    Eigen::SimplicialLLT<SpMat, Eigen::Lower> llt;
    llt.compute(S);
    return llt.info() == Eigen::Success;
}

} // namespace khdns
