#include "igw/matops.hpp"

#include <map>
#include <memory>
#include <mutex>

namespace igw {

Index dim_from_vech_length(Index n)
{
    const Index d = static_cast<Index>(std::llround((std::sqrt(8.0 * static_cast<double>(n) + 1.0) - 1.0) / 2.0));
    if (d < 1 || vech_length(d) != n)
        throw DimensionMismatch("length " + std::to_string(n) + " is not d(d+1)/2 for any d >= 1");
    return d;
}

namespace {

struct DupCache {
    std::mutex mu;
    std::map<Index, std::unique_ptr<const MatrixXd>> dup;
    std::map<Index, std::unique_ptr<const MatrixXd>> pinv;
};

DupCache& cache()
{
    static DupCache c;
    return c;
}

}  // namespace

const MatrixXd& duplication(Index d)
{
    if (d < 1) throw InvalidShape("duplication: d must be >= 1");
    auto& c = cache();
    std::lock_guard<std::mutex> lock(c.mu);
    auto& slot = c.dup[d];
    if (!slot) slot = std::make_unique<const MatrixXd>(make_duplication<double>(d));
    return *slot;
}

const MatrixXd& duplication_pinv(Index d)
{
    if (d < 1) throw InvalidShape("duplication_pinv: d must be >= 1");
    auto& c = cache();
    std::lock_guard<std::mutex> lock(c.mu);
    auto& slot = c.pinv[d];
    if (!slot) slot = std::make_unique<const MatrixXd>(make_duplication_pinv<double>(d));
    return *slot;
}

MatrixXd spd_inverse(const MatrixXd& M)
{
    Eigen::LLT<MatrixXd> llt(M);
    if (llt.info() != Eigen::Success)
        throw NumericalFailure("spd_inverse: matrix is not positive definite");
    MatrixXd inv = llt.solve(MatrixXd::Identity(M.rows(), M.cols()));
    return (inv + inv.transpose()) / 2.0;
}

MatrixXd sym_inverse(const MatrixXd& M)
{
    Eigen::FullPivLU<MatrixXd> lu(M);
    if (!lu.isInvertible())
        throw NumericalFailure("sym_inverse: matrix is singular");
    MatrixXd inv = lu.inverse();
    if (!inv.allFinite()) throw NumericalFailure("sym_inverse: non-finite inverse");
    return (inv + inv.transpose()) / 2.0;
}

}  // namespace igw
