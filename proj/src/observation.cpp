#include "enkf/observation.hpp"

#include <algorithm>
#include <string>

#include "enkf/errors.hpp"

namespace enkf {

namespace {

void require_dim(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want)
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(want) +
                         ", got " + std::to_string(got));
}

}  // namespace

LinearObservation LinearObservation::selection(std::vector<Eigen::Index> indices, Eigen::Index n) {
  if (n < 1) throw DimensionError("state dimension must be positive");
  std::vector<Eigen::Index> sorted = indices;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ValidationError("selection indices must be distinct");
  for (auto i : indices)
    if (i < 0 || i >= n)
      throw ValidationError("selection index " + std::to_string(i) + " outside [0, " +
                            std::to_string(n) + ")");
  LinearObservation op;
  op.obs_dim_ = static_cast<Eigen::Index>(indices.size());
  op.state_dim_ = n;
  op.indices_ = std::move(indices);
  return op;
}

LinearObservation LinearObservation::dense(Eigen::MatrixXd h) {
  if (h.rows() < 1 || h.cols() < 1) throw DimensionError("empty observation matrix");
  if (!h.allFinite()) throw ValidationError("observation matrix has non-finite entries");
#ifndef NDEBUG
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(h);
  if (h.rows() > h.cols() || svd.singularValues().minCoeff() <= 1e-10)
    throw ValidationError("dense observation matrix must have full row rank");
#endif
  LinearObservation op;
  op.obs_dim_ = h.rows();
  op.state_dim_ = h.cols();
  op.matrix_ = std::move(h);
  return op;
}

LinearObservation LinearObservation::every_nth(Eigen::Index n, Eigen::Index stride,
                                               Eigen::Index offset) {
  if (stride < 1 || offset < 0 || offset >= stride)
    throw ValidationError("every_nth needs stride >= 1 and 0 <= offset < stride");
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = offset; i < n; i += stride) idx.push_back(i);
  return selection(std::move(idx), n);
}

Eigen::VectorXd LinearObservation::apply(const Eigen::VectorXd& x) const {
  require_dim(x.size(), state_dim_, "observation apply");
  if (matrix_) return (*matrix_) * x;
  Eigen::VectorXd out(obs_dim_);
  for (Eigen::Index o = 0; o < obs_dim_; ++o) out(o) = x(indices_[o]);
  return out;
}

Eigen::MatrixXd LinearObservation::apply(const Eigen::MatrixXd& x) const {
  require_dim(x.rows(), state_dim_, "observation apply");
  if (matrix_) return (*matrix_) * x;
  Eigen::MatrixXd out(obs_dim_, x.cols());
  for (Eigen::Index o = 0; o < obs_dim_; ++o) out.row(o) = x.row(indices_[o]);
  return out;
}

Eigen::RowVectorXd LinearObservation::row(Eigen::Index o) const {
  if (matrix_) return matrix_->row(o);
  Eigen::RowVectorXd r = Eigen::RowVectorXd::Zero(state_dim_);
  r(indices_[o]) = 1.0;
  return r;
}

Eigen::MatrixXd LinearObservation::to_dense() const {
  if (matrix_) return *matrix_;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(obs_dim_, state_dim_);
  for (Eigen::Index o = 0; o < obs_dim_; ++o) h(o, indices_[o]) = 1.0;
  return h;
}

Eigen::MatrixXd apply_ensemble(const LinearObservation& h, const Ensemble& ens) {
  return h.apply(ens.states());
}

ObsError ObsError::diagonal(Eigen::VectorXd variances) {
  if (variances.size() < 1) throw DimensionError("empty observation error");
  if (!variances.allFinite() || (variances.array() <= 0.0).any())
    throw ValidationError("observation error variances must be positive and finite");
  ObsError r;
  r.variances_ = std::move(variances);
  return r;
}

ObsError ObsError::full(Eigen::MatrixXd rmat) {
  if (rmat.rows() != rmat.cols() || rmat.rows() < 1)
    throw DimensionError("observation error covariance must be square");
  if (!rmat.allFinite()) throw ValidationError("observation error covariance is non-finite");
  if (!rmat.isApprox(rmat.transpose(), 1e-12))
    throw LinearSolveError("observation error covariance is not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(rmat);
  if (llt.info() != Eigen::Success)
    throw LinearSolveError("observation error covariance is not positive definite");
  ObsError r;
  r.variances_ = rmat.diagonal();
  r.full_ = std::move(rmat);
  r.chol_ = std::move(llt);
  return r;
}

Eigen::MatrixXd ObsError::dense() const {
  if (full_) return *full_;
  return variances_.asDiagonal();
}

Eigen::VectorXd ObsError::precision_apply(const Eigen::VectorXd& v) const {
  require_dim(v.size(), dim(), "precision apply");
  if (chol_) return chol_->solve(v);
  return v.cwiseQuotient(variances_);
}

Eigen::MatrixXd ObsError::precision_apply(const Eigen::MatrixXd& v) const {
  require_dim(v.rows(), dim(), "precision apply");
  if (chol_) return chol_->solve(v);
  return variances_.cwiseInverse().asDiagonal() * v;
}

Eigen::VectorXd ObsError::sqrt_apply(const Eigen::VectorXd& xi) const {
  require_dim(xi.size(), dim(), "sqrt apply");
  if (chol_) return chol_->matrixL() * xi;
  return variances_.cwiseSqrt().cwiseProduct(xi);
}

ObsError ObsError::scaled(double factor) const {
  if (!(factor > 0.0)) throw ValidationError("scale factor must be positive");
  if (full_) return full(*full_ * factor);
  return diagonal(variances_ * factor);
}

ObsError ObsError::permuted(const std::vector<Eigen::Index>& order) const {
  const auto k = static_cast<Eigen::Index>(order.size());
  require_dim(k, dim(), "observation permutation");
  if (!full_) {
    Eigen::VectorXd v(k);
    for (Eigen::Index i = 0; i < k; ++i) v(i) = variances_(order[i]);
    return diagonal(std::move(v));
  }
  Eigen::MatrixXd m(k, k);
  for (Eigen::Index i = 0; i < k; ++i)
    for (Eigen::Index j = 0; j < k; ++j) m(i, j) = (*full_)(order[i], order[j]);
  return full(std::move(m));
}

ObservationBatch synthesize(const LinearObservation& h, const ObsError& r,
                            const Eigen::VectorXd& truth, Rng& rng, std::int64_t time_index) {
  require_dim(r.dim(), h.obs_dim(), "observation error");
  std::normal_distribution<double> normal;
  Eigen::VectorXd xi(h.obs_dim());
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = normal(rng);
  return ObservationBatch{h.apply(truth) + r.sqrt_apply(xi), time_index};
}

}  // namespace enkf
