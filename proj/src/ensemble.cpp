#include "enkf/ensemble.hpp"

#include <string>

#include "enkf/errors.hpp"
#include "enkf/observation.hpp"

namespace enkf {

Ensemble::Ensemble(Eigen::MatrixXd states) : states_(std::move(states)) {
  if (states_.rows() < 1) throw DimensionError("ensemble needs at least one state component");
  if (states_.cols() < 2)
    throw DimensionError("ensemble needs at least two members, got " +
                         std::to_string(states_.cols()));
  if (!states_.allFinite()) throw ValidationError("ensemble contains non-finite entries");
}

Eigen::MatrixXd EnsembleStats::members() const {
  return deviations.colwise() + mean;
}

EnsembleStats stats(const Ensemble& ens) {
  EnsembleStats s;
  s.mean = ens.states().rowwise().mean();
  s.deviations = ens.states().colwise() - s.mean;
  return s;
}

Eigen::MatrixXd covariance(const EnsembleStats& s) {
  const double denom = static_cast<double>(s.size() - 1);
  return s.deviations * s.deviations.transpose() / denom;
}

CrossProducts cross_products(const EnsembleStats& s, const LinearObservation& h) {
  if (h.state_dim() != s.deviations.rows())
    throw DimensionError("observation operator expects state dimension " +
                         std::to_string(h.state_dim()) + ", ensemble has " +
                         std::to_string(s.deviations.rows()));
  const double denom = static_cast<double>(s.size() - 1);
  const Eigen::MatrixXd hx = h.apply(s.deviations);
  CrossProducts out;
  out.hp = hx * s.deviations.transpose() / denom;
  out.hpht = hx * hx.transpose() / denom;
  return out;
}

Ensemble inflate(const Ensemble& ens, double delta) {
  if (!(delta >= 1.0)) throw ValidationError("inflation factor must be >= 1");
  if (delta == 1.0) return ens;
  const EnsembleStats s = stats(ens);
  return Ensemble((delta * s.deviations).colwise() + s.mean);
}

}  // namespace enkf
