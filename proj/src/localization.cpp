#include "enkf/localization.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "enkf/errors.hpp"

namespace enkf {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_index(const DistanceMetric& metric, Eigen::Index g) {
  if (g < 0 || g >= point_count(metric))
    throw ValidationError("grid index " + std::to_string(g) + " outside metric domain of size " +
                          std::to_string(point_count(metric)));
}

}  // namespace

Eigen::Index point_count(const DistanceMetric& metric) {
  return std::visit(overloaded{[](const RingMetric& m) { return m.period; },
                               [](const GridMetric& m) { return m.rows * m.cols; }},
                    metric);
}

double distance(const DistanceMetric& metric, Eigen::Index a, Eigen::Index b) {
  check_index(metric, a);
  check_index(metric, b);
  return std::visit(
      overloaded{[&](const RingMetric& m) {
                   const Eigen::Index d = std::abs(a - b);
                   return static_cast<double>(std::min(d, m.period - d));
                 },
                 [&](const GridMetric& m) {
                   const double di = static_cast<double>(a / m.cols - b / m.cols);
                   const double dj = static_cast<double>(a % m.cols - b % m.cols);
                   return std::sqrt(di * di + dj * dj);
                 }},
      metric);
}

double gaspari_cohn(double z) {
  z = std::abs(z);
  if (z <= 1.0) {
    const double z2 = z * z;
    const double z3 = z2 * z;
    return -0.25 * z3 * z2 + 0.5 * z2 * z2 + 0.625 * z3 - 5.0 / 3.0 * z2 + 1.0;
  }
  if (z <= 2.0) {
    const double z2 = z * z;
    const double z3 = z2 * z;
    const double v = z3 * z2 / 12.0 - 0.5 * z2 * z2 + 0.625 * z3 + 5.0 / 3.0 * z2 - 5.0 * z + 4.0 -
                     2.0 / (3.0 * z);
    // rounding leaves a ~1e-16 residue at z = 2
    return v > 0.0 ? v : 0.0;
  }
  return 0.0;
}

double taper_value(const TaperFunction& f, double r) {
  if (!(r >= 0.0)) throw ValidationError("taper distance must be non-negative");
  switch (f.kind) {
    case TaperKind::none:
      return 1.0;
    case TaperKind::gaussian:
      if (!(f.radius > 0.0)) throw ValidationError("localization radius must be positive");
      return std::exp(-0.5 * r * r / (f.radius * f.radius));
    case TaperKind::gaspari_cohn: {
      if (!(f.radius > 0.0)) throw ValidationError("localization radius must be positive");
      const double c =
          f.convention == RadiusConvention::half_support ? f.radius : 0.5 * f.radius;
      return gaspari_cohn(r / c);
    }
  }
  return 1.0;
}

TaperMatrices build_tapers(const DistanceMetric& metric, const TaperFunction& f,
                           const std::vector<Eigen::Index>& obs_locations, Eigen::Index n) {
  if (n != point_count(metric))
    throw DimensionError("state dimension " + std::to_string(n) +
                         " does not match metric size " + std::to_string(point_count(metric)));
  const auto k = static_cast<Eigen::Index>(obs_locations.size());
  for (auto loc : obs_locations) check_index(metric, loc);

  TaperMatrices t{Eigen::MatrixXd(n, k), Eigen::MatrixXd(k, k)};
  for (Eigen::Index o = 0; o < k; ++o)
    for (Eigen::Index g = 0; g < n; ++g)
      t.c1(g, o) = taper_value(f, distance(metric, g, obs_locations[o]));
  for (Eigen::Index o = 0; o < k; ++o) {
    t.c2(o, o) = taper_value(f, distance(metric, obs_locations[o], obs_locations[o]));
    for (Eigen::Index p = o + 1; p < k; ++p) {
      const double v = taper_value(f, distance(metric, obs_locations[o], obs_locations[p]));
      t.c2(o, p) = v;
      t.c2(p, o) = v;
    }
  }
  return t;
}

Eigen::MatrixXd build_state_taper(const DistanceMetric& metric, const TaperFunction& f,
                                  Eigen::Index n) {
  std::vector<Eigen::Index> all(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  return build_tapers(metric, f, all, n).c2;
}

Eigen::MatrixXd schur(const Eigen::MatrixXd& c, const Eigen::MatrixXd& y) {
  if (c.rows() != y.rows() || c.cols() != y.cols())
    throw DimensionError("schur product needs identical shapes");
  return c.cwiseProduct(y);
}

}  // namespace enkf
