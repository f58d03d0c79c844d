#pragma once

#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace enkf {

/// Periodic 1-D grid of `period` points: r(i, j) = min(|i - j|, period - |i - j|).
struct RingMetric {
  Eigen::Index period;
};

/// Row-major rows x cols grid; index g maps to (g / cols, g % cols).
struct GridMetric {
  Eigen::Index rows;
  Eigen::Index cols;
};

using DistanceMetric = std::variant<RingMetric, GridMetric>;

double distance(const DistanceMetric& metric, Eigen::Index a, Eigen::Index b);
Eigen::Index point_count(const DistanceMetric& metric);

enum class TaperKind { gaspari_cohn, gaussian, none };

/// How the Gaspari-Cohn radius r0 maps to the half-support c:
/// half_support uses c = r0 (zero beyond 2 r0), full_support uses c = r0 / 2.
enum class RadiusConvention { half_support, full_support };

struct TaperFunction {
  TaperKind kind = TaperKind::none;
  double radius = 1.0;
  RadiusConvention convention = RadiusConvention::half_support;

  static TaperFunction gaspari_cohn(double r0,
                                    RadiusConvention c = RadiusConvention::half_support) {
    return {TaperKind::gaspari_cohn, r0, c};
  }
  static TaperFunction gaussian(double r0) { return {TaperKind::gaussian, r0}; }
  static TaperFunction none() { return {}; }
};

/// Fifth-order piecewise-rational Gaspari-Cohn correlation at z = r / c.
double gaspari_cohn(double z);

/// Taper weight in [0, 1] at distance r >= 0.
double taper_value(const TaperFunction& f, double r);

/// Schur-product tapers. c1 is n x k (grid point, observation); c2 is k x k.
struct TaperMatrices {
  Eigen::MatrixXd c1;
  Eigen::MatrixXd c2;
};

TaperMatrices build_tapers(const DistanceMetric& metric, const TaperFunction& f,
                           const std::vector<Eigen::Index>& obs_locations, Eigen::Index n);

/// n x n state-space taper C_loc for covariance-level localization.
Eigen::MatrixXd build_state_taper(const DistanceMetric& metric, const TaperFunction& f,
                                  Eigen::Index n);

/// Entrywise product; throws DimensionError on shape mismatch.
Eigen::MatrixXd schur(const Eigen::MatrixXd& c, const Eigen::MatrixXd& y);

}  // namespace enkf
