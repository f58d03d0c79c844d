#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "enkf/filters.hpp"

namespace enkf::detail {

void check_problem(const Ensemble& forecast, const Eigen::VectorXd& y, const LinearObservation& h,
                   const ObsError& r, const TaperMatrices* loc);

/// n x k matrix (C1 o HP)^T = C1 o (P H^T) from deviations.
Eigen::MatrixXd localized_pht(const Eigen::MatrixXd& deviations, const Eigen::MatrixXd& hdev,
                              const TaperMatrices* loc);

/// K_loc,f = (C1 o HP)^T (C2 o HPH^T + R)^{-1}.
Eigen::MatrixXd localized_gain(const EnsembleStats& s, const LinearObservation& h,
                               const ObsError& r, const TaperMatrices* loc);

/// Potential from observation-space misfits: mean misfit and deviations.
double potential_from_misfits(const Eigen::VectorXd& mean_misfit,
                              const Eigen::MatrixXd& misfit_deviations, const ObsError& r);

AnalysisReport make_report(const Ensemble& forecast, Eigen::VectorXd mean,
                           Eigen::MatrixXd deviations);

/// Appends a warning for every step where the trace goes up.
void monitor_potential(AnalysisReport& report);

}  // namespace enkf::detail
