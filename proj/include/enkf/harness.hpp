#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "enkf/filters.hpp"
#include "enkf/localization.hpp"
#include "enkf/models.hpp"
#include "enkf/observation.hpp"

namespace enkf {

/// Lorenz-96 twin experiment settings.
struct ExperimentConfig {
  Eigen::Index n = 40;
  double forcing = 8.0;
  IntegratorConfig integrator{};

  Eigen::Index members = 10;
  Eigen::Index obs_stride = 2;  ///< observe every obs_stride-th grid point
  Eigen::Index obs_offset = 0;  ///< 0: indices 0,2,..; 1: the complementary pattern
  double obs_variance = 1.0;
  double obs_interval = 0.05;

  int spinup_cycles = 100;  ///< cycled but not recorded
  int cycles = 2000;

  FilterKind filter = FilterKind::cenkf1;
  double inflation = 1.0;
  int steps = 4;
  TaperFunction taper = TaperFunction::gaspari_cohn(15.0);
  bool recenter_perturbations = false;

  std::uint64_t seed = 42;
  double initial_spread = 1.0;
  long truth_spinup_steps = 10000;

  void validate() const;
};

struct CycleRecord {
  int cycle = 0;
  double forecast_rmse = 0.0;
  double analysis_rmse = 0.0;
  std::optional<double> potential_start;
  std::optional<double> potential_end;
  std::vector<std::string> warnings;
};

/// RMSE above this value counts as filter divergence ("no filter skill").
inline constexpr double kDivergenceRmse = 2.0;

struct SweepCell {
  FilterKind filter = FilterKind::cenkf1;
  double delta = 1.0;
  double r0 = 0.0;
  std::uint64_t seed = 0;
  int cycles = 0;
  double rmse = 0.0;  ///< infinity once the run is judged divergent
  bool diverged = false;

  bool operator==(const SweepCell&) const = default;
};

struct TwinResult {
  SweepCell cell;
  std::vector<CycleRecord> records;
  std::string failure;  ///< message of the error that terminated a divergent run
};

/// Cells are stored row-major: deltas outer, radii inner.
struct SweepResult {
  std::vector<double> deltas;
  std::vector<double> radii;
  std::vector<SweepCell> cells;

  const SweepCell& at(std::size_t delta_index, std::size_t radius_index) const {
    return cells.at(delta_index * radii.size() + radius_index);
  }
  /// Lowest-RMSE non-divergent cell, if any.
  std::optional<SweepCell> best() const;

  bool operator==(const SweepResult&) const = default;
};

/// Independent RNG streams derived from one master seed.
/// Truth generation is deterministic and draws no random numbers.
enum class Stream : std::uint64_t { observations = 2, initial_ensemble = 3, perturbations = 4 };
Rng make_stream(std::uint64_t seed, Stream stream);

/// sqrt(sum_j |mean_j - truth_j|^2 / (n J)).
double rmse_of(const std::vector<Eigen::VectorXd>& means,
               const std::vector<Eigen::VectorXd>& truths);

TwinResult run_twin(const ExperimentConfig& cfg);

/// One run_twin per (delta, r0) cell, all with the configuration's seed, so
/// every cell sees the same truth, initial ensemble and observations. Cell
/// RMSEs are rounded to the 6 significant digits written to CSV.
SweepResult run_sweep(const ExperimentConfig& base, const std::vector<double>& deltas,
                      const std::vector<double>& radii, bool parallel = false,
                      unsigned threads = 0);

std::string sweep_csv(const SweepResult& result);
SweepResult parse_sweep_csv(const std::string& text);
std::string cycle_csv(const std::vector<CycleRecord>& records);

/// Value as printed with 6 significant digits.
double round_sig6(double v);

}  // namespace enkf
