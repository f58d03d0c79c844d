#include "enkf/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include "enkf/errors.hpp"

namespace enkf {

void ExperimentConfig::validate() const {
  if (n < 4) throw ValidationError("Lorenz-96 needs n >= 4");
  if (members < 2) throw ValidationError("ensemble size must be >= 2");
  if (obs_stride < 1 || obs_offset < 0 || obs_offset >= obs_stride)
    throw ValidationError("observation pattern needs stride >= 1 and 0 <= offset < stride");
  if (!(obs_variance > 0.0)) throw ValidationError("observation variance must be positive");
  if (!(integrator.dt > 0.0)) throw ValidationError("dt must be positive");
  step_count(integrator, obs_interval);
  if (!(obs_interval > 0.0)) throw ValidationError("observation interval must be positive");
  if (spinup_cycles < 0 || cycles < 0) throw ValidationError("cycle counts must be >= 0");
  if (!(inflation >= 1.0)) throw ValidationError("inflation factor must be >= 1");
  if (steps < 1) throw ValidationError("pseudo-time step count must be >= 1");
  if (taper.kind != TaperKind::none && !(taper.radius > 0.0))
    throw ValidationError("localization radius must be positive");
  if (!(initial_spread >= 0.0)) throw ValidationError("initial spread must be >= 0");
  if (truth_spinup_steps < 0) throw ValidationError("truth spin-up must be >= 0");
}

Rng make_stream(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), 0x5eedu};
  return Rng(seq);
}

double rmse_of(const std::vector<Eigen::VectorXd>& means,
               const std::vector<Eigen::VectorXd>& truths) {
  if (means.empty()) throw ValidationError("rmse needs at least one cycle");
  if (means.size() != truths.size()) throw DimensionError("mean and truth sequences differ in length");
  const Eigen::Index n = means.front().size();
  double sum = 0.0;
  for (std::size_t j = 0; j < means.size(); ++j) {
    if (means[j].size() != n || truths[j].size() != n)
      throw DimensionError("state lengths differ across cycles");
    sum += (means[j] - truths[j]).squaredNorm();
  }
  return std::sqrt(sum / (static_cast<double>(n) * static_cast<double>(means.size())));
}

TwinResult run_twin(const ExperimentConfig& cfg) {
  cfg.validate();
  const Lorenz96 model(cfg.n, cfg.forcing);
  const auto n = cfg.n;
  const double sqrt_n = std::sqrt(static_cast<double>(n));

  // Deterministic truth spin-up onto the attractor.
  Eigen::VectorXd truth = Eigen::VectorXd::Constant(n, cfg.forcing);
  truth(0) += 0.01;
  for (long s = 0; s < cfg.truth_spinup_steps; ++s) truth = step(model, cfg.integrator, truth);

  Rng init_rng = make_stream(cfg.seed, Stream::initial_ensemble);
  Rng obs_rng = make_stream(cfg.seed, Stream::observations);
  Rng perturb_rng = make_stream(cfg.seed, Stream::perturbations);

  std::normal_distribution<double> normal;
  Eigen::MatrixXd members(n, cfg.members);
  for (Eigen::Index i = 0; i < cfg.members; ++i)
    for (Eigen::Index g = 0; g < n; ++g)
      members(g, i) = truth(g) + cfg.initial_spread * normal(init_rng);

  const LinearObservation h = LinearObservation::every_nth(n, cfg.obs_stride, cfg.obs_offset);
  const ObsError r = ObsError::diagonal(Eigen::VectorXd::Constant(h.obs_dim(), cfg.obs_variance));

  AnalysisConfig acfg;
  acfg.filter = cfg.filter;
  acfg.inflation = cfg.inflation;
  acfg.steps = cfg.steps;
  acfg.recenter_perturbations = cfg.recenter_perturbations;
  if (cfg.taper.kind != TaperKind::none)
    acfg.localization = build_tapers(RingMetric{n}, cfg.taper, h.indices(), n);

  TwinResult result;
  result.cell.filter = cfg.filter;
  result.cell.delta = cfg.inflation;
  result.cell.r0 = cfg.taper.kind == TaperKind::none ? 0.0 : cfg.taper.radius;
  result.cell.seed = cfg.seed;
  result.cell.cycles = cfg.cycles;
  result.records.reserve(static_cast<std::size_t>(cfg.cycles));

  double sum_sq = 0.0;
  const int total = cfg.spinup_cycles + cfg.cycles;
  try {
    for (int c = 0; c < total; ++c) {
      truth = propagate(model, cfg.integrator, truth, cfg.obs_interval);
      members = propagate_members(model, cfg.integrator, std::move(members), cfg.obs_interval);
      const Ensemble forecast = inflate(Ensemble(members), cfg.inflation);
      const double forecast_rmse =
          (forecast.states().rowwise().mean() - truth).norm() / sqrt_n;

      const ObservationBatch obs = synthesize(h, r, truth, obs_rng, c);
      AnalysisReport rep = analyze(acfg, forecast, obs.y, h, r, perturb_rng);
      members = rep.analysis.states();
      const double err_sq = (rep.mean - truth).squaredNorm();

      if (c >= cfg.spinup_cycles) {
        CycleRecord rec;
        rec.cycle = c - cfg.spinup_cycles;
        rec.forecast_rmse = forecast_rmse;
        rec.analysis_rmse = std::sqrt(err_sq) / sqrt_n;
        if (!rep.potential_trace.empty()) {
          rec.potential_start = rep.potential_trace.front();
          rec.potential_end = rep.potential_trace.back();
        }
        rec.warnings = std::move(rep.warnings);
        result.records.push_back(std::move(rec));
        sum_sq += err_sq;
      }
    }
  } catch (const Error& e) {
    result.failure = e.what();
    result.cell.rmse = std::numeric_limits<double>::infinity();
    result.cell.diverged = true;
    return result;
  }

  if (cfg.cycles == 0) {
    result.cell.rmse = std::numeric_limits<double>::quiet_NaN();
    return result;
  }
  result.cell.rmse = std::sqrt(sum_sq / (static_cast<double>(n) * cfg.cycles));
  result.cell.diverged = !(result.cell.rmse <= kDivergenceRmse);
  if (result.cell.diverged) result.cell.rmse = std::numeric_limits<double>::infinity();
  return result;
}

std::optional<SweepCell> SweepResult::best() const {
  std::optional<SweepCell> out;
  for (const auto& c : cells)
    if (!c.diverged && std::isfinite(c.rmse) && (!out || c.rmse < out->rmse)) out = c;
  return out;
}

double round_sig6(double v) {
  if (!std::isfinite(v)) return v;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return std::strtod(buf, nullptr);
}

SweepResult run_sweep(const ExperimentConfig& base, const std::vector<double>& deltas,
                      const std::vector<double>& radii, bool parallel, unsigned threads) {
  if (deltas.empty() || radii.empty()) throw ValidationError("sweep grids must be non-empty");
  SweepResult out;
  out.deltas = deltas;
  out.radii = radii;
  out.cells.resize(deltas.size() * radii.size());

  auto run_cell = [&](std::size_t idx) {
    ExperimentConfig cfg = base;
    cfg.inflation = deltas[idx / radii.size()];
    cfg.taper.radius = radii[idx % radii.size()];
    SweepCell cell;
    try {
      cell = run_twin(cfg).cell;
    } catch (const Error&) {
      cell.filter = cfg.filter;
      cell.delta = cfg.inflation;
      cell.r0 = cfg.taper.radius;
      cell.seed = cfg.seed;
      cell.cycles = cfg.cycles;
      cell.rmse = std::numeric_limits<double>::infinity();
      cell.diverged = true;
    }
    cell.r0 = cfg.taper.radius;
    cell.rmse = round_sig6(cell.rmse);
    out.cells[idx] = cell;
  };

  const std::size_t count = out.cells.size();
  if (!parallel) {
    for (std::size_t i = 0; i < count; ++i) run_cell(i);
    return out;
  }
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) run_cell(i);
    });
  for (auto& t : pool) t.join();
  return out;
}

namespace {

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + '"';
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0') throw ValidationError("bad number in CSV: '" + s + "'");
  return v;
}

}  // namespace

std::string sweep_csv(const SweepResult& result) {
  std::string out = "filter,delta,r0,seed,cycles,rmse,diverged\n";
  for (const auto& c : result.cells) {
    out += std::string(to_string(c.filter)) + ',' + fmt("%.15g", c.delta) + ',' +
           fmt("%.15g", c.r0) + ',' + std::to_string(c.seed) + ',' + std::to_string(c.cycles) +
           ',' + fmt("%.6g", c.rmse) + ',' + (c.diverged ? "1" : "0") + '\n';
  }
  return out;
}

SweepResult parse_sweep_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != "filter,delta,r0,seed,cycles,rmse,diverged")
    throw ValidationError("sweep CSV header mismatch");
  SweepResult out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 7) throw ValidationError("sweep CSV row must have 7 fields");
    SweepCell c;
    c.filter = parse_filter(f[0]);
    c.delta = parse_double(f[1]);
    c.r0 = parse_double(f[2]);
    c.seed = std::stoull(f[3]);
    c.cycles = std::stoi(f[4]);
    c.rmse = parse_double(f[5]);
    if (f[6] != "0" && f[6] != "1") throw ValidationError("diverged must be 0 or 1");
    c.diverged = f[6] == "1";
    if (std::find(out.deltas.begin(), out.deltas.end(), c.delta) == out.deltas.end())
      out.deltas.push_back(c.delta);
    if (std::find(out.radii.begin(), out.radii.end(), c.r0) == out.radii.end())
      out.radii.push_back(c.r0);
    out.cells.push_back(c);
  }
  if (out.cells.size() != out.deltas.size() * out.radii.size())
    throw ValidationError("sweep CSV does not describe a full grid");
  return out;
}

std::string cycle_csv(const std::vector<CycleRecord>& records) {
  std::string out = "cycle,forecast_rmse,analysis_rmse,potential_start,potential_end,warnings\n";
  for (const auto& r : records) {
    std::string warn;
    for (std::size_t i = 0; i < r.warnings.size(); ++i) warn += (i ? ";" : "") + r.warnings[i];
    out += std::to_string(r.cycle) + ',' + fmt("%.6g", r.forecast_rmse) + ',' +
           fmt("%.6g", r.analysis_rmse) + ',' +
           (r.potential_start ? fmt("%.6g", *r.potential_start) : "") + ',' +
           (r.potential_end ? fmt("%.6g", *r.potential_end) : "") + ',' + csv_field(warn) + '\n';
  }
  return out;
}

}  // namespace enkf
