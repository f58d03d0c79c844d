#include "enkf/config_io.hpp"

#include <json.hpp>

#include "enkf/errors.hpp"

namespace enkf {

using nlohmann::json;

TaperKind parse_taper(const std::string& name) {
  if (name == "gc" || name == "gaspari_cohn") return TaperKind::gaspari_cohn;
  if (name == "gaussian") return TaperKind::gaussian;
  if (name == "none") return TaperKind::none;
  throw ValidationError("unknown taper '" + name + "'");
}

RadiusConvention parse_radius_convention(const std::string& name) {
  if (name == "half" || name == "half_support") return RadiusConvention::half_support;
  if (name == "full" || name == "full_support") return RadiusConvention::full_support;
  throw ValidationError("unknown radius convention '" + name + "'");
}

namespace {

std::string taper_name(TaperKind k) {
  switch (k) {
    case TaperKind::gaspari_cohn:
      return "gc";
    case TaperKind::gaussian:
      return "gaussian";
    case TaperKind::none:
      return "none";
  }
  return "none";
}

}  // namespace

void merge_json(RunOptions& opts, const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("config must be a JSON object");
  auto& e = opts.experiment;
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "model") {
        if (v.get<std::string>() != "lorenz96")
          throw ValidationError("only the lorenz96 model is available");
      } else if (key == "n") {
        e.n = v.get<Eigen::Index>();
      } else if (key == "forcing") {
        e.forcing = v.get<double>();
      } else if (key == "members") {
        e.members = v.get<Eigen::Index>();
      } else if (key == "filter") {
        e.filter = parse_filter(v.get<std::string>());
      } else if (key == "inflation") {
        e.inflation = v.get<double>();
      } else if (key == "radius") {
        e.taper.radius = v.get<double>();
      } else if (key == "taper") {
        e.taper.kind = parse_taper(v.get<std::string>());
      } else if (key == "radius_convention") {
        e.taper.convention = parse_radius_convention(v.get<std::string>());
      } else if (key == "steps") {
        e.steps = v.get<int>();
      } else if (key == "obs_interval") {
        e.obs_interval = v.get<double>();
      } else if (key == "obs_variance") {
        e.obs_variance = v.get<double>();
      } else if (key == "obs_stride") {
        e.obs_stride = v.get<Eigen::Index>();
      } else if (key == "obs_offset") {
        e.obs_offset = v.get<Eigen::Index>();
      } else if (key == "cycles") {
        e.cycles = v.get<int>();
      } else if (key == "spinup") {
        e.spinup_cycles = v.get<int>();
      } else if (key == "seed") {
        e.seed = v.get<std::uint64_t>();
      } else if (key == "initial_spread") {
        e.initial_spread = v.get<double>();
      } else if (key == "truth_spinup_steps") {
        e.truth_spinup_steps = v.get<long>();
      } else if (key == "dt") {
        e.integrator.dt = v.get<double>();
      } else if (key == "integrator") {
        const auto s = v.get<std::string>();
        if (s == "implicit_midpoint" || s == "midpoint")
          e.integrator.scheme = Scheme::implicit_midpoint;
        else if (s == "rk4")
          e.integrator.scheme = Scheme::rk4;
        else
          throw ValidationError("unknown integrator '" + s + "'");
      } else if (key == "recenter") {
        e.recenter_perturbations = v.get<bool>();
      } else if (key == "deltas") {
        opts.deltas = v.get<std::vector<double>>();
      } else if (key == "radii") {
        opts.radii = v.get<std::vector<double>>();
      } else if (key == "parallel") {
        opts.parallel = v.get<bool>();
      } else if (key == "threads") {
        opts.threads = v.get<unsigned>();
      } else if (key == "out") {
        opts.out = v.get<std::string>();
      } else {
        throw ValidationError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& ex) {
    throw ValidationError(std::string("config has a value of the wrong type: ") + ex.what());
  }
}

std::string to_json(const RunOptions& opts) {
  const auto& e = opts.experiment;
  json doc = {
      {"model", "lorenz96"},
      {"n", e.n},
      {"forcing", e.forcing},
      {"members", e.members},
      {"filter", std::string(to_string(e.filter))},
      {"inflation", e.inflation},
      {"radius", e.taper.radius},
      {"taper", taper_name(e.taper.kind)},
      {"radius_convention",
       e.taper.convention == RadiusConvention::half_support ? "half" : "full"},
      {"steps", e.steps},
      {"obs_interval", e.obs_interval},
      {"obs_variance", e.obs_variance},
      {"obs_stride", e.obs_stride},
      {"obs_offset", e.obs_offset},
      {"cycles", e.cycles},
      {"spinup", e.spinup_cycles},
      {"seed", e.seed},
      {"initial_spread", e.initial_spread},
      {"truth_spinup_steps", e.truth_spinup_steps},
      {"dt", e.integrator.dt},
      {"integrator", e.integrator.scheme == Scheme::rk4 ? "rk4" : "implicit_midpoint"},
      {"recenter", e.recenter_perturbations},
      {"deltas", opts.deltas},
      {"radii", opts.radii},
      {"parallel", opts.parallel},
      {"threads", opts.threads},
      {"out", opts.out},
  };
  return doc.dump(2);
}

}  // namespace enkf
