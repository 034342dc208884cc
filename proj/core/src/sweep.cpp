// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

#include "critx/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <json.hpp>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "critx/error.hpp"
#include "critx/version.hpp"

namespace critx {

using nlohmann::json;

namespace {

std::string join_ints(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + std::to_string(v[i]);
  return s;
}

std::string join_doubles(const Vector& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + format_double(v[i]);
  return s;
}

std::string point_file_name(double x) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx.pt",
                static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(x)));
  return buf;
}

std::string format_point(const FsPoint& p) {
  std::ostringstream os;
  os << "x=" << format_double(p.x) << '\n'
     << "chi=" << format_double(p.chi) << '\n'
     << "method=" << to_string(p.method) << '\n'
     << "delta_used=" << format_double(p.delta_used) << '\n'
     << "chi_delta=" << format_double(p.chi_delta) << '\n'
     << "chi_half_delta=" << format_double(p.chi_half_delta) << '\n'
     << "residual=" << format_double(p.residual) << '\n'
     << "gap_estimate=" << format_double(p.gap_estimate) << '\n'
     << "iterations=" << p.iterations << '\n';
  return os.str();
}

std::optional<FsPoint> parse_point(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  try {
    FsPoint p;
    p.x = parse_double(kv.at("x"));
    p.chi = parse_double(kv.at("chi"));
    p.method = parse_fs_method(kv.at("method"));
    p.delta_used = parse_double(kv.at("delta_used"));
    p.chi_delta = parse_double(kv.at("chi_delta"));
    p.chi_half_delta = parse_double(kv.at("chi_half_delta"));
    p.residual = parse_double(kv.at("residual"));
    p.gap_estimate = parse_double(kv.at("gap_estimate"));
    p.iterations = std::stoi(kv.at("iterations"));
    return p;
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable entries are recomputed
  }
}

bool contains_close(const Vector& v, double x) {
  return std::any_of(v.begin(), v.end(), [x](double y) { return std::abs(x - y) < 1e-9; });
}

}  // namespace

// ---------------------------------------------------------------------------

Filling Filling::parse(std::string_view text) {
  Filling f;
  const auto slash = text.find('/');
  try {
    if (slash == std::string_view::npos) {
      f.numerator = std::stoi(std::string(text));
      f.denominator = 1;
    } else {
      f.numerator = std::stoi(std::string(text.substr(0, slash)));
      f.denominator = std::stoi(std::string(text.substr(slash + 1)));
    }
  } catch (const std::exception&) {
    throw ConfigError("filling must be a fraction like 2/3, got '" + std::string(text) + "'");
  }
  if (f.denominator <= 0 || f.numerator < 0) {
    throw ConfigError("filling must be a non-negative fraction, got '" + std::string(text) + "'");
  }
  const int g = std::gcd(f.numerator, f.denominator);
  if (g > 1) {
    f.numerator /= g;
    f.denominator /= g;
  }
  return f;
}

std::string Filling::str() const {
  return denominator == 1 ? std::to_string(numerator)
                          : std::to_string(numerator) + "/" + std::to_string(denominator);
}

int Filling::electrons(int sites) const {
  if ((numerator * sites) % denominator != 0) {
    throw ConfigError("filling " + str() + " gives a non-integer electron count for L = " +
                      std::to_string(sites));
  }
  const int N = numerator * sites / denominator;
  if (N % 2 != 0) {
    throw ConfigError("filling " + str() + " gives odd N = " + std::to_string(N) + " for L = " +
                      std::to_string(sites) + "; balanced sectors need even N");
  }
  if (N > 2 * sites) {
    throw ConfigError("filling " + str() + " exceeds 2 electrons per site");
  }
  return N;
}

Vector GridSpec::coarse() const {
  if (!points.empty()) {
    Vector v = points;
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  }
  Vector v;
  if (count == 1) return {start};
  for (int i = 0; i < count; ++i) v.push_back(start + (stop - start) * i / (count - 1));
  return v;
}

std::string GridSpec::describe() const {
  std::string s = points.empty() ? ("linspace(" + format_double(start) + "," + format_double(stop) +
                                    "," + std::to_string(count) + ")")
                                 : ("list(" + join_doubles(points) + ")");
  if (refine) {
    s += " refine(spacing=" + format_double(refine_spacing) +
         ",half_width=" + format_double(refine_half_width) + ")";
  }
  return s;
}

DrivingTag SweepConfig::driving_tag() const {
  if (driving) return *driving;
  return model == ModelKind::ahm ? DrivingTag::ahm_down_hop : DrivingTag::tfim_x_sum;
}

std::filesystem::path default_cache_root() {
  if (const char* env = std::getenv("CRITX_CACHE"); env && *env) return env;
  return "critx-cache";
}

std::filesystem::path SweepConfig::resolved_cache_root() const {
  return cache_root.empty() ? default_cache_root() : cache_root;
}

FidelityOptions SweepConfig::fidelity_options() const {
  FidelityOptions o;
  o.delta = delta;
  o.lanczos.tol = tol;
  o.lanczos.max_iter = max_iter;
  o.lanczos.max_basis = max_basis;
  o.lanczos.seed = seed;
  o.solve.tol = solve_tol;
  o.solve.max_iter = max_iter;
  return o;
}

void SweepConfig::finalize() {
  if (sizes.empty()) throw ConfigError("sizes: at least one L is required");
  const DrivingTag tag = driving_tag();
  if (!compatible(model, tag)) throw ConfigError("driving tag does not match the model");
  driving = tag;
  if (n_up.has_value() != n_dn.has_value()) {
    throw ConfigError("n_up and n_dn must be given together");
  }
  if (model == ModelKind::ahm) {
    if (!filling && !n_up) throw ConfigError("AHM sweeps need a filling or explicit n_up/n_dn");
    if (U_values.empty()) throw ConfigError("AHM sweeps need at least one U");
  }
  if (tag == DrivingTag::tfim_z_sum && method != FsMethod::linear_response) {
    throw ConfigError("the h-driven TFIM response is computed by linear_response only");
  }
  if (!(delta > 0.0) || !(tol > 0.0) || !(solve_tol > 0.0)) {
    throw ConfigError("delta and tolerances must be positive");
  }
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (grid.points.empty() && grid.count == 0) {
    // Default two-tier grid.
    if (model == ModelKind::ahm) {
      grid.start = 0.04;
      grid.stop = 1.0;
    } else if (tag == DrivingTag::tfim_x_sum) {
      grid.start = 0.1;
      grid.stop = 2.0;
    } else {
      grid.start = 1.1;
      grid.stop = 3.0;
    }
    grid.count = static_cast<int>(std::lround((grid.stop - grid.start) / 0.02)) + 1;
    grid.refine = true;
  }
  if (grid.points.empty() && (grid.count < 1 || !(grid.stop >= grid.start))) {
    throw ConfigError("grid: need count >= 1 and stop >= start");
  }
  if (grid.refine && (!(grid.refine_spacing > 0.0) || !(grid.refine_half_width > 0.0))) {
    throw ConfigError("grid: refinement spacing and half width must be positive");
  }
  for (const int L : sizes) {
    if (L < 3) throw ConfigError("L = " + std::to_string(L) + " is below the ring minimum of 3");
    if (model == ModelKind::ahm && filling) (void)filling->electrons(L);
  }
  (void)instances();
}

std::vector<ModelParams> SweepConfig::instances() const {
  std::vector<ModelParams> out;
  for (const int L : sizes) {
    if (model == ModelKind::ahm) {
      int up = 0;
      int dn = 0;
      if (n_up) {
        up = *n_up;
        dn = *n_dn;
      } else {
        const int N = filling->electrons(L);
        up = dn = N / 2;
      }
      if ((up + dn) % 2 != 0) {
        throw ConfigError("L = " + std::to_string(L) + ": boundary rule needs even N");
      }
      for (const double U : U_values) {
        try {
          auto p = ModelParams::ahm(L, 1.0, U, up, dn);
          p.basis = basis;
          out.push_back(p);
        } catch (const DomainError& e) {
          throw ConfigError("L = " + std::to_string(L) + ": " + e.what());
        }
      }
    } else {
      try {
        out.push_back(ModelParams::tfim(L, lambda, h));
      } catch (const DomainError& e) {
        throw ConfigError("L = " + std::to_string(L) + ": " + e.what());
      }
    }
  }
  return out;
}

SweepConfig parse_sweep_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config JSON: ") + e.what());
  }
  SweepConfig c;
  try {
    if (j.contains("model")) c.model = parse_model_kind(j["model"].get<std::string>());
    if (j.contains("sizes")) c.sizes = j["sizes"].get<std::vector<int>>();
    if (j.contains("L")) {
      c.sizes = j["L"].is_array() ? j["L"].get<std::vector<int>>()
                                  : std::vector<int>{j["L"].get<int>()};
    }
    if (j.contains("filling")) {
      c.filling = Filling::parse(j["filling"].is_string() ? j["filling"].get<std::string>()
                                                          : std::to_string(j["filling"].get<int>()));
    }
    if (j.contains("n_up")) c.n_up = j["n_up"].get<int>();
    if (j.contains("n_dn")) c.n_dn = j["n_dn"].get<int>();
    if (j.contains("U")) {
      c.U_values = j["U"].is_array() ? j["U"].get<std::vector<double>>()
                                     : std::vector<double>{j["U"].get<double>()};
    }
    if (j.contains("lambda")) c.lambda = j["lambda"].get<double>();
    if (j.contains("h")) c.h = j["h"].get<double>();
    if (j.contains("driving")) c.driving = parse_driving_tag(j["driving"].get<std::string>());
    if (j.contains("grid")) {
      const auto& g = j["grid"];
      if (g.is_array()) {
        c.grid.points = g.get<Vector>();
      } else {
        if (g.contains("start")) c.grid.start = g["start"].get<double>();
        if (g.contains("stop")) c.grid.stop = g["stop"].get<double>();
        if (g.contains("count")) c.grid.count = g["count"].get<int>();
        if (g.contains("points")) c.grid.points = g["points"].get<Vector>();
        if (g.contains("refine")) c.grid.refine = g["refine"].get<bool>();
        if (g.contains("refine_spacing")) c.grid.refine_spacing = g["refine_spacing"].get<double>();
        if (g.contains("refine_half_width")) {
          c.grid.refine_half_width = g["refine_half_width"].get<double>();
        }
      }
    }
    if (j.contains("method")) c.method = parse_fs_method(j["method"].get<std::string>());
    if (j.contains("delta")) c.delta = j["delta"].get<double>();
    if (j.contains("tol")) c.tol = j["tol"].get<double>();
    if (j.contains("solve_tol")) c.solve_tol = j["solve_tol"].get<double>();
    if (j.contains("max_iter")) c.max_iter = j["max_iter"].get<int>();
    if (j.contains("max_basis")) c.max_basis = j["max_basis"].get<int>();
    if (j.contains("basis")) c.basis = parse_basis_kind(j["basis"].get<std::string>());
    if (j.contains("seed")) c.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("workers")) c.workers = j["workers"].get<int>();
    if (j.contains("output_dir")) c.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("cache_root")) c.cache_root = j["cache_root"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config JSON: ") + e.what());
  } catch (const DomainError& e) {
    throw ConfigError(std::string("config JSON: ") + e.what());
  }
  return c;
}

std::string sweep_config_json(const SweepConfig& c) {
  json j;
  j["model"] = std::string(to_string(c.model));
  j["sizes"] = c.sizes;
  if (c.filling) j["filling"] = c.filling->str();
  if (c.n_up) j["n_up"] = *c.n_up;
  if (c.n_dn) j["n_dn"] = *c.n_dn;
  j["U"] = c.U_values;
  j["lambda"] = c.lambda;
  j["h"] = c.h;
  j["driving"] = std::string(to_string(c.driving_tag()));
  json g;
  if (c.grid.points.empty()) {
    g["start"] = c.grid.start;
    g["stop"] = c.grid.stop;
    g["count"] = c.grid.count;
  } else {
    g["points"] = c.grid.points;
  }
  g["refine"] = c.grid.refine;
  g["refine_spacing"] = c.grid.refine_spacing;
  g["refine_half_width"] = c.grid.refine_half_width;
  j["grid"] = g;
  j["method"] = std::string(to_string(c.method));
  j["delta"] = c.delta;
  j["tol"] = c.tol;
  j["solve_tol"] = c.solve_tol;
  j["max_iter"] = c.max_iter;
  j["max_basis"] = c.max_basis;
  j["basis"] = std::string(to_string(c.basis));
  j["seed"] = c.seed;
  j["workers"] = c.workers;
  j["output_dir"] = c.output_dir.string();
  j["cache_root"] = c.cache_root.string();
  return j.dump(2);
}

std::string curve_cache_key(const SweepConfig& config, const ModelParams& instance) {
  auto h = params_header(instance, config.driving_tag(), config.method);
  h.erase("t");
  if (config.driving_tag() == DrivingTag::tfim_x_sum) h.erase("lambda");
  if (config.driving_tag() == DrivingTag::tfim_z_sum) {
    h.erase("lambda");
    h.erase("h");
  }
  std::string canonical;
  for (const auto& [k, v] : h) canonical += k + "=" + v + ";";
  canonical += "delta=" + format_double(config.delta) + ";tol=" + format_double(config.tol) +
               ";solve_tol=" + format_double(config.solve_tol) +
               ";max_iter=" + std::to_string(config.max_iter) +
               ";max_basis=" + std::to_string(config.max_basis) +
               ";seed=" + std::to_string(config.seed);
  return content_hash(canonical);
}

FsPoint evaluate_point(const SweepConfig& config, const ModelParams& instance, double x) {
  const auto options = config.fidelity_options();
  const DrivingTag tag = config.driving_tag();
  if (tag == DrivingTag::tfim_z_sum) return fs_h_driven(instance.sites, x, options);
  const HamiltonianFamily family(instance, tag);
  return fs_evaluate(family, x, config.method, options);
}

namespace {

struct PointOutcome {
  std::optional<FsPoint> point;
  std::string error;
  bool from_cache = false;
};

std::vector<PointOutcome> evaluate_all(const SweepConfig& config, const ModelParams& instance,
                                       const std::filesystem::path& cache_dir, const Vector& xs) {
  std::vector<PointOutcome> out(xs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= xs.size()) return;
      const auto file = cache_dir / point_file_name(xs[i]);
      if (std::filesystem::exists(file)) {
        if (auto p = parse_point(read_text(file)); p && p->x == xs[i]) {
          out[i].point = p;
          out[i].from_cache = true;
          continue;
        }
      }
      try {
        auto p = evaluate_point(config, instance, xs[i]);
        write_text_atomic(file, format_point(p));
        out[i].point = p;
      } catch (const DomainError& e) {
        out[i].error = e.what();
      } catch (const ConvergenceError& e) {
        out[i].error = e.what();
      } catch (const DegeneracyError& e) {
        out[i].error = e.what();
      }
    }
  };
  const int n_workers = std::min<int>(config.workers, static_cast<int>(xs.size()));
  if (n_workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < n_workers; ++w) pool.emplace_back(work);
  }
  return out;
}

std::string curve_file_name(const SweepConfig& config, const ModelParams& p,
                            const std::string& key) {
  std::string name = std::string(to_string(p.kind)) + "_L" + std::to_string(p.sites);
  if (p.kind == ModelKind::ahm) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "_U%g_N%d-%d", p.U, p.n_up, p.n_dn);
    name += buf;
  } else {
    name += "_" + std::string(to_string(config.driving_tag()));
  }
  return name + "_" + key.substr(0, 8) + ".csv";
}

}  // namespace

SweepResult run_sweep(SweepConfig config, std::ostream* log) {
  config.finalize();
  const auto cache_root = config.resolved_cache_root();
  const std::string config_hash = content_hash(sweep_config_json(config));
  SweepResult result;

  for (const auto& instance : config.instances()) {
    const std::string key = curve_cache_key(config, instance);
    const auto cache_dir = cache_root / (std::string(to_string(instance.kind)) + "_L" +
                                         std::to_string(instance.sites) + "_" + key);
    std::filesystem::create_directories(cache_dir);

    SweepCurveResult cr;
    Vector xs = config.grid.coarse();
    auto outcomes = evaluate_all(config, instance, cache_dir, xs);

    if (config.grid.refine) {
      std::optional<std::size_t> best;
      for (std::size_t i = 0; i < xs.size(); ++i) {
        if (outcomes[i].point && (!best || outcomes[i].point->chi > outcomes[*best].point->chi)) {
          best = i;
        }
      }
      if (best) {
        const double center = xs[*best];
        const int K = static_cast<int>(std::floor(config.grid.refine_half_width / config.grid.refine_spacing + 1e-9));
        Vector extra;
        for (int k = -K; k <= K; ++k) {
          const double x = center + k * config.grid.refine_spacing;
          if (x <= 0.0 || contains_close(xs, x)) continue;
          extra.push_back(x);
        }
        auto more = evaluate_all(config, instance, cache_dir, extra);
        xs.insert(xs.end(), extra.begin(), extra.end());
        outcomes.insert(outcomes.end(), std::make_move_iterator(more.begin()),
                        std::make_move_iterator(more.end()));
      }
    }

    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });

    FsCurve& curve = cr.curve;
    curve.params = instance;
    curve.tag = config.driving_tag();
    curve.method = config.method;
    for (const auto i : order) {
      if (outcomes[i].point) {
        curve.grid.push_back(xs[i]);
        curve.chi.push_back(outcomes[i].point->chi);
        cr.points.push_back(*outcomes[i].point);
        (outcomes[i].from_cache ? cr.cached : cr.computed) += 1;
      } else {
        cr.failures.push_back({xs[i], outcomes[i].error});
      }
    }

    auto& meta = curve.metadata;
    meta["code_version"] = kVersion;
    meta["config_hash"] = config_hash;
    meta["cache_key"] = key;
    meta["diagnostics"] = cache_dir.string();
    meta["sizes"] = join_ints(config.sizes);
    meta["U_values"] = join_doubles(config.U_values);
    if (config.filling) meta["filling"] = config.filling->str();
    meta["sector_rule"] = config.n_up ? "explicit" : "balanced";
    meta["grid"] = config.grid.describe();
    meta["delta"] = format_double(config.delta);
    meta["tol"] = format_double(config.tol);
    meta["solve_tol"] = format_double(config.solve_tol);
    meta["max_iter"] = std::to_string(config.max_iter);
    meta["max_basis"] = std::to_string(config.max_basis);
    meta["seed"] = std::to_string(config.seed);
    meta["workers"] = std::to_string(config.workers);
    if (config.driving_tag() == DrivingTag::tfim_z_sum) {
      meta["grid_variable"] = "lambda";
      meta["response"] = "h at h=0";
    }
    if (!cr.failures.empty()) {
      std::string failed;
      for (const auto& f : cr.failures) {
        failed += (failed.empty() ? "" : " | ") + format_double(f.x) + ": " + f.message;
      }
      meta["failed_points"] = failed;
    }

    std::filesystem::create_directories(config.output_dir);
    cr.file = config.output_dir / curve_file_name(config, instance, key);
    if (!curve.grid.empty()) write_curve_file(cr.file, to_curve_file(curve, cr.points));

    if (log) {
      *log << cr.file.string() << ": " << curve.size() << " points (" << cr.computed
           << " computed, " << cr.cached << " cached, " << cr.failures.size() << " failed)\n";
    }
    result.computed += cr.computed;
    result.cached += cr.cached;
    result.failed += cr.failures.size();
    result.curves.push_back(std::move(cr));
  }
  return result;
}

std::vector<CacheEntry> list_cache(const std::filesystem::path& root) {
  std::vector<CacheEntry> out;
  if (!std::filesystem::exists(root)) return out;
  for (const auto& dir : std::filesystem::directory_iterator(root)) {
    if (!dir.is_directory()) continue;
    CacheEntry e;
    e.directory = dir.path();
    for (const auto& f : std::filesystem::directory_iterator(dir.path())) {
      if (f.path().extension() == ".pt") ++e.points;
    }
    out.push_back(e);
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.directory < b.directory; });
  return out;
}

std::size_t clear_cache(const std::filesystem::path& root) {
  std::size_t removed = 0;
  for (const auto& e : list_cache(root)) {
    removed += e.points;
    std::filesystem::remove_all(e.directory);
  }
  return removed;
}

}  // namespace critx
