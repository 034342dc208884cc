// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

#include "critx/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <numeric>
#include <set>
#include <sstream>

#include "critx/error.hpp"
#include "critx/fidelity.hpp"
#include "critx/tfim_oracle.hpp"
#include "critx/version.hpp"

namespace critx {

using Json = nlohmann::ordered_json;

namespace {

Json num(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json peak_json(const PeakEstimate& p, int L) {
  return Json{{"L", L},
              {"t_max", p.t_max},
              {"chi_max", p.chi_max},
              {"curvature", p.curvature},
              {"window", {p.lo, p.mid, p.hi}},
              {"refinements", p.refinements}};
}

Json power_json(const PowerFit& f) {
  return Json{{"exponent", f.exponent},
              {"exponent_stderr", num(f.exponent_stderr)},
              {"prefactor", f.prefactor},
              {"prefactor_stderr", num(f.prefactor_stderr)},
              {"r_squared", num(f.r_squared)},
              {"residual", f.residual}};
}

Json tc_json(const TcEstimate& e) {
  Json markers = Json::array();
  for (std::size_t i = 0; i < e.sizes.size(); ++i) {
    markers.push_back({{"L", e.sizes[i]}, {"marker", e.markers[i]}});
  }
  return Json{{"law", to_string(e.law)},
              {"power", e.power},
              {"tc", e.tc},
              {"tc_stderr", num(e.tc_stderr)},
              {"slope", e.slope},
              {"slope_stderr", num(e.slope_stderr)},
              {"residual", e.residual},
              {"markers", markers}};
}

// Inputs carry their full header; the chain digest folds them in order.
Json provenance(std::span<const AnalysisInput> inputs) {
  Json list = Json::array();
  std::string chain = content_hash(std::string(kVersion));
  for (const auto& in : inputs) {
    chain = content_hash(chain + in.content_hash);
    Json header = Json::object();
    for (const auto& [k, v] : in.file.header) header[k] = v;
    list.push_back({{"path", in.path.string()}, {"content_hash", in.content_hash},
                    {"header", header}});
  }
  return Json{{"code_version", kVersion}, {"chain_hash", chain}, {"inputs", list}};
}

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string s;
  for (const auto& c : cells) s += (s.empty() ? "" : ",") + c;
  return s + "\n";
}

std::string fd(double v) { return format_double(v); }

void require_inputs(std::span<const AnalysisInput> inputs, std::size_t n, std::string_view what) {
  if (inputs.size() < n) {
    throw AnalysisRefusal(std::string(what) + ": need at least " + std::to_string(n) +
                          " input curves, got " + std::to_string(inputs.size()));
  }
}

// Same model, driving and method across all inputs; with `same_family` also
// the same couplings and filling, and distinct sizes.
void require_consistent(std::span<const AnalysisInput> inputs, bool same_family) {
  const auto& first = inputs.front().curve;
  std::set<int> sizes;
  for (const auto& in : inputs) {
    const auto& c = in.curve;
    if (c.params.kind != first.params.kind || c.tag != first.tag) {
      throw AnalysisRefusal("mixed-model inputs: " + inputs.front().path.string() + " is " +
                            std::string(to_string(first.params.kind)) + "/" +
                            std::string(to_string(first.tag)) + " but " + in.path.string() +
                            " is " + std::string(to_string(c.params.kind)) + "/" +
                            std::string(to_string(c.tag)));
    }
    if (!same_family) continue;
    if (c.params.kind == ModelKind::ahm) {
      const bool same_U = c.params.U == first.params.U;
      // Compare fillings exactly: N1 * L2 == N2 * L1.
      const bool same_n = (c.params.n_up + c.params.n_dn) * first.params.sites ==
                          (first.params.n_up + first.params.n_dn) * c.params.sites;
      if (!same_U || !same_n) {
        throw AnalysisRefusal("inputs mix couplings or fillings: " + in.path.string());
      }
    } else if (c.params.h != first.params.h ||
               (c.tag == DrivingTag::tfim_z_sum && c.params.lambda != first.params.lambda)) {
      throw AnalysisRefusal("inputs mix couplings: " + in.path.string());
    }
    if (!sizes.insert(c.params.sites).second) {
      throw AnalysisRefusal("two inputs share L = " + std::to_string(c.params.sites));
    }
  }
}

std::vector<FsCurve> curves_of(std::span<const AnalysisInput> inputs) {
  std::vector<FsCurve> out;
  for (const auto& in : inputs) out.push_back(in.curve);
  std::sort(out.begin(), out.end(),
            [](const FsCurve& a, const FsCurve& b) { return a.sites() < b.sites(); });
  return out;
}

bool half_filled(const FsCurve& c) {
  return c.params.kind == ModelKind::ahm && c.params.n_up + c.params.n_dn == c.params.sites;
}

RefineFn refiner(const FsCurve& curve) {
  FidelityOptions options;
  if (auto it = curve.metadata.find("delta"); it != curve.metadata.end()) {
    options.delta = parse_double(it->second);
  }
  if (auto it = curve.metadata.find("tol"); it != curve.metadata.end()) {
    options.lanczos.tol = parse_double(it->second);
  }
  if (auto it = curve.metadata.find("solve_tol"); it != curve.metadata.end()) {
    options.solve.tol = parse_double(it->second);
  }
  if (auto it = curve.metadata.find("seed"); it != curve.metadata.end()) {
    options.lanczos.seed = std::stoull(it->second);
  }
  if (curve.tag == DrivingTag::tfim_z_sum) {
    // h-driven curves run over lambda.
    const int L = curve.sites();
    return [L, options](double lambda) { return fs_h_driven(L, lambda, options).chi; };
  }
  auto family = std::make_shared<HamiltonianFamily>(curve.params, curve.tag);
  const FsMethod method = curve.method;
  return [family, method, options](double x) {
    return fs_evaluate(*family, x, method, options).chi;
  };
}

std::vector<int> sizes_of(std::span<const FsCurve> curves) {
  std::vector<int> s;
  for (const auto& c : curves) s.push_back(c.sites());
  return s;
}

std::string loglog_plot(std::span<const int> sizes, std::span<const double> y,
                        const PowerFit& fit) {
  std::string out = csv_line({"L", "ln_L", "y", "ln_y", "fit", "ln_fit"});
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double L = sizes[i];
    const double f = fit.prefactor * std::pow(L, fit.exponent);
    out += csv_line({std::to_string(sizes[i]), fd(std::log(L)), fd(y[i]), fd(std::log(y[i])),
                     fd(f), fd(std::log(f))});
  }
  return out;
}

// ---------------------------------------------------------------------------

AnalysisOutput run_peak(std::span<const AnalysisInput> inputs, const AnalysisOptions& o) {
  require_inputs(inputs, 1, "peak");
  Json peaks = Json::array();
  std::string plot = csv_line({"file", "L", "t_max", "chi_max", "curvature"});
  for (const auto& in : inputs) {
    const auto p = find_peak(in.curve, o.refine_peaks ? refiner(in.curve) : RefineFn{});
    auto j = peak_json(p, in.curve.sites());
    j["file"] = in.path.string();
    peaks.push_back(j);
    plot += csv_line({in.path.filename().string(), std::to_string(in.curve.sites()), fd(p.t_max),
                      fd(p.chi_max), fd(p.curvature)});
  }
  Json r{{"command", "peak"}, {"refine_peaks", o.refine_peaks}, {"peaks", peaks},
         {"provenance", provenance(inputs)}};
  return {r.dump(2) + "\n", {{"peaks.csv", plot}}};
}

AnalysisOutput run_collapse(std::span<const AnalysisInput> inputs, const AnalysisOptions& o) {
  require_inputs(inputs, 3, "collapse");
  require_consistent(inputs, true);
  const auto curves = curves_of(inputs);
  const auto peaks = locate_peaks(curves, o.refine_peaks);

  CollapseOptions copt = o.collapse;
  const bool half = half_filled(curves.front());
  copt.nu_lo = o.nu_lo.value_or(half ? -1.0 : 1.0);
  copt.nu_hi = o.nu_hi.value_or(half ? 0.5 : 4.0);
  const auto fit = collapse_fit(curves, peaks, copt);

  const auto sizes = sizes_of(curves);
  Vector heights;
  for (const auto& p : peaks) heights.push_back(p.chi_max);
  const auto mu_all = fit_power(Vector(sizes.begin(), sizes.end()), heights);
  Json subset = nullptr;
  if (sizes.size() > 3) {
    const std::size_t k = sizes.size() - 3;
    subset = power_json(fit_power(Vector(sizes.begin() + k, sizes.end()),
                                  Vector(heights.begin() + k, heights.end())));
    subset["sizes"] = std::vector<int>(sizes.begin() + k, sizes.end());
  }

  Json jpeaks = Json::array();
  for (std::size_t i = 0; i < peaks.size(); ++i) jpeaks.push_back(peak_json(peaks[i], sizes[i]));
  Json r{{"command", "collapse"},
         {"sizes", sizes},
         {"nu", fit.nu},
         {"nu_stderr", num(fit.nu_stderr)},
         {"mu", fit.mu},
         {"mu_stderr", num(fit.mu_stderr)},
         {"alpha", fit.alpha},
         {"alpha_stderr", num(fit.alpha_stderr)},
         {"A", num(fit.A)},
         {"B", num(fit.B)},
         {"residual", fit.residual},
         {"points", fit.points},
         {"mu_fit_all_sizes", power_json(mu_all)},
         {"mu_fit_largest_three", subset},
         {"peaks", jpeaks},
         {"options",
          {{"nu_lo", copt.nu_lo},
           {"nu_hi", copt.nu_hi},
           {"y_window", copt.y_window},
           {"t_window", num(copt.t_window)},
           {"neighbours", copt.neighbours},
           {"scan_points", copt.scan_points},
           {"nu_tol", copt.nu_tol},
           {"refine_peaks", o.refine_peaks},
           {"cost", "leave-one-size-out local quadratic regression"}}},
         {"provenance", provenance(inputs)}};

  std::string points = csv_line({"L", "x", "y"});
  for (const auto& rc : fit.rescaled) {
    for (std::size_t i = 0; i < rc.x.size(); ++i) {
      points += csv_line({std::to_string(rc.sites), fd(rc.x[i]), fd(rc.y[i])});
    }
  }
  std::string scan = csv_line({"nu", "cost"});
  for (std::size_t i = 0; i < fit.scan_nu.size(); ++i) {
    scan += csv_line({fd(fit.scan_nu[i]), fd(fit.scan_cost[i])});
  }
  return {r.dump(2) + "\n",
          {{"collapse_points.csv", points},
           {"collapse_scan.csv", scan},
           {"peaks_loglog.csv", loglog_plot(sizes, heights, mu_all)}}};
}

AnalysisOutput run_ktform(std::span<const AnalysisInput> inputs, const AnalysisOptions& o) {
  require_inputs(inputs, 3, "ktform");
  require_consistent(inputs, true);
  const auto curves = curves_of(inputs);
  const auto peaks = locate_peaks(curves, o.refine_peaks);
  const auto fit = fit_kt_form(curves, peaks, o.kt_half_width);
  const auto sizes = sizes_of(curves);

  Vector excess;
  Json per_site = Json::array();
  for (std::size_t i = 0; i < peaks.size(); ++i) {
    excess.push_back(peaks[i].chi_max - fit.a);
    per_site.push_back({{"L", sizes[i]}, {"chi_max_over_L", peaks[i].chi_max / sizes[i]}});
  }
  Json growth = nullptr;
  std::string plot;
  if (std::all_of(excess.begin(), excess.end(), [](double v) { return v > 0.0; })) {
    const auto g = fit_power(Vector(sizes.begin(), sizes.end()), excess);
    growth = power_json(g);
    plot = loglog_plot(sizes, excess, g);
  }
  Json jpeaks = Json::array();
  for (std::size_t i = 0; i < peaks.size(); ++i) jpeaks.push_back(peak_json(peaks[i], sizes[i]));
  Json r{{"command", "ktform"},
         {"form", "chi = a + b L - c L^-1/2 (t - t_max)^2"},
         {"a", fit.a},
         {"a_stderr", num(fit.a_stderr)},
         {"b", fit.b},
         {"b_stderr", num(fit.b_stderr)},
         {"c", fit.c},
         {"c_stderr", num(fit.c_stderr)},
         {"residual_rms", fit.residual},
         {"points", fit.points},
         {"half_width", fit.half_width},
         {"peak_excess_growth", growth},
         {"chi_max_over_L", per_site},
         {"peaks", jpeaks},
         {"provenance", provenance(inputs)}};
  AnalysisOutput out{r.dump(2) + "\n", {}};
  if (!plot.empty()) out.plots["peak_excess_loglog.csv"] = plot;
  return out;
}

AnalysisOutput run_tc_landau(std::span<const AnalysisInput> inputs, const AnalysisOptions& o) {
  require_inputs(inputs, 3, "tc-landau");
  require_consistent(inputs, true);
  const auto curves = curves_of(inputs);
  const auto peaks = locate_peaks(curves, o.refine_peaks);
  const auto sizes = sizes_of(curves);
  Vector tmax;
  for (const auto& p : peaks) tmax.push_back(p.t_max);

  const auto landau = extrapolate_tc_landau(sizes, tmax);
  const auto linear = extrapolate_tc_power(sizes, tmax, 1.0);
  Json stability = nullptr;
  if (sizes.size() > 3) {
    const auto dropped = extrapolate_tc_landau(std::span(sizes).subspan(1),
                                               std::span<const double>(tmax).subspan(1));
    const double shift = dropped.tc - landau.tc;
    stability = {{"without_smallest_L", tc_json(dropped)},
                 {"shift", shift},
                 {"shift_within_error", std::abs(shift) < landau.tc_stderr}};
  }
  Json r{{"command", "tc-landau"},
         {"fit", tc_json(landau)},
         {"comparison_L1", tc_json(linear)},
         {"L2_preferred", landau.residual < linear.residual},
         {"stability", stability},
         {"provenance", provenance(inputs)}};
  std::string plot = csv_line({"L", "L_inv2", "t_max", "fit"});
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const double x = std::pow(double(sizes[i]), -2.0);
    plot += csv_line({std::to_string(sizes[i]), fd(x), fd(tmax[i]),
                      fd(landau.tc + landau.slope * x)});
  }
  return {r.dump(2) + "\n", {{"tmax_drift.csv", plot}}};
}

AnalysisOutput run_tc_kt(std::span<const AnalysisInput> inputs, const AnalysisOptions&) {
  require_inputs(inputs, 3, "tc-kt");
  require_consistent(inputs, false);
  std::map<double, std::vector<AnalysisInput>> groups;
  for (const auto& in : inputs) groups[in.curve.params.U].push_back(in);
  Json results = Json::array();
  std::string plot = csv_line({"U", "L", "L_inv", "marker", "fit"});
  for (const auto& [U, group] : groups) {
    require_consistent(group, true);
    const auto curves = curves_of(group);
    const auto est = extrapolate_tc_kt(curves);
    auto j = tc_json(est);
    j["U"] = U;
    results.push_back(j);
    for (std::size_t i = 0; i < est.sizes.size(); ++i) {
      const double x = 1.0 / est.sizes[i];
      plot += csv_line({fd(U), std::to_string(est.sizes[i]), fd(x), fd(est.markers[i]),
                        fd(est.tc + est.slope * x)});
    }
  }
  Json r{{"command", "tc-kt"},
         {"marker", "minimum of dchi/dt"},
         {"results", results},
         {"provenance", provenance(inputs)}};
  return {r.dump(2) + "\n", {{"tc_kt.csv", plot}}};
}

AnalysisOutput run_oracle(const AnalysisOptions& o) {
  if (o.lambda_count < 1 || !(o.lambda_start > 0.0) || o.lambda_stop < o.lambda_start) {
    throw AnalysisRefusal("oracle: need 0 < lambda_start <= lambda_stop and count >= 1");
  }
  std::string table = csv_line({"lambda", "chi", "chi_over_L"});
  Json rows = Json::array();
  for (int i = 0; i < o.lambda_count; ++i) {
    const double lambda =
        o.lambda_count == 1
            ? o.lambda_start
            : o.lambda_start + (o.lambda_stop - o.lambda_start) * i / (o.lambda_count - 1);
    double chi = 0.0;
    try {
      chi = fs_exact(lambda, o.oracle_sites);
    } catch (const DomainError& e) {
      throw AnalysisRefusal(std::string("oracle: ") + e.what());
    }
    rows.push_back({{"lambda", lambda}, {"chi", chi}});
    table += csv_line({fd(lambda), fd(chi), fd(chi / o.oracle_sites)});
  }
  Json r{{"command", "oracle"},
         {"L", o.oracle_sites},
         {"table", rows},
         {"code_version", kVersion}};
  if (o.window_lo.has_value() != o.window_hi.has_value()) {
    throw AnalysisRefusal("oracle: a density window needs both ends");
  }
  if (o.window_lo) {
    DensityExponent d;
    try {
      d = fs_density_exponent(*o.window_lo, *o.window_hi, o.density_sites);
    } catch (const DomainError& e) {
      throw AnalysisRefusal(std::string("oracle: ") + e.what());
    }
    r["density_exponent"] = {{"slope", d.slope},         {"slope_stderr", d.slope_stderr},
                             {"r_squared", d.r_squared}, {"lambda_lo", d.lambda_lo},
                             {"lambda_hi", d.lambda_hi}, {"L", d.sites},
                             {"samples", d.samples},     {"crossover", d.crossover}};
  }
  return {r.dump(2) + "\n", {{"oracle.csv", table}}};
}

AnalysisOutput run_relation(const AnalysisOptions& o) {
  const auto rep = exponent_relation_report(o.alpha, o.alpha_err, o.gamma, o.gamma_err);
  Json r{{"command", "relation"},
         {"alpha", rep.alpha},
         {"alpha_stderr", o.alpha_err},
         {"beta", rep.beta},
         {"gamma", rep.gamma},
         {"gamma_stderr", o.gamma_err},
         {"sum", rep.sum},
         {"deviation", rep.deviation},
         {"error", rep.error},
         {"code_version", kVersion}};
  return {r.dump(2) + "\n", {}};
}

}  // namespace

std::string_view to_string(AnalysisCommand command) noexcept {
  switch (command) {
    case AnalysisCommand::peak: return "peak";
    case AnalysisCommand::collapse: return "collapse";
    case AnalysisCommand::ktform: return "ktform";
    case AnalysisCommand::tc_landau: return "tc-landau";
    case AnalysisCommand::tc_kt: return "tc-kt";
    case AnalysisCommand::oracle: return "oracle";
    case AnalysisCommand::relation: return "relation";
  }
  return "?";
}

AnalysisCommand parse_analysis_command(std::string_view text) {
  for (auto c : {AnalysisCommand::peak, AnalysisCommand::collapse, AnalysisCommand::ktform,
                 AnalysisCommand::tc_landau, AnalysisCommand::tc_kt, AnalysisCommand::oracle,
                 AnalysisCommand::relation}) {
    if (to_string(c) == text) return c;
  }
  throw ConfigError("unknown analysis command '" + std::string(text) + "'");
}

AnalysisInput load_input(const std::filesystem::path& path) {
  AnalysisInput in;
  in.path = path;
  const std::string text = read_text(path);
  in.content_hash = content_hash(text);
  in.file = parse_curve_file(text);
  in.curve = to_curve(in.file);
  return in;
}

RelationReport exponent_relation_report(double alpha, double alpha_err, double gamma,
                                        double gamma_err) {
  RelationReport r;
  r.alpha = alpha;
  r.gamma = gamma;
  r.sum = alpha + 2.0 * r.beta + gamma;
  r.deviation = r.sum - 3.0;
  r.error = std::sqrt(alpha_err * alpha_err + gamma_err * gamma_err);
  return r;
}

std::vector<PeakEstimate> locate_peaks(std::span<const FsCurve> curves, bool refine) {
  std::vector<PeakEstimate> out;
  for (const auto& c : curves) out.push_back(find_peak(c, refine ? refiner(c) : RefineFn{}));
  return out;
}

AnalysisOutput analyze(AnalysisCommand command, std::span<const std::filesystem::path> inputs,
                       const AnalysisOptions& options) {
  std::vector<AnalysisInput> loaded;
  for (const auto& p : inputs) loaded.push_back(load_input(p));
  switch (command) {
    case AnalysisCommand::peak: return run_peak(loaded, options);
    case AnalysisCommand::collapse: return run_collapse(loaded, options);
    case AnalysisCommand::ktform: return run_ktform(loaded, options);
    case AnalysisCommand::tc_landau: return run_tc_landau(loaded, options);
    case AnalysisCommand::tc_kt: return run_tc_kt(loaded, options);
    case AnalysisCommand::oracle: return run_oracle(options);
    case AnalysisCommand::relation: return run_relation(options);
  }
  throw ConfigError("unknown analysis command");
}

}  // namespace critx
