// Copyright 2026 The critx Authors
// SPDX-License-Identifier: Apache-2.0

#include "critx/curve_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "critx/error.hpp"

namespace critx {

namespace {

constexpr std::string_view kMagic = "# critx-curve v1";
constexpr std::string_view kColumns = "t,chi,method,delta_used,residual";

const std::set<std::string, std::less<>> kParamKeys = {"model", "L",  "t",      "U", "n_up",
                                                       "n_dn",  "bc", "lambda", "h", "driving",
                                                       "method", "basis"};

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view text, std::string_view what) {
  int v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw DomainError("curve file: bad integer for " + std::string(what) + ": '" +
                      std::string(text) + "'");
  }
  return v;
}

const std::string& require(const std::map<std::string, std::string>& h, const std::string& key) {
  const auto it = h.find(key);
  if (it == h.end()) throw DomainError("curve file: missing header key '" + key + "'");
  return it->second;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(std::string_view text) {
  text = trim(text);
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  const std::string owned(text);
  char* end = nullptr;
  const double v = std::strtod(owned.c_str(), &end);
  if (owned.empty() || end != owned.c_str() + owned.size()) {
    throw DomainError("bad number '" + owned + "'");
  }
  return v;
}

std::map<std::string, std::string> params_header(const ModelParams& p, DrivingTag tag,
                                                 FsMethod method) {
  std::map<std::string, std::string> h;
  h["model"] = std::string(to_string(p.kind));
  h["L"] = std::to_string(p.sites);
  h["driving"] = std::string(to_string(tag));
  h["method"] = std::string(to_string(method));
  if (p.kind == ModelKind::ahm) {
    h["t"] = format_double(p.t);
    h["U"] = format_double(p.U);
    h["n_up"] = std::to_string(p.n_up);
    h["n_dn"] = std::to_string(p.n_dn);
    h["bc"] = std::string(to_string(p.bc.kind));
    h["basis"] = std::string(to_string(p.basis));
  } else {
    h["lambda"] = format_double(p.lambda);
    h["h"] = format_double(p.h);
  }
  return h;
}

CurveFile to_curve_file(const FsCurve& curve, const std::vector<FsPoint>& points) {
  curve.validate();
  if (!points.empty() && points.size() != curve.size()) {
    throw DomainError("curve file: diagnostics must cover every grid point");
  }
  CurveFile file;
  file.header = curve.metadata;
  for (auto& [k, v] : params_header(curve.params, curve.tag, curve.method)) file.header[k] = v;
  file.rows.reserve(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    CurveRow row;
    row.t = curve.grid[i];
    row.chi = curve.chi[i];
    row.method = curve.method;
    if (!points.empty()) {
      row.method = points[i].method;
      row.delta_used = points[i].delta_used;
      row.residual = points[i].residual;
    }
    file.rows.push_back(row);
  }
  return file;
}

FsCurve to_curve(const CurveFile& file) {
  const auto& h = file.header;
  FsCurve curve;
  ModelParams& p = curve.params;
  p.kind = parse_model_kind(require(h, "model"));
  p.sites = parse_int(require(h, "L"), "L");
  curve.tag = parse_driving_tag(require(h, "driving"));
  curve.method = parse_fs_method(require(h, "method"));
  if (p.kind == ModelKind::ahm) {
    p.t = parse_double(require(h, "t"));
    p.U = parse_double(require(h, "U"));
    p.n_up = parse_int(require(h, "n_up"), "n_up");
    p.n_dn = parse_int(require(h, "n_dn"), "n_dn");
    p.bc.kind = parse_boundary_kind(require(h, "bc"));
    if (auto it = h.find("basis"); it != h.end()) p.basis = parse_basis_kind(it->second);
  } else {
    p.lambda = parse_double(require(h, "lambda"));
    p.h = parse_double(require(h, "h"));
  }
  for (const auto& [k, v] : h) {
    if (!kParamKeys.contains(k)) curve.metadata[k] = v;
  }
  for (const auto& row : file.rows) {
    curve.grid.push_back(row.t);
    curve.chi.push_back(row.chi);
  }
  curve.validate();
  return curve;
}

std::string format_curve_file(const CurveFile& file) {
  std::ostringstream os;
  os << kMagic << '\n';
  for (const auto& [k, v] : file.header) {
    if (k.find_first_of("=\n") != std::string::npos || v.find('\n') != std::string::npos) {
      throw DomainError("curve file: header entries may not contain '=' in keys or newlines");
    }
    os << "# " << k << '=' << v << '\n';
  }
  os << kColumns << '\n';
  for (const auto& r : file.rows) {
    os << format_double(r.t) << ',' << format_double(r.chi) << ',' << to_string(r.method) << ','
       << format_double(r.delta_used) << ',' << format_double(r.residual) << '\n';
  }
  return os.str();
}

CurveFile parse_curve_file(std::string_view text) {
  CurveFile file;
  bool seen_magic = false;
  bool seen_columns = false;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!seen_magic) {
      if (line != kMagic) throw DomainError("curve file: missing '# critx-curve v1' line");
      seen_magic = true;
      continue;
    }
    if (line.front() == '#') {
      if (seen_columns) throw DomainError("curve file: header line after data");
      line.remove_prefix(1);
      line = trim(line);
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw DomainError("curve file: header line " + std::to_string(line_no) + " lacks '='");
      }
      file.header[std::string(line.substr(0, eq))] = std::string(line.substr(eq + 1));
      continue;
    }
    if (!seen_columns) {
      if (line != kColumns) throw DomainError("curve file: unexpected column line");
      seen_columns = true;
      continue;
    }
    std::string_view fields[5];
    std::size_t n = 0;
    while (n < 5) {
      const auto comma = line.find(',');
      fields[n++] = line.substr(0, comma);
      if (comma == std::string_view::npos) break;
      line.remove_prefix(comma + 1);
    }
    if (n != 5) throw DomainError("curve file: row " + std::to_string(line_no) + " needs 5 fields");
    CurveRow row;
    row.t = parse_double(fields[0]);
    row.chi = parse_double(fields[1]);
    row.method = parse_fs_method(trim(fields[2]));
    row.delta_used = parse_double(fields[3]);
    row.residual = parse_double(fields[4]);
    file.rows.push_back(row);
  }
  if (!seen_magic || !seen_columns) throw DomainError("curve file: truncated");
  return file;
}

void write_text_atomic(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_curve_file(const std::filesystem::path& path, const CurveFile& file) {
  write_text_atomic(path, format_curve_file(file));
}

CurveFile read_curve_file(const std::filesystem::path& path) {
  return parse_curve_file(read_text(path));
}

std::string content_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace critx
