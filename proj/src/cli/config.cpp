#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "nhmetro/cli.hpp"
#include "nhmetro/error.hpp"

namespace nhmetro::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw Error(ErrorKind::Config, (path.empty() ? std::string("/") : path) + ": " + msg);
}

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object()) fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) fail(path + "/" + key, "missing required field");
  return *it;
}

const json* optional_field(const json& obj, const std::string& key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) fail(path, "must be finite");
  return v;
}

double angle(const json& j, const std::string& path, bool allow_degrees) {
  if (j.is_number()) return number(j, path);
  if (!j.is_string()) fail(path, "expected a number or an angle expression");
  try {
    return parse_angle_text(j.get<std::string>(), allow_degrees);
  } catch (const Error& e) {
    fail(path, e.what());
  }
}

std::uint64_t count(const json& j, const std::string& path, std::uint64_t min) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) fail(path, "expected an integer");
  const auto v = j.get<long long>();
  if (v < static_cast<long long>(min)) fail(path, "must be >= " + std::to_string(min));
  return static_cast<std::uint64_t>(v);
}

cplx complex_entry(const json& j, const std::string& path) {
  if (j.is_number()) return number(j, path);
  if (j.is_array() && j.size() == 2) return {number(j[0], path + "/0"), number(j[1], path + "/1")};
  fail(path, "expected a number or a [re, im] pair");
}

ComplexMatrix matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a square array of rows");
  const std::size_t d = j.size();
  ComplexMatrix m(d);
  for (std::size_t r = 0; r < d; ++r) {
    const std::string rp = path + "/" + std::to_string(r);
    if (!j[r].is_array() || j[r].size() != d) fail(rp, "row length must equal the number of rows");
    for (std::size_t c = 0; c < d; ++c) m(r, c) = complex_entry(j[r][c], rp + "/" + std::to_string(c));
  }
  return m;
}

HamiltonianModel parse_model(const json& j, const std::string& path) {
  const json& fam = require(j, "family", path);
  if (!fam.is_string()) fail(path + "/family", "expected a string");
  Family family;
  try {
    family = family_from_string(fam.get<std::string>());
  } catch (const Error& e) {
    fail(path + "/family", e.what());
  }
  const json* params = optional_field(j, "params");
  const std::string pp = path + "/params";
  auto param = [&](const std::string& name) {
    if (!params) fail(pp, "missing parameter block");
    return angle(require(*params, name, pp), pp + "/" + name, false);
  };
  try {
    switch (family) {
      case Family::pt: {
        std::string est = "s";
        if (const json* e = optional_field(j, "estimate")) {
          if (!e->is_string()) fail(path + "/estimate", "expected a string");
          est = e->get<std::string>();
          if (est != "s" && est != "alpha") fail(path + "/estimate", "pt estimates 's' or 'alpha'");
        }
        return HamiltonianModel::pt(param("s"), param("alpha"), est);
      }
      case Family::kappa: return HamiltonianModel::kappa(param("kappa"));
      case Family::ep_demo: return HamiltonianModel::ep_demo(param("alpha"));
      case Family::custom: {
        // H(theta) = H0 + theta * dH
        const ComplexMatrix h0 = matrix(require(j, "H0", path), path + "/H0");
        const ComplexMatrix dh = matrix(require(j, "dH", path), path + "/dH");
        if (h0.dim() != dh.dim()) fail(path + "/dH", "dimension differs from H0");
        const double theta = param("theta");
        return HamiltonianModel::custom([h0, dh](double th) { return h0 + dh * cplx(th); },
                                        [dh](double) { return dh; }, theta);
      }
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    fail(pp, e.what());
  }
  fail(path, "unsupported model");
}

ComplexVector parse_probe(const json& j, const std::string& path, std::optional<double>& phi) {
  if (const json* a = optional_field(j, "phi")) {
    phi = angle(*a, path + "/phi", true);
    return probe_from_angle(*phi);
  }
  if (const json* a = optional_field(j, "amplitudes")) {
    if (!a->is_array() || a->empty()) fail(path + "/amplitudes", "expected a non-empty array");
    ComplexVector v(a->size());
    for (std::size_t i = 0; i < a->size(); ++i) {
      v[i] = complex_entry((*a)[i], path + "/amplitudes/" + std::to_string(i));
    }
    if (!(v.norm() > 0.0)) fail(path + "/amplitudes", "probe has zero norm");
    return v.normalized();
  }
  fail(path, "expected 'phi' or 'amplitudes'");
}

std::vector<double> parse_grid(const json& j, const std::string& path, bool degrees) {
  const double start = angle(require(j, "start", path), path + "/start", degrees);
  const auto steps = count(require(j, "steps", path), path + "/steps", 1);
  double stop = start;
  if (const json* s = optional_field(j, "stop")) stop = angle(*s, path + "/stop", degrees);
  if (steps > 1 && !(stop >= start)) fail(path + "/stop", "must be >= start");
  std::vector<double> out(steps);
  for (std::uint64_t k = 0; k < steps; ++k) {
    out[k] = steps == 1 ? start : start + (stop - start) * static_cast<double>(k) / static_cast<double>(steps - 1);
  }
  return out;
}

}  // namespace

double parse_angle_text(const std::string& raw, bool allow_degrees) {
  std::string s;
  for (char ch : raw)
    if (!std::isspace(static_cast<unsigned char>(ch))) s.push_back(static_cast<char>(std::tolower(ch)));
  if (s.empty()) throw Error(ErrorKind::Config, "empty angle expression");

  bool degrees = false;
  if (s.size() > 3 && s.compare(s.size() - 3, 3, "deg") == 0) {
    if (!allow_degrees) throw Error(ErrorKind::Config, "degrees are only accepted for the probe angle");
    degrees = true;
    s.resize(s.size() - 3);
  }

  // left-to-right product/quotient of numbers and "pi"
  double value = 1.0;
  char op = '*';
  std::size_t i = 0;
  bool negate = false;
  if (s[0] == '-' || s[0] == '+') {
    negate = s[0] == '-';
    i = 1;
  }
  while (i <= s.size()) {
    double term;
    if (s.compare(i, 2, "pi") == 0) {
      term = std::numbers::pi;
      i += 2;
    } else {
      const char* begin = s.c_str() + i;
      char* end = nullptr;
      term = std::strtod(begin, &end);
      if (end == begin) throw Error(ErrorKind::Config, "cannot parse angle '" + raw + "'");
      i += static_cast<std::size_t>(end - begin);
      // "3pi" shorthand
      if (s.compare(i, 2, "pi") == 0) {
        term *= std::numbers::pi;
        i += 2;
      }
    }
    if (op == '*') {
      value *= term;
    } else {
      if (term == 0.0) throw Error(ErrorKind::Config, "division by zero in '" + raw + "'");
      value /= term;
    }
    if (i == s.size()) break;
    if (s[i] != '*' && s[i] != '/') throw Error(ErrorKind::Config, "unexpected character in '" + raw + "'");
    op = s[i];
    ++i;
  }
  if (negate) value = -value;
  if (degrees) value *= std::numbers::pi / 180.0;
  if (!std::isfinite(value)) throw Error(ErrorKind::Config, "angle '" + raw + "' is not finite");
  return value;
}

ComplexVector probe_from_angle(double phi) { return {std::cos(2.0 * phi), std::sin(2.0 * phi)}; }

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::Config, std::string("/: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("", "top level must be an object");

  ExperimentConfig cfg;
  cfg.model = parse_model(require(doc, "model", ""), "/model");
  const std::size_t dim = cfg.model->dim();

  if (const json* p = optional_field(doc, "probe")) {
    cfg.probe = parse_probe(*p, "/probe", cfg.probe_phi);
  } else {
    cfg.probe = ComplexVector::basis(dim, 0);
  }
  if (cfg.probe.dim() != dim) fail("/probe", "probe dimension does not match the model");
  if (const json* s = optional_field(doc, "probe_sweep")) {
    if (dim != 2) fail("/probe_sweep", "angle sweeps need a two-level model");
    cfg.probe_sweep = parse_grid(*s, "/probe_sweep", true);
  }

  if (const json* m = optional_field(doc, "measurement")) {
    const std::string mp = "/measurement";
    if (const json* b = optional_field(*m, "basis_state")) {
      const auto idx = count(*b, mp + "/basis_state", 0);
      if (idx >= dim) fail(mp + "/basis_state", "index out of range");
      cfg.measurement = Observable::basis_projector(dim, idx);
    } else if (const json* pj = optional_field(*m, "projector")) {
      const ComplexMatrix a = matrix(*pj, mp + "/projector");
      if (a.dim() != dim) fail(mp + "/projector", "dimension does not match the model");
      try {
        cfg.measurement = Observable(a, "projector");
      } catch (const Error& e) {
        fail(mp + "/projector", e.what());
      }
    } else {
      fail(mp, "expected 'basis_state' or 'projector'");
    }
  } else {
    cfg.measurement = Observable::basis_projector(dim, 0);
  }

  cfg.times = parse_grid(require(doc, "time_grid", ""), "/time_grid", false);
  if (cfg.times.front() < 0.0) fail("/time_grid/start", "must be >= 0");

  if (const json* e = optional_field(doc, "estimation")) {
    const std::string ep = "/estimation";
    EstimationSpec es;
    es.n = count(require(*e, "n", ep), ep + "/n", 1);
    es.trials = count(require(*e, "trials", ep), ep + "/trials", 2);
    if (const json* s = optional_field(*e, "seed")) es.seed = count(*s, ep + "/seed", 0);
    if (const json* t = optional_field(*e, "threads")) es.threads = static_cast<unsigned>(count(*t, ep + "/threads", 1));
    const json& b = require(*e, "bracket", ep);
    const std::string bp = ep + "/bracket";
    if (b.is_array()) {
      if (b.size() != 2) fail(bp, "expected [lo, hi]");
      const double lo = angle(b[0], bp + "/0", false), hi = angle(b[1], bp + "/1", false);
      if (!(lo < hi)) fail(bp, "lo must be < hi");
      es.bracket = {lo, hi};
    } else if (b.is_object()) {
      es.half_width = angle(require(b, "half_width", bp), bp + "/half_width", false);
      if (!(es.half_width > 0.0)) fail(bp + "/half_width", "must be > 0");
    } else {
      fail(bp, "expected [lo, hi] or {\"half_width\": w}");
    }
    cfg.estimation = es;
  }

  if (const json* o = optional_field(doc, "output")) {
    if (const json* c = optional_field(*o, "csv_path")) {
      if (!c->is_string()) fail("/output/csv_path", "expected a string");
      cfg.csv_path = c->get<std::string>();
    }
    if (const json* h = optional_field(*o, "histogram_path")) {
      if (!h->is_string()) fail("/output/histogram_path", "expected a string");
      cfg.histogram_path = h->get<std::string>();
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Config, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace nhmetro::cli
