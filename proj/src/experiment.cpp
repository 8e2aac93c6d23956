#include "experiment.hpp"

#include "steklov/curve_bem.hpp"
#include "steklov/degeneration.hpp"
#include "steklov/ellipse.hpp"
#include "steklov/exact_dtn.hpp"
#include "steklov/functionals.hpp"
#include "steklov/io.hpp"
#include "steklov/optimize.hpp"
#include "steklov/weighted_eig.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#ifndef STEKLOV_VERSION
#define STEKLOV_VERSION "0.0.0"
#endif

namespace steklov::app {

std::string version() { return STEKLOV_VERSION; }

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& s) {
  std::size_t pos = 0;
  const double v = std::stod(trim(s), &pos);
  if (pos != trim(s).size()) throw SchemaError("not a number: " + s);
  return v;
}

std::vector<double> numbers_of(const std::string& s) {
  std::vector<double> v;
  for (const auto& x : split(s, ',')) v.push_back(to_double(x));
  return v;
}

// "head:rest" → {head, rest}.
std::pair<std::string, std::string> tag(const std::string& s) {
  const auto p = s.find(':');
  if (p == std::string::npos) return {trim(s), ""};
  return {trim(s.substr(0, p)), s.substr(p + 1)};
}

TrigPolynomial interleaved(const std::vector<double>& c) {
  if (c.empty()) throw SchemaError("weight: no coefficients");
  TrigPolynomial p(int(c.size()) / 2);
  p.a0 = c[0];
  for (std::size_t i = 1; i < c.size(); ++i) (i % 2 == 1 ? p.cos : p.sin)[(i - 1) / 2] = c[i];
  return p;
}

ParamDef P(std::string name, json def, std::string help, std::vector<std::string> aliases = {}) {
  return {std::move(name), std::move(def), std::move(help), std::move(aliases)};
}

}  // namespace

// ---------------------------------------------------------------------------
// Parsers.

DomainSpec parse_domain(const std::string& s) {
  const auto [kind, arg] = tag(s);
  if (kind == "disk") return DomainSpec::disk();
  if (kind == "annulus") return DomainSpec::annulus(to_double(arg));
  if (kind == "moebius") return DomainSpec::moebius(to_double(arg));
  if (kind == "ellipse") return DomainSpec::smooth_curve(CurveParametrization::ellipse(to_double(arg)));
  if (kind == "circle") return DomainSpec::smooth_curve(CurveParametrization::circle());
  throw SchemaError("unknown domain '" + s + "' (disk | annulus:rho | moebius:eps | ellipse:q | circle)");
}

BoundaryWeight parse_weight(const std::string& s, const DomainSpec& domain, std::uint64_t seed) {
  const int circles = domain.boundary_count();
  const auto [kind, arg] = tag(s);
  if (kind == "handle") return handle_seed(domain, to_double(arg));
  if (kind == "random") {
    // random:degree:amplitude[:seed], log-normal Fourier coefficients decaying like 1/k.
    const auto f = split(arg, ':');
    if (f.size() < 2) throw SchemaError("random weight: random:degree:amplitude[:seed]");
    const int degree = static_cast<int>(to_double(f[0]));
    const double amp = to_double(f[1]);
    std::mt19937_64 rng(f.size() > 2 ? std::uint64_t(to_double(f[2])) : seed);
    std::normal_distribution<double> normal;
    BoundaryWeight w;
    w.representation = BoundaryWeight::Representation::log;
    for (int c = 0; c < circles; ++c) {
      TrigPolynomial p(degree);
      for (int k = 1; k <= degree; ++k) {
        p.cos[std::size_t(k - 1)] = amp * normal(rng) / k;
        p.sin[std::size_t(k - 1)] = amp * normal(rng) / k;
      }
      w.components.push_back(p);
    }
    return w;
  }
  const auto parts = split(s, '|');
  BoundaryWeight w;
  bool log = false;
  for (const auto& part : parts) {
    const auto [k, a] = tag(part);
    if (k == "const") {
      w.components.push_back(TrigPolynomial::constant(to_double(a)));
    } else if (k == "fourier" || k == "log") {
      w.components.push_back(interleaved(numbers_of(a)));
      log = log || k == "log";
    } else {
      throw SchemaError("unknown weight '" + part + "' (const:c | fourier:a0,a1,b1,... | log:... | handle:floor | random:...)");
    }
  }
  if (log) {
    // A log component needs every component in log form.
    for (std::size_t i = 0; i < parts.size(); ++i)
      if (tag(parts[i]).first == "const") w.components[i].a0 = std::log(w.components[i].a0);
      else if (tag(parts[i]).first == "fourier") throw SchemaError("weight: do not mix fourier and log components");
    w.representation = BoundaryWeight::Representation::log;
  }
  if (int(w.size()) == 1 && circles > 1) w.components.resize(std::size_t(circles), w.components[0]);
  if (int(w.size()) != circles) throw SchemaError("weight: expected " + std::to_string(circles) + " components");
  return w;
}

std::function<double(double)> parse_curve_weight(const std::string& s, const DomainSpec& domain) {
  const auto [kind, arg] = tag(s);
  if (kind == "ellipse") {
    if (!domain.shape || !domain.shape->ellipse_q) throw SchemaError("weight 'ellipse' needs an ellipse domain");
    return ellipse_weight_function(*domain.shape->ellipse_q);
  }
  const BoundaryWeight w = parse_weight(s, DomainSpec::disk(), 1);
  return [w](double t) { return w.value(0, t); };
}

FunctionalSpec parse_functional(const std::string& s) {
  const auto [kind, arg] = tag(s);
  const auto v = arg.empty() ? std::vector<double>{} : numbers_of(arg);
  auto need = [&](std::size_t n) {
    if (v.size() != n) throw SchemaError("functional '" + s + "' expects " + std::to_string(n) + " argument(s)");
  };
  if (kind == "HtPlus") return need(1), FunctionalSpec::ht_plus(v[0]);
  if (kind == "HtMinus") return need(1), FunctionalSpec::ht_minus(v[0]);
  if (kind == "Hst") return need(2), FunctionalSpec::hst(v[0], v[1]);
  if (kind == "Fmn") return need(2), FunctionalSpec::fmn(int(v[0]), int(v[1]));
  if (kind == "neg") return need(1), FunctionalSpec::single_neg(int(v[0]));
  throw SchemaError("unknown functional '" + s + "' (HtPlus:t | HtMinus:t | Hst:s,t | Fmn:m,n | neg:k)");
}

std::vector<double> parse_grid(const json& v) {
  if (v.is_array()) return v.get<std::vector<double>>();
  if (v.is_number()) return {v.get<double>()};
  const std::string s = v.get<std::string>();
  if (!s.empty() && s.front() == '[') return parse_grid(json::parse(s));
  const auto f = split(s, ':');
  if (f.size() == 3) {
    const double lo = to_double(f[0]), hi = to_double(f[1]), step = to_double(f[2]);
    if (!(step > 0.0) || hi < lo) throw SchemaError("grid: lo:hi:step needs step > 0 and hi >= lo");
    std::vector<double> out;
    const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int i = 0; i <= n; ++i) out.push_back(lo + i * step);
    return out;
  }
  return numbers_of(s);
}

// ---------------------------------------------------------------------------
// Schema.

const std::vector<CommandDef>& commands() {
  static const std::vector<CommandDef> defs = {
      {"spectrum",
       "Weighted Steklov eigenvalues of one domain",
       {P("domain", "disk", "disk | annulus:rho | moebius:eps | ellipse:q | circle"),
        P("weight", "const:1", "const:c | fourier:a0,a1,b1,... | log:... | handle:floor | random:deg:amp[:seed] | ellipse"),
        P("k", 7, "number of eigenvalues (sigma_0 included)"), P("degree", 32, "trace degree N (flat domains)"),
        P("nodes", 512, "quadrature nodes M (curves)")}},
      {"ellipse-verify",
       "Closed-form spectrum of the critical ellipses against the boundary integral solver",
       {P("q", json::array({1.0, 1.5, 2.0, 3.0, 4.0}), "ellipse parameters"), P("nmax", 5, "largest mode"),
        P("nodes", 512, "boundary nodes for the integral solver"), P("bem", true, "also run the integral solver")}},
      {"optimize",
       "Multi-start maximization of sigma_bar_k or minimization of a functional",
       {P("domain", "disk", "disk | annulus:rho | moebius:eps"),
        P("objective", "sigma:1", "sigma:k | HtPlus:t | HtMinus:t | Hst:s,t | Fmn:m,n | neg:k"),
        P("degree", 16, "modulation degree of log-weight"), P("trace-degree", 64, "lower bound on the trace degree"),
        P("restarts", 8, "random smooth starts"), P("max-iterations", 500, "iterations per start"),
        P("structured", true, "add the handle seed for annulus and Moebius band")}},
      {"sweep",
       "sigma_bar_1 maximization over a grid of moduli",
       {P("family", "annulus", "annulus | moebius"),
        P("grid", json::array({0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.97}), "moduli: list or lo:hi:step", {"rho-grid", "eps"}),
        P("degree", 16, "modulation degree"), P("restarts", 2, "random starts per modulus"),
        P("max-iterations", 500, "iterations per start")}},
      {"degenerate",
       "Disk weights concentrating at attachment points against the disjoint union",
       {P("eps", json::array({0.2, 0.1, 0.05, 0.02, 0.01}), "bump widths"), P("m", 3, "largest index compared"),
        P("attach", 1, "number of attached unit disks"), P("max-degree", 4000, "cap on the trace degree")}},
      {"union",
       "Spectrum of a disjoint union of weighted disks",
       {P("base", "const:1", "weight on the base disk, or none"), P("attach", "const:1", "attached disk weights, ';'-separated"),
        P("k", 8, "number of eigenvalues"), P("degree", 32, "trace degree")}},
      {"check-criticality",
       "Boundary-mass condition for a weighted domain and a functional",
       {P("domain", "ellipse:2", "disk | annulus:rho | moebius:eps | ellipse:q | circle"), P("weight", "ellipse", "see spectrum"),
        P("functional", "HtPlus:2", "HtPlus:t | HtMinus:t | Hst:s,t | Fmn:m,n | neg:k"), P("nodes", 512, "nodes (curves)"),
        P("degree", 64, "trace degree (flat domains)")}},
      {"convergence",
       "Eigenvalues under refinement",
       {P("domain", "disk", "disk | annulus:rho | moebius:eps | ellipse:q | circle"),
        P("weight", "random:8:0.3", "see spectrum"), P("k", 6, "number of eigenvalues"),
        P("degrees", json::array({8, 16, 32, 64, 128}), "trace degrees (flat) or node counts (curves)")}},
  };
  return defs;
}

const CommandDef& command(const std::string& name) {
  for (const auto& c : commands())
    if (c.name == name) return c;
  throw SchemaError("unknown command '" + name + "'");
}

namespace {

const ParamDef& param(const CommandDef& c, const std::string& key) {
  for (const auto& p : c.params) {
    if (p.name == key) return p;
    for (const auto& a : p.aliases)
      if (a == key) return p;
  }
  throw SchemaError("command '" + c.name + "' has no parameter '" + key + "'");
}

json checked(const ParamDef& def, const json& v) {
  const json& d = def.default_value;
  if (d.is_boolean() && v.is_boolean()) return v;
  if (d.is_number_integer() && v.is_number()) {
    if (v.get<double>() != std::floor(v.get<double>())) throw SchemaError(def.name + ": expected an integer");
    return v.get<long long>();
  }
  if (d.is_number_float() && v.is_number()) return v.get<double>();
  if (d.is_string() && v.is_string()) return v;
  if (d.is_array() && (v.is_array() || v.is_string() || v.is_number())) return parse_grid(v);
  throw SchemaError(def.name + ": expected " + std::string(d.type_name()) + ", got " + v.type_name());
}

}  // namespace

json coerce(const ParamDef& def, const std::string& raw) {
  const json& d = def.default_value;
  if (d.is_boolean()) {
    if (raw == "true" || raw == "1") return true;
    if (raw == "false" || raw == "0") return false;
    throw SchemaError(def.name + ": expected true or false");
  }
  if (d.is_number()) return checked(def, to_double(raw));
  if (d.is_array()) return parse_grid(raw);
  return raw;
}

ExperimentConfig resolve(const std::string& name, const json& file, const std::vector<std::pair<std::string, std::string>>& flags) {
  const CommandDef& c = command(name);
  ExperimentConfig cfg;
  cfg.command = name;
  for (const auto& p : c.params) cfg.parameters[p.name] = p.default_value;
  if (!file.is_null()) {
    if (!file.is_object()) throw SchemaError("config: expected a JSON object");
    if (file.contains("command") && file["command"] != name) throw SchemaError("config: command mismatch");
    const json params = file.contains("parameters") ? file["parameters"] : file;
    for (const auto& [k, v] : params.items()) {
      if (k == "command" || k == "output" || k == "seed" || k == "format") continue;
      const ParamDef& def = param(c, k);
      cfg.parameters[def.name] = checked(def, v);
    }
    if (file.contains("seed")) cfg.seed = file["seed"].get<std::uint64_t>();
    if (file.contains("output")) {
      const json& o = file["output"];
      cfg.output.path = o.value("path", "");
      cfg.output.format = o.value("format", "csv");
    }
    if (file.contains("format")) cfg.output.format = file["format"].get<std::string>();
  }
  for (const auto& [k, v] : flags) {
    if (k == "seed") {
      cfg.seed = std::stoull(v);
    } else if (k == "output") {
      cfg.output.path = v;
    } else if (k == "format") {
      cfg.output.format = v;
    } else {
      const ParamDef& def = param(c, k);
      cfg.parameters[def.name] = coerce(def, v);
    }
  }
  if (cfg.output.format != "csv" && cfg.output.format != "json") throw SchemaError("format must be csv or json");
  return cfg;
}

// ---------------------------------------------------------------------------
// Runners.

namespace {

using Params = json;

std::string str(const Params& p, const char* k) { return p.at(k).get<std::string>(); }
int integer(const Params& p, const char* k) { return p.at(k).get<int>(); }

void spectrum_rows(Result& r, const Spectrum& s) {
  r.table.columns = {"k", "sigma", "sigma_bar", "multiplicity"};
  for (int k = 0; k < s.size(); ++k)
    r.table.rows.push_back({k, s.eigenvalues[std::size_t(k)], s.normalized[std::size_t(k)], s.multiplicities[std::size_t(k)]});
  if (std::abs(s.eigenvalues[0]) > 1e-8) r.violations.push_back("sigma_0 is not zero");
  if (!std::is_sorted(s.eigenvalues.begin(), s.eigenvalues.end())) r.violations.push_back("eigenvalues are not sorted");
}

Result run_spectrum(const ExperimentConfig& cfg) {
  const Params& p = cfg.parameters;
  const DomainSpec d = parse_domain(str(p, "domain"));
  Result r;
  Spectrum s;
  if (d.kind == DomainSpec::Kind::curve) {
    s = curve_steklov(*d.shape, parse_curve_weight(str(p, "weight"), d), integer(p, "nodes"), integer(p, "k"));
  } else {
    s = weighted_spectrum(d, parse_weight(str(p, "weight"), d, cfg.seed), integer(p, "degree"), integer(p, "k"));
  }
  spectrum_rows(r, s);
  r.extra["weighted_length"] = s.weighted_length;
  return r;
}

Result run_ellipse_verify(const ExperimentConfig& cfg) {
  const Params& p = cfg.parameters;
  const int nmax = integer(p, "nmax");
  Result r;
  r.table.columns = {"q", "n", "sigma", "tau", "identity_residual", "laplacian_residual", "product_error", "bem_sigma_rel",
                     "bem_tau_rel"};
  for (double q : parse_grid(p.at("q"))) {
    std::vector<double> bem_s(std::size_t(nmax + 1), std::nan("")), bem_t = bem_s;
    if (p.at("bem").get<bool>()) {
      // Enough eigenvalues to reach τ_nmax in the merged order.
      int count = 2 * nmax + 1;
      for (;;) {
        const auto o = ordered_spectrum(q, count);
        bool have = false;
        for (const auto& e : o.entries) have = have || (e.family == 't' && e.n == nmax);
        if (have) break;
        ++count;
      }
      const auto o = ordered_spectrum(q, count);
      const Spectrum s = curve_steklov(CurveParametrization::ellipse(q), ellipse_weight_function(q), integer(p, "nodes"), count);
      for (int k = 1; k < count; ++k) {
        const auto& e = o.entries[std::size_t(k)];
        if (e.n > nmax) continue;
        const double rel = std::abs(s.eigenvalues[std::size_t(k)] - e.value) / e.value;
        (e.family == 's' ? bem_s : bem_t)[std::size_t(e.n)] = rel;
      }
    }
    for (int n = 1; n <= nmax; ++n) {
      const auto e = eigen_pair(n, q);
      const double ident = boundary_identity_check(n, q, 256);
      const double lap = laplacian_residual(e.polynomial);
      const double L = two_pi / std::sqrt(q);
      const double prod = std::abs(e.sigma * e.tau * L * L - 4.0 * pi * pi * n * n);
      r.table.rows.push_back({q, n, e.sigma, e.tau, ident, lap, prod, detail::number(bem_s[std::size_t(n)]),
                              detail::number(bem_t[std::size_t(n)])});
      if (ident > 1e-8) r.violations.push_back("boundary identity residual above 1e-8 at q=" + std::to_string(q));
    }
  }
  return r;
}

Objective parse_objective(const std::string& s) {
  const auto [k, a] = tag(s);
  if (k == "sigma") return Objective::eigenvalue(static_cast<int>(to_double(a)));
  return Objective::minimize(parse_functional(s));
}

OptimizeOptions optimize_options(const Params& p, std::uint64_t seed) {
  OptimizeOptions o;
  o.modulation_degree = integer(p, "degree");
  o.restarts = integer(p, "restarts");
  o.max_iterations = integer(p, "max-iterations");
  o.seed = seed;
  if (p.contains("trace-degree")) o.trace_degree = integer(p, "trace-degree");
  if (p.contains("structured")) o.structured_seeds = p.at("structured").get<bool>();
  return o;
}

Result run_optimize(const ExperimentConfig& cfg) {
  const Params& p = cfg.parameters;
  const DomainSpec d = parse_domain(str(p, "domain"));
  const auto res = optimize(d, parse_objective(str(p, "objective")), optimize_options(p, cfg.seed));
  Result r;
  r.table.columns = {"run", "seed_kind", "seed_parameter", "iterations", "status", "value", "certified_value",
                     "certificate_agreement", "certified", "defect"};
  json runs = json::array();
  for (std::size_t i = 0; i < res.runs.size(); ++i) {
    const auto& x = res.runs[i];
    r.table.rows.push_back({int(i), x.seed_kind, x.seed_parameter, x.iterations, x.status, detail::number(x.value),
                            detail::number(x.certified_value), detail::number(x.certificate_agreement), x.certified, x.defect});
  }
  r.extra["best"] = res.best;
  return r;
}

Result run_sweep(const ExperimentConfig& cfg) {
  const Params& p = cfg.parameters;
  const std::string fam = str(p, "family");
  if (fam != "annulus" && fam != "moebius") throw SchemaError("family must be annulus or moebius");
  const auto kind = fam == "annulus" ? DomainSpec::Kind::annulus : DomainSpec::Kind::moebius;
  const auto rows = moduli_sweep(kind, parse_grid(p.at("grid")), optimize_options(p, cfg.seed));
  Result r;
  r.table.columns = {"modulus", "uniform_sigma_bar_1", "sigma_bar_1", "certified_sigma_bar_1", "certificate_agreement",
                     "certified", "margin", "seed_kind", "trace_degree"};
  for (const auto& x : rows)
    r.table.rows.push_back({x.modulus, x.uniform, detail::number(x.run.value), detail::number(x.run.certified_value),
                            detail::number(x.run.certificate_agreement), x.run.certified, x.margin, x.run.seed_kind,
                            x.run.trace_degree});
  return r;
}

Result run_degenerate(const ExperimentConfig& cfg) {
  const Params& p = cfg.parameters;
  const int m = integer(p, "m");
  const auto spec = DisjointUnionSpec::disk_with_unit_disks(integer(p, "attach"));
  const auto res = degeneration_experiment(spec, parse_grid(p.at("eps")), m, integer(p, "max-degree"));
  Result r;
  r.table.columns = {"eps", "degree", "k", "sigma_bar", "union_sigma_bar", "error", "error_times_log"};
  for (const auto& row : res.rows)
    for (int k = 1; k <= m; ++k) {
      const double e = row.error[std::size_t(k)];
      r.table.rows.push_back({row.eps, row.degree, k, row.weighted[std::size_t(k)], row.target[std::size_t(k)], e,
                              e * std::log(1.0 / row.eps)});
    }
  r.extra["trend"] = detail::numbers(res.trend);
  r.extra["trend_spread"] = detail::numbers(res.trend_spread);
  return r;
}

Result run_union(const ExperimentConfig& cfg) {
  const Params& p = cfg.parameters;
  const int degree = integer(p, "degree");
  DisjointUnionSpec spec;
  if (str(p, "base") != "none") spec.base = WeightedDomain{DomainSpec::disk(), parse_weight(str(p, "base"), DomainSpec::disk(), cfg.seed)};
  const auto parts = split(str(p, "attach"), ';');
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (trim(parts[i]).empty() || trim(parts[i]) == "none") continue;
    spec.attached_disks.push_back(parse_weight(parts[i], DomainSpec::disk(), cfg.seed + i).direct(0, 2 * degree));
  }
  for (std::size_t i = 0; i < spec.attached_disks.size(); ++i) spec.attachment_points.push_back(two_pi * double(i) / double(spec.attached_disks.size()));
  if (!spec.base) spec.attachment_points.clear();
  Result r;
  const Spectrum s = union_spectrum(spec, integer(p, "k"), degree);
  r.table.columns = {"k", "sigma", "sigma_bar", "multiplicity"};
  for (int k = 0; k < s.size(); ++k)
    r.table.rows.push_back({k, s.eigenvalues[std::size_t(k)], s.normalized[std::size_t(k)], s.multiplicities[std::size_t(k)]});
  r.extra["weighted_length"] = s.weighted_length;
  return r;
}

Result run_check_criticality(const ExperimentConfig& cfg) {
  const Params& p = cfg.parameters;
  const DomainSpec d = parse_domain(str(p, "domain"));
  const FunctionalSpec f = parse_functional(str(p, "functional"));
  const int count = f.arity() + 4;
  Spectrum s;
  BoundarySamples b;
  if (d.kind == DomainSpec::Kind::curve) {
    const auto prob = assemble_curve(*d.shape, parse_curve_weight(str(p, "weight"), d), integer(p, "nodes"));
    s = solve_curve(prob, count);
    b = curve_boundary_samples(prob, s);
  } else {
    const int n = integer(p, "degree");
    const BoundaryWeight w = parse_weight(str(p, "weight"), d, cfg.seed);
    SolveOptions so;
    so.keep_traces = true;
    s = weighted_spectrum(d, w, n, count, so);
    b = flat_boundary_samples(d, n, w, s);
  }
  const auto rep = criticality_check(f, s, b);
  Result r;
  r.table.columns = {"cluster_first", "cluster_last", "lhs", "rhs", "defect"};
  for (const auto& c : rep.clusters) r.table.rows.push_back({c.cluster.first, c.cluster.last - 1, c.lhs, c.rhs, c.defect});
  r.extra["report"] = rep;
  r.extra["functional"] = f;
  r.extra["value"] = detail::number(evaluate(f, s));
  r.extra["spectrum"] = s;
  return r;
}

Result run_convergence(const ExperimentConfig& cfg) {
  const Params& p = cfg.parameters;
  const DomainSpec d = parse_domain(str(p, "domain"));
  const int k = integer(p, "k");
  std::vector<int> degrees;
  for (double x : parse_grid(p.at("degrees"))) degrees.push_back(static_cast<int>(x));
  std::vector<ConvergenceRow> rows;
  if (d.kind == DomainSpec::Kind::curve) {
    const auto w = parse_curve_weight(str(p, "weight"), d);
    for (int m : degrees) {
      const Spectrum s = curve_steklov(*d.shape, w, m, k);
      ConvergenceRow row{m, s.eigenvalues, s.normalized, {}, 0.0};
      if (!rows.empty()) {
        double worst = 0.0;
        for (int j = 0; j < k; ++j) {
          row.change.push_back(std::abs(row.eigenvalues[std::size_t(j)] - rows.back().eigenvalues[std::size_t(j)]));
          if (j > 0) worst = std::max(worst, row.change.back() / row.eigenvalues[std::size_t(j)]);
        }
        row.digits = worst > 0.0 ? -std::log10(worst) : std::numeric_limits<double>::infinity();
      }
      rows.push_back(std::move(row));
    }
  } else {
    rows = convergence_study(d, parse_weight(str(p, "weight"), d, cfg.seed), k, degrees);
  }
  Result r;
  r.table.columns = {"degree", "k", "sigma", "sigma_bar", "change", "digits"};
  for (const auto& row : rows)
    for (int j = 0; j < k; ++j)
      r.table.rows.push_back({row.degree, j, row.eigenvalues[std::size_t(j)], row.normalized[std::size_t(j)],
                              row.change.empty() ? json(nullptr) : json(row.change[std::size_t(j)]), detail::number(row.digits)});
  return r;
}

}  // namespace

Result run(const ExperimentConfig& cfg) {
  if (cfg.command == "spectrum") return run_spectrum(cfg);
  if (cfg.command == "ellipse-verify") return run_ellipse_verify(cfg);
  if (cfg.command == "optimize") return run_optimize(cfg);
  if (cfg.command == "sweep") return run_sweep(cfg);
  if (cfg.command == "degenerate") return run_degenerate(cfg);
  if (cfg.command == "union") return run_union(cfg);
  if (cfg.command == "check-criticality") return run_check_criticality(cfg);
  if (cfg.command == "convergence") return run_convergence(cfg);
  throw SchemaError("unknown command '" + cfg.command + "'");
}

json to_document(const ExperimentConfig& cfg, const Result& r) {
  json rows = json::array();
  for (const auto& row : r.table.rows) rows.push_back(row);
  return json{{"version", version()},   {"command", cfg.command}, {"seed", cfg.seed},
              {"parameters", cfg.parameters}, {"columns", r.table.columns}, {"rows", rows},
              {"extra", r.extra},         {"violations", r.violations}};
}

std::string to_csv(const ExperimentConfig& cfg, const Result& r) {
  std::ostringstream out;
  out << "# steklov " << version() << "\n# command: " << cfg.command << "\n# seed: " << cfg.seed
      << "\n# parameters: " << cfg.parameters.dump() << "\n";
  for (const auto& v : r.violations) out << "# violation: " << v << "\n";
  for (std::size_t i = 0; i < r.table.columns.size(); ++i) out << (i ? "," : "") << r.table.columns[i];
  out << "\n";
  out.precision(17);
  for (const auto& row : r.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ",";
      const json& v = row[i];
      if (v.is_string()) out << v.get<std::string>();
      else if (v.is_null()) out << "";
      else if (v.is_number_float()) out << v.get<double>();
      else out << v.dump();
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace steklov::app
