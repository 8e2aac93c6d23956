#ifndef STEKLOV_IO_HPP
#define STEKLOV_IO_HPP

// JSON forms of the library types.

#include "steklov/degeneration.hpp"
#include "steklov/domain.hpp"
#include "steklov/functionals.hpp"
#include "steklov/optimize.hpp"
#include "steklov/spectrum.hpp"
#include "steklov/trig.hpp"

#include <json.hpp>  // vendored nlohmann/json

#include <cmath>
#include <string>
#include <vector>

namespace steklov {

using json = nlohmann::json;

namespace detail {

// NaN and ±∞ have no JSON literal; they are written as strings.
inline json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

}  // namespace detail

inline void to_json(json& j, const TrigPolynomial& p) {
  j = json{{"degree", p.degree()}, {"a0", p.a0}, {"cos", p.cos}, {"sin", p.sin}};
}

inline void from_json(const json& j, TrigPolynomial& p) {
  p.a0 = j.at("a0").get<double>();
  p.cos = j.value("cos", std::vector<double>{});
  p.sin = j.value("sin", std::vector<double>{});
  const std::size_t n = std::max(p.cos.size(), p.sin.size());
  p.cos.resize(n, 0.0);
  p.sin.resize(n, 0.0);
}

inline void to_json(json& j, const BoundaryWeight& w) {
  j = json{{"representation", w.representation == BoundaryWeight::Representation::log ? "log" : "direct"},
           {"components", w.components}};
}

inline void from_json(const json& j, BoundaryWeight& w) {
  w.representation = j.value("representation", std::string("direct")) == "log" ? BoundaryWeight::Representation::log
                                                                              : BoundaryWeight::Representation::direct;
  w.components = j.at("components").get<std::vector<TrigPolynomial>>();
}

inline void to_json(json& j, const DomainSpec& d) {
  j = json{{"kind", d.name()}};
  if (d.kind == DomainSpec::Kind::annulus) j["rho"] = d.parameter;
  if (d.kind == DomainSpec::Kind::moebius) j["eps"] = d.parameter;
  if (d.kind == DomainSpec::Kind::curve && d.shape && d.shape->ellipse_q) j["ellipse_q"] = *d.shape->ellipse_q;
}

inline void to_json(json& j, const Spectrum& s) {
  j = json{{"eigenvalues", detail::numbers(s.eigenvalues)},
           {"normalized", detail::numbers(s.normalized)},
           {"multiplicities", s.multiplicities},
           {"weighted_length", s.weighted_length},
           {"multiplicity_tolerance", s.multiplicity_tolerance}};
}

inline void to_json(json& j, const FunctionalSpec& f) {
  j = json{{"kind", f.name()}};
  switch (f.kind) {
    case FunctionalSpec::Kind::ht_plus:
    case FunctionalSpec::Kind::ht_minus: j["t"] = f.t; break;
    case FunctionalSpec::Kind::hst:
      j["s"] = f.s;
      j["t"] = f.t;
      break;
    case FunctionalSpec::Kind::fmn:
      j["m"] = f.m;
      j["n"] = f.n;
      break;
    case FunctionalSpec::Kind::single_neg: j["k"] = f.m; break;
  }
}

inline void to_json(json& j, const Cluster& c) { j = json{{"first", c.first}, {"last", c.last}}; }

inline void to_json(json& j, const CriticalityReport& r) {
  json cl = json::array();
  for (const auto& c : r.clusters) cl.push_back({{"cluster", c.cluster}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"defect", c.defect}});
  j = json{{"clusters", cl},
           {"max_defect", r.max_defect},
           {"fit_residual", r.fit_residual},
           {"min_gram_eigenvalue", detail::number(r.min_gram_eigenvalue)},
           {"cluster_extends_past_m", r.cluster_extends_past_m}};
}

inline void to_json(json& j, const IterationRecord& r) {
  j = json{{"iteration", r.iteration}, {"value", r.value}, {"defect", r.defect}, {"step", r.step}, {"cluster_size", r.cluster_size}};
}

inline void to_json(json& j, const OptimizationRun& r) {
  j = json{{"domain", r.domain},
           {"objective", r.objective},
           {"seed_kind", r.seed_kind},
           {"seed_parameter", r.seed_parameter},
           {"modulation_degree", r.modulation_degree},
           {"trace_degree", r.trace_degree},
           {"iterations", r.iterations},
           {"status", r.status},
           {"value", detail::number(r.value)},
           {"certified_value", detail::number(r.certified_value)},
           {"certificate_agreement", detail::number(r.certificate_agreement)},
           {"certified", r.certified},
           {"defect", r.defect},
           {"spectrum", r.spectrum},
           {"weight", r.weight},
           {"history", r.history}};
  if (r.criticality) j["criticality"] = *r.criticality;
}

inline void to_json(json& j, const DegenerationRow& r) {
  j = json{{"eps", r.eps},
           {"degree", r.degree},
           {"weighted", detail::numbers(r.weighted)},
           {"target", detail::numbers(r.target)},
           {"error", detail::numbers(r.error)},
           {"mass", r.mass}};
}

}  // namespace steklov

#endif
