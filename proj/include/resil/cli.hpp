#pragma once

// Command-line dispatcher for the `resil` tool. run() takes argv and two
// streams so tests can drive it in-process.
//
// Exit codes: 0 success, 1 precondition failure (structured JSON error),
// 2 a computed certificate failed its check.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "resil/amplifier.hpp"
#include "resil/cyclerun_builder.hpp"
#include "resil/designs.hpp"
#include "resil/error.hpp"
#include "resil/fourier.hpp"
#include "resil/io.hpp"
#include "resil/learner.hpp"
#include "resil/resilience_lp.hpp"
#include "resil/witness.hpp"
#include "resil/zoo.hpp"

namespace resil::cli {

inline constexpr const char* kToolName = "resil";
inline constexpr const char* kVersion = "0.1.0";

using nlohmann::json;

// ---------------------------------------------------------------------------
// Function specs: name:key=value,key=value

struct FunctionSpec {
  std::string name;
  std::map<std::string, std::string> params;
};

inline FunctionSpec parse_function_spec(const std::string& text) {
  FunctionSpec spec;
  const auto colon = text.find(':');
  spec.name = text.substr(0, colon);
  require(!spec.name.empty(), Errc::parse_error, "function spec needs a name");
  if (colon == std::string::npos) return spec;
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    require(eq != std::string::npos && eq > 0, Errc::parse_error, "expected key=value in '" + item + "'");
    const std::string key = item.substr(0, eq);
    require(!spec.params.count(key), Errc::parse_error, "duplicate key '" + key + "'");
    spec.params[key] = item.substr(eq + 1);
  }
  return spec;
}

class SpecReader {
 public:
  SpecReader(const FunctionSpec& spec, std::set<std::string> allowed) : spec_(spec) {
    for (const auto& [k, v] : spec.params)
      require(allowed.count(k) > 0, Errc::parse_error, "unknown key '" + k + "' for " + spec.name);
  }

  std::string text(const std::string& key) const {
    auto it = spec_.params.find(key);
    require(it != spec_.params.end(), Errc::parse_error, spec_.name + " requires key '" + key + "'");
    return it->second;
  }

  bool has(const std::string& key) const { return spec_.params.count(key) > 0; }

  long long integer(const std::string& key) const {
    const std::string t = text(key);
    long long v = 0;
    const auto r = std::from_chars(t.data(), t.data() + t.size(), v);
    require(r.ec == std::errc() && r.ptr == t.data() + t.size(), Errc::parse_error,
            "key '" + key + "' needs an integer, got '" + t + "'");
    return v;
  }

  int small(const std::string& key) const {
    const long long v = integer(key);
    require(v >= -1000000 && v <= 1000000, Errc::parse_error, "key '" + key + "' out of range");
    return int(v);
  }

 private:
  const FunctionSpec& spec_;
};

inline BooleanFunction random_function(int n, std::uint64_t seed, bool balanced) {
  check_dimension(n);
  std::mt19937_64 rng(seed);
  if (!balanced) return BooleanFunction::from(n, [&](PointIndex) { return (rng() & 1U) ? 1 : -1; });
  std::vector<std::int8_t> t(table_size(n));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = i < t.size() / 2 ? 1 : -1;
  for (std::size_t i = t.size(); i > 1; --i) std::swap(t[i - 1], t[rng() % i]);
  return BooleanFunction(n, std::move(t));
}

/// Builds any table-valued spec; Boolean results come back as +-1 tables.
inline BoundedFunction make_function(const std::string& text) {
  const FunctionSpec spec = parse_function_spec(text);
  const std::string& name = spec.name;
  if (name == "tribes") {
    SpecReader r(spec, {"w", "s"});
    return BoundedFunction(tribes(r.small("w"), r.small("s")));
  }
  if (name == "cyclerun") {
    SpecReader r(spec, {"n"});
    return BoundedFunction(cyclerun(r.small("n")));
  }
  if (name == "majority") {
    SpecReader r(spec, {"n"});
    return BoundedFunction(majority(r.small("n")));
  }
  if (name == "parity") {
    SpecReader r(spec, {"n", "k", "mask"});
    const int n = r.small("n");
    require(r.has("k") != r.has("mask"), Errc::parse_error, "parity takes exactly one of k or mask");
    if (r.has("k")) return BoundedFunction(parity_prefix(r.small("k"), n));
    return BoundedFunction(parity(io::parse_mask(r.text("mask")), n));
  }
  if (name == "dictator") {
    SpecReader r(spec, {"n", "i"});
    return BoundedFunction(dictator(r.small("i"), r.small("n")));
  }
  if (name == "and") {
    SpecReader r(spec, {"n"});
    return BoundedFunction(and_function(r.small("n")));
  }
  if (name == "random") {
    SpecReader r(spec, {"n", "seed", "balanced"});
    const bool bal = r.has("balanced") && r.integer("balanced") != 0;
    return BoundedFunction(random_function(r.small("n"), std::uint64_t(r.integer("seed")), bal));
  }
  if (name == "builder") {
    SpecReader r(spec, {"n", "c1"});
    double c1 = kDefaultC1;
    if (r.has("c1")) c1 = std::stod(r.text("c1"));
    return BoundedFunction(build_one_resilient(r.small("n"), c1).output);
  }
  if (name == "file") {
    SpecReader r(spec, {"path"});
    return io::load_truth_table(r.text("path"));
  }
  throw Error(Errc::parse_error, "unknown function '" + name + "'");
}

inline BooleanFunction make_boolean(const std::string& text) {
  auto b = make_function(text).to_boolean();
  require(b.has_value(), Errc::not_boolean, "'" + text + "' is not +-1 valued");
  return *b;
}

// ---------------------------------------------------------------------------
// Config and output

struct Config {
  std::string command;
  std::string fn;
  std::string g;
  std::string cls;
  int n = -1;
  int d = 1;
  int k = 1;
  std::vector<double> tau{0.1};
  std::vector<double> t{1.0};
  double c1 = kDefaultC1;
  double delta = 0.1;
  double noise = 0.0;
  double eps = 0.01;
  std::size_t m = 0;
  std::optional<std::uint64_t> seed;
  double tol = 1e-6;
  std::string out;
  std::string format = "json";
};

inline json config_json(const Config& c) {
  json j;
  j["command"] = c.command;
  if (!c.fn.empty()) j["fn"] = c.fn;
  if (!c.g.empty()) j["g"] = c.g;
  if (!c.cls.empty()) j["class"] = c.cls;
  if (c.n >= 0) j["n"] = c.n;
  j["d"] = c.d;
  j["k"] = c.k;
  j["tau"] = c.tau;
  j["t"] = c.t;
  j["c1"] = c.c1;
  j["delta"] = c.delta;
  j["noise"] = c.noise;
  j["eps"] = c.eps;
  j["m"] = c.m;
  if (c.seed) j["seed"] = *c.seed;
  j["tol"] = c.tol;
  j["format"] = c.format;
  if (!c.out.empty()) j["out"] = c.out;
  return j;
}

struct Outcome {
  json result;
  std::string csv;     ///< filled when the command has a CSV form
  std::string text;    ///< raw text artifacts (truth tables)
  bool certified = true;
  bool precondition_failed = false;
};

inline json envelope(const Config& c, const json& body, const char* key) {
  json j;
  j["tool"] = kToolName;
  j["version"] = kVersion;
  j["config"] = config_json(c);
  j[key] = body;
  return j;
}

inline std::vector<double> table_vector(const BoundedFunction& f) { return {f.values().begin(), f.values().end()}; }

inline json check_json(const ResilienceCheck& r) {
  return {{"resilient", r.resilient}, {"worst_mask", io::hex_mask(r.worst_mask)}, {"worst_value", r.worst_value}};
}

inline void need_fn(const Config& c) { require(!c.fn.empty(), Errc::invalid_argument, "--fn is required"); }

// ---------------------------------------------------------------------------
// Commands

inline Outcome cmd_spectrum(const Config& c) {
  need_fn(c);
  const auto f = make_function(c.fn);
  const Spectrum s = wht(f);
  Outcome o;
  o.result = {{"n", f.dim()}, {"parseval", s.total_weight()}, {"spectrum", io::spectrum_json(s)}};
  std::ostringstream csv;
  io::write_spectrum_csv(csv, s);
  o.csv = csv.str();
  return o;
}

inline Outcome cmd_stats(const Config& c) {
  need_fn(c);
  const auto f = make_function(c.fn);
  Outcome o;
  const auto b = f.to_boolean();
  const SpectralStats st = b ? spectral_stats(*b, c.d) : spectral_stats(f, c.d);
  const Spectrum s = wht(f);
  o.result = {{"n", f.dim()},
              {"d", c.d},
              {"low_weight", st.low_weight},
              {"total_influence", st.total_influence},
              {"fourier_influence", st.fourier_influence},
              {"per_coordinate_influence", st.per_coordinate_influence},
              {"resilience_order", b ? resilience_order_exact(*b) : resilience_order(s)},
              {"boolean", b.has_value()}};
  if (b) {
    check_noise_rate(c.delta);
    o.result["noise_sensitivity"] = {{"delta", c.delta}, {"spectral", noise_sensitivity(s, c.delta)}};
    if (f.dim() <= kDirectNoiseLimit)
      o.result["noise_sensitivity"]["direct"] = noise_sensitivity_direct(*b, c.delta);
    o.certified = std::abs(st.total_influence - st.fourier_influence) <= 1e-9;
  }
  return o;
}

inline json resilience_json(const ResilienceResult& r) {
  return {{"alpha", r.alpha},
          {"d", r.d},
          {"status", lp::to_string(r.status)},
          {"lp_value", r.lp_value},
          {"iterations", r.iterations},
          {"witness_check", check_json(r.resilience)},
          {"witness", table_vector(r.witness)}};
}

inline json poly_json(const SparsePolynomial& p) {
  json j = json::object();
  for (const auto& [m, v] : p.coeffs()) j[io::hex_mask(m)] = v;
  return j;
}

inline json l1_json(const L1ApproxResult& r) {
  return {{"delta", r.delta},
          {"status", lp::to_string(r.status)},
          {"lp_value", r.lp_value},
          {"iterations", r.iterations},
          {"poly", poly_json(r.poly)}};
}

inline Outcome cmd_duality(const Config& c) {
  need_fn(c);
  const auto f = make_boolean(c.fn);
  const DualityCertificate cert = duality_certificate(f, c.d);
  Outcome o;
  o.result = {{"n", f.dim()},
              {"d", c.d},
              {"alpha", cert.alpha},
              {"delta", cert.delta},
              {"gap", cert.gap},
              {"tolerance", c.tol},
              {"resilience", resilience_json(cert.resilience)},
              {"approximation", l1_json(cert.approximation)}};
  o.certified = cert.gap <= c.tol;
  return o;
}

inline Outcome cmd_resilience(const Config& c) {
  need_fn(c);
  const auto r = distance_to_resilience(make_boolean(c.fn), c.d);
  Outcome o;
  o.result = resilience_json(r);
  return o;
}

inline Outcome cmd_l1approx(const Config& c) {
  need_fn(c);
  const auto r = l1_poly_distance(make_boolean(c.fn), c.d);
  Outcome o;
  o.result = l1_json(r);
  return o;
}

inline Outcome cmd_witness(const Config& c) {
  need_fn(c);
  const auto f = make_boolean(c.fn);
  Outcome o;
  o.result = {{"n", f.dim()}, {"d", c.d}, {"runs", json::array()}};
  std::optional<double> lp_corr;
  if (f.dim() <= kMaxLpDimension) lp_corr = 1.0 - distance_to_resilience(f, c.d).alpha;
  std::ostringstream csv;
  csv << "tau,delta_emp,corr_qf,low_part_sup,high_sup,corr_pf,exact_resilient,status\n";
  for (double tau : c.tau) {
    WitnessReport w;
    try {
      w = build_witness(f, {c.d, tau});
    } catch (const Error& ex) {
      if (c.tau.size() == 1) throw;
      // a sweep keeps going; the failed point is reported and the exit status is 1
      o.result["runs"].push_back({{"tau", tau}, {"error", {{"code", to_string(ex.code())}, {"message", ex.what()}}}});
      o.precondition_failed = true;
      csv << io::format_real(tau) << ",,,,,,," << to_string(ex.code()) << '\n';
      continue;
    }
    json run = {{"tau", tau},
                {"gamma", w.gamma},
                {"ell_sup", w.ell_sup},
                {"delta_emp", w.delta_emp},
                {"corr_qf", w.corr_qf},
                {"q_sup", w.q_sup},
                {"q_in_range", w.q_in_range},
                {"low_part_sup", w.low_part_sup},
                {"high_sup", w.high_sup},
                {"corr_pf", w.corr_pf},
                {"chain_bound", w.chain_bound},
                {"float_check", check_json(w.float_check)},
                {"exact_checked", w.exact_checked},
                {"exact_resilient", w.exact_resilient}};
    bool ok = w.float_check.resilient && (!w.exact_checked || w.exact_resilient) && w.q_in_range &&
              w.corr_qf >= (1.0 - tau) * (1.0 - w.delta_emp) - 1e-10;
    if (lp_corr) {
      run["lp_correlation"] = *lp_corr;
      ok = ok && w.corr_pf <= *lp_corr + 1e-6;
    }
    if (!c.out.empty()) {
      const std::string path = c.out + ".tau" + io::format_real(tau) + ".table";
      std::ofstream tf(path);
      require(bool(tf), Errc::invalid_argument, "cannot write '" + path + "'");
      io::write_truth_table(tf, w.p);
      run["p_table_path"] = path;
    } else {
      run["p_table"] = table_vector(w.p);
    }
    run["certified"] = ok;
    o.certified = o.certified && ok;
    csv << io::format_real(tau) << ',' << io::format_real(w.delta_emp) << ',' << io::format_real(w.corr_qf) << ','
        << io::format_real(w.low_part_sup) << ',' << io::format_real(w.high_sup) << ','
        << io::format_real(w.corr_pf) << ',' << (w.exact_resilient ? 1 : 0) << ",ok\n";
    o.result["runs"].push_back(std::move(run));
  }
  o.csv = csv.str();
  return o;
}

inline Outcome cmd_cyclerun_build(const Config& c) {
  require(c.n >= 0, Errc::invalid_argument, "--n is required");
  const BuilderReport rep = build_one_resilient(c.n, c.c1);
  const AuditResult audit = audit_invariants(rep);
  const auto cert = wht_integer(rep.output);
  std::vector<std::int64_t> level1;
  for (int j = 0; j < c.n; ++j) level1.push_back(cert[SubsetMask{1} << j]);
  const bool zeros = cert[0] == 0 && std::all_of(level1.begin(), level1.end(), [](auto v) { return v == 0; });
  Outcome o;
  json log = json::array();
  std::ostringstream csv;
  csv << "iteration,step,candidate,representative,abs_sum,orbit_size,sigma_before,sigma_after\n";
  for (const auto& r : rep.log) {
    log.push_back({{"iteration", r.iteration},
                   {"step", to_string(r.step)},
                   {"candidate", r.candidate},
                   {"representative", r.representative},
                   {"abs_sum", r.abs_sum},
                   {"orbit_size", r.orbit_size},
                   {"sigma_before", r.sigma_before},
                   {"sigma_after", r.sigma_after}});
    csv << r.iteration << ',' << to_string(r.step) << ',' << r.candidate << ',' << r.representative << ','
        << r.abs_sum << ',' << r.orbit_size << ',' << r.sigma_before << ',' << r.sigma_after << '\n';
  }
  o.result = {{"n", rep.n},
              {"c1", rep.c1},
              {"sigma_initial", rep.sigma_initial},
              {"sigma_final", rep.sigma_final},
              {"sbar_size", rep.sbar_size},
              {"sbar_prime_size", rep.sbar_prime_size},
              {"iterations", rep.log.size()},
              {"distance", rep.distance},
              {"distance_ratio", rep.distance_ratio},
              {"budget", rep.budget},
              {"budget_used", rep.budget_used},
              {"certificate", {{"constant_scaled", cert[0]}, {"first_level_scaled", level1}, {"all_zero", zeros}}},
              {"audit", {{"ok", audit.ok}, {"detail", audit.detail}}},
              {"log", log}};
  o.csv = csv.str();
  o.certified = zeros && audit.ok && rep.sigma_final == 0;
  return o;
}

inline json distance_json(const DistanceEstimate& e) {
  return {{"value", e.value}, {"ci_low", e.ci_low}, {"ci_high", e.ci_high}, {"exact", e.exact}, {"samples", e.samples}};
}

inline Outcome cmd_amplify(const Config& c) {
  need_fn(c);
  const auto f = make_boolean(c.fn);
  const BoundedFunction g = c.g.empty() ? distance_to_resilience(f, c.d).witness : make_function(c.g);
  require(g.dim() == f.dim(), Errc::dimension_mismatch, "f and g must share dimension");
  const long double bits = std::pow((long double)f.dim(), c.k + 1);
  require(bits <= kMaxMaterializeArity || c.seed.has_value(), Errc::invalid_argument,
          "sampled amplification needs --seed");
  const std::size_t samples = c.m > 0 ? c.m : kDefaultSamples;
  const auto rep = amplification_report(f, g, c.k, samples, c.seed.value_or(0));
  Outcome o;
  json levels = json::array();
  std::ostringstream csv;
  csv << "k,arity,dist,ci_low,ci_high,bound,exact\n";
  for (const auto& L : rep.levels) {
    json l = {{"k", L.k},
              {"arity", L.arity},
              {"dist", distance_json(L.dist)},
              {"bound", L.bound},
              {"within_bound", L.within_bound},
              {"triangle_holds", L.triangle_holds},
              {"outer_swap_within", L.outer_swap_within}};
    if (L.inner_swap) l["inner_swap"] = *L.inner_swap;
    if (L.outer_swap) l["outer_swap"] = *L.outer_swap;
    if (L.noise_term) l["noise_term"] = *L.noise_term;
    o.certified = o.certified && L.within_bound && L.triangle_holds && L.outer_swap_within;
    levels.push_back(std::move(l));
    csv << L.k << ',' << L.arity << ',' << io::format_real(L.dist.value) << ',' << io::format_real(L.dist.ci_low)
        << ',' << io::format_real(L.dist.ci_high) << ',' << io::format_real(L.bound) << ',' << (L.dist.exact ? 1 : 0)
        << '\n';
  }
  o.result = {{"n", rep.n},
              {"k", rep.k},
              {"base_distance", rep.base_distance},
              {"influence", rep.influence},
              {"ns_exact", rep.ns_exact},
              {"ns_union_bound", rep.ns_union_bound},
              {"levels", levels}};
  o.certified = o.certified && rep.ns_exact <= rep.ns_union_bound + 1e-12;
  o.csv = csv.str();
  return o;
}

inline json design_json(const Design& D) {
  json sets = json::array();
  for (SubsetMask s : D.sets) sets.push_back(mask_indices(s));
  return {{"n", D.n}, {"k", D.k}, {"d", D.d}, {"size", D.sets.size()}, {"sets", sets}};
}

inline DesignOrder design_order(const Config& c) {
  DesignOrder ord;
  if (c.seed) {
    ord.shuffled = true;
    ord.seed = *c.seed;
  }
  return ord;
}

inline Outcome cmd_design(const Config& c) {
  require(c.n >= 0, Errc::invalid_argument, "--n is required");
  const Design D = greedy_design(c.n, c.k, c.d, design_order(c));
  Outcome o;
  o.result = design_json(D);
  o.result["valid"] = is_valid_design(D);
  o.result["bound"] = design_size_bound(c.n, c.k, c.d);
  o.result["order"] = c.seed ? "shuffled" : "lexicographic";
  std::ostringstream csv;
  csv << "set\n";
  for (SubsetMask s : D.sets) {
    const auto idx = mask_indices(s);
    for (std::size_t i = 0; i < idx.size(); ++i) csv << (i ? " " : "") << idx[i];
    csv << '\n';
  }
  o.csv = csv.str();
  o.certified = is_valid_design(D) && (c.d == 0 || D.sets.size() >= design_size_floor(c.n, c.k, c.d));
  return o;
}

inline Outcome cmd_ortho_family(const Config& c) {
  need_fn(c);
  require(c.n >= 0, Errc::invalid_argument, "--n (ambient dimension) is required");
  const auto g = make_function(c.fn);
  const Design D = greedy_design(c.n, g.dim(), c.d, design_order(c));
  const OrthogonalFamily fam = orthogonal_family(g, D);
  Outcome o;
  o.result = {{"design", design_json(D)},
              {"g_order", fam.g_order},
              {"exact", fam.exact},
              {"orthogonal", fam.orthogonal},
              {"max_off_diagonal", fam.max_off_diagonal},
              {"gram", fam.gram}};
  if (fam.exact) o.result["gram_exact"] = fam.gram_exact;
  o.certified = fam.orthogonal;
  return o;
}

inline Outcome cmd_learn(const Config& c) {
  need_fn(c);
  require(c.noise >= 0.0 && c.noise <= 0.5, Errc::invalid_argument, "--noise must lie in [0, 0.5]");
  const auto f = make_function(c.fn);
  const double scale = 1.0 - 2.0 * c.noise;
  LabeledDistribution dist{BoundedFunction::from(f.dim(), [&](PointIndex x) { return scale * f[x]; })};
  std::optional<std::vector<BooleanFunction>> cls;
  if (!c.cls.empty()) {
    require(c.cls == "dictators", Errc::invalid_argument, "only --class dictators is supported");
    cls = dictator_class(f.dim());
  }
  const auto* cp = cls ? &*cls : nullptr;
  LearnReport rep;
  if (c.m > 0) {
    require(c.seed.has_value(), Errc::invalid_argument, "sampled learning needs --seed");
    rep = learn_sampled(dist, c.d, c.m, *c.seed, cp, c.eps);
  } else {
    rep = learn_exact(dist, c.d, c.eps, cp);
  }
  Outcome o;
  o.result = {{"n", rep.n},
              {"d", rep.d},
              {"error", rep.error},
              {"threshold", rep.threshold},
              {"regression_delta", rep.regression_delta},
              {"regressor", poly_json(rep.regressor)},
              {"sampled", rep.sampled},
              {"lp_iterations", rep.lp_iterations}};
  if (rep.sampled) {
    o.result["samples"] = rep.samples;
    o.result["seed"] = rep.seed;
    o.result["empirical_error"] = rep.empirical_error;
  }
  if (rep.opt) {
    o.result["opt"] = *rep.opt;
    o.result["class_delta"] = *rep.class_delta;
    o.result["excess"] = *rep.excess;
    o.result["excess_within_bound"] = *rep.excess_within_bound;
    if (!rep.sampled) o.certified = *rep.excess_within_bound;
  }
  return o;
}

inline Outcome cmd_ft_stats(const Config& c) {
  require(c.n >= 1, Errc::invalid_argument, "--n is required");
  Outcome o;
  json rows = json::array();
  std::ostringstream csv;
  csv << "n,t,phi,influence_sum,support_prob,level,level_prob,inf_ratio,support_ratio,level_ratio,printed_factor,"
         "relaxed_factor\n";
  for (double t : c.t) {
    const FtStats st = ft_stats(t, c.n);
    json row = {{"t", t}, {"influence_sum", st.influence_sum}, {"support_prob", st.support_prob}, {"exact", st.exact}};
    if (t > 0.0) {
      for (auto norm : {PhiNormalization::printed, PhiNormalization::standard}) {
        const auto r = ft_estimate_row(t, c.n, norm);
        row[to_string(norm)] = {{"phi", r.phi_t},
                                {"level", r.level},
                                {"level_prob", r.level_prob},
                                {"inf_ratio", r.inf_ratio},
                                {"support_ratio", r.support_ratio},
                                {"level_ratio", r.level_ratio},
                                {"holds_printed_factor", r.holds_printed_factor},
                                {"holds_relaxed_factor", r.holds_relaxed_factor}};
        csv << c.n << ',' << io::format_real(t) << ',' << to_string(norm) << ',' << io::format_real(r.influence_sum)
            << ',' << io::format_real(r.support_prob) << ',' << r.level << ',' << io::format_real(r.level_prob) << ','
            << io::format_real(r.inf_ratio) << ',' << io::format_real(r.support_ratio) << ','
            << io::format_real(r.level_ratio) << ',' << r.holds_printed_factor << ',' << r.holds_relaxed_factor
            << '\n';
      }
    }
    rows.push_back(std::move(row));
  }
  o.result = {{"n", c.n}, {"rows", rows}};
  o.csv = csv.str();
  return o;
}

inline Outcome cmd_table(const Config& c) {
  need_fn(c);
  std::ostringstream os;
  io::write_truth_table(os, make_function(c.fn));
  Outcome o;
  o.text = os.str();
  return o;
}

// ---------------------------------------------------------------------------

inline int emit(const Config& c, const std::string& payload, std::ostream& out) {
  if (c.out.empty()) {
    out << payload;
    return 0;
  }
  std::ofstream f(c.out);
  if (!f) throw Error(Errc::invalid_argument, "cannot write '" + c.out + "'");
  f << payload;
  return 0;
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Config c;
  CLI::App app{"Resilience, l1 approximation and learning certificates for Boolean functions", kToolName};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto add_common = [&](CLI::App* s) {
    s->add_option("--out", c.out, "write the artifact to this path instead of stdout");
    s->add_option("--format", c.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_fn = [&](CLI::App* s) { s->add_option("--fn", c.fn, "function spec, e.g. tribes:w=2,s=3"); };
  auto add_d = [&](CLI::App* s) { s->add_option("--d", c.d, "degree / resilience order"); };
  auto add_seed = [&](CLI::App* s) {
    s->add_option_function<std::uint64_t>("--seed", [&](const std::uint64_t& v) { c.seed = v; }, "random seed");
  };

  struct Entry {
    const char* name;
    const char* help;
    Outcome (*fn)(const Config&);
  };
  const std::vector<Entry> entries = {
      {"spectrum", "Walsh-Hadamard spectrum", cmd_spectrum},
      {"stats", "influence, low-degree weight and noise sensitivity", cmd_stats},
      {"duality", "both LPs and the duality gap", cmd_duality},
      {"resilience", "distance to the nearest bounded d-resilient function", cmd_resilience},
      {"l1approx", "best l1 approximation by degree-d polynomials", cmd_l1approx},
      {"witness", "low-degree truncation witness", cmd_witness},
      {"cyclerun-build", "greedy 1-resilient repair of CycleRun", cmd_cyclerun_build},
      {"amplify", "composition amplification report", cmd_amplify},
      {"design", "greedy (n,k,d)-design", cmd_design},
      {"ortho-family", "embedded family over a greedy design and its Gram matrix", cmd_ortho_family},
      {"learn", "l1 regression learner", cmd_learn},
      {"ft-stats", "threshold function f_t statistics", cmd_ft_stats},
      {"table", "truth table of a function spec", cmd_table},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& e : entries) {
    CLI::App* s = app.add_subcommand(e.name, e.help);
    add_common(s);
    subs[e.name] = s;
  }
  for (const char* name : {"spectrum", "stats", "duality", "resilience", "l1approx", "witness", "amplify",
                           "ortho-family", "learn", "table"})
    add_fn(subs[name]);
  for (const char* name : {"stats", "duality", "resilience", "l1approx", "witness", "amplify", "design",
                           "ortho-family", "learn"})
    add_d(subs[name]);
  for (const char* name : {"amplify", "design", "ortho-family", "learn"}) add_seed(subs[name]);
  for (const char* name : {"cyclerun-build", "design", "ortho-family", "ft-stats"})
    subs[name]->add_option("--n", c.n, "dimension");
  subs["stats"]->add_option("--delta", c.delta, "noise rate");
  subs["duality"]->add_option("--tol", c.tol, "allowed duality gap");
  subs["witness"]->add_option("--tau", c.tau, "threshold(s); repeat or comma-separate for a sweep")->delimiter(',');
  subs["cyclerun-build"]->add_option("--c1", c.c1, "budget constant");
  subs["amplify"]->add_option("--k", c.k, "composition depth");
  subs["amplify"]->add_option("--m", c.m, "Monte Carlo samples when the arity exceeds 22");
  subs["amplify"]->add_option("--g", c.g, "resilient partner spec (default: LP witness of --fn)");
  subs["design"]->add_option("--k", c.k, "set size");
  subs["learn"]->add_option("--m", c.m, "sample count (0 = exact expectations)");
  subs["learn"]->add_option("--noise", c.noise, "label flip rate: E[y|x] = (1 - 2 noise) f(x)");
  subs["learn"]->add_option("--eps", c.eps, "epsilon in the excess-error bound");
  subs["learn"]->add_option("--class", c.cls, "comparison class (dictators)");
  subs["ft-stats"]->add_option("--t", c.t, "threshold(s)")->delimiter(',');

  auto fail = [&](Errc code, const std::string& msg) {
    json e = {{"code", std::string(to_string(code))}, {"message", msg}};
    err << msg << '\n';
    out << envelope(c, e, "error").dump(2) << '\n';
    return code == Errc::invariant_violation ? 2 : 1;
  };

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    return fail(Errc::parse_error, e.what());
  }

  for (const auto& e : entries) {
    if (!subs[e.name]->parsed()) continue;
    c.command = e.name;
    try {
      Outcome o = e.fn(c);
      if (!o.text.empty()) {
        emit(c, o.text, out);
        return 0;
      }
      if (c.format == "csv") {
        require(!o.csv.empty(), Errc::invalid_argument, std::string(e.name) + " has no CSV form");
        emit(c, o.csv, out);
      } else {
        json body = o.result;
        body["certified"] = o.certified;
        emit(c, envelope(c, body, "result").dump(2) + "\n", out);
      }
      if (!o.certified) err << e.name << ": certificate check failed\n";
      return !o.certified ? 2 : (o.precondition_failed ? 1 : 0);
    } catch (const Error& ex) {
      return fail(ex.code(), ex.what());
    } catch (const std::exception& ex) {
      return fail(Errc::invalid_argument, ex.what());
    }
  }
  return fail(Errc::invalid_argument, "no subcommand");
}

}  // namespace resil::cli
