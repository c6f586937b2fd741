#include "rhlab/io.hpp"

#include <cmath>
#include <cstdio>

#include "rhlab/errors.hpp"

namespace rhlab::io {

using nlohmann::json;

namespace {

// JSON has no nan/inf; such values become null.
json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : out_(path, std::ios::binary) {
  if (!out_) throw PreconditionError("cannot open " + path.string() + " for writing");
  for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
  out_ << '\n';
}

CsvWriter& CsvWriter::cell(double x) { return cell(format_double(x)); }
CsvWriter& CsvWriter::cell(long long x) { return cell(std::to_string(x)); }
CsvWriter& CsvWriter::cell(unsigned long long x) { return cell(std::to_string(x)); }

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (!first_) out_ << ',';
  out_ << s;
  first_ = false;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw PreconditionError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw PreconditionError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw PreconditionError("invalid JSON in " + path.string() + ": " + e.what());
  }
}

json to_json(const Arc& a) { return json::array({a.lo(), a.hi()}); }
json to_json(const Interval& i) { return json::array({num(i.lo), num(i.hi)}); }

json to_json(const PredominanceReport& r) {
  json comps = json::array();
  for (const Arc& a : r.components) comps.push_back(to_json(a));
  return {
      {"R", r.R},
      {"sigma", r.sigma},
      {"components", comps},
      {"D_R", r.D_R},
      {"V", r.V},
      {"check_items", {r.check_items[0], r.check_items[1], r.check_items[2]}},
      {"item1_min_component", num(r.item1_min_component)},
      {"nondegenerate", r.nondegenerate},
      {"item2_margin", num(r.item2_margin)},
      {"item3_margin", num(r.item3_margin)},
      {"h_window", to_json(r.h_window)},
      {"h_window_empty", r.h_window_empty},
      {"h", num(r.h)},
      {"Z_h", num(r.Z_h)},
      {"alpha", num(r.alpha)},
      {"Zbar_h", num(r.Zbar_h)},
      {"delta_arc", r.delta_arc ? to_json(*r.delta_arc) : json(nullptr)},
      {"q_access", num(r.q_access)},
      {"pass", r.pass},
      {"notes", r.notes},
  };
}

json to_json(const SineCertification& s) {
  return {{"L", s.L},
          {"sigma", s.sigma},
          {"R", s.R},
          {"c1", s.c1},
          {"threshold", s.threshold},
          {"closed_form_pass", s.closed_form_pass},
          {"quadrature_pass", s.quadrature_pass},
          {"agree", s.agree},
          {"within_band", s.within_band},
          {"note", s.note},
          {"report", to_json(s.report)}};
}

json to_json(const FrequencyBound& fb) {
  return {{"lambda", fb.lambda},   {"A", fb.A},
          {"b", fb.b},             {"delta", fb.delta},
          {"H_delta", fb.H_delta}, {"gamma1", fb.gamma1},
          {"gamma2_printed", fb.gamma2_printed},
          {"gamma2_consistent", fb.gamma2_consistent},
          {"gamma2", fb.gamma2},   {"gamma", fb.gamma},
          {"kappa1", fb.kappa1},   {"smallness_holds", fb.smallness_holds}};
}

json to_json(const FrequencyReport& r) {
  return {{"hypotheses_met", r.hypotheses_met},
          {"violation", r.violation},
          {"N", r.N},
          {"count", r.count},
          {"required", r.required},
          {"S_N", num(r.S_N)},
          {"Z_N", num(r.Z_N)},
          {"outcome", r.outcome}};
}

json to_json(const SurvivalCurve& c) {
  json rows = json::array();
  for (const auto& r : c.rows) {
    rows.push_back({{"n", r.n}, {"count", r.count}, {"trials", r.trials}, {"p_hat", r.p_hat},
                    {"ci_lo", r.ci_lo}, {"ci_hi", r.ci_hi}});
  }
  const bool s_below = c.event.kind == TailEvent::Kind::SBelow;
  return {{"event", s_below ? "S_below" : "Z_above"},
          {"lambda", c.event.lambda},
          {"delta", c.event.delta},
          {"H", c.event.H},
          {"rows", rows},
          {"poisoned", c.poisoned},
          {"nonincreasing", c.nonincreasing},
          {"fit",
           {{"estimable", c.fit.estimable},
            {"slope", num(c.fit.slope)},
            {"slope_se", num(c.fit.slope_se)},
            {"intercept", num(c.fit.intercept)},
            {"negative_95", c.fit.negative_95}}}};
}

json to_json(const LyapunovEstimate& e) {
  return {{"trials", e.per_trial.size()},
          {"mean", num(e.summary.mean)},
          {"se", num(e.summary.se)},
          {"sd", num(e.summary.sd)},
          {"used", e.summary.n},
          {"poisoned", e.poisoned}};
}

json to_json(const BallCheckReport& r) {
  return {{"J", to_json(r.J)},
          {"J_lo_decimal", r.J_lo_decimal},
          {"J_hi_decimal", r.J_hi_decimal},
          {"J_length", r.J_length},
          {"J_length_bound", r.J_length_bound},
          {"length_ok", r.length_ok},
          {"min_log_deriv", num(r.min_log_deriv)},
          {"log_deriv_bound", r.log_deriv_bound},
          {"derivative_ok", r.derivative_ok},
          {"image_error", r.image_error},
          {"image_ok", r.image_ok},
          {"containment_margin", num(r.containment_margin)},
          {"containment_ok", r.containment_ok},
          {"precision_bits", r.precision_bits},
          {"pass", r.pass()}};
}

json to_json(const ShadowResult& s) {
  json pos = json::array(), depth = json::array();
  for (double p : s.positions) pos.push_back(p);
  for (double d : s.depths) depth.push_back(d);
  return {{"x", s.x},
          {"x_decimal", s.x_decimal},
          {"times", s.times},
          {"positions", pos},
          {"depths", depth},
          {"verified", s.verified},
          {"first_failure", s.first_failure},
          {"precision_bits", s.precision_bits}};
}

json to_json(const DensityReport& d) {
  return {{"seeds", d.seeds},
          {"K", d.K},
          {"mean_n0", d.mean_n0},
          {"fraction_within", d.fraction_within},
          {"tolerance", d.tolerance},
          {"increment_lag1", d.increment_lag1},
          {"increment_ks", {{"statistic", d.increment_ks.statistic}, {"p_value", d.increment_ks.p_value}}},
          {"increment_mean", d.increment_mean},
          {"increment_var", d.increment_var}};
}

json to_json(const SurvivalMReport& s) {
  json rows = json::array();
  for (const auto& r : s.rows) {
    rows.push_back({{"l", r.l}, {"p", r.p}, {"ci_lo", r.ci.lo}, {"ci_hi", r.ci.hi}});
  }
  return {{"samples", s.m.size()},
          {"timeouts", s.timeouts},
          {"rows", rows},
          {"nonincreasing", s.nonincreasing},
          {"mean", s.mean},
          {"second_moment", s.second_moment},
          {"second_moment_half", s.second_moment_half},
          {"second_moment_change", s.second_moment_change},
          {"power_exponent", num(s.power_exponent)},
          {"power_sse", num(s.power_sse)},
          {"geometric_rate", num(s.geometric_rate)},
          {"geometric_sse", num(s.geometric_sse)},
          {"geometric_dominates", s.geometric_dominates},
          {"consistent", s.consistent},
          {"fit_points", s.fit_points}};
}

json to_json(const H4Estimate& h) {
  return {{"eta", h.eta}, {"K", h.K}, {"iota", h.iota}, {"iota_by_K", h.iota_by_K},
          {"arcs", h.arcs}, {"seeds", h.seeds}};
}

}  // namespace rhlab::io
