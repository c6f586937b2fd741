#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rhlab/branches.hpp"
#include "rhlab/circle.hpp"
#include "rhlab/circle_map.hpp"
#include "rhlab/noise.hpp"
#include "rhlab/stats.hpp"

namespace rhlab {

// Which first-step expansion requirement a full branch must meet.
//   Witness: |dg_omega| > 1 on the witness subinterval J.
//   Enforce: |dg_omega| > 1 on the whole tracked arc.
//   Off:     no first-step requirement.
enum class SourceExpansionPolicy { Witness, Enforce, Off };

std::string to_string(SourceExpansionPolicy p);
SourceExpansionPolicy source_policy_from_string(const std::string& s);

struct FullBranchOptions {
  int n_max = 200;
  SourceExpansionPolicy policy = SourceExpansionPolicy::Witness;
  std::size_t branch_cap = kDefaultBranchCap;
  // Candidate windows [t, t + 1] have t on the lattice Z / window_lattice.
  int window_lattice = 64;
};

struct FullBranchResult {
  int m = 0;
  Interval J;                 // witness, source lift coordinates
  Interval window;            // g^m(J), image coordinates of the witness chain
  double min_log_deriv = 0.0;
  double first_step_log_deriv = 0.0;
  BranchChain chain;
  double max_image_length = 0.0;
  std::size_t nodes = 0;
};

// Least m <= n_max such that some J inside I has g^m(J) covering the circle along a
// monotone branch with min log|dg^m| > log kappa. Throws TimeoutError otherwise.
FullBranchResult full_branch_time(const CircleMap& map, const NoiseStream& noise, const Arc& I, double kappa,
                                  const FullBranchOptions& options = {});

struct Cylinder {
  int k = 0;
  int i = 0;
  int j = 0;
  long p = 0;                 // integer translate of I_j hit by the branch
  Interval J;                 // inside I_i, lift coordinates
  std::string J_lo_decimal;
  std::string J_hi_decimal;
  double min_log_deriv = 0.0;
  double image_error = 0.0;   // multiprecision forward-image endpoint mismatch
  bool e1 = false;
  bool e2 = false;
  BranchChain chain;
};

struct HorseshoeOptions {
  FullBranchOptions full_branch;
  // Cylinders are built for the first `cylinder_returns` returns (-1: all).
  int cylinder_returns = -1;
};

struct HorseshoeRecord {
  Arc I0;
  Arc I1;
  // returns[0] = 0 and returns[k + 1] = returns[k] + max(m(theta^{returns[k]} omega, I_0), ...).
  std::vector<int> returns;
  std::vector<int> m0;
  std::vector<int> m1;
  std::vector<Cylinder> cylinders;   // index 4k + 2i + j
  double kappa = 0.0;
  std::uint64_t seed = 0;
  double sigma = 0.0;
  NoiseStream noise;

  int K() const { return static_cast<int>(returns.size()) - 1; }
  bool has_cylinders(int k) const { return 4 * static_cast<std::size_t>(k) + 3 < cylinders.size(); }
  const Cylinder& cylinder(int k, int i, int j) const {
    return cylinders[4 * static_cast<std::size_t>(k) + 2 * static_cast<std::size_t>(i) +
                     static_cast<std::size_t>(j)];
  }
  const Arc& arc(int i) const { return i == 0 ? I0 : I1; }
};

HorseshoeRecord horseshoe_returns(const CircleMap& map, const NoiseStream& noise, const Arc& I0, const Arc& I1,
                                  int K_count, double kappa, const HorseshoeOptions& options = {});

// Finds a depth-d branch from I_i whose image covers a translate of I_j with
// min log-derivative > log kappa and verifies it in multiprecision.
Cylinder find_cylinder(const CircleMap& map, const NoiseStream& noise, const Arc& Ii, const Arc& Ij, int depth,
                       double kappa, std::size_t branch_cap = kDefaultBranchCap);

// Multiprecision forward check of (e1)/(e2) for a cylinder.
bool verify_cylinder(const CircleMap& map, Cylinder& c, const Arc& Ij, double kappa);

struct ShadowResult {
  double x = 0.0;
  std::string x_decimal;
  std::vector<int> times;
  std::vector<double> positions;     // g^{n_k}(x) mod 1
  std::vector<double> depths;        // signed depth inside I_{s_k}
  bool verified = false;
  int first_failure = -1;
  int precision_bits = 0;
};

// Throws VerificationFailed on a missed return unless throw_on_failure is false.
ShadowResult shadow(const CircleMap& map, const HorseshoeRecord& record, const std::vector<int>& symbols,
                    bool throw_on_failure = true);

struct DensityReport {
  std::size_t seeds = 0;
  int K = 0;
  double mean_n0 = 0.0;              // cross-seed mean of the first return time
  std::vector<double> ratio;         // n_K / K per seed
  std::vector<double> relative_error;
  double fraction_within = 0.0;      // share with relative error < tolerance
  double tolerance = 0.15;
  double increment_lag1 = 0.0;
  stats::KsResult increment_ks;      // first half vs second half of increments
  double increment_mean = 0.0;
  double increment_var = 0.0;
};

DensityReport density_from_returns(const std::vector<std::vector<int>>& returns, double tolerance = 0.15);

DensityReport density_report(const CircleMap& map, double sigma, const std::vector<std::uint64_t>& seeds,
                             const Arc& I0, const Arc& I1, int K_count, double kappa, int threads = 1,
                             const FullBranchOptions& options = {});

struct SurvivalMRow {
  int l = 0;
  double p = 0.0;
  stats::ProportionInterval ci;
};

struct SurvivalMReport {
  std::vector<int> m;                // n_max + 1 marks a timeout
  std::size_t timeouts = 0;
  std::vector<SurvivalMRow> rows;
  bool nonincreasing = true;
  double mean = 0.0;
  double second_moment = 0.0;
  double second_moment_half = 0.0;   // over the first half of the seeds
  double second_moment_change = 0.0; // |full - half| / full
  double power_exponent = 0.0;       // P(m > l) ~ C l^{-p}
  double power_sse = 0.0;
  double geometric_rate = 0.0;       // P(m > l) ~ C r^l
  double geometric_sse = 0.0;
  bool geometric_dominates = false;
  bool consistent = false;           // p >= 3 or geometric dominates
  std::size_t fit_points = 0;
};

SurvivalMReport survival_m(const CircleMap& map, double sigma, const std::vector<std::uint64_t>& seeds,
                           const Arc& I, double kappa, int l_max, int threads = 1,
                           const FullBranchOptions& options = {});

SurvivalMReport survival_from_samples(std::vector<int> m, int n_max, int l_max);

struct H4Estimate {
  double eta = 0.0;
  int K = 0;
  double iota = 0.0;                 // min over tested arcs of the 95% Wilson lower bound
  std::vector<double> iota_by_K;
  std::size_t arcs = 0;
  std::size_t seeds = 0;
};

H4Estimate estimate_h4(const CircleMap& map, double sigma, double eta, double kappa, int K_max,
                       std::size_t seeds, std::size_t arcs, std::uint64_t seed, int threads = 1);

}  // namespace rhlab
