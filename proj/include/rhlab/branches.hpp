#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "rhlab/circle.hpp"
#include "rhlab/circle_map.hpp"
#include "rhlab/mp_real.hpp"
#include "rhlab/noise.hpp"

namespace rhlab {

constexpr double kGeoTolerance = 1e-9;
constexpr double kBranchFloor = 1e-13;
constexpr std::size_t kDefaultBranchCap = 1000000;

// One step x -> F(x + w) - shift of a composition restricted to a monotone piece.
// piece_lo/piece_hi bound z = x + w in lift coordinates.
struct ChainStep {
  double w = 0.0;
  double piece_lo = 0.0;
  double piece_hi = 0.0;
  long shift = 0;
  int orientation = 1;
};

// g^d restricted to one monotone branch. `source` is in the lift coordinates of
// the tracked arc, `image` in the coordinates reached after the last shift.
struct BranchChain {
  Interval source;
  std::vector<ChainStep> steps;
  Interval image;
  int orientation = 1;
  std::size_t depth() const { return steps.size(); }
};

struct Pullback {
  // levels[0] in source coordinates, levels[d] is the target.
  std::vector<Interval> levels;
  std::vector<double> step_min_log;
  double min_log_deriv = 0.0;
};

Pullback pull_back(const CircleMap& map, const BranchChain& chain, Interval target);
// Forward image of a source point through the chain.
double push_forward(const CircleMap& map, const BranchChain& chain, double x);

struct MpInterval {
  mp::Real lo;
  mp::Real hi;
};

struct PullbackMP {
  std::vector<MpInterval> levels;
  double min_log_deriv = 0.0;
  int precision_bits = 0;
};

// Working precision for a chain of the given depth.
int chain_precision_bits(const CircleMap& map, std::size_t depth);
// Multiprecision pullback; the caller installs the precision (PrecisionScope).
PullbackMP pull_back_mp(const CircleMap& map, const BranchChain& chain, const MpInterval& target);
mp::Real push_forward_mp(const CircleMap& map, const BranchChain& chain, const mp::Real& x);

struct MonotoneBranch {
  Arc domain;
  Interval image_lift;   // endpoints of g^n(domain) up to an integer translate
  double min_log_deriv = 0.0;
  int n = 0;
  int orientation = 1;
};

struct BranchSystem {
  Arc source;
  int n = 0;
  std::vector<MonotoneBranch> branches;
  double pruned_mass = 0.0;
};

struct BranchNode {
  int parent = -1;
  int depth = 0;
  Interval image;
  ChainStep step;
  double step_min_log = 0.0;
  double cum_min_log = 0.0;
  // Upper bound for any sub-branch: running sum of per-step max log|F'|.
  double cum_max_log = 0.0;
};

// Lazily expanded tree of monotone branches of g^n_omega on an arc.
class BranchTree {
 public:
  BranchTree(CircleMap map, NoiseStream noise, Arc source, std::size_t cap = kDefaultBranchCap);

  const CircleMap& map() const { return map_; }
  const NoiseStream& noise() const { return noise_; }
  const Arc& source() const { return source_; }
  std::size_t size() const { return nodes_.size(); }
  const BranchNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  double pruned_mass() const { return pruned_mass_; }

  // Splits the next iterate of node's image at the singular translates and
  // appends the resulting children; returns their ids.
  std::vector<int> expand(int id);
  BranchChain chain(int id) const;
  // Source coordinate of the point with image coordinate y at node id.
  double pull_point(int id, double y) const;
  MonotoneBranch branch(int id) const;

 private:
  CircleMap map_;
  NoiseStream noise_;
  Arc source_;
  std::size_t cap_;
  std::vector<BranchNode> nodes_;
  double pruned_mass_ = 0.0;
};

BranchSystem refine_branches(const CircleMap& map, const NoiseStream& noise, const Arc& I, int n_target,
                             std::size_t cap = kDefaultBranchCap);

}  // namespace rhlab
