#include "rhlab/branches.hpp"

#include <algorithm>
#include <cmath>

#include "rhlab/errors.hpp"
#include "rhlab/roots.hpp"

namespace rhlab {

namespace {

double invert_step(const CircleMap& map, const ChainStep& s, double y) {
  auto F = [&](double z) { return map.lift(z); };
  auto dF = [&](double z) { return map.deriv(z); };
  const double tol = 1e-15 * (1.0 + std::fabs(s.piece_lo));
  return invert_monotone<double>(F, dF, y + static_cast<double>(s.shift), s.piece_lo, s.piece_hi, tol);
}

double log_min_deriv(const CircleMap& map, double lo, double hi) {
  return std::log(map.min_abs_deriv(lo, hi));
}

}  // namespace

Pullback pull_back(const CircleMap& map, const BranchChain& chain, Interval target) {
  const std::size_t d = chain.depth();
  Pullback out;
  out.levels.resize(d + 1);
  out.step_min_log.resize(d);
  out.levels[d] = target;
  double sum = 0.0;
  for (std::size_t s = d; s-- > 0;) {
    const ChainStep& st = chain.steps[s];
    double z1 = invert_step(map, st, out.levels[s + 1].lo);
    double z2 = invert_step(map, st, out.levels[s + 1].hi);
    if (z2 < z1) std::swap(z1, z2);
    out.step_min_log[s] = log_min_deriv(map, z1, z2);
    sum += out.step_min_log[s];
    out.levels[s] = {z1 - st.w, z2 - st.w};
  }
  out.min_log_deriv = sum;
  return out;
}

double push_forward(const CircleMap& map, const BranchChain& chain, double x) {
  for (const ChainStep& st : chain.steps) x = map.lift(x + st.w) - static_cast<double>(st.shift);
  return x;
}

int chain_precision_bits(const CircleMap& map, std::size_t depth) {
  const double per_step = std::ceil(std::log2(std::max(2.0, map.sup_abs_deriv())));
  return static_cast<int>(80.0 + static_cast<double>(depth) * per_step);
}

PullbackMP pull_back_mp(const CircleMap& map, const BranchChain& chain, const MpInterval& target) {
  require(map.supports_mp(), "pull_back_mp: map lacks multiprecision evaluation");
  const std::size_t d = chain.depth();
  PullbackMP out;
  out.precision_bits = static_cast<int>(mp::precision());
  const mp::Real tol = mp::exp(mp::Real(-(out.precision_bits - 16) * std::log(2.0)));
  auto F = [&](const mp::Real& z) { return map.lift(z); };
  auto dF = [&](const mp::Real& z) { return map.deriv(z); };
  out.levels.resize(d + 1);
  out.levels[d] = target;
  double sum = 0.0;
  for (std::size_t s = d; s-- > 0;) {
    const ChainStep& st = chain.steps[s];
    const mp::Real shift(static_cast<double>(st.shift));
    const mp::Real a(st.piece_lo), b(st.piece_hi);
    mp::Real z1 = invert_monotone(F, dF, out.levels[s + 1].lo + shift, a, b, tol);
    mp::Real z2 = invert_monotone(F, dF, out.levels[s + 1].hi + shift, a, b, tol);
    if (z2 < z1) std::swap(z1, z2);
    sum += log_min_deriv(map, z1.to_double_down(), z2.to_double_up());
    const mp::Real w(st.w);
    out.levels[s] = {z1 - w, z2 - w};
  }
  out.min_log_deriv = sum;
  return out;
}

mp::Real push_forward_mp(const CircleMap& map, const BranchChain& chain, const mp::Real& x) {
  mp::Real y = x;
  for (const ChainStep& st : chain.steps) {
    y = map.lift(y + mp::Real(st.w)) - mp::Real(static_cast<double>(st.shift));
  }
  return y;
}

BranchTree::BranchTree(CircleMap map, NoiseStream noise, Arc source, std::size_t cap)
    : map_(std::move(map)), noise_(noise), source_(source.normalized()), cap_(cap) {
  BranchNode root;
  root.image = {source_.lo(), source_.lo() + std::min(1.0, source_.length())};
  nodes_.push_back(root);
}

std::vector<int> BranchTree::expand(int id) {
  const BranchNode parent = node(id);
  const double w = noise_[static_cast<std::uint64_t>(parent.depth)];
  const double za = parent.image.lo + w;
  const double zb = parent.image.hi + w;
  std::vector<double> pts{za};
  for (double s : translates_in(map_.singular_set(), za, zb)) pts.push_back(s);
  pts.push_back(zb);

  std::vector<int> children;
  for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
    const double a = pts[k];
    const double b = pts[k + 1];
    const double fa = map_.lift(a);
    const double fb = map_.lift(b);
    const double lo = std::min(fa, fb);
    const double hi = std::max(fa, fb);
    if (hi - lo < kBranchFloor) {
      pruned_mass_ += std::fabs(pull_point(id, b - w) - pull_point(id, a - w));
      continue;
    }
    BranchNode child;
    child.parent = id;
    child.depth = parent.depth + 1;
    const long shift = static_cast<long>(std::floor(lo));
    child.image = {lo - static_cast<double>(shift), hi - static_cast<double>(shift)};
    child.step = {w, a, b, shift, fb > fa ? 1 : -1};
    child.step_min_log = log_min_deriv(map_, a, b);
    child.cum_min_log = parent.cum_min_log + child.step_min_log;
    child.cum_max_log = parent.cum_max_log + std::log(map_.max_abs_deriv(a, b));
    nodes_.push_back(child);
    if (nodes_.size() > cap_) {
      throw BranchExplosion("branch tree exceeded " + std::to_string(cap_) + " nodes at depth " +
                            std::to_string(child.depth));
    }
    children.push_back(static_cast<int>(nodes_.size() - 1));
  }
  return children;
}

BranchChain BranchTree::chain(int id) const {
  BranchChain c;
  c.image = node(id).image;
  c.source = nodes_.front().image;
  for (int cur = id; cur > 0; cur = node(cur).parent) {
    c.steps.push_back(node(cur).step);
    c.orientation *= node(cur).step.orientation;
  }
  std::reverse(c.steps.begin(), c.steps.end());
  return c;
}

double BranchTree::pull_point(int id, double y) const {
  for (int cur = id; cur > 0; cur = node(cur).parent) {
    const ChainStep& st = node(cur).step;
    y = invert_step(map_, st, y) - st.w;
  }
  return y;
}

MonotoneBranch BranchTree::branch(int id) const {
  const BranchNode& n = node(id);
  MonotoneBranch b;
  double d1 = n.image.lo;
  double d2 = n.image.hi;
  if (id > 0) {
    d1 = pull_point(n.parent, n.step.piece_lo - n.step.w);
    d2 = pull_point(n.parent, n.step.piece_hi - n.step.w);
  }
  b.domain = Arc(std::min(d1, d2), std::max(d1, d2));
  b.image_lift = n.image;
  b.min_log_deriv = n.cum_min_log;
  b.n = n.depth;
  int orient = 1;
  for (int cur = id; cur > 0; cur = node(cur).parent) orient *= node(cur).step.orientation;
  b.orientation = orient;
  return b;
}

BranchSystem refine_branches(const CircleMap& map, const NoiseStream& noise, const Arc& I, int n_target,
                             std::size_t cap) {
  require(n_target >= 1, "refine_branches: n_target >= 1 required");
  BranchTree tree(map, noise, I, cap);
  std::vector<int> level{0};
  for (int n = 1; n <= n_target; ++n) {
    std::vector<int> next;
    for (int id : level) {
      std::vector<int> kids = tree.expand(id);
      next.insert(next.end(), kids.begin(), kids.end());
    }
    level = std::move(next);
  }
  BranchSystem sys;
  sys.source = tree.source();
  sys.n = n_target;
  sys.pruned_mass = tree.pruned_mass();
  sys.branches.reserve(level.size());
  for (int id : level) sys.branches.push_back(tree.branch(id));
  std::sort(sys.branches.begin(), sys.branches.end(),
            [](const MonotoneBranch& a, const MonotoneBranch& b) { return a.domain.lo() < b.domain.lo(); });
  return sys;
}

}  // namespace rhlab
