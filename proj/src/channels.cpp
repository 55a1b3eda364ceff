#include "ldp/channels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

namespace ldp {

namespace {

constexpr double kWeightTol = 1e-12;
constexpr double kAuditSlack = 1e-9;

// Merge two finite supports by exact atom equality and visit the paired
// weights (weight 0 where an atom is missing on one side).
template <typename Fn>
void for_each_merged(const DiscreteDist& p, const DiscreteDist& q, Fn fn) {
  std::map<Point, std::pair<double, double>> merged;
  for (std::size_t i = 0; i < p.size(); ++i) {
    merged[p.atom(i)].first += p.weight(i);
  }
  for (std::size_t i = 0; i < q.size(); ++i) {
    merged[q.atom(i)].second += q.weight(i);
  }
  for (const auto& [atom, w] : merged) {
    fn(w.first, w.second);
  }
}

}  // namespace

PrivacyLevel::PrivacyLevel(double alpha_value) : alpha(alpha_value) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::invalid_argument("privacy level alpha must be positive and finite");
  }
  exp_alpha = std::exp(alpha);
  contrast = (exp_alpha - 1.0) / (exp_alpha + 1.0);
  amplification = (exp_alpha + 1.0) / (exp_alpha - 1.0);
}

Domain Domain::real_line() { return real_space(1); }

Domain Domain::real_space(std::size_t dim) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  Domain d;
  d.axes.assign(dim, Interval{-inf, inf});
  return d;
}

bool Domain::contains(std::span<const double> x) const {
  if (x.size() != axes.size()) return false;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (!axes[i].contains(x[i])) return false;
  }
  return true;
}

Representer::Representer(Eval eval, double sup_norm, Domain domain)
    : eval_(std::move(eval)), sup_norm_(sup_norm), domain_(std::move(domain)) {
  if (!eval_) {
    throw std::invalid_argument("representer needs an evaluator");
  }
  if (!(sup_norm_ > 0.0) || !std::isfinite(sup_norm_)) {
    throw std::invalid_argument("representer sup-norm must be positive and finite");
  }
}

DiscreteDist::DiscreteDist(std::vector<Point> atoms, std::vector<double> weights)
    : atoms_(std::move(atoms)), weights_(std::move(weights)) {
  if (atoms_.size() != weights_.size()) {
    throw std::invalid_argument("atom/weight count mismatch");
  }
  if (atoms_.empty()) {
    throw std::invalid_argument("distribution needs at least one atom");
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw std::invalid_argument("negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > kWeightTol) {
    throw std::invalid_argument("weights must sum to 1");
  }
  auto sorted = atoms_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw std::invalid_argument("atoms must be pairwise distinct");
  }
}

DiscreteDist DiscreteDist::from_scalars(std::vector<double> atoms,
                                        std::vector<double> weights) {
  std::vector<Point> points;
  points.reserve(atoms.size());
  for (double a : atoms) points.push_back({a});
  return DiscreteDist(std::move(points), std::move(weights));
}

DiscreteDist DiscreteDist::point_mass(Point atom) {
  return DiscreteDist({std::move(atom)}, {1.0});
}

DiscreteDist DiscreteDist::point_mass(double atom) {
  return point_mass(Point{atom});
}

double DiscreteDist::expectation(const Representer& ell) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    acc += weights_[i] * ell(std::span<const double>(atoms_[i]));
  }
  return acc;
}

DiscreteDist DiscreteDist::mix(const DiscreteDist& other, double lambda) const {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::invalid_argument("mixture weight must lie in [0, 1]");
  }
  std::map<Point, double> merged;
  for (std::size_t i = 0; i < size(); ++i) {
    merged[atoms_[i]] += lambda * weights_[i];
  }
  for (std::size_t i = 0; i < other.size(); ++i) {
    merged[other.atoms_[i]] += (1.0 - lambda) * other.weights_[i];
  }
  std::vector<Point> atoms;
  std::vector<double> weights;
  atoms.reserve(merged.size());
  weights.reserve(merged.size());
  for (auto& [atom, w] : merged) {
    atoms.push_back(atom);
    weights.push_back(w);
  }
  return DiscreteDist(std::move(atoms), std::move(weights));
}

DiscreteChannel::DiscreteChannel(std::vector<Point> inputs,
                                 std::vector<Point> outputs,
                                 std::vector<std::vector<double>> matrix)
    : inputs_(std::move(inputs)),
      outputs_(std::move(outputs)),
      matrix_(std::move(matrix)) {
  if (inputs_.empty() || outputs_.empty()) {
    throw std::invalid_argument("channel alphabets must be non-empty");
  }
  if (matrix_.size() != inputs_.size()) {
    throw std::invalid_argument("one matrix row per input symbol required");
  }
  for (const auto& row : matrix_) {
    if (row.size() != outputs_.size()) {
      throw std::invalid_argument("matrix row length must match output alphabet");
    }
    double total = 0.0;
    for (double v : row) {
      if (!(v >= 0.0)) throw std::invalid_argument("negative transition probability");
      total += v;
    }
    if (std::abs(total - 1.0) > kWeightTol) {
      throw std::invalid_argument("channel rows must sum to 1");
    }
  }
}

BinaryChannel::BinaryChannel(Representer ell, PrivacyLevel level)
    : ell_(std::move(ell)), level_(level) {
  z0_ = ell_.sup_norm() * level_.amplification;
  if (!std::isfinite(z0_)) {
    throw std::invalid_argument("binary channel support value is not finite");
  }
}

BinaryChannel make_binary_channel(Representer ell, PrivacyLevel level) {
  return BinaryChannel(std::move(ell), level);
}

double BinaryChannel::success_probability(std::span<const double> x) const {
  const double value = ell_(x);
  if (std::abs(value) > ell_.sup_norm() * (1.0 + 1e-12)) {
    throw std::domain_error("representer value exceeds its certified sup-norm");
  }
  return 0.5 * (1.0 + value / z0_);
}

double BinaryChannel::privatize(std::span<const double> x,
                                RandomStream& rng) const {
  const double p = success_probability(x);
  return rng.next_bernoulli(p) ? z0_ : -z0_;
}

DiscreteDist BinaryChannel::pushforward(const DiscreteDist& p) const {
  double mean = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    std::span<const double> atom(p.atom(i));
    if (!ell_.domain().contains(atom)) {
      throw std::domain_error("distribution atom outside the channel domain");
    }
    mean += p.weight(i) * ell_(atom);
  }
  const double success = 0.5 * (1.0 + mean / z0_);
  return DiscreteDist::from_scalars({-z0_, z0_}, {1.0 - success, success});
}

DiscreteChannel BinaryChannel::restrict_to_values(
    std::span<const double> ell_values) const {
  std::vector<Point> inputs;
  std::vector<std::vector<double>> rows;
  inputs.reserve(ell_values.size());
  rows.reserve(ell_values.size());
  for (double v : ell_values) {
    if (std::abs(v) > ell_.sup_norm() * (1.0 + 1e-12)) {
      throw std::domain_error("ell-value exceeds the certified sup-norm");
    }
    const double success = 0.5 * (1.0 + v / z0_);
    inputs.push_back({v});
    rows.push_back({1.0 - success, success});
  }
  return DiscreteChannel(std::move(inputs), {{-z0_}, {z0_}}, std::move(rows));
}

double audit_privacy(const DiscreteChannel& channel) {
  double worst = 0.0;
  for (std::size_t z = 0; z < channel.n_outputs(); ++z) {
    for (std::size_t x = 0; x < channel.n_inputs(); ++x) {
      for (std::size_t y = 0; y < channel.n_inputs(); ++y) {
        const double num = channel.prob(x, z);
        const double den = channel.prob(y, z);
        double ratio;
        if (num == 0.0 && den == 0.0) {
          ratio = 1.0;  // 0/0 counts as ratio 1
        } else if (den == 0.0) {
          return std::numeric_limits<double>::infinity();
        } else {
          ratio = num / den;
        }
        worst = std::max(worst, std::log(ratio));
      }
    }
  }
  return worst;
}

bool audit_passes(const DiscreteChannel& channel, const PrivacyLevel& level) {
  return audit_privacy(channel) <= level.alpha + kAuditSlack;
}

DiscreteDist pushforward(const DiscreteChannel& channel, const DiscreteDist& p) {
  std::vector<double> out(channel.n_outputs(), 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto& atom = p.atom(i);
    auto it = std::find(channel.inputs().begin(), channel.inputs().end(), atom);
    if (it == channel.inputs().end()) {
      throw std::domain_error("distribution atom outside the channel input alphabet");
    }
    const std::size_t row = static_cast<std::size_t>(it - channel.inputs().begin());
    for (std::size_t z = 0; z < channel.n_outputs(); ++z) {
      out[z] += p.weight(i) * channel.prob(row, z);
    }
  }
  return DiscreteDist(channel.outputs(), std::move(out));
}

double tv_distance(const DiscreteDist& p, const DiscreteDist& q) {
  double acc = 0.0;
  for_each_merged(p, q, [&](double wp, double wq) { acc += std::abs(wp - wq); });
  return 0.5 * acc;
}

double hellinger_distance(const DiscreteDist& p, const DiscreteDist& q) {
  double acc = 0.0;
  for_each_merged(p, q, [&](double wp, double wq) {
    const double d = std::sqrt(wp) - std::sqrt(wq);
    acc += d * d;
  });
  return std::sqrt(acc);
}

double hellinger_affinity(const DiscreteDist& p, const DiscreteDist& q) {
  double acc = 0.0;
  for_each_merged(p, q, [&](double wp, double wq) { acc += std::sqrt(wp * wq); });
  return acc;
}

}  // namespace ldp
