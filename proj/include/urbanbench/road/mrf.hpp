#pragma once

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

#include "urbanbench/road/network.hpp"

namespace urbanbench::road {

struct MrfParams {
  int K = 5;
  double w_dist = 1.0;         // per meter
  double w_angle = 2.0;        // per radian
  double lambda_potts = 100.0;
  double no_match_cost = 10.0;

  void validate() const {
    require(K >= 1, "K must be at least 1", ErrorCode::kConfig);
    require(w_dist >= 0 && w_angle >= 0 && lambda_potts >= 0 && no_match_cost >= 0,
            "MRF weights must be non-negative", ErrorCode::kConfig);
  }
};

// Per curb segment, network indices of its candidate centerline segments,
// nearest first. State 0 is the implicit no-match state; state k refers to
// candidates[i][k - 1].
using Candidates = std::vector<std::vector<int>>;

struct Assignment {
  std::vector<int> states;
  std::vector<int> targets;  // network index per segment, -1 for no match
  double energy = 0.0;
};

// K nearest centerline segments by distance from the curb midpoint; ties go
// to the lower network index.
inline Candidates candidate_states(const CurbChain& chain, const CenterlineNetwork& net, int K) {
  require(K >= 1, "K must be at least 1");
  Candidates out(chain.size());
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(K), net.size());
  std::vector<std::pair<double, int>> d(net.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    const Point2 m = chain.segments[i].midpoint();
    for (std::size_t j = 0; j < net.size(); ++j)
      d[j] = {geom::point_segment_distance(m, net[j].seg), static_cast<int>(j)};
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(keep), d.end());
    for (std::size_t k = 0; k < keep; ++k) out[i].push_back(d[k].second);
  }
  return out;
}

inline double unary_cost(const Segment& curb, const Segment& centerline, const MrfParams& p) {
  return p.w_dist * geom::point_segment_distance(curb.midpoint(), centerline) +
         p.w_angle * geom::line_angle(curb, centerline);
}

namespace detail {

struct ChainModel {
  std::vector<std::vector<double>> unary;  // [segment][state]
  const Candidates* cand = nullptr;
  const CenterlineNetwork* net = nullptr;
  double lambda = 0.0;

  std::size_t states(std::size_t i) const { return unary[i].size(); }

  double pair(std::size_t i, int s, std::size_t j, int t) const {
    if (s == t && s == 0) return 0.0;
    if (s == 0 || t == 0) return lambda;
    const int a = (*cand)[i][static_cast<std::size_t>(s - 1)];
    const int b = (*cand)[j][static_cast<std::size_t>(t - 1)];
    return net->adjacent(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) ? 0.0 : lambda;
  }
};

inline ChainModel make_model(const CurbChain& chain, const Candidates& cand, const CenterlineNetwork& net,
                             const MrfParams& p) {
  require(cand.size() == chain.size(), "candidate list does not match chain length");
  ChainModel m;
  m.cand = &cand;
  m.net = &net;
  m.lambda = p.lambda_potts;
  m.unary.resize(chain.size());
  for (std::size_t i = 0; i < chain.size(); ++i) {
    m.unary[i].push_back(p.no_match_cost);
    for (int c : cand[i]) {
      require(c >= 0 && static_cast<std::size_t>(c) < net.size(), "candidate index out of range");
      m.unary[i].push_back(unary_cost(chain.segments[i], net[static_cast<std::size_t>(c)].seg, p));
    }
  }
  return m;
}

// Exact minimisation over a path, optionally with the first state fixed and a
// closing factor back to it. Among optimal labelings the lexicographically
// smallest one is returned: cost-to-go is computed backwards, then states are
// chosen forwards taking the first minimum.
inline std::vector<int> solve_path(const ChainModel& m, int fixed_first, bool wrap, double& best) {
  const std::size_t n = m.unary.size();
  std::vector<std::vector<double>> togo(n);
  for (std::size_t ii = n; ii-- > 0;) {
    togo[ii].assign(m.states(ii), 0.0);
    for (std::size_t s = 0; s < m.states(ii); ++s) {
      double tail = 0.0;
      if (ii + 1 < n) {
        tail = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < m.states(ii + 1); ++t)
          tail = std::min(tail, m.pair(ii, static_cast<int>(s), ii + 1, static_cast<int>(t)) + togo[ii + 1][t]);
      } else if (wrap) {
        tail = m.pair(ii, static_cast<int>(s), 0, fixed_first);
      }
      togo[ii][s] = m.unary[ii][s] + tail;
    }
  }
  std::vector<int> y(n);
  auto pick = [&](std::size_t i, int prev) {
    int arg = 0;
    double v = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < m.states(i); ++s) {
      const double c = (prev < 0 ? 0.0 : m.pair(i - 1, prev, i, static_cast<int>(s))) + togo[i][s];
      if (c < v) {
        v = c;
        arg = static_cast<int>(s);
      }
    }
    return std::pair{arg, v};
  };
  if (fixed_first >= 0) {
    y[0] = fixed_first;
    best = togo[0][static_cast<std::size_t>(fixed_first)];
  } else {
    auto [s, v] = pick(0, -1);
    y[0] = s;
    best = v;
  }
  for (std::size_t i = 1; i < n; ++i) y[i] = pick(i, y[i - 1]).first;
  return y;
}

}  // namespace detail

// Energy of an arbitrary labeling under the same model infer_assignment uses.
inline double chain_energy(const CurbChain& chain, const Candidates& cand, const CenterlineNetwork& net,
                           const MrfParams& p, const std::vector<int>& y) {
  const auto m = detail::make_model(chain, cand, net, p);
  require(y.size() == chain.size(), "labeling length does not match chain");
  double e = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    require(y[i] >= 0 && static_cast<std::size_t>(y[i]) < m.states(i), "state out of range");
    e += m.unary[i][static_cast<std::size_t>(y[i])];
    if (i + 1 < y.size()) e += m.pair(i, y[i], i + 1, y[i + 1]);
  }
  if (chain.closed && y.size() > 1) e += m.pair(y.size() - 1, y.back(), 0, y.front());
  return e;
}

inline Assignment infer_assignment(const CurbChain& chain, const Candidates& cand, const CenterlineNetwork& net,
                                   const MrfParams& p) {
  p.validate();
  Assignment out;
  if (chain.size() == 0) return out;
  const auto m = detail::make_model(chain, cand, net, p);
  if (!chain.closed || chain.size() == 1) {
    double best = 0.0;
    out.states = detail::solve_path(m, -1, false, best);
  } else {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t s0 = 0; s0 < m.states(0); ++s0) {
      double e = 0.0;
      auto y = detail::solve_path(m, static_cast<int>(s0), true, e);
      if (e < best) {
        best = e;
        out.states = std::move(y);
      }
    }
  }
  out.energy = chain_energy(chain, cand, net, p, out.states);
  for (std::size_t i = 0; i < out.states.size(); ++i)
    out.targets.push_back(out.states[i] == 0 ? -1 : cand[i][static_cast<std::size_t>(out.states[i] - 1)]);
  return out;
}

// Transitions that pay the Potts penalty (including the wrap of a closed chain).
inline int count_violations(const CurbChain& chain, const Candidates& cand, const CenterlineNetwork& net,
                            const std::vector<int>& y) {
  MrfParams unit;
  unit.lambda_potts = 1.0;
  const auto m = detail::make_model(chain, cand, net, unit);
  int v = 0;
  for (std::size_t i = 0; i + 1 < y.size(); ++i) v += m.pair(i, y[i], i + 1, y[i + 1]) > 0 ? 1 : 0;
  if (chain.closed && y.size() > 1) v += m.pair(y.size() - 1, y.back(), 0, y.front()) > 0 ? 1 : 0;
  return v;
}

}  // namespace urbanbench::road
