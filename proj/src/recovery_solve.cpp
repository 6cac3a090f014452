#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <stdexcept>
#include <vector>

#include "ranres/recovery_model.hpp"

namespace ranres {

namespace {

// merged per link and per cloud debits for one option
struct OptionFootprint {
  std::vector<std::pair<int, std::uint64_t>> links;
  std::vector<std::pair<int, double>> clouds;
};

OptionFootprint footprint(const CandidateOption& opt, const RuDemand& d) {
  std::map<int, std::uint64_t> lm;
  for (int li : opt.backhaul.links) lm[li] += d.bh_bps;
  for (int li : opt.midhaul.links) lm[li] += d.mh_bps;
  for (int li : opt.fronthaul.links) lm[li] += d.fh_bps;
  OptionFootprint fp;
  fp.links.assign(lm.begin(), lm.end());
  std::map<int, double> cm;
  if (opt.cu_cost > 0.0) cm[opt.cu_cloud] += opt.cu_cost;
  if (opt.du_cost > 0.0) cm[opt.du_cloud] += opt.du_cost;
  fp.clouds.assign(cm.begin(), cm.end());
  return fp;
}

bool fits(const OptionFootprint& fp, const std::vector<double>& cloud_res,
          const std::vector<std::uint64_t>& link_res) {
  for (const auto& [c, need] : fp.clouds)
    if (cloud_res[c] + 1e-9 < need) return false;
  for (const auto& [li, need] : fp.links)
    if (link_res[li] < need) return false;
  return true;
}

void debit(const OptionFootprint& fp, std::vector<double>& cloud_res,
           std::vector<std::uint64_t>& link_res) {
  for (const auto& [c, need] : fp.clouds) cloud_res[c] -= need;
  for (const auto& [li, need] : fp.links) link_res[li] -= need;
}

void credit(const OptionFootprint& fp, std::vector<double>& cloud_res,
            std::vector<std::uint64_t>& link_res) {
  for (const auto& [c, need] : fp.clouds) cloud_res[c] += need;
  for (const auto& [li, need] : fp.links) link_res[li] += need;
}

double option_compute(const CandidateOption& o) { return o.cu_cost + o.du_cost; }

std::vector<std::vector<OptionFootprint>> all_footprints(
    const RecoveryModel& model) {
  std::vector<std::vector<OptionFootprint>> fps(model.rus.size());
  for (size_t p = 0; p < model.rus.size(); ++p) {
    fps[p].reserve(model.rus[p].options.size());
    for (const auto& o : model.rus[p].options)
      fps[p].push_back(footprint(o, model.rus[p].demand));
  }
  return fps;
}

}  // namespace

RecoveryPlan solve(const RecoveryModel& model, SolveStats* stats,
                   const SolveLimits& limits) {
  const auto t_start = std::chrono::steady_clock::now();
  const auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
        .count();
  };
  const int n = static_cast<int>(model.rus.size());

  RecoveryPlan best;
  best.choice.assign(n, -1);
  best.recovered_bps = 0;

  SolveStats st;
  if (n == 0) {
    st.proven_optimal = true;
    st.wall_time_s = elapsed();
    if (stats) *stats = st;
    return best;
  }

  // static decision order: largest demand first, RU id breaking ties
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (model.rus[a].demand_bps != model.rus[b].demand_bps)
      return model.rus[a].demand_bps > model.rus[b].demand_bps;
    return model.rus[a].ru < model.rus[b].ru;
  });
  std::vector<int> pos_depth(n);
  for (int d = 0; d < n; ++d) pos_depth[order[d]] = d;

  // cheapest compute per position, for the relaxation
  std::vector<double> min_w(n, -1.0);
  for (int p = 0; p < n; ++p) {
    for (const auto& o : model.rus[p].options) {
      const double w = option_compute(o);
      if (min_w[p] < 0.0 || w < min_w[p]) min_w[p] = w;
    }
  }
  // free riders first, then best value per compute unit
  std::vector<int> density;
  for (int p = 0; p < n; ++p)
    if (!model.rus[p].options.empty()) density.push_back(p);
  std::sort(density.begin(), density.end(), [&](int a, int b) {
    const bool fa = min_w[a] <= 0.0, fb = min_w[b] <= 0.0;
    if (fa != fb) return fa;
    if (!fa) {
      const double da = static_cast<double>(model.rus[a].demand_bps) / min_w[a];
      const double db = static_cast<double>(model.rus[b].demand_bps) / min_w[b];
      if (da != db) return da > db;
    }
    return a < b;
  });

  // fractional knapsack on pooled compute over the undecided suffix; link
  // budgets are relaxed, so this never undercuts a reachable value. The small
  // slack only absorbs floating point dust; values are integers, so flooring
  // keeps ties prunable instead of inflating every bound by a phantom bit.
  const auto knap = [&](int depth, double pool_compute, std::uint64_t placed) {
    double ub = 0.0;
    double rem = pool_compute;
    for (int p : density) {
      if (pos_depth[p] < depth) continue;
      const double v = static_cast<double>(model.rus[p].demand_bps);
      const double w = min_w[p];
      if (w <= 0.0) {
        ub += v;
      } else if (rem >= w) {
        ub += v;
        rem -= w;
      } else if (rem > 0.0) {
        ub += v * (rem / w);
        rem = 0.0;
      }
    }
    return placed + static_cast<std::uint64_t>(std::floor(ub + 1e-3));
  };

  const auto fps = all_footprints(model);

  // two first fit dives in decision order seed the incumbent, so a capped or
  // timed out search still hands back a sensible plan instead of nothing.
  // The first dive takes options as ranked (lowest latency); the second
  // prefers the options that consume the least bandwidth hops, which packs
  // clustered failures tighter. The better dive wins.
  {
    std::vector<std::vector<int>> frugal(n);
    for (int p = 0; p < n; ++p) {
      const auto& opts = model.rus[p].options;
      std::vector<std::uint64_t> weight(opts.size());
      for (size_t c = 0; c < opts.size(); ++c) {
        std::uint64_t w = 0;
        for (const auto& [li, bps] : fps[p][c].links) {
          (void)li;
          w += bps;
        }
        weight[c] = w;
      }
      frugal[p].resize(opts.size());
      for (size_t c = 0; c < opts.size(); ++c) frugal[p][c] = static_cast<int>(c);
      std::sort(frugal[p].begin(), frugal[p].end(), [&](int a, int b) {
        if (weight[a] != weight[b]) return weight[a] < weight[b];
        return a < b;
      });
    }

    for (int pass = 0; pass < 2; ++pass) {
      std::vector<double> cloud_res = model.cloud_residual;
      std::vector<std::uint64_t> link_res = model.link_residual;
      RecoveryPlan dive;
      dive.choice.assign(n, -1);
      for (int d = 0; d < n; ++d) {
        const int p = order[d];
        const int n_opts = static_cast<int>(model.rus[p].options.size());
        for (int k = 0; k < n_opts; ++k) {
          const int c = (pass == 0) ? k : frugal[p][k];
          if (!fits(fps[p][c], cloud_res, link_res)) continue;
          debit(fps[p][c], cloud_res, link_res);
          dive.choice[p] = c;
          dive.recovered_bps += model.rus[p].demand_bps;
          break;
        }
      }
      if (dive.recovered_bps > best.recovered_bps ||
          (pass == 0 && dive.recovered_bps == best.recovered_bps))
        best = dive;
    }
  }

  struct Node {
    int parent;
    int pos;     // model position decided by this node
    int choice;  // option index, -1 abandon
    int depth;   // decisions made including this one
    std::uint64_t placed;
  };
  std::vector<Node> pool;
  pool.push_back({-1, -1, -1, 0, 0});

  using QEntry = std::pair<std::uint64_t, int>;  // (bound, id), both max-first
  std::priority_queue<QEntry> q;

  const auto extract_plan = [&](int parent_id, int pos, int choice,
                                std::uint64_t value) {
    best.choice.assign(n, -1);
    best.choice[pos] = choice;
    for (int id = parent_id; id > 0; id = pool[id].parent)
      best.choice[pool[id].pos] = pool[id].choice;
    best.recovered_bps = value;
  };

  double root_pool = 0.0;
  for (size_t c = 0; c < model.cloud_residual.size(); ++c)
    if (model.cloud_up[c]) root_pool += model.cloud_residual[c];
  q.push({knap(0, root_pool, 0), 0});

  std::vector<double> cloud_res;
  std::vector<std::uint64_t> link_res;
  std::vector<std::pair<int, int>> chain;

  bool capped = false;
  std::uint64_t pops = 0;
  while (!q.empty()) {
    const auto [bound, id] = q.top();
    q.pop();
    if (bound <= best.recovered_bps) {
      st.proven_optimal = true;
      break;
    }
    st.best_bound_bps = bound;
    if (limits.time_limit_s > 0.0 && ++pops % 512 == 0 &&
        elapsed() > limits.time_limit_s)
      break;
    ++st.nodes_explored;

    // rebuild residual resources along the ancestry
    cloud_res = model.cloud_residual;
    link_res = model.link_residual;
    chain.clear();
    for (int nid = id; nid > 0; nid = pool[nid].parent)
      chain.push_back({pool[nid].pos, pool[nid].choice});
    double pool_compute = root_pool;
    for (const auto& [cp, cc] : chain) {
      if (cc < 0) continue;
      debit(fps[cp][cc], cloud_res, link_res);
      pool_compute -= option_compute(model.rus[cp].options[cc]);
    }

    const int depth = pool[id].depth;
    const int p = order[depth];
    const std::uint64_t placed = pool[id].placed;
    const auto& opts = model.rus[p].options;
    const int n_opts = static_cast<int>(opts.size());

    if (depth + 1 == n) {
      // leaf level: lowest feasible option index takes the incumbent on ties
      for (int c = 0; c < n_opts; ++c) {
        if (!fits(fps[p][c], cloud_res, link_res)) continue;
        const std::uint64_t v = placed + model.rus[p].demand_bps;
        if (v > best.recovered_bps) extract_plan(id, p, c, v);
        break;  // every option carries the same value here
      }
      if (placed > best.recovered_bps) extract_plan(id, p, -1, placed);
      continue;
    }

    // push abandon first and options high to low: on equal bounds the queue
    // prefers the larger node id, so option 0 is explored first
    for (int c = -1; c < n_opts && !capped; ++c) {
      const int choice = (c == -1) ? -1 : n_opts - 1 - c;
      std::uint64_t placed2 = placed;
      double pool2 = pool_compute;
      if (choice >= 0) {
        if (!fits(fps[p][choice], cloud_res, link_res)) continue;
        placed2 += model.rus[p].demand_bps;
        pool2 -= option_compute(opts[choice]);
      }
      const std::uint64_t b2 = knap(depth + 1, pool2, placed2);
      if (b2 <= best.recovered_bps) continue;
      if (pool.size() >= limits.node_cap) {
        capped = true;
        break;
      }
      pool.push_back({id, p, choice, depth + 1, placed2});
      q.push({b2, static_cast<int>(pool.size()) - 1});
    }
    if (capped) break;
  }
  if (q.empty() && !capped) st.proven_optimal = true;
  if (st.proven_optimal) st.best_bound_bps = best.recovered_bps;

  st.wall_time_s = elapsed();
  if (stats) *stats = st;
  return best;
}

RecoveryPlan brute_force_oracle(const RecoveryModel& model,
                                std::uint64_t max_states) {
  const int n = static_cast<int>(model.rus.size());

  double states = 1.0;
  for (const auto& rc : model.rus) states *= 1.0 + rc.options.size();
  if (states > static_cast<double>(max_states))
    throw std::invalid_argument("search space too large for exhaustive check");

  const auto fps = all_footprints(model);

  RecoveryPlan best;
  best.choice.assign(n, -1);
  best.recovered_bps = 0;
  bool found = false;

  std::vector<int> cur(n, -1);
  std::vector<double> cloud_res = model.cloud_residual;
  std::vector<std::uint64_t> link_res = model.link_residual;

  // plain depth first walk of the whole cartesian space; options ascending
  // with abandon last, so the first optimum seen is the lexicographically
  // smallest one under that ranking
  const std::function<void(int, std::uint64_t)> rec = [&](int p,
                                                          std::uint64_t val) {
    if (p == n) {
      if (!found || val > best.recovered_bps) {
        best.recovered_bps = val;
        best.choice = cur;
        found = true;
      }
      return;
    }
    const auto& opts = model.rus[p].options;
    for (int i = 0; i < static_cast<int>(opts.size()); ++i) {
      if (!fits(fps[p][i], cloud_res, link_res)) continue;
      debit(fps[p][i], cloud_res, link_res);
      cur[p] = i;
      rec(p + 1, val + model.rus[p].demand_bps);
      credit(fps[p][i], cloud_res, link_res);
    }
    cur[p] = -1;
    rec(p + 1, val);
  };
  rec(0, 0);
  return best;
}

}  // namespace ranres
