#include "ranres/topology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"

namespace ranres {

using nlohmann::json;

const char* to_string(NodeKind k) {
  switch (k) {
    case NodeKind::RuSite: return "ru_site";
    case NodeKind::Cloud: return "cloud";
    case NodeKind::Core: return "core";
  }
  return "?";
}

std::string to_string(const NodeId& n) {
  return std::string(to_string(n.kind)) + ":" + std::to_string(n.index);
}

int Topology::n_sites() const {
  int n = 0;
  for (const auto& nd : nodes)
    if (nd.kind == NodeKind::RuSite) ++n;
  return n;
}

bool Topology::has_node(const NodeId& n) const {
  return std::find(nodes.begin(), nodes.end(), n) != nodes.end();
}

void Topology::build_adjacency() const {
  adj_.clear();
  for (const auto& nd : nodes) adj_[nd] = {};
  for (int i = 0; i < static_cast<int>(links.size()); ++i)
    adj_[links[i].from].push_back(i);
  // stable order: by destination node, then link index
  for (auto& [node, out] : adj_) {
    std::sort(out.begin(), out.end(), [&](int a, int b) {
      if (links[a].to != links[b].to) return links[a].to < links[b].to;
      return a < b;
    });
  }
}

const std::vector<int>& Topology::out_links(const NodeId& n) const {
  if (adj_.empty()) build_adjacency();
  auto it = adj_.find(n);
  static const std::vector<int> kEmpty;
  return it == adj_.end() ? kEmpty : it->second;
}

const std::vector<Path>& Topology::paths_between(const NodeId& from,
                                                 const NodeId& to) const {
  auto it = path_catalog.find({from, to});
  if (it != path_catalog.end()) return it->second;
  static const std::vector<Path> kNone;
  return kNone;
}

int Topology::hop_distance(const NodeId& from, const NodeId& to) const {
  if (from == to) return 0;
  std::map<NodeId, int> dist;
  std::deque<NodeId> q{from};
  dist[from] = 0;
  while (!q.empty()) {
    NodeId u = q.front();
    q.pop_front();
    for (int li : out_links(u)) {
      const NodeId& v = links[li].to;
      if (dist.count(v)) continue;
      dist[v] = dist[u] + 1;
      if (v == to) return dist[v];
      q.push_back(v);
    }
  }
  return -1;
}

Topology build_ring_topology(int n_sites, const TopologyParams& params) {
  if (n_sites < 2)
    throw std::invalid_argument("ring needs at least 2 sites, got " +
                                std::to_string(n_sites));
  if (params.core_site < 0 || params.core_site >= n_sites)
    throw std::invalid_argument("core_site out of range");
  Topology t;
  t.paths_k = params.paths_k;
  for (int i = 0; i < n_sites; ++i) t.nodes.push_back(ru_node(i));
  for (int i = 0; i < n_sites; ++i) t.nodes.push_back(cloud_node(i));
  t.nodes.push_back(core_node());

  auto add = [&t](NodeId a, NodeId b, std::uint64_t cap, double lat) {
    t.links.push_back({a, b, cap, lat});
    t.links.push_back({b, a, cap, lat});
  };
  for (int i = 0; i < n_sites; ++i)
    add(ru_node(i), ru_node((i + 1) % n_sites), params.link_capacity_bps,
        params.link_latency_s);
  for (int i = 0; i < n_sites; ++i)
    add(cloud_node(i), ru_node(i), params.link_capacity_bps,
        params.site_link_latency_s);
  add(core_node(), ru_node(params.core_site), params.core_link_capacity_bps,
      params.link_latency_s);

  validate_topology(t);
  enumerate_paths(t, params.paths_k);
  return t;
}

namespace {

// node + link sequences of one route during search
struct Walk {
  std::vector<NodeId> nodes;
  std::vector<int> links;
  double latency = 0.0;
};

// catalog ordering: latency, then hops, then node sequence, then link sequence
bool walk_less(const Walk& a, const Walk& b) {
  if (a.latency != b.latency) return a.latency < b.latency;
  if (a.links.size() != b.links.size()) return a.links.size() < b.links.size();
  if (a.nodes != b.nodes) return a.nodes < b.nodes;
  return a.links < b.links;
}

// Dijkstra with deterministic tie-breaking (distance, hops, predecessor link).
// banned_nodes are skipped entirely; banned_links are skipped individually.
bool shortest_walk(const Topology& t, const NodeId& src, const NodeId& dst,
                   const std::set<NodeId>& banned_nodes,
                   const std::set<int>& banned_links, Walk& out) {
  struct Best {
    double dist = std::numeric_limits<double>::infinity();
    int hops = std::numeric_limits<int>::max();
    int pred_link = -1;
    bool done = false;
  };
  std::map<NodeId, Best> best;
  using Item = std::tuple<double, int, NodeId>;  // dist, hops, node
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  if (banned_nodes.count(src)) return false;
  best[src] = {0.0, 0, -1, false};
  pq.push({0.0, 0, src});
  while (!pq.empty()) {
    auto [d, h, u] = pq.top();
    pq.pop();
    auto& bu = best[u];
    if (bu.done || d != bu.dist || h != bu.hops) continue;
    bu.done = true;
    if (u == dst) break;
    for (int li : t.out_links(u)) {
      if (banned_links.count(li)) continue;
      const Link& l = t.links[li];
      if (banned_nodes.count(l.to)) continue;
      double nd = d + l.latency_s;
      int nh = h + 1;
      auto& bv = best[l.to];
      bool better = false;
      if (nd < bv.dist)
        better = true;
      else if (nd == bv.dist && nh < bv.hops)
        better = true;
      else if (nd == bv.dist && nh == bv.hops && bv.pred_link >= 0 &&
               li < bv.pred_link && !bv.done)
        better = true;
      if (better) {
        bv = {nd, nh, li, false};
        pq.push({nd, nh, l.to});
      }
    }
  }
  if (src == dst) {
    out = {{src}, {}, 0.0};
    return true;
  }
  auto it = best.find(dst);
  if (it == best.end() || it->second.pred_link < 0) return false;
  // walk predecessors back
  std::vector<int> rev;
  NodeId cur = dst;
  while (cur != src) {
    int li = best[cur].pred_link;
    if (li < 0) return false;
    rev.push_back(li);
    cur = t.links[li].from;
  }
  std::reverse(rev.begin(), rev.end());
  out.nodes = {src};
  out.links = rev;
  out.latency = 0.0;
  for (int li : rev) {
    out.latency += t.links[li].latency_s;
    out.nodes.push_back(t.links[li].to);
  }
  return true;
}

// Yen's k shortest loop-free paths.
std::vector<Walk> k_shortest(const Topology& t, const NodeId& src,
                             const NodeId& dst, int k) {
  std::vector<Walk> A;
  Walk first;
  if (!shortest_walk(t, src, dst, {}, {}, first)) return A;
  A.push_back(first);
  auto walk_eq = [](const Walk& a, const Walk& b) { return a.links == b.links; };
  std::vector<Walk> B;
  while (static_cast<int>(A.size()) < k) {
    const Walk& prev = A.back();
    for (std::size_t j = 0; j + 1 < prev.nodes.size(); ++j) {
      const NodeId& spur = prev.nodes[j];
      std::set<int> banned_links;
      for (const Walk& p : A) {
        if (p.links.size() > j &&
            std::equal(p.nodes.begin(), p.nodes.begin() + j + 1,
                       prev.nodes.begin()))
          banned_links.insert(p.links[j]);
      }
      std::set<NodeId> banned_nodes(prev.nodes.begin(),
                                    prev.nodes.begin() + j);
      Walk spur_walk;
      if (!shortest_walk(t, spur, dst, banned_nodes, banned_links, spur_walk))
        continue;
      Walk cand;
      cand.nodes.assign(prev.nodes.begin(), prev.nodes.begin() + j);
      cand.nodes.insert(cand.nodes.end(), spur_walk.nodes.begin(),
                        spur_walk.nodes.end());
      cand.links.assign(prev.links.begin(), prev.links.begin() + j);
      cand.links.insert(cand.links.end(), spur_walk.links.begin(),
                        spur_walk.links.end());
      cand.latency = 0.0;
      for (int li : cand.links) cand.latency += t.links[li].latency_s;
      bool dup = false;
      for (const Walk& p : A)
        if (walk_eq(p, cand)) dup = true;
      for (const Walk& p : B)
        if (walk_eq(p, cand)) dup = true;
      if (!dup) B.push_back(cand);
    }
    if (B.empty()) break;
    auto it = std::min_element(B.begin(), B.end(), walk_less);
    A.push_back(*it);
    B.erase(it);
  }
  return A;
}

Path to_path(const NodeId& src, const NodeId& dst, const Walk& w) {
  return {src, dst, w.links, w.latency};
}

}  // namespace

void enumerate_paths(Topology& topo, int k) {
  if (k < 1) throw std::invalid_argument("paths_k must be >= 1");
  topo.paths_k = k;
  topo.path_catalog.clear();
  std::vector<NodeId> clouds, rus;
  for (const auto& n : topo.nodes) {
    if (n.kind == NodeKind::Cloud) clouds.push_back(n);
    if (n.kind == NodeKind::RuSite) rus.push_back(n);
  }
  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (const auto& c : clouds) pairs.push_back({core_node(), c});
  for (const auto& a : clouds)
    for (const auto& b : clouds)
      if (a != b) pairs.push_back({a, b});
  for (const auto& c : clouds)
    for (const auto& r : rus) pairs.push_back({c, r});

  for (const auto& [src, dst] : pairs) {
    auto walks = k_shortest(topo, src, dst, k);
    if (walks.empty())
      throw ValidationError("no path between required pair " + to_string(src) +
                            " -> " + to_string(dst));
    std::sort(walks.begin(), walks.end(), walk_less);
    std::vector<Path> ps;
    for (const auto& w : walks) ps.push_back(to_path(src, dst, w));
    topo.path_catalog[{src, dst}] = std::move(ps);
  }
  // trivial self paths for co-located CU/DU routing
  for (const auto& c : clouds)
    topo.path_catalog[{c, c}] = {Path{c, c, {}, 0.0}};
}

double path_latency(const Topology& topo, const Path& p) {
  double lat = 0.0;
  for (int li : p.links) {
    if (li < 0 || li >= static_cast<int>(topo.links.size()))
      throw ValidationError("path references unknown link " +
                            std::to_string(li));
    lat += topo.links[li].latency_s;
  }
  return lat;
}

void validate_topology(const Topology& topo) {
  if (topo.nodes.empty()) throw ValidationError("topology has no nodes");
  std::set<NodeId> seen;
  int cores = 0;
  std::set<int> ru_idx, cloud_idx;
  for (const auto& n : topo.nodes) {
    if (n.index < 0)
      throw ValidationError("negative node index " + to_string(n));
    if (!seen.insert(n).second)
      throw ValidationError("duplicate node " + to_string(n));
    switch (n.kind) {
      case NodeKind::Core: ++cores; break;
      case NodeKind::RuSite: ru_idx.insert(n.index); break;
      case NodeKind::Cloud: cloud_idx.insert(n.index); break;
    }
  }
  if (cores != 1)
    throw ValidationError("expected exactly one core node, found " +
                          std::to_string(cores));
  if (ru_idx != cloud_idx)
    throw ValidationError(
        "each RU site needs a co-located cloud at the same site index");
  int expect = 0;
  for (int i : ru_idx)
    if (i != expect++)
      throw ValidationError("site indexes must be contiguous from 0");
  if (ru_idx.empty()) throw ValidationError("topology has no RU sites");

  for (std::size_t i = 0; i < topo.links.size(); ++i) {
    const Link& l = topo.links[i];
    std::string at = "/links/" + std::to_string(i);
    if (!seen.count(l.from))
      throw ValidationError(at + ": unknown endpoint " + to_string(l.from));
    if (!seen.count(l.to))
      throw ValidationError(at + ": unknown endpoint " + to_string(l.to));
    if (l.from == l.to) throw ValidationError(at + ": self loop");
    if (l.capacity_bps == 0)
      throw ValidationError(at + ": capacity_bps must be positive");
    if (!(l.latency_s >= 0.0) || !std::isfinite(l.latency_s))
      throw ValidationError(at + ": latency_s must be finite and >= 0");
  }
  // every directed link needs a reverse companion
  std::set<std::pair<NodeId, NodeId>> dirs;
  for (const Link& l : topo.links) dirs.insert({l.from, l.to});
  for (const Link& l : topo.links)
    if (!dirs.count({l.to, l.from}))
      throw ValidationError("missing reverse link for " + to_string(l.from) +
                            " -> " + to_string(l.to));
}

namespace {

NodeKind kind_from_string(const std::string& s, const std::string& where) {
  if (s == "ru_site") return NodeKind::RuSite;
  if (s == "cloud") return NodeKind::Cloud;
  if (s == "core") return NodeKind::Core;
  throw ValidationError(where + ": unknown node kind \"" + s + "\"");
}

}  // namespace

Topology load_topology(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("topology JSON parse error: ") +
                          e.what());
  }
  if (!j.is_object()) throw ValidationError("/: expected object");
  if (!j.contains("nodes") || !j["nodes"].is_array())
    throw ValidationError("/nodes: expected array");
  if (!j.contains("links") || !j["links"].is_array())
    throw ValidationError("/links: expected array");

  struct RawNode {
    long long id;
    NodeKind kind;
  };
  std::vector<RawNode> raw;
  std::set<long long> ids;
  for (std::size_t i = 0; i < j["nodes"].size(); ++i) {
    const auto& n = j["nodes"][i];
    std::string at = "/nodes/" + std::to_string(i);
    if (!n.is_object() || !n.contains("id") || !n.contains("kind"))
      throw ValidationError(at + ": expected {id, kind}");
    if (!n["id"].is_number_integer())
      throw ValidationError(at + "/id: expected integer");
    if (!n["kind"].is_string())
      throw ValidationError(at + "/kind: expected string");
    long long id = n["id"].get<long long>();
    if (!ids.insert(id).second)
      throw ValidationError(at + "/id: duplicate id " + std::to_string(id));
    raw.push_back({id, kind_from_string(n["kind"].get<std::string>(), at)});
  }
  // per-kind rank by ascending file id becomes the site index
  std::map<long long, NodeId> by_id;
  for (NodeKind k : {NodeKind::RuSite, NodeKind::Cloud, NodeKind::Core}) {
    std::vector<long long> of_kind;
    for (const auto& r : raw)
      if (r.kind == k) of_kind.push_back(r.id);
    std::sort(of_kind.begin(), of_kind.end());
    for (std::size_t rank = 0; rank < of_kind.size(); ++rank)
      by_id[of_kind[rank]] = {static_cast<int>(rank), k};
  }

  Topology t;
  for (NodeKind k : {NodeKind::RuSite, NodeKind::Cloud, NodeKind::Core}) {
    std::vector<NodeId> ns;
    for (const auto& [id, node] : by_id)
      if (node.kind == k) ns.push_back(node);
    std::sort(ns.begin(), ns.end());
    t.nodes.insert(t.nodes.end(), ns.begin(), ns.end());
  }

  for (std::size_t i = 0; i < j["links"].size(); ++i) {
    const auto& l = j["links"][i];
    std::string at = "/links/" + std::to_string(i);
    if (!l.is_object() || !l.contains("from") || !l.contains("to") ||
        !l.contains("capacity_bps") || !l.contains("latency_s"))
      throw ValidationError(at + ": expected {from, to, capacity_bps, latency_s}");
    if (!l["from"].is_number_integer() || !l["to"].is_number_integer())
      throw ValidationError(at + ": from/to must be integers");
    long long fid = l["from"].get<long long>();
    long long tid = l["to"].get<long long>();
    if (!by_id.count(fid))
      throw ValidationError(at + "/from: unknown node id " +
                            std::to_string(fid));
    if (!by_id.count(tid))
      throw ValidationError(at + "/to: unknown node id " + std::to_string(tid));
    if (!l["capacity_bps"].is_number())
      throw ValidationError(at + "/capacity_bps: expected number");
    if (!l["latency_s"].is_number())
      throw ValidationError(at + "/latency_s: expected number");
    double cap = l["capacity_bps"].get<double>();
    if (!(cap > 0))
      throw ValidationError(at + "/capacity_bps: must be positive");
    t.links.push_back({by_id[fid], by_id[tid],
                       static_cast<std::uint64_t>(cap),
                       l["latency_s"].get<double>()});
  }
  int k = 3;
  if (j.contains("paths_k")) {
    if (!j["paths_k"].is_number_integer() || j["paths_k"].get<int>() < 1)
      throw ValidationError("/paths_k: expected integer >= 1");
    k = j["paths_k"].get<int>();
  }
  validate_topology(t);
  enumerate_paths(t, k);
  return t;
}

Topology load_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open topology file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return load_topology(ss.str());
}

namespace {

long long global_id(const Topology& t, const NodeId& n) {
  int n_ru = t.n_sites();
  int n_cloud = 0;
  for (const auto& nd : t.nodes)
    if (nd.kind == NodeKind::Cloud) ++n_cloud;
  switch (n.kind) {
    case NodeKind::RuSite: return n.index;
    case NodeKind::Cloud: return n_ru + n.index;
    case NodeKind::Core: return n_ru + n_cloud;
  }
  return -1;
}

}  // namespace

std::string save_topology(const Topology& topo) {
  json j;
  j["nodes"] = json::array();
  for (const auto& n : topo.nodes)
    j["nodes"].push_back(
        {{"id", global_id(topo, n)}, {"kind", to_string(n.kind)}});
  j["links"] = json::array();
  for (const auto& l : topo.links)
    j["links"].push_back({{"from", global_id(topo, l.from)},
                          {"to", global_id(topo, l.to)},
                          {"capacity_bps", l.capacity_bps},
                          {"latency_s", l.latency_s}});
  j["paths_k"] = topo.paths_k;
  return j.dump(2);
}

void save_topology_file(const Topology& topo, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write topology file " + path);
  out << save_topology(topo) << "\n";
}

}  // namespace ranres
