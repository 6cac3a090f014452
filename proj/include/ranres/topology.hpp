#pragma once
#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace ranres {

enum class NodeKind { RuSite, Cloud, Core };

const char* to_string(NodeKind k);

// index is the site index for RuSite/Cloud (co-located pair shares it), 0 for Core
struct NodeId {
  int index = 0;
  NodeKind kind = NodeKind::RuSite;
  auto operator<=>(const NodeId&) const = default;
};

inline NodeId ru_node(int site) { return {site, NodeKind::RuSite}; }
inline NodeId cloud_node(int site) { return {site, NodeKind::Cloud}; }
inline NodeId core_node() { return {0, NodeKind::Core}; }

std::string to_string(const NodeId& n);

struct Link {
  NodeId from;
  NodeId to;
  std::uint64_t capacity_bps = 0;
  double latency_s = 0.0;  // one-way propagation + switching
  bool operator==(const Link&) const = default;
};

// Directed walk between two nodes; links are indexes into Topology::links.
// An empty link list is the trivial path from a node to itself.
struct Path {
  NodeId from;
  NodeId to;
  std::vector<int> links;
  double latency_s = 0.0;
  bool operator==(const Path&) const = default;
};

struct TopologyParams {
  std::uint64_t link_capacity_bps = 100'000'000'000ull;  // ring + site links
  double link_latency_s = 0.05e-3;                       // per inter-site hop
  double site_link_latency_s = 0.0;  // cloud sits at the site switch
  std::uint64_t core_link_capacity_bps = 1'000'000'000'000ull;  // CN trunk
  int core_site = 0;
  int paths_k = 3;
};

struct Topology {
  std::vector<NodeId> nodes;  // canonical order: RU sites asc, clouds asc, core
  std::vector<Link> links;
  int paths_k = 3;
  // k shortest loop-free paths per ordered pair, latency ascending.
  // Self pairs are not stored; paths_between synthesizes the trivial path.
  std::map<std::pair<NodeId, NodeId>, std::vector<Path>> path_catalog;

  int n_sites() const;
  bool has_node(const NodeId& n) const;
  const std::vector<Path>& paths_between(const NodeId& from,
                                         const NodeId& to) const;
  // outgoing link indexes per node, built lazily by enumerate_paths
  const std::vector<int>& out_links(const NodeId& n) const;
  // hop count between nodes ignoring latency (shortest by links); -1 if unreachable
  int hop_distance(const NodeId& from, const NodeId& to) const;

  bool operator==(const Topology& other) const {
    return nodes == other.nodes && links == other.links &&
           paths_k == other.paths_k && path_catalog == other.path_catalog;
  }

 private:
  mutable std::map<NodeId, std::vector<int>> adj_;
  void build_adjacency() const;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// n_sites RU sites on a transport ring, one co-located cloud per site, one core
// node attached at params.core_site. 2n ring + 2n site-local + 2 core directed links.
Topology build_ring_topology(int n_sites, const TopologyParams& params = {});

// Fills path_catalog with up to k shortest simple paths for every ordered
// (Core,Cloud), (Cloud,Cloud) and (Cloud,RuSite) pair. Ties broken by fewer
// hops, then node order. Throws ValidationError naming the pair if a required
// pair is disconnected.
void enumerate_paths(Topology& topo, int k);

double path_latency(const Topology& topo, const Path& p);

// Schema: {"nodes":[{"id":int,"kind":"ru_site"|"cloud"|"core"}],
//          "links":[{"from":int,"to":int,"capacity_bps":num,"latency_s":num}],
//          "paths_k":int}
// ids are file-global; per-kind rank order maps them onto site indexes.
Topology load_topology(const std::string& json_text);
Topology load_topology_file(const std::string& path);
std::string save_topology(const Topology& topo);
void save_topology_file(const Topology& topo, const std::string& path);

// Structural checks shared by the generator and loader: exactly one core,
// co-located cloud per RU site, positive capacities, reverse link presence.
void validate_topology(const Topology& topo);

}  // namespace ranres
