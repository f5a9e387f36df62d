#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fogplace/resources.hpp"

namespace fogplace {

// A reference in a solution points at an app/region/server that does not
// exist, or the solution is internally inconsistent. Distinct from a
// constraint violation, which is ordinary audit output.
struct StructuralError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Infrastructure
// ---------------------------------------------------------------------------

class ServerUnit {
 public:
  ServerUnit() = default;
  ServerUnit(int id, int region_id, ResourceVector capacity)
      : id_(id), region_id_(region_id), capacity_(capacity) {}

  int id() const { return id_; }
  int region_id() const { return region_id_; }
  const ResourceVector& capacity() const { return capacity_; }

  // capacity minus the demands of everything placed here. Computed from the
  // placement list (in insertion order) so that place followed by unplace
  // restores the previous value bit-for-bit.
  ResourceVector residual() const {
    if (!cache_ok_) {
      ResourceVector used;
      for (const auto& [app, demand] : placed_) used += demand;
      used_cache_ = used;
      cache_ok_ = true;
    }
    return capacity_ - used_cache_;
  }

  bool can_host(const ResourceVector& demand) const { return fits(demand, residual()); }

  void place(int app_id, const ResourceVector& demand) {
    placed_.emplace_back(app_id, demand);
    cache_ok_ = false;
  }

  void unplace(int app_id) {
    for (auto it = placed_.rbegin(); it != placed_.rend(); ++it) {
      if (it->first == app_id) {
        placed_.erase(std::next(it).base());
        cache_ok_ = false;
        return;
      }
    }
    throw StructuralError("unplace: app not on server");
  }

  const std::vector<std::pair<int, ResourceVector>>& placed() const { return placed_; }

 private:
  int id_ = 0;
  int region_id_ = 0;
  ResourceVector capacity_;
  std::vector<std::pair<int, ResourceVector>> placed_;
  mutable ResourceVector used_cache_;
  mutable bool cache_ok_ = true;
};

struct Region {
  int id = 0;                     // 0 is the central cloud
  std::vector<ServerUnit> servers;
  std::set<int> home_apps;        // apps whose IoT object lives here

  // Component-wise sum of server residuals (the "region as one big server"
  // view used by the gradient and by the region-aggregated FPA variant).
  ResourceVector aggregate_residual() const {
    ResourceVector sum;
    for (const auto& s : servers) sum += s.residual();
    return sum;
  }
};

class Link {
 public:
  Link() = default;
  Link(int a, int b, double capacity, double delay)
      : a_(std::min(a, b)), b_(std::max(a, b)), capacity_(capacity), delay_(delay) {}

  int a() const { return a_; }  // a < b always
  int b() const { return b_; }
  double capacity() const { return capacity_; }
  double delay() const { return delay_; }
  bool is_cloud_link() const { return a_ == 0; }

  double residual() const {
    if (!cache_ok_) {
      double used = 0.0;
      for (const auto& [app, amount] : flows_) used += amount;
      used_cache_ = used;
      cache_ok_ = true;
    }
    return capacity_ - used_cache_;
  }

  void add_flow(int app_id, double amount) {
    flows_.emplace_back(app_id, amount);
    cache_ok_ = false;
  }

  void remove_flow(int app_id) {
    for (auto it = flows_.rbegin(); it != flows_.rend(); ++it) {
      if (it->first == app_id) {
        flows_.erase(std::next(it).base());
        cache_ok_ = false;
        return;
      }
    }
    throw StructuralError("remove_flow: app has no flow on link");
  }

  const std::vector<std::pair<int, double>>& flows() const { return flows_; }

 private:
  int a_ = 0, b_ = 0;
  double capacity_ = 0.0;
  double delay_ = 0.0;
  std::vector<std::pair<int, double>> flows_;
  mutable double used_cache_ = 0.0;
  mutable bool cache_ok_ = true;
};

// Weighted region graph. Region 0 is the central cloud; every fog region has
// a cloud-link {k,0} (star backbone); crosslinks connect fog region pairs.
struct Topology {
  std::vector<Region> regions;  // indexed by region id, 0..K-1
  std::vector<Link> links;

  void rebuild_index();
  void validate() const;  // throws StructuralError on malformed topologies

  int num_regions() const { return static_cast<int>(regions.size()); }

  const std::set<int>& neighbors(int region) const { return adjacency_.at(region); }

  Link* find_link(int x, int y);
  const Link* find_link(int x, int y) const;

  // Link that must exist by the star invariant / an adjacency claim.
  Link& link_between(int x, int y);
  const Link& link_between(int x, int y) const;

 private:
  std::map<std::pair<int, int>, int> link_index_;
  std::vector<std::set<int>> adjacency_;
};

// Cloud region with a single server whose capacity dwarfs any batch demand
// (1e6 x a nominal per-app demand); the cloud is bandwidth-constrained only.
Region make_cloud_region(const ResourceVector& nominal_app);

// ---------------------------------------------------------------------------
// Applications and placements
// ---------------------------------------------------------------------------

// Where module B of the two-module application lands.
enum class ConfigType {
  Type1 = 1,  // home region
  Type2 = 2,  // central cloud
  Type3 = 3,  // neighboring fog region
};

const char* config_name(ConfigType c);
ConfigType config_from_name(const std::string& s);

struct Application {
  int id = 0;
  int home_region = 1;        // fog region of the IoT object, >= 1
  ResourceVector demand;      // module B requirements
  double data_high = 0.0;     // large data unit [Mbit]
  double data_low = 0.0;      // small data unit [Mbit]
  double output_rate = 1.0;   // required results per second (F_u)
  double proc_delay = 0.0;    // module B processing delay [s]
  double source_rate = 1.0;   // IoT source serving rate [Mbit/s]

  // Direct throughput requirements [Mbit/s]. When set, placement uses these
  // values verbatim for every configuration type instead of deriving minimum
  // throughputs from the delay budget (the mode the batch generator uses).
  std::optional<double> fixed_bh;
  std::optional<double> fixed_bl;

  // Per-region deployment reward f_{u,k}; regions absent from the map pay
  // the default.
  double reward_default = 1.0;
  std::map<int, double> rewards;

  double reward_for(int region) const {
    auto it = rewards.find(region);
    return it == rewards.end() ? reward_default : it->second;
  }

  bool has_fixed_throughput() const { return fixed_bh.has_value(); }

  void validate() const;
};

struct Assignment {
  int region = -1;
  int server = -1;
  ConfigType config = ConfigType::Type1;
  double bh = 0.0;  // allocated high throughput [Mbit/s]
  double bl = 0.0;  // allocated low throughput [Mbit/s]

  bool operator==(const Assignment&) const = default;
};

struct PlacementSolution {
  std::map<int, Assignment> assignments;  // app id -> assignment
  double objective = 0.0;
  std::set<int> undeployable;

  int deployed_count() const { return static_cast<int>(assignments.size()); }

  bool operator==(const PlacementSolution&) const = default;
};

struct Instance {
  Topology topology;
  std::vector<Application> apps;

  void rebuild_home_apps();
  void validate() const;
};

// ---------------------------------------------------------------------------
// Constraint audit
// ---------------------------------------------------------------------------

enum class ConstraintFamily {
  Capacity,           // per-server resource bound
  CloudLinkBandwidth, // fog-to-cloud link bound
  CrosslinkBandwidth, // fog-to-fog link bound
  Delay,              // per-app deadline (with the allocated throughputs)
  Uniqueness,         // at most one deployment per app
  Locality,           // home region, a neighbor, or the cloud only
};

const char* family_name(ConstraintFamily f);

struct Violation {
  ConstraintFamily family;
  std::string entity;  // which server / link / app
  double slack;        // bound minus load; negative when violated
  std::string detail;
};

struct AuditReport {
  std::vector<Violation> violations;
  bool clean() const { return violations.empty(); }
};

struct AuditOptions {
  // When true, the cloud-link constraint charges the low-throughput flow of
  // a neighbor region's apps placed *in their own home* against this link,
  // which is the summation exactly as printed in the source formulation.
  // The default charges apps *hosted here* on behalf of a neighboring home,
  // matching the Type-3 flow geometry. Exposed for comparison.
  bool literal_neighbor_index = false;
};

// Checks a placement against the full constraint set: per-server capacity,
// cloud-link and crosslink bandwidth, per-app deadline (evaluated with the
// allocated throughputs), uniqueness and locality. Capacities (not current
// residuals) are the bounds, so the audit gives the same answer on a pristine
// or an already-mutated copy of the topology. Empty report == feasible.
AuditReport audit_solution(const Topology& topology, const std::vector<Application>& apps,
                           const PlacementSolution& solution, const AuditOptions& options = {});

// ---------------------------------------------------------------------------
// Topology mutation
// ---------------------------------------------------------------------------

// Places the app: subtracts its demand from the server and the configuration's
// flows from the involved links (Type1: bl on {home,0}; Type2: bh on {home,0};
// Type3 to j: bh on {home,j} and bl on {j,0}). Returns false and leaves the
// topology untouched if any residual would go negative.
bool apply_placement(Topology& topology, const Application& app, int region, int server,
                     ConfigType config, double bh, double bl);

// Exact inverse of apply_placement.
void release_placement(Topology& topology, const Application& app, int region, int server,
                       ConfigType config, double bh, double bl);

// Per-link load implied by a solution, independent of any topology mutation
// state; index-aligned with topology.links.
std::vector<double> link_loads(const Topology& topology, const std::vector<Application>& apps,
                               const PlacementSolution& solution);

}  // namespace fogplace
