#ifndef CCIC_ENGINE_HPP
#define CCIC_ENGINE_HPP

#include <deque>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ccic/config.hpp"
#include "ccic/medium.hpp"
#include "ccic/metrics.hpp"
#include "ccic/node.hpp"
#include "ccic/scheduler.hpp"

namespace ccic {

struct TopologyNode {
  std::string id;
  Role role = Role::ChildNode;
  GeoCoord position;
  double range_m = 0.0;
  std::string data_type = "temperature";
  unsigned cluster = 0;
  bool consumer = false;
};

struct Topology {
  double width_m = 0.0;
  double height_m = 0.0;
  unsigned clusters = 0;
  std::vector<TopologyNode> nodes;
};

// Cluster heads sit at the cluster centroids; children are placed uniformly
// inside the cluster disc by the seeded generator; consumers are drawn at
// random among each cluster's children.
Topology build_topology(const RunConfig& cfg, std::mt19937_64& rng);

// One pre-recorded content object, the unit of the fetch workloads.
struct ContentObject {
  std::string producer;
  std::uint64_t epoch = 0;
  double value = 0.0;
  unsigned cluster = 0;
};

struct RunOutput {
  Topology topology;
  std::vector<LogRow> events;
  std::vector<ProtoRow> proto;
  EnergyLedger ledger;
  MetricsReport metrics;
  std::string nodes_csv;
  std::string tables_csv;
  std::vector<std::pair<double, std::string>> checkpoint_dumps;
};

// What the vanilla flooding strategy decides to do with an Interest.
enum class VanillaAction { Reply, ReplyCached, Rebroadcast, Drop };
VanillaAction vanilla_forward(Node& n, const Packet& interest, const std::string& from,
                              double now);

// Single-threaded deterministic simulation instance. Tests drive scenarios
// through the public node/originate/push/move hooks; `run` wires the full
// configured workload.
class Sim {
public:
  explicit Sim(const RunConfig& cfg);
  Sim(const RunConfig& cfg, Topology topology); // scenario-scripted layouts
  ~Sim();

  Sim(const Sim&) = delete;
  Sim& operator=(const Sim&) = delete;
  Sim(Sim&&) = delete;
  Sim& operator=(Sim&&) = delete;

  const RunConfig& config() const { return cfg_; }
  double now() const { return sched_.now(); }
  Scheduler& scheduler() { return sched_; }
  Medium& medium() { return *medium_; }
  Node& node(const std::string& id);
  const std::vector<TopologyNode>& topology_nodes() const { return topology_.nodes; }
  const std::vector<ProtoRow>& proto() const { return proto_; }
  const std::vector<LogRow>& events() const { return medium_->log(); }
  const std::vector<ContentObject>& objects() const { return objects_; }

  // scenario hooks
  void join(const std::string& node_id);
  void originate(const std::string& node_id, const Name& name, bool query);
  void push_sample(const std::string& node_id, const Sample& s);
  void move(const std::string& node_id, GeoCoord to);
  void add_proto(const std::string& node, std::string_view event, std::string_view name,
                 double value);

  void install_workload();
  void run_until(double t);
  RunOutput finish();

private:
  friend struct SimEnv;

  std::uint32_t next_nonce();
  double draw_jitter(double max_s);
  void preassociate_clusters();
  void on_frame(const std::string& receiver, const std::string& sender, const Packet& p);
  void on_app_delivery(Node& n, const Packet& data);
  void vanilla_frame(Node& n, const Packet& p, const std::string& from);
  void consumer_tick(std::size_t consumer_idx, double period, bool query);
  void schedule_pull(const std::string& ch_id);
  void pull_tick(const std::string& ch_id);
  void schedule_sense(const std::string& cn_id);
  void issue_fetch(const std::string& consumer, const ContentObject& obj);
  void issue_query(const std::string& consumer, unsigned cluster);
  void arm_retry(const std::string& consumer, const Name& name);
  std::string nodes_csv() const;
  std::string tables_csv() const;

  RunConfig cfg_;
  Scheduler sched_;
  std::unique_ptr<Medium> medium_;
  Topology topology_;
  std::deque<Node> nodes_;
  std::deque<std::unique_ptr<NodeEnv>> envs_;
  std::map<std::string, std::size_t> index_;
  std::vector<ProtoRow> proto_;
  std::vector<ContentObject> objects_;
  std::vector<std::string> consumers_;

  struct Pending {
    double first_sent = 0.0;
    bool query = false;
    bool pull = false;
    bool satisfied = false;
    unsigned retries_left = 0;
    Name name;
    std::string node;
  };
  std::map<std::string, Pending> pending_; // keyed node|rendered-name

  std::mt19937_64 workload_rng_;
  std::mt19937_64 jitter_rng_;
  std::uint32_t nonce_ = 0;
  std::vector<std::pair<double, std::string>> checkpoint_dumps_;
};

RunOutput run(const RunConfig& cfg);

// Writes events.csv, proto.csv, metrics.csv, nodes.csv and a config echo
// under dir (created if needed).
void write_outputs(const RunOutput& out, const RunConfig& cfg, const std::string& dir);

} // namespace ccic

#endif
