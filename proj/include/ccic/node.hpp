#ifndef CCIC_NODE_HPP
#define CCIC_NODE_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "ccic/litequery.hpp"
#include "ccic/name.hpp"
#include "ccic/tables.hpp"
#include "ccic/wire.hpp"

namespace ccic {

enum class Role { ClusterHead, ChildNode };
enum class AssocState { Unassociated, Selecting, Associating, Associated };

const char* role_name(Role r);
const char* assoc_state_name(AssocState s);

// Services a node needs from the simulation engine. Tests use a recording
// implementation; the engine wires each node to the medium and scheduler.
class NodeEnv {
public:
  virtual ~NodeEnv() = default;
  virtual double now() const = 0;
  virtual std::uint64_t epoch_now() const = 0;
  virtual std::uint32_t next_nonce() = 0;
  virtual void send(const Packet& p) = 0;
  virtual void schedule(double delay_s, std::function<void()> fn) = 0;
  // Seeded uniform draw from [0, max_s], used to de-synchronize management
  // replies that several nodes would otherwise emit at the same instant.
  virtual double jitter(double max_s) = 0;
  // Tagged protocol trace: join, sync, membership and serving events.
  virtual void proto(std::string_view event, std::string_view name, double value) = 0;
  // Data that satisfied an Interest this node originated.
  virtual void deliver_to_app(const Packet& data) = 0;
};

struct NodeTimers {
  double selection_window_s = 0.05;
  double assoc_timeout_s = 0.1;
  unsigned assoc_retries = 3;
  double processing_delay_s = 0.001;
  double reply_jitter_max_s = 0.03;
  double join_backoff_s = 1.0; // wait before retrying a join with no candidates
};

// Phase decomposition of the most recent join, recorded on the child.
struct JoinTimers {
  double t_selection = 0.0;
  double t_association = 0.0;
  double t_join = 0.0;
};

// One CH's reply to a CH_Info request, as collected by a selecting child.
struct ChCandidate {
  std::string ch_name;
  unsigned sink_distance = 0;
  std::size_t member_count = 0;
  std::size_t load = 0;
  std::string cluster_type;
};

struct Node {
  // identity and radio
  std::string id;
  Role role = Role::ChildNode;
  bool resource_flag = false; // x_n: set iff the node can act as a CH
  GeoCoord position;
  double range_m = 40.0;
  std::string data_type = "temperature";

  // cluster-head state
  std::string unique_name;
  unsigned sink_distance = 1;
  std::string cluster_type = "heterogeneous";
  bool sync_share = true; // a(i): re-share sync messages with own children
  std::size_t workload_threshold = 16;

  // child state
  std::optional<std::string> ch_name;
  AssocState assoc_state = AssocState::Unassociated;
  bool members_enabled = false; // store sync records on children
  unsigned parent_sink_distance = 0;
  std::string parent_cluster_type;

  NodeTimers timers;
  std::uint8_t hop_limit = kDefaultHopLimit;

  // forwarder tables
  Pit pit{kDefaultPitLifetimeS};
  Fib fib;
  ContentStore cs{0};
  MembersCollection members;   // own cluster (CH only)
  MembersCollection directory; // records learned through sync
  std::vector<Sample> store;   // own samples (CN) or aggregated samples (CH)

  // join bookkeeping
  std::vector<ChCandidate> candidates;
  std::uint64_t join_round = 0;
  double join_started_at = -1.0;
  double selection_done_at = -1.0;
  std::string chosen_ch;
  unsigned assoc_retries_left = 0;
  JoinTimers last_join;
  bool joined_once = false;

  std::set<std::string> seen_sync;            // processed sync name|nonce keys
  std::map<std::string, Name> pending_rewrites; // inner fetch name -> outer name

  std::string task_code() const; // 3-character task derived from data_type
};

// join and association
std::size_t ch_workload(const Node& ch);
void start_join(Node& n, NodeEnv& env);
const ChCandidate& cn_select_ch(const std::vector<ChCandidate>& candidates);
void cn_associate(Node& n, NodeEnv& env, const std::string& ch_unique_name);
std::optional<Packet> ch_handle_info(Node& ch, const Packet& interest);
void ch_handle_assoc(Node& ch, NodeEnv& env, const Packet& interest);

// synchronization
void ch_sync_new_member(Node& ch, NodeEnv& env, const MemberRecord& rec);
void handle_sync(Node& n, NodeEnv& env, const Packet& interest, const std::string& from);

// mobility
void cn_mobility_rejoin(Node& n, NodeEnv& env, GeoCoord new_position);

// data plane
void cn_sense(Node& n, std::uint64_t epoch, double value);
std::optional<Packet> cn_serve(const Node& n, const Packet& interest);

struct QueryServe {
  Packet data;
  std::size_t objects = 0;
};
std::optional<QueryServe> ch_serve_query(const Node& ch, const Packet& interest);

void cn_push(Node& n, NodeEnv& env, const Sample& sample);

// appends to the CH aggregated store, replacing same (nid, epoch) rows
void store_upsert(std::vector<Sample>& store, const Sample& s);

// entry points driven by the engine
void originate_interest(Node& n, NodeEnv& env, const Name& name, std::uint32_t nonce);
void ccic_handle_frame(Node& n, NodeEnv& env, const Packet& p, const std::string& from);

} // namespace ccic

#endif
