#include "ccic/engine.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace ccic {

namespace {

constexpr std::uint64_t kSeedMix = 0x9E3779B97F4A7C15ull;

std::string cluster_tag(unsigned cluster, unsigned clusters) {
  if (clusters <= 26) return std::string(1, static_cast<char>('A' + cluster));
  return std::string(1, static_cast<char>('A' + cluster % 26)) + "-" +
         std::to_string(cluster / 26);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Hand-rolled Fisher-Yates: std::shuffle's draw sequence is not pinned by
// the standard, and topology layouts must be reproducible.
template <typename T>
void shuffle_stable(std::vector<T>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

bool parse_epoch(const std::string& text, std::uint64_t& out) {
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && p == text.data() + text.size();
}

std::string fmt_g(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

} // namespace

Topology build_topology(const RunConfig& cfg, std::mt19937_64& rng) {
  cfg.validate();
  Topology topo;
  topo.width_m = cfg.area_width_m;
  topo.height_m = cfg.area_height_m;
  topo.clusters = cfg.clusters;

  const unsigned cols = static_cast<unsigned>(std::ceil(std::sqrt(double(cfg.clusters))));
  const unsigned rows = (cfg.clusters + cols - 1) / cols;
  const double cell_w = cfg.area_width_m / cols;
  const double cell_h = cfg.area_height_m / rows;

  const unsigned total_cn = cfg.nodes - cfg.clusters;
  std::vector<unsigned> per_cluster(cfg.clusters, total_cn / cfg.clusters);
  for (unsigned i = 0; i < total_cn % cfg.clusters; ++i) ++per_cluster[i];

  for (unsigned c = 0; c < cfg.clusters; ++c) {
    GeoCoord centroid{(c % cols + 0.5) * cell_w, (c / cols + 0.5) * cell_h};
    std::string tag = cluster_tag(c, cfg.clusters);

    TopologyNode ch;
    ch.id = "CH-" + tag;
    ch.role = Role::ClusterHead;
    ch.position = centroid;
    ch.range_m = cfg.ch_range_m;
    ch.cluster = c;
    topo.nodes.push_back(ch);

    std::vector<std::size_t> member_indices;
    for (unsigned i = 0; i < per_cluster[c]; ++i) {
      double r = cfg.cluster_radius_m * std::sqrt(uniform01(rng));
      double theta = 2.0 * 3.14159265358979323846 * uniform01(rng);
      TopologyNode cn;
      cn.id = cfg.clusters <= 26 ? tag + std::to_string(i + 1)
                                 : tag + "." + std::to_string(i + 1);
      cn.role = Role::ChildNode;
      cn.position = GeoCoord{centroid.lat + r * std::cos(theta),
                             centroid.lon + r * std::sin(theta)};
      cn.range_m = cfg.cn_range_m;
      cn.cluster = c;
      if (geo_distance_m(cn.position, centroid) > cfg.cn_range_m)
        throw Error(Errc::InfeasibleRange,
                    "child " + cn.id + " cannot reach its cluster head");
      member_indices.push_back(topo.nodes.size());
      topo.nodes.push_back(cn);
    }

    shuffle_stable(member_indices, rng);
    unsigned consumers = std::min<std::size_t>(cfg.consumers_per_cluster, member_indices.size());
    for (unsigned i = 0; i < consumers; ++i) topo.nodes[member_indices[i]].consumer = true;
  }
  return topo;
}

VanillaAction vanilla_forward(Node& n, const Packet& interest, const std::string& from,
                              double now) {
  const Name& name = interest.name;
  if (name.size() == 3 && !name.open && name.at(0) == n.id) {
    std::uint64_t epoch = 0;
    if (parse_epoch(name.at(2), epoch)) {
      for (const Sample& s : n.store) {
        if (s.epoch_time == epoch) {
          if (n.pit.insert_or_aggregate(name, interest.nonce, from, now) ==
              PitInsert::DuplicateNonce)
            return VanillaAction::Drop;
          return VanillaAction::Reply;
        }
      }
    }
  }
  if (n.cs.lookup(name)) {
    if (n.pit.insert_or_aggregate(name, interest.nonce, from, now) ==
        PitInsert::DuplicateNonce)
      return VanillaAction::Drop;
    return VanillaAction::ReplyCached;
  }
  if (n.pit.insert_or_aggregate(name, interest.nonce, from, now) != PitInsert::New)
    return VanillaAction::Drop;
  if (interest.hop_limit <= 1) return VanillaAction::Drop;
  return VanillaAction::Rebroadcast;
}

// Per-node adapter between the protocol code and the simulation.
struct SimEnv final : public NodeEnv {
  Sim* sim = nullptr;
  Node* owner = nullptr;

  double now() const override { return sim->scheduler().now(); }
  std::uint64_t epoch_now() const override {
    return sim->config().epoch_base + static_cast<std::uint64_t>(sim->scheduler().now());
  }
  std::uint32_t next_nonce() override;
  void send(const Packet& p) override { sim->medium().submit(owner->id, p); }
  double jitter(double max_s) override { return sim->draw_jitter(max_s); }
  void schedule(double delay_s, std::function<void()> fn) override {
    sim->scheduler().schedule_in(delay_s, std::move(fn));
  }
  void proto(std::string_view event, std::string_view name, double value) override {
    sim->add_proto(owner->id, event, name, value);
  }
  void deliver_to_app(const Packet& data) override { sim->on_app_delivery(*owner, data); }
};

std::uint32_t SimEnv::next_nonce() { return sim->next_nonce(); }

Sim::Sim(const RunConfig& cfg)
    : Sim(cfg, [&cfg] {
        std::mt19937_64 topo_rng(cfg.seed * kSeedMix + 1);
        return build_topology(cfg, topo_rng);
      }()) {}

Sim::Sim(const RunConfig& cfg, Topology topology)
    : cfg_(cfg),
      topology_(std::move(topology)),
      workload_rng_(cfg.seed * kSeedMix + 2),
      jitter_rng_(cfg.seed * kSeedMix + 3) {
  cfg_.validate();

  MediumConfig mc;
  mc.datarate_bps = cfg_.datarate_bps;
  mc.propagation_mps = cfg_.propagation_mps;
  mc.energy_per_bit_j = cfg_.energy_per_bit_j;
  mc.csma = cfg_.csma;
  mc.csma_backoff_min_s = cfg_.csma_backoff_min_s;
  mc.csma_backoff_max_s = cfg_.csma_backoff_max_s;
  mc.csma_max_retries = cfg_.csma_max_retries;
  mc.limits = WireLimits{cfg_.interest_size_bytes, cfg_.data_size_bytes};
  medium_ = std::make_unique<Medium>(sched_, mc, cfg.seed * kSeedMix + 4);

  for (const TopologyNode& tn : topology_.nodes) {
    Node n;
    n.id = tn.id;
    n.role = tn.role;
    n.resource_flag = tn.role == Role::ClusterHead;
    n.position = tn.position;
    n.range_m = tn.range_m;
    n.data_type = tn.data_type;
    n.hop_limit = static_cast<std::uint8_t>(cfg_.hop_limit);
    n.pit = Pit(cfg_.pit_lifetime_s);
    n.timers.selection_window_s = cfg_.selection_window_s;
    n.timers.assoc_timeout_s = cfg_.assoc_timeout_s;
    n.timers.assoc_retries = cfg_.assoc_retries;
    n.timers.processing_delay_s = cfg_.processing_delay_s;
    n.timers.reply_jitter_max_s = cfg_.reply_jitter_max_s;
    n.timers.join_backoff_s = cfg_.join_backoff_s;
    n.workload_threshold = cfg_.workload_threshold;
    if (tn.role == Role::ClusterHead) {
      n.unique_name = tn.id;
      n.sink_distance = 1;
      n.cluster_type = cfg_.cluster_type;
      n.sync_share = cfg_.sync_share;
      n.cs.set_capacity(cfg_.cs_capacity);
    } else {
      n.members_enabled = cfg_.cn_members_enabled;
      n.cs.set_capacity(0);
    }
    index_[n.id] = nodes_.size();
    nodes_.push_back(std::move(n));
    medium_->register_site(tn.id, tn.position, tn.range_m);
  }
  for (auto& n : nodes_) {
    auto env = std::make_unique<SimEnv>();
    env->sim = this;
    env->owner = &n;
    envs_.push_back(std::move(env));
  }
  medium_->set_delivery_handler(
      [this](const std::string& receiver, const std::string& sender, const Packet& p) {
        on_frame(receiver, sender, p);
      });

  // Pre-recorded content objects, assigned round-robin over producers.
  std::vector<const TopologyNode*> producers;
  for (const TopologyNode& tn : topology_.nodes)
    if (tn.role == Role::ChildNode && !tn.consumer) producers.push_back(&tn);
  if (producers.empty())
    for (const TopologyNode& tn : topology_.nodes)
      if (tn.role == Role::ChildNode) producers.push_back(&tn);
  for (unsigned j = 0; j < cfg_.unique_objects && !producers.empty(); ++j) {
    const TopologyNode* p = producers[j % producers.size()];
    ContentObject obj;
    obj.producer = p->id;
    obj.epoch = cfg_.epoch_base - cfg_.unique_objects + j;
    obj.value = static_cast<double>(workload_rng_() % 41);
    obj.cluster = p->cluster;
    objects_.push_back(obj);
  }
  for (const ContentObject& obj : objects_) {
    Node& p = node(obj.producer);
    p.store.push_back(Sample{p.id, p.task_code(), obj.epoch, obj.value, p.position});
  }
  for (const TopologyNode& tn : topology_.nodes)
    if (tn.consumer) consumers_.push_back(tn.id);
}

Sim::~Sim() = default;

std::uint32_t Sim::next_nonce() { return ++nonce_; }

double Sim::draw_jitter(double max_s) {
  if (max_s <= 0) return 0.0;
  std::uniform_real_distribution<double> dist(0.0, max_s);
  return dist(jitter_rng_);
}

// Administrative cluster formation: the association state a completed join
// plus sync process would have left behind, with no frames on the air.
void Sim::preassociate_clusters() {
  std::map<unsigned, std::string> ch_of;
  for (const TopologyNode& tn : topology_.nodes)
    if (tn.role == Role::ClusterHead) ch_of[tn.cluster] = tn.id;
  for (const TopologyNode& tn : topology_.nodes) {
    if (tn.role != Role::ChildNode) continue;
    const std::string& owner = ch_of.at(tn.cluster);
    Node& cn = node(tn.id);
    cn.ch_name = owner;
    cn.assoc_state = AssocState::Associated;
    cn.joined_once = true;
    cn.parent_sink_distance = node(owner).sink_distance;
    cn.parent_cluster_type = node(owner).cluster_type;
    MemberRecord rec{tn.id, owner, tn.position, tn.data_type, 0.0};
    node(owner).members.upsert(rec);
    for (const auto& [cluster, ch_id] : ch_of) {
      Node& ch = node(ch_id);
      ch.directory.upsert(rec);
      ch.fib.add_route(tn.id, owner);
      ch.fib.add_route(owner, owner);
    }
  }
}

Node& Sim::node(const std::string& id) {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(Errc::BadConfig, "unknown node '" + id + "'");
  return nodes_[it->second];
}

void Sim::add_proto(const std::string& node, std::string_view event, std::string_view name,
                    double value) {
  proto_.push_back(ProtoRow{sched_.now(), node, std::string(event), std::string(name), value});
}

void Sim::on_frame(const std::string& receiver, const std::string& sender, const Packet& p) {
  Node& n = node(receiver);
  NodeEnv& env = *envs_[index_.at(receiver)];
  if (cfg_.strategy == Strategy::CcicWsn)
    ccic_handle_frame(n, env, p, sender);
  else
    vanilla_frame(n, p, sender);
}

void Sim::vanilla_frame(Node& n, const Packet& p, const std::string& from) {
  NodeEnv& env = *envs_[index_.at(n.id)];
  const double t = sched_.now();
  if (p.kind == PacketKind::Interest) {
    switch (vanilla_forward(n, p, from, t)) {
      case VanillaAction::Reply: {
        std::uint64_t epoch = 0;
        parse_epoch(p.name.at(2), epoch);
        for (const Sample& s : n.store) {
          if (s.epoch_time == epoch) {
            Packet d;
            d.kind = PacketKind::Data;
            d.name = p.name;
            d.hop_limit = p.hop_limit;
            wire::append_sample_row(d.payload, s);
            env.schedule(cfg_.processing_delay_s, [&env, d]() { env.send(d); });
            break;
          }
        }
        return;
      }
      case VanillaAction::ReplyCached: {
        Packet d;
        d.kind = PacketKind::Data;
        d.name = p.name;
        d.hop_limit = p.hop_limit;
        d.payload = *n.cs.lookup(p.name);
        env.send(d);
        return;
      }
      case VanillaAction::Rebroadcast: {
        Packet re = p;
        re.hop_limit = static_cast<std::uint8_t>(p.hop_limit - 1);
        std::uniform_real_distribution<double> jitter(0.0, cfg_.forward_jitter_max_s);
        env.schedule(jitter(jitter_rng_), [&env, re]() { env.send(re); });
        return;
      }
      case VanillaAction::Drop:
        return;
    }
    return;
  }
  auto faces = n.pit.consume(p.name, t);
  if (faces.empty()) return;
  n.cs.insert(p.name, p.payload, t);
  bool app = faces.count(std::string(kAppFace)) > 0;
  if (faces.size() > (app ? 1u : 0u)) {
    Packet re = p;
    if (re.hop_limit > 0) --re.hop_limit;
    std::uniform_real_distribution<double> jitter(0.0, cfg_.forward_jitter_max_s);
    env.schedule(jitter(jitter_rng_), [&env, re]() { env.send(re); });
  }
  if (app) on_app_delivery(n, p);
}

void Sim::on_app_delivery(Node& n, const Packet& data) {
  const std::string key = n.id + "|" + render_name(data.name);
  auto it = pending_.find(key);
  if (it == pending_.end() || it->second.satisfied) return;
  Pending& pending = it->second;
  pending.satisfied = true;
  if (pending.pull) {
    std::size_t rows = 0;
    wire::RowReader reader{data.payload};
    while (!reader.done()) {
      store_upsert(n.store, reader.next());
      ++rows;
    }
    add_proto(n.id, "pull_satisfied", render_name(data.name), static_cast<double>(rows));
    return;
  }
  double objects = 1.0;
  if (pending.query) {
    try {
      objects = static_cast<double>(wire::unpack_result(data.payload).object_count);
    } catch (const Error&) {
      objects = 0.0;
    }
  }
  add_proto(n.id, "request_satisfied", render_name(data.name), objects);
}

void Sim::join(const std::string& node_id) {
  Node& n = node(node_id);
  start_join(n, *envs_[index_.at(node_id)]);
}

void Sim::originate(const std::string& node_id, const Name& name, bool query) {
  Node& n = node(node_id);
  const std::string rendered = render_name(name);
  const std::string key = node_id + "|" + rendered;
  auto it = pending_.find(key);
  if (it == pending_.end()) {
    Pending pending;
    pending.first_sent = sched_.now();
    pending.query = query;
    pending.retries_left = cfg_.interest_retries;
    pending.name = name;
    pending.node = node_id;
    pending_.emplace(key, std::move(pending));
    add_proto(node_id, "request_sent", rendered, query ? 1.0 : 0.0);
  }
  originate_interest(n, *envs_[index_.at(node_id)], name, next_nonce());
  arm_retry(node_id, name);
}

void Sim::push_sample(const std::string& node_id, const Sample& s) {
  Node& n = node(node_id);
  cn_push(n, *envs_[index_.at(node_id)], s);
}

void Sim::move(const std::string& node_id, GeoCoord to) {
  Node& n = node(node_id);
  medium_->move_site(node_id, to);
  if (cfg_.strategy == Strategy::CcicWsn && n.role == Role::ChildNode)
    cn_mobility_rejoin(n, *envs_[index_.at(node_id)], to);
  else
    n.position = to;
}

void Sim::arm_retry(const std::string& consumer, const Name& name) {
  const std::string key = consumer + "|" + render_name(name);
  // small spread keeps retries from phase-locking with periodic traffic
  sched_.schedule_in(cfg_.retry_timeout_s + 0.1 * uniform01(workload_rng_), [this, key]() {
    auto it = pending_.find(key);
    if (it == pending_.end() || it->second.satisfied) return;
    Pending& pending = it->second;
    if (pending.retries_left == 0) {
      add_proto(pending.node, "request_expired", render_name(pending.name), 0.0);
      return;
    }
    --pending.retries_left;
    add_proto(pending.node, "request_retx", render_name(pending.name), 0.0);
    Node& n = node(pending.node);
    originate_interest(n, *envs_[index_.at(pending.node)], pending.name, next_nonce());
    arm_retry(pending.node, pending.name);
  });
}

void Sim::issue_fetch(const std::string& consumer, const ContentObject& obj) {
  Name name;
  if (cfg_.strategy == Strategy::VanillaFlooding) {
    Node& producer = node(obj.producer);
    name.components = {obj.producer, producer.task_code(), std::to_string(obj.epoch)};
  } else {
    Node& producer = node(obj.producer);
    if (!producer.ch_name) return; // name not yet shared via sync
    name = CnName{producer.id, *producer.ch_name, producer.position, producer.data_type,
                  obj.epoch}
               .to_name();
  }
  originate(consumer, name, false);
}

void Sim::issue_query(const std::string& consumer, unsigned cluster) {
  std::vector<std::uint64_t> epochs;
  for (const ContentObject& obj : objects_)
    if (obj.cluster == cluster) epochs.push_back(obj.epoch);
  if (epochs.empty()) return;
  std::sort(epochs.begin(), epochs.end());
  const std::size_t k = std::min<std::size_t>(cfg_.objects_per_query, epochs.size());
  const std::size_t start = epochs.size() > k ? workload_rng_() % (epochs.size() - k + 1) : 0;
  const std::uint64_t lo = epochs[start];
  const std::uint64_t hi = epochs[start + k - 1];

  Node& c = node(consumer);
  if (cfg_.strategy == Strategy::VanillaFlooding) {
    // No query engine in the baseline: fetch the window object by object.
    for (const ContentObject& obj : objects_)
      if (obj.cluster == cluster && obj.epoch >= lo && obj.epoch <= hi)
        issue_fetch(consumer, obj);
    return;
  }
  if (!c.ch_name) return;
  const std::string query = c.task_code() + ".date_bet_" + std::to_string(lo) + "_and_" +
                            std::to_string(hi);
  ChName name{*c.ch_name, c.parent_sink_distance,
              c.parent_cluster_type.empty() ? std::string(kHeterogeneousCluster)
                                            : c.parent_cluster_type,
              QueryTail{query}};
  originate(consumer, name.to_name(), true);
}

void Sim::consumer_tick(std::size_t consumer_idx, double period, bool query) {
  const std::string& consumer = consumers_[consumer_idx];
  if (query) {
    issue_query(consumer, topology_.nodes[index_.at(consumer)].cluster);
  } else if (!objects_.empty()) {
    std::size_t pick = workload_rng_() % objects_.size();
    if (objects_[pick].producer == consumer) pick = (pick + 1) % objects_.size();
    issue_fetch(consumer, objects_[pick]);
  }
  double wait = period;
  if (cfg_.arrival == "poisson") {
    // exponential inter-arrival with the configured mean
    double u = uniform01(workload_rng_);
    wait = -period * std::log1p(-u);
  }
  sched_.schedule_in(wait, [this, consumer_idx, period, query]() {
    consumer_tick(consumer_idx, period, query);
  });
}

void Sim::schedule_pull(const std::string& ch_id) {
  // staggered per CH so pull bursts from hidden senders cannot phase-lock
  double phase = cfg_.warmup_s + (0.5 + 0.5 * uniform01(workload_rng_)) * cfg_.pull_period_s;
  sched_.schedule_at(phase, [this, ch_id]() { pull_tick(ch_id); });
}

void Sim::pull_tick(const std::string& ch_id) {
  Node& ch = node(ch_id);
  for (const auto& [cn_id, rec] : ch.members.records()) {
    CnName name{rec.cn_id, rec.ch_name, rec.location, rec.data_type, std::nullopt};
    Name open = name.to_name();
    const std::string key = ch_id + "|" + render_name(open);
    auto it = pending_.find(key);
    if (it != pending_.end() && !it->second.satisfied &&
        sched_.now() - it->second.first_sent < cfg_.retry_timeout_s)
      continue; // previous pull still in flight
    Pending pending;
    pending.first_sent = sched_.now();
    pending.pull = true;
    pending.name = open;
    pending.node = ch_id;
    pending_[key] = std::move(pending);
    originate_interest(ch, *envs_[index_.at(ch_id)], open, next_nonce());
  }
  sched_.schedule_in(cfg_.pull_period_s, [this, ch_id]() { pull_tick(ch_id); });
}

void Sim::schedule_sense(const std::string& cn_id) {
  sched_.schedule_in((0.5 + 0.5 * uniform01(workload_rng_)) * cfg_.sense_period_s,
                     [this, cn_id]() {
    Node& n = node(cn_id);
    cn_sense(n, cfg_.epoch_base + static_cast<std::uint64_t>(sched_.now()),
             static_cast<double>(workload_rng_() % 41));
    schedule_sense(cn_id);
  });
}

void Sim::install_workload() {
  const bool ccic = cfg_.strategy == Strategy::CcicWsn;

  if (ccic) {
    if (cfg_.preassociate) {
      preassociate_clusters();
    } else {
      // Staggered joins inside the warmup window.
      for (const TopologyNode& tn : topology_.nodes) {
        if (tn.role != Role::ChildNode) continue;
        double at = 0.01 + uniform01(workload_rng_) * std::max(0.0, cfg_.warmup_s * 0.5);
        sched_.schedule_at(at, [this, id = tn.id]() { join(id); });
      }
    }

    // Producers push their pre-recorded objects to the CH once associated,
    // so lite queries have cluster data to run against.
    double push_at = cfg_.warmup_s * 0.6;
    for (std::size_t j = 0; j < objects_.size(); ++j) {
      push_at += 0.03;
      const ContentObject& obj = objects_[j];
      std::function<void()> try_push = [this, obj]() {
        Node& p = node(obj.producer);
        if (p.assoc_state != AssocState::Associated) {
          sched_.schedule_in(0.5, [this, obj]() {
            Node& p2 = node(obj.producer);
            if (p2.assoc_state != AssocState::Associated) return; // give up quietly
            push_sample(obj.producer,
                        Sample{p2.id, p2.task_code(), obj.epoch, obj.value, p2.position});
          });
          return;
        }
        push_sample(obj.producer,
                    Sample{p.id, p.task_code(), obj.epoch, obj.value, p.position});
      };
      sched_.schedule_at(push_at, try_push);
    }

    // Fresh sensing and periodic CH pulls.
    if (cfg_.sense_period_s > 0) {
      for (const TopologyNode& tn : topology_.nodes)
        if (tn.role == Role::ChildNode && !tn.consumer) schedule_sense(tn.id);
    }
    if (cfg_.pull_period_s > 0) {
      for (const TopologyNode& tn : topology_.nodes)
        if (tn.role == Role::ClusterHead) schedule_pull(tn.id);
    }
  }

  if (cfg_.interest_rate_per_s > 0 && !consumers_.empty()) {
    const double period = static_cast<double>(consumers_.size()) / cfg_.interest_rate_per_s;
    for (std::size_t k = 0; k < consumers_.size(); ++k) {
      double phase = cfg_.warmup_s + uniform01(workload_rng_) * period;
      sched_.schedule_at(phase, [this, k, period]() { consumer_tick(k, period, false); });
    }
  }
  if (cfg_.query_rate_per_s > 0 && !consumers_.empty()) {
    const double period = static_cast<double>(consumers_.size()) / cfg_.query_rate_per_s;
    for (std::size_t k = 0; k < consumers_.size(); ++k) {
      double phase = cfg_.warmup_s + uniform01(workload_rng_) * period;
      sched_.schedule_at(phase, [this, k, period]() { consumer_tick(k, period, true); });
    }
  }

  for (const MoveCommand& mv : cfg_.moves)
    sched_.schedule_at(mv.time_s, [this, mv]() { move(mv.node_id, mv.to); });
  for (double t : cfg_.checkpoints_s)
    sched_.schedule_at(t, [this, t]() { checkpoint_dumps_.emplace_back(t, nodes_csv()); });
}

void Sim::run_until(double t) { sched_.run_until(t); }

RunOutput Sim::finish() {
  RunOutput out;
  out.topology = topology_;
  out.events = medium_->log();
  out.proto = proto_;
  out.ledger = medium_->ledger();
  out.metrics = compute_metrics(out.events, out.proto, cfg_.energy_per_bit_j);
  out.nodes_csv = nodes_csv();
  out.tables_csv = tables_csv();
  out.checkpoint_dumps = checkpoint_dumps_;
  return out;
}

std::string Sim::nodes_csv() const {
  std::string out = "id,role,x,y,range_m,data_type,assoc_state,ch_name,members,directory,"
                    "store_samples,cs_entries,pit_entries,fib_routes,energy_interest_j,"
                    "energy_data_j\n";
  for (const Node& n : nodes_) {
    EnergySplit split;
    auto it = medium_->ledger().per_node.find(n.id);
    if (it != medium_->ledger().per_node.end()) split = it->second;
    out += n.id;
    out += ',';
    out += role_name(n.role);
    out += ',';
    out += fmt_g(n.position.lat);
    out += ',';
    out += fmt_g(n.position.lon);
    out += ',';
    out += fmt_g(n.range_m);
    out += ',';
    out += n.data_type;
    out += ',';
    out += assoc_state_name(n.assoc_state);
    out += ',';
    out += n.ch_name.value_or("");
    out += ',';
    out += std::to_string(n.members.size());
    out += ',';
    out += std::to_string(n.directory.size());
    out += ',';
    out += std::to_string(n.store.size());
    out += ',';
    out += std::to_string(n.cs.size());
    out += ',';
    out += std::to_string(n.pit.size());
    out += ',';
    out += std::to_string(n.fib.size());
    out += ',';
    out += fmt_g(split.interest_j);
    out += ',';
    out += fmt_g(split.data_j);
    out += '\n';
  }
  return out;
}

std::string Sim::tables_csv() const {
  std::string out = "node,table,key,detail1,detail2\n";
  for (const Node& n : nodes_) {
    for (const auto& [name, entry] : n.pit.entries())
      out += n.id + ",pit," + name + "," + fmt_g(entry.expiry) + "," +
             std::to_string(entry.faces.size()) + "\n";
    for (const auto& [prefix, hops] : n.fib.routes()) {
      std::string joined;
      for (const auto& h : hops) {
        if (!joined.empty()) joined += '|';
        joined += h;
      }
      out += n.id + ",fib," + prefix + "," + joined + ",\n";
    }
    for (const auto& [name, entry] : n.cs.entries())
      out += n.id + ",cs," + name + "," + std::to_string(entry.payload.size()) + "," +
             fmt_g(entry.stored_at) + "\n";
    for (const auto& [cn_id, rec] : n.members.records())
      out += n.id + ",members," + cn_id + "," + rec.ch_name + "," + fmt_g(rec.joined_at) + "\n";
    for (const auto& [cn_id, rec] : n.directory.records())
      out += n.id + ",directory," + cn_id + "," + rec.ch_name + "," + fmt_g(rec.joined_at) +
             "\n";
  }
  return out;
}

RunOutput run(const RunConfig& cfg) {
  Sim sim(cfg);
  sim.install_workload();
  sim.run_until(cfg.duration_s);
  return sim.finish();
}

void write_outputs(const RunOutput& out, const RunConfig& cfg, const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  auto write = [&](const std::string& file, const std::string& text) {
    std::ofstream f(dir + "/" + file, std::ios::binary);
    if (!f.good()) throw Error(Errc::BadConfig, "cannot write " + dir + "/" + file);
    f << text;
  };

  std::string events;
  events += kEventsCsvHeader;
  events += '\n';
  for (const LogRow& row : out.events) {
    events += log_row_csv(row);
    events += '\n';
  }
  write("events.csv", events);

  std::string proto;
  proto += kProtoCsvHeader;
  proto += '\n';
  for (const ProtoRow& row : out.proto) {
    proto += proto_row_csv(row);
    proto += '\n';
  }
  write("proto.csv", proto);

  write("metrics.csv", metrics_csv_header() + "\n" + metrics_csv_row(out.metrics) + "\n");
  write("nodes.csv", out.nodes_csv);
  write("tables.csv", out.tables_csv);
  write("config.cfg", render_config(cfg));
  for (const auto& [t, dump] : out.checkpoint_dumps) {
    char name[64];
    std::snprintf(name, sizeof(name), "nodes_t%.0f.csv", t);
    write(name, dump);
  }
}

} // namespace ccic
