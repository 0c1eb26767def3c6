#include "ccic/node.hpp"

#include <algorithm>
#include <cctype>

namespace ccic {

namespace {

Packet make_data(const Name& name, std::vector<std::uint8_t> payload, std::uint8_t hop) {
  Packet d;
  d.kind = PacketKind::Data;
  d.name = name;
  d.payload = std::move(payload);
  d.hop_limit = hop;
  return d;
}

std::string sync_key(const Packet& p) {
  return render_name(p.name) + "|" + std::to_string(p.nonce);
}

void send_assoc_interest(Node& n, NodeEnv& env) {
  ChAssocName name{n.chosen_ch, n.id, n.position, n.data_type, env.epoch_now()};
  Packet p;
  p.kind = PacketKind::Interest;
  p.name = name.to_name();
  p.nonce = env.next_nonce();
  p.hop_limit = n.hop_limit;
  env.proto("assoc_sent", n.chosen_ch, 0.0);
  env.send(p);
}

void arm_assoc_timer(Node& n, NodeEnv& env, std::uint64_t round);

void assoc_timeout(Node& n, NodeEnv& env, std::uint64_t round) {
  if (n.join_round != round || n.assoc_state != AssocState::Associating) return;
  if (n.assoc_retries_left > 0) {
    --n.assoc_retries_left;
    env.proto("assoc_retx", n.chosen_ch, 0.0);
    send_assoc_interest(n, env);
    arm_assoc_timer(n, env, round);
    return;
  }
  env.proto("assoc_failed", n.chosen_ch, 0.0);
  n.assoc_state = AssocState::Unassociated;
  start_join(n, env);
}

void arm_assoc_timer(Node& n, NodeEnv& env, std::uint64_t round) {
  env.schedule(n.timers.assoc_timeout_s,
               [&n, &env, round]() { assoc_timeout(n, env, round); });
}

void selection_fire(Node& n, NodeEnv& env, std::uint64_t round) {
  if (n.join_round != round || n.assoc_state != AssocState::Selecting) return;
  if (n.candidates.empty()) {
    env.proto("join_no_candidates", "", 0.0);
    n.assoc_state = AssocState::Unassociated;
    double backoff = n.timers.join_backoff_s + env.jitter(n.timers.join_backoff_s);
    env.schedule(backoff, [&n, &env]() {
      if (n.assoc_state == AssocState::Unassociated) start_join(n, env);
    });
    return;
  }
  const ChCandidate& best = cn_select_ch(n.candidates);
  n.selection_done_at = env.now();
  n.parent_sink_distance = best.sink_distance;
  n.parent_cluster_type = best.cluster_type;
  env.proto("selection_done", best.ch_name, static_cast<double>(n.candidates.size()));
  cn_associate(n, env, best.ch_name);
}

void cn_complete_join(Node& n, NodeEnv& env, const Packet& data) {
  auto assoc = ChAssocName::from_name(data.name);
  if (!assoc) return;
  if (n.role != Role::ChildNode || n.assoc_state != AssocState::Associating) return;
  if (assoc->node_id != n.id || assoc->ch_unique_name != n.chosen_ch) return;
  n.ch_name = n.chosen_ch;
  n.assoc_state = AssocState::Associated;
  n.joined_once = true;
  // The join is exactly its two phases, with no slack between the selection
  // decision and the association request.
  n.last_join.t_selection = n.selection_done_at - n.join_started_at;
  n.last_join.t_association = env.now() - n.selection_done_at;
  n.last_join.t_join = n.last_join.t_selection + n.last_join.t_association;
  env.proto("join_t_selection", n.chosen_ch, n.last_join.t_selection);
  env.proto("join_t_association", n.chosen_ch, n.last_join.t_association);
  env.proto("join_complete", n.chosen_ch, n.last_join.t_join);
}

void arm_push_timer(Node& n, NodeEnv& env, Name name, Sample sample, unsigned retries_left);

void push_timeout(Node& n, NodeEnv& env, const Name& name, const Sample& sample,
                  unsigned retries_left) {
  if (!n.pit.contains(name, env.now())) return; // acknowledged
  if (retries_left == 0) {
    n.pit.consume(name, env.now());
    env.proto("push_timeout", render_name(name), 0.0);
    return;
  }
  Packet p;
  p.kind = PacketKind::Interest;
  p.name = name;
  p.nonce = env.next_nonce();
  p.hop_limit = n.hop_limit;
  wire::append_sample_row(p.payload, sample);
  n.pit.insert_or_aggregate(name, p.nonce, std::string(kAppFace), env.now());
  env.proto("push_retx", render_name(name), 0.0);
  env.send(p);
  arm_push_timer(n, env, name, sample, retries_left - 1);
}

void arm_push_timer(Node& n, NodeEnv& env, Name name, Sample sample, unsigned retries_left) {
  env.schedule(n.timers.assoc_timeout_s,
               [&n, &env, name = std::move(name), sample = std::move(sample), retries_left]() {
                 push_timeout(n, env, name, sample, retries_left);
               });
}

// CH serving a ChContent Interest addressed to it: push storage, lite-query
// evaluation, or a one-hop fetch from the named child.
void ch_serve_dispatch(Node& n, NodeEnv& env, const Packet& p, const std::string& from) {
  auto chn = ChName::from_name(p.name);
  if (!chn) return;

  // Dedupe window: one response per (name, nonce) within the PIT lifetime.
  PitInsert res = n.pit.insert_or_aggregate(p.name, p.nonce, from, env.now());
  if (res == PitInsert::DuplicateNonce) return;

  if (!p.payload.empty()) {
    // Push Interest: store the attached samples and acknowledge.
    wire::RowReader reader{p.payload};
    std::size_t stored = 0;
    while (!reader.done()) {
      store_upsert(n.store, reader.next());
      ++stored;
    }
    env.proto("push_stored", render_name(p.name), static_cast<double>(stored));
    env.send(make_data(p.name, {}, p.hop_limit));
    return;
  }

  if (std::holds_alternative<QueryTail>(chn->tail)) {
    // Results are cached under the full query name, so repeats are served
    // from the content store.
    if (auto cached = n.cs.lookup(p.name)) {
      env.send(make_data(p.name, *cached, p.hop_limit));
      return;
    }
    if (res != PitInsert::New) return; // already answering this one
    auto serve = ch_serve_query(n, p);
    if (!serve) return;
    env.proto("query_answered", render_name(p.name), static_cast<double>(serve->objects));
    n.cs.insert(p.name, serve->data.payload, env.now());
    Packet reply = serve->data;
    env.schedule(n.timers.processing_delay_s, [&env, reply]() { env.send(reply); });
    return;
  }

  // CnName tail: return cached content or fetch one hop from the child.
  if (auto cached = n.cs.lookup(p.name)) {
    env.send(make_data(p.name, *cached, p.hop_limit));
    return;
  }
  if (res != PitInsert::New) return; // fetch already in flight
  const CnName& target = std::get<CnName>(chn->tail);
  Name inner = target.to_name();
  n.pending_rewrites[render_name(inner)] = p.name;
  Packet fetch;
  fetch.kind = PacketKind::Interest;
  fetch.name = inner;
  fetch.nonce = env.next_nonce();
  fetch.hop_limit = p.hop_limit > 0 ? static_cast<std::uint8_t>(p.hop_limit - 1) : 0;
  env.send(fetch);
}

void handle_interest(Node& n, NodeEnv& env, const Packet& p, const std::string& from) {
  switch (classify(p.name)) {
    case NamespaceKind::ChInfo: {
      if (n.role != Role::ClusterHead) return;
      n.pit.sweep(env.now());
      if (auto reply = ch_handle_info(n, p)) {
        // Several CHs answer the same request: spread the replies out.
        Packet data = *reply;
        env.schedule(env.jitter(n.timers.reply_jitter_max_s),
                     [&env, data]() { env.send(data); });
      }
      return;
    }
    case NamespaceKind::ChAssociation:
      if (n.role == Role::ClusterHead) ch_handle_assoc(n, env, p);
      return;
    case NamespaceKind::Sync:
      handle_sync(n, env, p, from);
      return;
    case NamespaceKind::CnContent: {
      if (n.role == Role::ChildNode) {
        if (p.name.at(0) != n.id) return; // not mine: ignore
        if (n.pit.insert_or_aggregate(p.name, p.nonce, from, env.now()) ==
            PitInsert::DuplicateNonce)
          return;
        if (auto reply = cn_serve(n, p)) {
          env.proto("cn_served", render_name(p.name), 0.0);
          Packet data = *reply;
          env.schedule(n.timers.processing_delay_s, [&env, data]() { env.send(data); });
        }
        return;
      }
      // Cluster head: owner is the second component.
      const std::string& owner = p.name.at(1);
      if (owner == n.unique_name) {
        if (auto cached = n.cs.lookup(p.name)) {
          env.send(make_data(p.name, *cached, p.hop_limit));
          return;
        }
        if (n.pit.insert_or_aggregate(p.name, p.nonce, from, env.now()) == PitInsert::New &&
            p.hop_limit > 1) {
          Packet re = p;
          re.hop_limit = static_cast<std::uint8_t>(p.hop_limit - 1);
          env.send(re);
        }
        return;
      }
      // Foreign cluster: relay only for our own members, over a known route.
      if (n.members.lookup(from) && p.hop_limit > 1 &&
          (n.fib.has_route(p.name.at(0)) || n.fib.has_route(owner))) {
        if (n.pit.insert_or_aggregate(p.name, p.nonce, from, env.now()) == PitInsert::New) {
          Packet re = p;
          re.hop_limit = static_cast<std::uint8_t>(p.hop_limit - 1);
          env.send(re);
        }
      }
      return;
    }
    case NamespaceKind::ChContent: {
      if (n.role != Role::ClusterHead) return; // children cannot serve these
      const std::string& target = p.name.at(0);
      if (target == n.unique_name) {
        ch_serve_dispatch(n, env, p, from);
        return;
      }
      if (n.members.lookup(from) && p.hop_limit > 1 && n.fib.has_route(target)) {
        if (n.pit.insert_or_aggregate(p.name, p.nonce, from, env.now()) == PitInsert::New) {
          Packet re = p;
          re.hop_limit = static_cast<std::uint8_t>(p.hop_limit - 1);
          env.send(re);
        }
      }
      return;
    }
    case NamespaceKind::Other:
      return; // vanilla-shaped names are not ours to forward
  }
}

void handle_data(Node& n, NodeEnv& env, const Packet& p) {
  switch (classify(p.name)) {
    case NamespaceKind::ChInfo: {
      // Candidate reply for a selecting child.
      if (n.role != Role::ChildNode || n.assoc_state != AssocState::Selecting) return;
      if (p.name.at(1) != n.id) return;
      wire::ChInfoPayload info;
      try {
        info = wire::decode_ch_info(p.payload);
      } catch (const Error&) {
        return;
      }
      for (const auto& c : n.candidates)
        if (c.ch_name == info.ch_unique_name) return;
      n.candidates.push_back(ChCandidate{info.ch_unique_name, info.sink_distance,
                                         info.member_count, info.load, info.cluster_type});
      return;
    }
    case NamespaceKind::ChAssociation:
      cn_complete_join(n, env, p);
      return;
    case NamespaceKind::Sync:
      return; // sync acknowledgment: nothing to update
    default:
      break;
  }

  // Content Data. A CH first checks whether it fetched this on behalf of an
  // outer Interest and has to rewrite the name back.
  if (n.role == Role::ClusterHead) {
    auto rw = n.pending_rewrites.find(render_name(p.name));
    if (rw != n.pending_rewrites.end()) {
      Name outer = rw->second;
      n.pending_rewrites.erase(rw);
      n.cs.insert(p.name, p.payload, env.now());
      n.cs.insert(outer, p.payload, env.now());
      auto faces = n.pit.consume(outer, env.now());
      if (faces.empty()) return;
      Packet re = make_data(outer, p.payload, p.hop_limit);
      bool app = faces.count(std::string(kAppFace)) > 0;
      if (faces.size() > (app ? 1u : 0u)) env.send(re);
      if (app) env.deliver_to_app(re);
      return;
    }
  }

  auto faces = n.pit.consume(p.name, env.now());
  if (faces.empty()) return;
  bool app = faces.count(std::string(kAppFace)) > 0;
  if (n.role == Role::ClusterHead) {
    n.cs.insert(p.name, p.payload, env.now());
    if (faces.size() > (app ? 1u : 0u)) {
      Packet re = p;
      if (re.hop_limit > 0) --re.hop_limit;
      env.send(re);
    }
  }
  if (app) env.deliver_to_app(p);
}

} // namespace

const char* role_name(Role r) {
  return r == Role::ClusterHead ? "ch" : "cn";
}

const char* assoc_state_name(AssocState s) {
  switch (s) {
    case AssocState::Unassociated: return "unassociated";
    case AssocState::Selecting: return "selecting";
    case AssocState::Associating: return "associating";
    case AssocState::Associated: return "associated";
  }
  return "unassociated";
}

std::string Node::task_code() const {
  std::string code;
  for (char c : data_type) {
    if (code.size() == 3) break;
    code.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (code.empty()) code = "gen";
  return code;
}

void start_join(Node& n, NodeEnv& env) {
  if (n.role != Role::ChildNode)
    throw Error(Errc::RoleMismatch, "only child nodes join clusters");
  if (n.assoc_state == AssocState::Selecting || n.assoc_state == AssocState::Associating)
    return; // a join is already in progress
  n.assoc_state = AssocState::Selecting;
  n.candidates.clear();
  const std::uint64_t round = ++n.join_round;
  n.join_started_at = env.now();

  Packet p;
  p.kind = PacketKind::Interest;
  p.name = ChInfoName{n.id, n.position, n.data_type, env.epoch_now()}.to_name();
  p.nonce = env.next_nonce();
  p.hop_limit = n.hop_limit;
  env.proto("join_start", render_name(p.name), 0.0);
  env.send(p);
  env.schedule(n.timers.selection_window_s,
               [&n, &env, round]() { selection_fire(n, env, round); });
}

const ChCandidate& cn_select_ch(const std::vector<ChCandidate>& candidates) {
  if (candidates.empty())
    throw Error(Errc::NoCandidates, "no CH replied within the selection window");
  const ChCandidate* best = &candidates.front();
  for (const auto& c : candidates) {
    if (c.member_count != best->member_count) {
      if (c.member_count < best->member_count) best = &c;
    } else if (c.sink_distance != best->sink_distance) {
      if (c.sink_distance < best->sink_distance) best = &c;
    } else if (c.ch_name < best->ch_name) {
      best = &c;
    }
  }
  return *best;
}

void cn_associate(Node& n, NodeEnv& env, const std::string& ch_unique_name) {
  n.assoc_state = AssocState::Associating;
  n.chosen_ch = ch_unique_name;
  n.assoc_retries_left = n.timers.assoc_retries;
  send_assoc_interest(n, env);
  arm_assoc_timer(n, env, n.join_round);
}

std::size_t ch_workload(const Node& ch) {
  // Requests pending on behalf of others; the CH's own background fetches
  // (app-faced entries) are not load it must decline joiners for.
  std::size_t count = 0;
  for (const auto& [key, entry] : ch.pit.entries()) {
    for (const auto& face : entry.faces) {
      if (face != kAppFace) {
        ++count;
        break;
      }
    }
  }
  return count;
}

std::optional<Packet> ch_handle_info(Node& ch, const Packet& interest) {
  if (ch.role != Role::ClusterHead) return std::nullopt;
  auto info = ChInfoName::from_name(interest.name);
  if (!info) return std::nullopt;
  const std::size_t load = ch_workload(ch);
  if (load >= ch.workload_threshold) return std::nullopt; // too busy to adopt
  if (ch.cluster_type != kHeterogeneousCluster && info->data_type != ch.cluster_type)
    return std::nullopt; // typed cluster: only matching children
  wire::ChInfoPayload payload;
  payload.ch_unique_name = ch.unique_name;
  payload.sink_distance = static_cast<std::uint8_t>(ch.sink_distance);
  payload.member_count = static_cast<std::uint16_t>(ch.members.size());
  payload.load = static_cast<std::uint16_t>(load);
  payload.cluster_type = ch.cluster_type;
  return make_data(interest.name, wire::encode_ch_info(payload), interest.hop_limit);
}

void ch_handle_assoc(Node& ch, NodeEnv& env, const Packet& interest) {
  if (ch.role != Role::ClusterHead) return;
  auto assoc = ChAssocName::from_name(interest.name);
  if (!assoc) return;

  if (assoc->ch_unique_name != ch.unique_name) {
    // Overheard an association with another CH: if that child was ours, it
    // has moved and leaves our members collection right away.
    if (auto mine = ch.members.lookup(assoc->node_id);
        mine && mine->ch_name == ch.unique_name) {
      ch.members.remove(assoc->node_id);
      env.proto("member_removed", assoc->node_id, 0.0);
    }
    return;
  }

  if (ch.cluster_type != kHeterogeneousCluster && assoc->data_type != ch.cluster_type)
    return;

  MemberRecord rec{assoc->node_id, ch.unique_name, assoc->location, assoc->data_type,
                   env.now()};
  MemberUpsert result = ch.members.upsert(rec);
  env.send(make_data(interest.name, {}, interest.hop_limit)); // acknowledgment
  if (result != MemberUpsert::Unchanged) {
    env.proto("member_added", assoc->node_id, static_cast<double>(ch.members.size()));
    ch_sync_new_member(ch, env, rec);
  }
}

void ch_sync_new_member(Node& ch, NodeEnv& env, const MemberRecord& rec) {
  SyncName sync{CnName{rec.cn_id, rec.ch_name, rec.location, rec.data_type, env.epoch_now()}};
  Packet p;
  p.kind = PacketKind::Interest;
  p.name = sync.to_name();
  p.nonce = env.next_nonce();
  p.hop_limit = 2; // origin broadcast plus one re-share ring
  ch.seen_sync.insert(sync_key(p));
  env.proto("sync_origin", render_name(p.name), 0.0);
  env.send(p);
}

void handle_sync(Node& n, NodeEnv& env, const Packet& p, const std::string& from) {
  auto sync = SyncName::from_name(p.name);
  if (!sync) return;
  const std::string key = sync_key(p);
  if (n.seen_sync.count(key)) return;

  const CnName& member = sync->member;
  MemberRecord rec{member.cn_id, member.ch_name, member.location, member.data_type,
                   env.now()};

  if (n.role == Role::ClusterHead) {
    // A re-shared copy (reduced hop limit) addresses the relaying CH's own
    // children; other CHs take the record from the origin broadcast only.
    if (p.hop_limit < 2) return;
    n.seen_sync.insert(key);
    // Mobility: a former child of ours now syncs under another CH.
    if (auto mine = n.members.lookup(member.cn_id);
        mine && member.ch_name != n.unique_name) {
      n.members.remove(member.cn_id);
      env.proto("member_removed", member.cn_id, 1.0);
    }
    n.directory.upsert(rec);
    n.fib.add_route(member.cn_id, member.ch_name);
    n.fib.add_route(member.ch_name, member.ch_name);
    env.proto("sync_recv", render_name(p.name), 1.0);
    Packet ack = make_data(p.name, {}, p.hop_limit);
    env.schedule(env.jitter(n.timers.reply_jitter_max_s), [&env, ack]() { env.send(ack); });
    if (n.sync_share) {
      Packet re = p;
      re.hop_limit = static_cast<std::uint8_t>(p.hop_limit - 1);
      env.schedule(env.jitter(n.timers.reply_jitter_max_s), [&env, re]() { env.send(re); });
    }
    return;
  }

  // Children only process syncs relayed by their own CH.
  if (n.assoc_state != AssocState::Associated || !n.ch_name || from != *n.ch_name) return;
  n.seen_sync.insert(key);
  bool stored = false;
  if (n.members_enabled) {
    n.directory.upsert(rec);
    stored = true;
  }
  env.proto("sync_recv", render_name(p.name), stored ? 1.0 : 0.0);
  Packet ack = make_data(p.name, {}, p.hop_limit);
  env.schedule(env.jitter(n.timers.reply_jitter_max_s), [&env, ack]() { env.send(ack); });
}

void cn_mobility_rejoin(Node& n, NodeEnv& env, GeoCoord new_position) {
  n.position = new_position;
  n.assoc_state = AssocState::Unassociated;
  n.ch_name.reset();
  env.proto("mobility_move", n.id, 0.0);
  start_join(n, env);
}

void cn_sense(Node& n, std::uint64_t epoch, double value) {
  n.store.push_back(Sample{n.id, n.task_code(), epoch, value, n.position});
}

std::optional<Packet> cn_serve(const Node& n, const Packet& interest) {
  auto cn = CnName::from_name(interest.name);
  if (!cn) return std::nullopt;
  if (cn->cn_id != n.id) return std::nullopt; // other nodes ignore the Interest
  if (!n.ch_name || cn->ch_name != *n.ch_name) return std::nullopt;
  if (n.store.empty()) return std::nullopt; // nothing sensed yet: stay silent

  const Sample* best = nullptr;
  if (!cn->epoch_time) {
    // Open name: the most recent sample.
    for (const Sample& s : n.store)
      if (!best || s.epoch_time >= best->epoch_time) best = &s;
  } else {
    // Closest to the requested epoch, ties toward the earlier sample.
    const std::uint64_t want = *cn->epoch_time;
    for (const Sample& s : n.store) {
      if (!best) {
        best = &s;
        continue;
      }
      auto dist = [want](std::uint64_t t) { return t > want ? t - want : want - t; };
      std::uint64_t d = dist(s.epoch_time);
      std::uint64_t b = dist(best->epoch_time);
      if (d < b || (d == b && s.epoch_time < best->epoch_time)) best = &s;
    }
  }
  std::vector<std::uint8_t> payload;
  wire::append_sample_row(payload, *best);
  return make_data(interest.name, std::move(payload), interest.hop_limit);
}

std::optional<QueryServe> ch_serve_query(const Node& ch, const Packet& interest) {
  auto chn = ChName::from_name(interest.name);
  if (!chn) return std::nullopt;
  if (chn->ch_prefix != ch.unique_name) return std::nullopt; // prefix mismatch
  const auto* tail = std::get_if<QueryTail>(&chn->tail);
  if (!tail) return std::nullopt;
  LiteQuery query;
  try {
    query = parse_query(tail->query);
  } catch (const Error&) {
    return std::nullopt; // malformed query in the name: stay silent
  }
  QueryResult result = eval_query(query, ch.store);
  const std::size_t budget = kMtuBytes - kDataHeaderBytes - interest.name.encoded_len();
  PackedResult packed = pack_result(result, budget);
  QueryServe serve;
  serve.data = make_data(interest.name, std::move(packed.payload), interest.hop_limit);
  serve.objects = packed.object_count;
  return serve;
}

void cn_push(Node& n, NodeEnv& env, const Sample& sample) {
  if (n.role != Role::ChildNode)
    throw Error(Errc::RoleMismatch, "push is a child-node operation");
  if (n.assoc_state != AssocState::Associated || !n.ch_name)
    throw Error(Errc::NotAssociated, "push requires an associated node");

  store_upsert(n.store, sample);
  ChName name{*n.ch_name, n.parent_sink_distance,
              n.parent_cluster_type.empty() ? std::string(kHeterogeneousCluster)
                                            : n.parent_cluster_type,
              CnName{n.id, *n.ch_name, n.position, n.data_type, sample.epoch_time}};
  Packet p;
  p.kind = PacketKind::Interest;
  p.name = name.to_name();
  p.nonce = env.next_nonce();
  p.hop_limit = n.hop_limit;
  wire::append_sample_row(p.payload, sample);
  n.pit.insert_or_aggregate(p.name, p.nonce, std::string(kAppFace), env.now());
  env.proto("push_sent", render_name(p.name), sample.value);
  env.send(p);
  arm_push_timer(n, env, p.name, sample, n.timers.assoc_retries);
}

void store_upsert(std::vector<Sample>& store, const Sample& s) {
  for (Sample& existing : store) {
    if (existing.nid == s.nid && existing.epoch_time == s.epoch_time) {
      existing = s;
      return;
    }
  }
  store.push_back(s);
}

void originate_interest(Node& n, NodeEnv& env, const Name& name, std::uint32_t nonce) {
  n.pit.insert_or_aggregate(name, nonce, std::string(kAppFace), env.now());
  Packet p;
  p.kind = PacketKind::Interest;
  p.name = name;
  p.nonce = nonce;
  p.hop_limit = n.hop_limit;
  env.send(p);
}

void ccic_handle_frame(Node& n, NodeEnv& env, const Packet& p, const std::string& from) {
  if (p.kind == PacketKind::Interest)
    handle_interest(n, env, p, from);
  else
    handle_data(n, env, p);
}

} // namespace ccic
