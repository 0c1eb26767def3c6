#include <doctest.h>

#include <random>

#include "ccic/tables.hpp"

using namespace ccic;

namespace {
Name nm(const char* s) { return parse_name(s); }
}

TEST_SUITE_BEGIN("tables");

TEST_CASE("pit insert, aggregate and duplicate detection") {
  Pit pit(4.0);
  CHECK(pit.insert_or_aggregate(nm("a/b"), 1, "f3", 0.0) == PitInsert::New);
  CHECK(pit.insert_or_aggregate(nm("a/b"), 2, "f7", 0.1) == PitInsert::Aggregated);
  CHECK(pit.insert_or_aggregate(nm("a/b"), 1, "f9", 0.2) == PitInsert::DuplicateNonce);
  CHECK(pit.size() == 1);

  auto faces = pit.consume(nm("a/b"), 0.5);
  CHECK(faces == std::set<std::string>{"f3", "f7"});
  CHECK(pit.size() == 0);
  CHECK(pit.consume(nm("a/b"), 0.6).empty());
}

TEST_CASE("pit entries expire at the configured lifetime") {
  Pit pit(4.0);
  pit.insert_or_aggregate(nm("a/b"), 1, "f3", 0.0);
  CHECK(pit.contains(nm("a/b"), 3.99));
  CHECK(pit.consume(nm("a/b"), 4.01).empty()); // just past the 4 s timer
  pit.insert_or_aggregate(nm("c/d"), 2, "f1", 0.0);
  // An expired entry acts as absent for aggregation too.
  CHECK(pit.insert_or_aggregate(nm("c/d"), 2, "f1", 4.5) == PitInsert::New);
}

TEST_CASE("pit sweep removes everything past expiry") {
  std::mt19937_64 rng(42);
  Pit pit(4.0);
  for (int i = 0; i < 50; ++i)
    pit.insert_or_aggregate(nm(("n/" + std::to_string(i)).c_str()),
                            static_cast<std::uint32_t>(i), "f", (rng() % 100) / 10.0);
  double t = 8.0;
  pit.sweep(t);
  for (const auto& [key, entry] : pit.entries()) CHECK(entry.expiry > t);
}

TEST_CASE("fib routes on the first component") {
  Fib fib;
  fib.add_route("O3", "CH-O");
  fib.add_route("O3", "CH-P");
  CHECK(fib.next_hops(nm("O3/CH-O/1.0-2.0/temperature/77")) ==
        std::set<std::string>{"CH-O", "CH-P"});
  CHECK(fib.next_hops(nm("Z9/x")).empty());
  CHECK(fib.has_route("O3"));
  CHECK_FALSE(fib.has_route("Z9"));
}

TEST_CASE("content store: exact match, fifo eviction, capacity") {
  ContentStore cs(2);
  cs.insert(nm("a/1"), {1}, 0.0);
  cs.insert(nm("a/2"), {2}, 1.0);
  auto hit = cs.lookup(nm("a/1"));
  REQUIRE(hit.has_value());
  CHECK(*hit == std::vector<std::uint8_t>{1});
  CHECK_FALSE(cs.lookup(nm("a/3")).has_value()); // different time component

  cs.insert(nm("a/3"), {3}, 2.0); // oldest entry leaves
  CHECK(cs.size() == 2);
  CHECK_FALSE(cs.lookup(nm("a/1")).has_value());
  CHECK(cs.lookup(nm("a/2")).has_value());
  CHECK(cs.lookup(nm("a/3")).has_value());

  ContentStore none(0); // child nodes cache nothing
  none.insert(nm("a/1"), {1}, 0.0);
  CHECK(none.size() == 0);
  CHECK_FALSE(none.lookup(nm("a/1")).has_value());
}

TEST_CASE("property: content store never exceeds capacity") {
  std::mt19937_64 rng(7);
  ContentStore cs(8);
  for (int i = 0; i < 200; ++i) {
    cs.insert(nm(("k/" + std::to_string(rng() % 40)).c_str()), {static_cast<std::uint8_t>(i)},
              i * 0.1);
    CHECK(cs.size() <= 8);
  }
}

TEST_CASE("members collection keyed by cn id") {
  MembersCollection members;
  MemberRecord rec{"O3", "CH-O", GeoCoord{1, 2}, "temperature", 10.0};
  CHECK(members.upsert(rec) == MemberUpsert::Inserted);
  auto found = members.lookup("O3");
  REQUIRE(found.has_value());
  CHECK(*found == rec);

  // Handover: same cn id, different CH replaces the record.
  MemberRecord moved = rec;
  moved.ch_name = "CH-P";
  moved.joined_at = 20.0;
  CHECK(members.upsert(moved) == MemberUpsert::Replaced);
  CHECK(members.lookup("O3")->ch_name == "CH-P");
  CHECK(members.size() == 1);

  // Re-association with the same CH is not a handover.
  MemberRecord again = moved;
  again.joined_at = 21.0;
  CHECK(members.upsert(again) == MemberUpsert::Unchanged);

  CHECK(members.remove("O3"));
  CHECK_FALSE(members.remove("O3")); // removing an absent id is a no-op
  CHECK(members.size() == 0);
}

TEST_SUITE_END();
