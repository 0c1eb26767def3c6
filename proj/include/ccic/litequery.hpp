#ifndef CCIC_LITEQUERY_HPP
#define CCIC_LITEQUERY_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ccic/name.hpp"

namespace ccic {

enum class Comparator { Gt, Lt, Lte, Eq, Neq, In, Bet };
enum class QueryField { Nid, Date, Time, Val };
enum class SortOrder { Asc, Dsc };
enum class Aggregate { Count, Avg, Min, Max, Sel };

const char* comparator_keyword(Comparator c);
const char* field_keyword(QueryField f);

// Parsed lite-query: "<task>.<field>_<cmp>_<op1>[_and_<op2>][_limit_<k>]
// [_asc|_dsc][_count|_avg|_min|_max|_sel]" with "_" separating components.
struct LiteQuery {
  std::string task;  // at most 3 characters
  QueryField field = QueryField::Val;
  Comparator comparator = Comparator::Eq;
  double operand1 = 0.0;
  std::optional<double> operand2;  // bet only
  std::optional<std::size_t> limit;
  std::optional<SortOrder> order;
  std::optional<Aggregate> aggregate;

  bool operator==(const LiteQuery&) const = default;
};

// One sensed record as held in a node's sample store.
struct Sample {
  std::string nid;
  std::string task;
  std::uint64_t epoch_time = 0;
  double value = 0.0;
  GeoCoord location;

  bool operator==(const Sample&) const = default;
};

struct QueryResult {
  enum class Kind { Rows, Scalar, Boolean };
  Kind kind = Kind::Rows;
  std::vector<Sample> rows;
  std::optional<double> scalar;  // empty for an aggregate over zero matches
  bool boolean = false;
};

LiteQuery parse_query(std::string_view text);
std::string render_query(const LiteQuery& q);
QueryResult eval_query(const LiteQuery& q, const std::vector<Sample>& store);

// Serializes as many result rows as fit the payload budget, in prefix order.
// Scalars and booleans always fit. Returns the payload and how many content
// objects were packed (feeds query-satisfaction accounting).
struct PackedResult {
  std::vector<std::uint8_t> payload;
  std::size_t object_count = 0;
};

PackedResult pack_result(const QueryResult& r, std::size_t budget_bytes);

} // namespace ccic

#endif
