#include "ccic/litequery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "ccic/wire.hpp"

namespace ccic {

namespace {

constexpr std::size_t kMaxTaskChars = 3;
constexpr std::size_t kMaxFieldBytes = 4;

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t begin = 0;
  while (begin <= s.size()) {
    std::size_t end = s.find(sep, begin);
    if (end == std::string_view::npos) end = s.size();
    out.push_back(s.substr(begin, end - begin));
    if (end == s.size()) break;
    begin = end + 1;
  }
  return out;
}

std::optional<Comparator> comparator_from(std::string_view s) {
  if (s == "gt") return Comparator::Gt;
  if (s == "lt") return Comparator::Lt;
  if (s == "lte") return Comparator::Lte;
  if (s == "eq") return Comparator::Eq;
  if (s == "neq") return Comparator::Neq;
  if (s == "in") return Comparator::In;
  if (s == "bet") return Comparator::Bet;
  return std::nullopt;
}

std::optional<QueryField> field_from(std::string_view s) {
  if (s == "nid") return QueryField::Nid;
  if (s == "date") return QueryField::Date;
  if (s == "time") return QueryField::Time;
  if (s == "val") return QueryField::Val;
  return std::nullopt;
}

double parse_number(std::string_view s) {
  if (s.empty()) throw Error(Errc::MissingOperand, "missing operand");
  char* end = nullptr;
  std::string buf(s);
  double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || !std::isfinite(v))
    throw Error(Errc::MissingOperand, "operand '" + buf + "' is not a number");
  return v;
}

std::string render_number(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

// Sort keys and aggregates use the compared field; nid is textual, so those
// operations fall back to the sample value.
double field_value(const Sample& s, QueryField f) {
  switch (f) {
    case QueryField::Val:
    case QueryField::Nid: return s.value;
    case QueryField::Date:
    case QueryField::Time: return static_cast<double>(s.epoch_time);
  }
  return 0.0;
}

bool matches(const Sample& s, const LiteQuery& q) {
  if (s.task != q.task) return false;
  if (q.field == QueryField::Nid) {
    bool eq = s.nid == render_number(q.operand1);
    return q.comparator == Comparator::Eq ? eq : !eq;
  }
  double v = field_value(s, q.field);
  switch (q.comparator) {
    case Comparator::Gt: return v > q.operand1;
    case Comparator::Lt: return v < q.operand1;
    case Comparator::Lte: return v <= q.operand1;
    case Comparator::Eq: return v == q.operand1;
    case Comparator::Neq: return v != q.operand1;
    case Comparator::In: return v == q.operand1;
    case Comparator::Bet: return v >= q.operand1 && v <= *q.operand2;
  }
  return false;
}

} // namespace

const char* comparator_keyword(Comparator c) {
  switch (c) {
    case Comparator::Gt: return "gt";
    case Comparator::Lt: return "lt";
    case Comparator::Lte: return "lte";
    case Comparator::Eq: return "eq";
    case Comparator::Neq: return "neq";
    case Comparator::In: return "in";
    case Comparator::Bet: return "bet";
  }
  return "eq";
}

const char* field_keyword(QueryField f) {
  switch (f) {
    case QueryField::Nid: return "nid";
    case QueryField::Date: return "date";
    case QueryField::Time: return "time";
    case QueryField::Val: return "val";
  }
  return "val";
}

LiteQuery parse_query(std::string_view text) {
  if (text.empty()) throw Error(Errc::MissingOperand, "empty query");
  auto tokens = split(text, '_');
  std::size_t pos = 0;

  // task.field
  auto head = split(tokens[pos++], '.');
  if (head.size() != 2)
    throw Error(Errc::BadTaskLength, "query must start with task.field");
  if (head[0].empty() || head[0].size() > kMaxTaskChars)
    throw Error(Errc::BadTaskLength, "task '" + std::string(head[0]) + "' must be 1-3 characters");
  if (head[1].empty() || head[1].size() > kMaxFieldBytes)
    throw Error(Errc::BadFieldLength, "field '" + std::string(head[1]) + "' must be 1-4 bytes");
  auto field = field_from(head[1]);
  if (!field)
    throw Error(Errc::UnknownKeyword, "unknown field '" + std::string(head[1]) + "'");

  LiteQuery q;
  q.task = std::string(head[0]);
  q.field = *field;

  if (pos >= tokens.size())
    throw Error(Errc::UnknownComparator, "query has no comparator");
  auto cmp = comparator_from(tokens[pos]);
  if (!cmp)
    throw Error(Errc::UnknownComparator, "unknown comparator '" + std::string(tokens[pos]) + "'");
  q.comparator = *cmp;
  ++pos;

  if (q.field == QueryField::Nid && q.comparator != Comparator::Eq &&
      q.comparator != Comparator::Neq)
    throw Error(Errc::UnknownComparator,
                std::string("comparator '") + comparator_keyword(q.comparator) +
                    "' does not apply to field 'nid'");

  if (pos >= tokens.size()) throw Error(Errc::MissingOperand, "comparator needs an operand");
  q.operand1 = parse_number(tokens[pos++]);

  if (q.comparator == Comparator::Bet) {
    if (pos >= tokens.size() || tokens[pos] != "and")
      throw Error(Errc::MissingOperand, "'bet' needs '<low>_and_<high>'");
    ++pos;
    if (pos >= tokens.size()) throw Error(Errc::MissingOperand, "'bet' is missing its second operand");
    q.operand2 = parse_number(tokens[pos++]);
  }

  while (pos < tokens.size()) {
    std::string_view t = tokens[pos];
    if (t == "limit") {
      if (q.limit) throw Error(Errc::ConflictingModifiers, "duplicate limit");
      ++pos;
      if (pos >= tokens.size()) throw Error(Errc::MissingOperand, "'limit' needs a count");
      double v = parse_number(tokens[pos]);
      if (v < 1.0 || v != std::floor(v))
        throw Error(Errc::MissingOperand, "'limit' needs a positive integer");
      q.limit = static_cast<std::size_t>(v);
    } else if (t == "asc" || t == "dsc" || t == "desc") {
      if (q.order) throw Error(Errc::ConflictingModifiers, "duplicate sort order");
      q.order = t == "asc" ? SortOrder::Asc : SortOrder::Dsc;
    } else if (t == "count" || t == "avg" || t == "min" || t == "max" || t == "sel") {
      if (q.aggregate) throw Error(Errc::ConflictingModifiers, "duplicate aggregate");
      if (t == "count") q.aggregate = Aggregate::Count;
      else if (t == "avg") q.aggregate = Aggregate::Avg;
      else if (t == "min") q.aggregate = Aggregate::Min;
      else if (t == "max") q.aggregate = Aggregate::Max;
      else q.aggregate = Aggregate::Sel;
    } else {
      throw Error(Errc::UnknownKeyword, "unknown keyword '" + std::string(t) + "'");
    }
    ++pos;
  }
  return q;
}

std::string render_query(const LiteQuery& q) {
  std::string out = q.task;
  out += '.';
  out += field_keyword(q.field);
  out += '_';
  out += comparator_keyword(q.comparator);
  out += '_';
  out += render_number(q.operand1);
  if (q.comparator == Comparator::Bet) {
    out += "_and_";
    out += render_number(q.operand2.value_or(0.0));
  }
  if (q.limit) out += "_limit_" + std::to_string(*q.limit);
  if (q.order) out += *q.order == SortOrder::Asc ? "_asc" : "_dsc";
  if (q.aggregate) {
    switch (*q.aggregate) {
      case Aggregate::Count: out += "_count"; break;
      case Aggregate::Avg: out += "_avg"; break;
      case Aggregate::Min: out += "_min"; break;
      case Aggregate::Max: out += "_max"; break;
      case Aggregate::Sel: out += "_sel"; break;
    }
  }
  return out;
}

QueryResult eval_query(const LiteQuery& q, const std::vector<Sample>& store) {
  std::vector<Sample> rows;
  for (const auto& s : store)
    if (matches(s, q)) rows.push_back(s);

  if (q.comparator == Comparator::In) {
    QueryResult r;
    r.kind = QueryResult::Kind::Boolean;
    r.boolean = !rows.empty();
    return r;
  }

  if (q.order) {
    const bool asc = *q.order == SortOrder::Asc;
    QueryField f = q.field;
    std::stable_sort(rows.begin(), rows.end(), [&](const Sample& a, const Sample& b) {
      double ka = field_value(a, f);
      double kb = field_value(b, f);
      if (ka != kb) return asc ? ka < kb : ka > kb;
      if (a.epoch_time != b.epoch_time) return a.epoch_time < b.epoch_time;
      return a.nid < b.nid;
    });
  }
  if (q.limit && rows.size() > *q.limit) rows.resize(*q.limit);

  QueryResult r;
  if (!q.aggregate || *q.aggregate == Aggregate::Sel) {
    r.kind = QueryResult::Kind::Rows;
    r.rows = std::move(rows);
    return r;
  }
  r.kind = QueryResult::Kind::Scalar;
  if (*q.aggregate == Aggregate::Count) {
    r.scalar = static_cast<double>(rows.size());
    return r;
  }
  if (rows.empty()) return r; // empty scalar: aggregate over zero matches
  double acc = field_value(rows.front(), q.field);
  if (*q.aggregate == Aggregate::Avg) {
    acc = 0.0;
    for (const auto& s : rows) acc += field_value(s, q.field);
    acc /= static_cast<double>(rows.size());
  } else {
    for (const auto& s : rows) {
      double v = field_value(s, q.field);
      acc = *q.aggregate == Aggregate::Min ? std::min(acc, v) : std::max(acc, v);
    }
  }
  r.scalar = acc;
  return r;
}

PackedResult pack_result(const QueryResult& r, std::size_t budget_bytes) {
  PackedResult out;
  switch (r.kind) {
    case QueryResult::Kind::Boolean:
      out.payload.push_back(wire::kResultBoolean);
      out.payload.push_back(r.boolean ? 1 : 0);
      out.object_count = 1;
      return out;
    case QueryResult::Kind::Scalar:
      if (!r.scalar) {
        out.payload.push_back(wire::kResultEmptyScalar);
        return out;
      }
      out.payload.push_back(wire::kResultScalar);
      wire::append_f64(out.payload, *r.scalar);
      out.object_count = 1;
      return out;
    case QueryResult::Kind::Rows:
      break;
  }
  out.payload.push_back(wire::kResultRows);
  out.payload.push_back(0);
  std::size_t used = 2;
  for (const auto& row : r.rows) {
    std::size_t sz = wire::sample_row_size(row);
    if (used + sz > budget_bytes || out.object_count == 255) break;
    wire::append_sample_row(out.payload, row);
    used += sz;
    ++out.object_count;
  }
  out.payload[1] = static_cast<std::uint8_t>(out.object_count);
  return out;
}

} // namespace ccic
