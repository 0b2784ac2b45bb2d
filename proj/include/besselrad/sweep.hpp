#pragma once
// Parameter sweeps over the bare two-Bessel integral: cartesian grids,
// evaluation in grid order (optionally on a thread pool), and round-trip
// exact CSV / JSON serialisation.

#include <algorithm>
#include <array>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include <json.hpp>

#include "besselrad/closedform.hpp"
#include "besselrad/oracle.hpp"

namespace besselrad::sweep {

inline constexpr std::array<std::string_view, 6> kParameters = {"lambda1", "lambda2", "power", "k1", "k2", "alpha"};
inline constexpr std::string_view kErrorMarker = "error";

/// Malformed sweep axis or table text.
class SweepError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Round-trip exact text for a double: 17 significant digits.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_real(std::string_view s) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw SweepError("not a number: '" + std::string(s) + "'");
  return v;
}

inline int parse_int(std::string_view s) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw SweepError("not an integer: '" + std::string(s) + "'");
  return v;
}

struct Axis {
  std::string parameter;
  double start = 0;
  double stop = 0;
  int count = 1;

  double at(int i) const { return count == 1 ? start : start + (stop - start) * i / (count - 1); }
};

/// Parses "<param>=<start>:<stop>:<count>".
inline Axis parse_axis(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) throw SweepError("sweep must look like param=start:stop:count");
  Axis axis;
  axis.parameter = std::string(text.substr(0, eq));
  if (std::find(kParameters.begin(), kParameters.end(), axis.parameter) == kParameters.end())
    throw SweepError("unknown sweep parameter '" + axis.parameter + "'");
  const std::string_view range = text.substr(eq + 1);
  const auto c1 = range.find(':');
  const auto c2 = c1 == std::string_view::npos ? c1 : range.find(':', c1 + 1);
  if (c2 == std::string_view::npos || range.find(':', c2 + 1) != std::string_view::npos)
    throw SweepError("sweep range must be start:stop:count");
  axis.start = parse_real(range.substr(0, c1));
  axis.stop = parse_real(range.substr(c1 + 1, c2 - c1 - 1));
  axis.count = parse_int(range.substr(c2 + 1));
  if (axis.count < 1) throw SweepError("sweep count must be at least 1");
  if (!std::isfinite(axis.start) || !std::isfinite(axis.stop)) throw SweepError("sweep bounds must be finite");
  return axis;
}

struct Point {
  int lambda1 = 0;
  int lambda2 = 0;
  int power = 1;
  double k1 = 1;
  double k2 = 1;
  double alpha = 1;
};

namespace detail {

inline int as_order(double v, const std::string& name) {
  const double r = std::round(v);
  if (std::abs(v - r) > 1e-9 || r < 0 || r > 1000) throw SweepError(name + " must take non-negative integer values");
  return static_cast<int>(r);
}

inline void assign(Point& p, const std::string& name, double v) {
  if (name == "lambda1") p.lambda1 = as_order(v, name);
  else if (name == "lambda2") p.lambda2 = as_order(v, name);
  else if (name == "power") p.power = as_order(v, name);
  else if (name == "k1") p.k1 = v;
  else if (name == "k2") p.k2 = v;
  else p.alpha = v;
}

}  // namespace detail

/// Cartesian product of the axes applied on top of `base`; the first axis
/// varies slowest.
inline std::vector<Point> expand(const Point& base, const std::vector<Axis>& axes) {
  for (std::size_t i = 0; i < axes.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      if (axes[i].parameter == axes[j].parameter) throw SweepError("parameter swept twice: " + axes[i].parameter);
  std::vector<Point> points;
  std::vector<int> index(axes.size(), 0);
  while (true) {
    Point p = base;
    for (std::size_t a = 0; a < axes.size(); ++a) detail::assign(p, axes[a].parameter, axes[a].at(index[a]));
    points.push_back(p);
    int a = static_cast<int>(axes.size()) - 1;
    while (a >= 0 && ++index[a] == axes[a].count) index[a--] = 0;
    if (a < 0) break;
  }
  return points;
}

struct Row {
  Point point;
  std::optional<double> value;  // empty: no closed form and no fallback
  std::string method;
  double condition = 0;
  std::optional<double> oracle_value;
  std::optional<double> rel_discrepancy;
};

struct Options {
  bool with_oracle = false;
  bool fallback_oracle = false;
  double rel_tol = 1e-8;
  unsigned threads = 0;  // 0: hardware concurrency
};

inline Row evaluate(const Point& p, const Options& opt) {
  closedform::IntegralSpec spec{p.lambda1, p.lambda2, p.k1, p.k2, p.alpha, p.power};
  spec.validate();
  Row row;
  row.point = p;
  row.condition = closedform::condition_number(p.k1, p.k2, p.alpha);
  auto oracle_value = [&] {
    return oracle::integrate_two_bessel(p.power, p.lambda1, p.lambda2, p.k1, p.k2, p.alpha, opt.rel_tol).value;
  };
  try {
    const auto r = closedform::bare_integral(spec);
    row.value = r.value;
    row.method = closedform::method_name(r.method);
  } catch (const closedform::FormulaInapplicable&) {
    row.method = closedform::method_name(closedform::Method::kNone);
    if (opt.fallback_oracle) row.value = oracle_value();
  }
  if (opt.with_oracle && row.value) {
    row.oracle_value = row.method == "NA" ? *row.value : oracle_value();
    row.rel_discrepancy = std::abs(*row.value - *row.oracle_value) / std::abs(*row.oracle_value);
  }
  return row;
}

class SweepTable {
 public:
  SweepTable() = default;
  explicit SweepTable(bool with_oracle) : with_oracle_(with_oracle) {}

  bool with_oracle() const { return with_oracle_; }
  const std::vector<Row>& rows() const { return rows_; }
  std::vector<Row>& rows() { return rows_; }

  std::vector<std::string> columns() const {
    std::vector<std::string> c = {"lambda1", "lambda2", "power", "k1",       "k2",
                                  "alpha",   "value",   "method", "condition"};
    if (with_oracle_) {
      c.push_back("oracle_value");
      c.push_back("rel_discrepancy");
    }
    return c;
  }

  std::string to_csv() const {
    std::string out;
    const auto cols = columns();
    for (std::size_t i = 0; i < cols.size(); ++i) out += (i ? "," : "") + cols[i];
    out += '\n';
    auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
    for (const auto& r : rows_) {
      const auto& p = r.point;
      out += std::to_string(p.lambda1) + ',' + std::to_string(p.lambda2) + ',' + std::to_string(p.power) + ',' +
             format_real(p.k1) + ',' + format_real(p.k2) + ',' + format_real(p.alpha) + ',' +
             (r.value ? format_real(*r.value) : std::string(kErrorMarker)) + ',' + r.method + ',' +
             format_real(r.condition);
      if (with_oracle_) out += ',' + opt(r.oracle_value) + ',' + opt(r.rel_discrepancy);
      out += '\n';
    }
    return out;
  }

  nlohmann::ordered_json to_json_value() const {
    auto rows = nlohmann::ordered_json::array();
    auto opt = [](const std::optional<double>& v) { return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(); };
    for (const auto& r : rows_) {
      nlohmann::ordered_json o;
      o["lambda1"] = r.point.lambda1;
      o["lambda2"] = r.point.lambda2;
      o["power"] = r.point.power;
      o["k1"] = r.point.k1;
      o["k2"] = r.point.k2;
      o["alpha"] = r.point.alpha;
      o["value"] = opt(r.value);
      o["method"] = r.method;
      o["condition"] = r.condition;
      if (with_oracle_) {
        o["oracle_value"] = opt(r.oracle_value);
        o["rel_discrepancy"] = opt(r.rel_discrepancy);
      }
      rows.push_back(std::move(o));
    }
    return rows;
  }

  std::string to_json() const { return to_json_value().dump(2) + "\n"; }

  static SweepTable from_csv(std::string_view text) {
    std::vector<std::string_view> lines;
    while (!text.empty()) {
      const auto nl = text.find('\n');
      if (nl == std::string_view::npos) throw SweepError("CSV must end with a newline");
      lines.push_back(text.substr(0, nl));
      text.remove_prefix(nl + 1);
    }
    if (lines.empty()) throw SweepError("CSV is empty");
    const auto header = split(lines[0]);
    SweepTable t(header.size() == 11);
    const auto cols = t.columns();
    if (header.size() != cols.size() || !std::equal(header.begin(), header.end(), cols.begin()))
      throw SweepError("unexpected CSV header");
    auto opt = [](std::string_view s) { return s.empty() ? std::optional<double>() : parse_real(s); };
    for (std::size_t i = 1; i < lines.size(); ++i) {
      const auto f = split(lines[i]);
      if (f.size() != cols.size()) throw SweepError("CSV row has the wrong arity");
      Row r;
      r.point = {parse_int(f[0]), parse_int(f[1]), parse_int(f[2]), parse_real(f[3]), parse_real(f[4]),
                 parse_real(f[5])};
      if (f[6] != kErrorMarker) r.value = parse_real(f[6]);
      r.method = std::string(f[7]);
      r.condition = parse_real(f[8]);
      if (t.with_oracle_) {
        r.oracle_value = opt(f[9]);
        r.rel_discrepancy = opt(f[10]);
      }
      t.rows_.push_back(std::move(r));
    }
    return t;
  }

  static SweepTable from_json(std::string_view text) {
    const auto j = nlohmann::ordered_json::parse(text);
    if (!j.is_array()) throw SweepError("JSON table must be an array");
    SweepTable t(!j.empty() && j.front().contains("oracle_value"));
    auto opt = [](const nlohmann::ordered_json& v) {
      return v.is_null() ? std::optional<double>() : v.get<double>();
    };
    for (const auto& o : j) {
      Row r;
      r.point = {o.at("lambda1").get<int>(), o.at("lambda2").get<int>(), o.at("power").get<int>(),
                 o.at("k1").get<double>(),   o.at("k2").get<double>(),   o.at("alpha").get<double>()};
      r.value = opt(o.at("value"));
      r.method = o.at("method").get<std::string>();
      r.condition = o.at("condition").get<double>();
      if (t.with_oracle_) {
        r.oracle_value = opt(o.at("oracle_value"));
        r.rel_discrepancy = opt(o.at("rel_discrepancy"));
      }
      t.rows_.push_back(std::move(r));
    }
    return t;
  }

 private:
  static std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> f;
    while (true) {
      const auto c = line.find(',');
      f.push_back(line.substr(0, c));
      if (c == std::string_view::npos) break;
      line.remove_prefix(c + 1);
    }
    return f;
  }

  bool with_oracle_ = false;
  std::vector<Row> rows_;
};

/// Evaluates every point; rows come back in input order whatever the
/// scheduling. The first exception thrown by any point is rethrown.
inline SweepTable run(const std::vector<Point>& points, const Options& opt) {
  SweepTable table(opt.with_oracle);
  auto& rows = table.rows();
  rows.resize(points.size());
  unsigned workers = opt.threads ? opt.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, points.size()));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::size_t failure_index = points.size();
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < points.size();) {
      try {
        rows[i] = evaluate(points[i], opt);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (i < failure_index) {
          failure_index = i;
          failure = std::current_exception();
        }
      }
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);
  return table;
}

}  // namespace besselrad::sweep
