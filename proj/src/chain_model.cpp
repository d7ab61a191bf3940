#include "bdperiod/chain_model.hpp"
#include "bdperiod/verdict.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace bdperiod {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void fail(ChainErrorCode code, const std::string& msg) {
  throw ChainError(code, std::string(to_string(code)) + ": " + msg);
}

std::string fmt_row(State i, const Transition& t) {
  std::ostringstream os;
  os.precision(17);
  os << "row " << i << " (q=" << t.q << ", r=" << t.r << ", p=" << t.p << ")";
  return os.str();
}

// Rescale so that (q + r) + p == 1 exactly. p is derived last.
Transition normalize(Transition t, State i) {
  if (!(t.p > 0.0)) fail(ChainErrorCode::NonPositiveRate, fmt_row(i, t) + " has p <= 0");
  if (t.q < 0.0 || (i > 0 && !(t.q > 0.0)))
    fail(ChainErrorCode::NonPositiveRate, fmt_row(i, t) + " has q <= 0");
  if (t.r < 0.0) fail(ChainErrorCode::NonPositiveRate, fmt_row(i, t) + " has r < 0");
  const double s = t.sum();
  if (!(std::abs(s - 1.0) <= kRowSumTolerance))
    fail(ChainErrorCode::RowSumError, fmt_row(i, t) + " sums to " + std::to_string(s));
  if (s != 1.0) {
    t.q /= s;
    t.r /= s;
  }
  t.p = 1.0 - (t.q + t.r);
  return t;
}

// q_0 := 0; any mass the caller put on P(0,-1) becomes self-transition mass.
Transition fold_row0(Transition t) {
  const double s = t.q + t.r;
  return {0.0, s, 1.0 - s};
}

void require_weights(double p, double q, std::string_view family) {
  if (!(p > 0.0) || !(q > 0.0))
    fail(ChainErrorCode::NonPositiveRate,
         std::string(family) + " needs p > 0 and q > 0");
}

void require(bool ok, std::string_view family, const std::string& what) {
  if (!ok) fail(ChainErrorCode::BadFamilyParams, std::string(family) + ": " + what);
}

// Closed-form validity of a tail family over every i >= n0. Returns the
// (possibly renormalized) family.
TailFamily validate_tail(TailFamily tail, std::size_t n0) {
  const double first = static_cast<double>(n0);
  return std::visit(
      overloaded{
          [&](tail::Constant t) -> TailFamily {
            if (!(t.p > 0.0) || !(t.q > 0.0) || t.r < 0.0)
              fail(ChainErrorCode::NonPositiveRate, "Constant needs p > 0, q > 0, r >= 0");
            const Transition row = normalize({t.q, t.r, t.p}, 1);
            return tail::Constant{row.p, row.q, row.r};
          },
          [&](tail::ZeroSelfTail t) -> TailFamily {
            if (!(t.p > 0.0) || !(t.q > 0.0))
              fail(ChainErrorCode::NonPositiveRate, "ZeroSelfTail needs p > 0 and q > 0");
            const Transition row = normalize({t.q, 0.0, t.p}, 1);
            return tail::ZeroSelfTail{row.p, row.q};
          },
          [&](tail::GeometricSelf t) -> TailFamily {
            require_weights(t.p, t.q, "GeometricSelf");
            require(t.c >= 0.0, "GeometricSelf", "c must be >= 0");
            require(t.rho >= 0.0 && t.rho <= 1.0, "GeometricSelf", "rho must lie in [0, 1]");
            // r_i is nonincreasing in i, so i = n0 is the worst case.
            require(t.c * std::pow(t.rho, first) < 1.0, "GeometricSelf",
                    "c * rho^n0 must be < 1");
            return t;
          },
          [&](tail::PowerSelf t) -> TailFamily {
            require_weights(t.p, t.q, "PowerSelf");
            require(t.c >= 0.0, "PowerSelf", "c must be >= 0");
            require(t.alpha >= 0.0 && std::isfinite(t.alpha), "PowerSelf", "alpha must be >= 0");
            require(t.c / std::pow(first + 1.0, t.alpha) < 1.0, "PowerSelf",
                    "c / (n0+1)^alpha must be < 1");
            return t;
          },
          [&](tail::ProductPositive t) -> TailFamily {
            require(t.c > 0.0, "ProductPositive", "c must be > 0");
            require(t.rho > 0.0 && t.rho <= 1.0, "ProductPositive", "rho must lie in (0, 1]");
            require(t.c * std::pow(t.rho, first) < 1.0, "ProductPositive",
                    "c * rho^n0 must be < 1");
            return t;
          },
          [&](tail::DriftDecay t) -> TailFamily {
            require(t.r >= 0.0 && t.r < 1.0, "DriftDecay", "r must lie in [0, 1)");
            require(t.alpha >= 0.0 && std::isfinite(t.alpha), "DriftDecay", "alpha must be >= 0");
            require(std::abs(t.a) / std::pow(first + 1.0, t.alpha) < 1.0, "DriftDecay",
                    "|a| / (n0+1)^alpha must be < 1");
            return t;
          },
      },
      tail);
}

}  // namespace

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Diverges: return "diverges";
    case Outcome::Converges: return "converges";
    case Outcome::Undecided: return "undecided";
  }
  return "undecided";
}

std::string_view to_string(Method m) {
  return m == Method::Analytic ? "analytic" : "numeric_threshold";
}

Outcome outcome_from_string(std::string_view s) {
  if (s == "diverges") return Outcome::Diverges;
  if (s == "converges") return Outcome::Converges;
  if (s == "undecided") return Outcome::Undecided;
  throw std::invalid_argument("unknown verdict outcome: " + std::string(s));
}

Method method_from_string(std::string_view s) {
  if (s == "analytic") return Method::Analytic;
  if (s == "numeric_threshold") return Method::NumericThreshold;
  throw std::invalid_argument("unknown verdict method: " + std::string(s));
}

std::string_view to_string(ChainErrorCode code) {
  switch (code) {
    case ChainErrorCode::ParseError: return "ParseError";
    case ChainErrorCode::UnknownField: return "UnknownField";
    case ChainErrorCode::RowSumError: return "RowSumError";
    case ChainErrorCode::NonPositiveRate: return "NonPositiveRate";
    case ChainErrorCode::AllZeroSelf: return "AllZeroSelf";
    case ChainErrorCode::BadFamilyParams: return "BadFamilyParams";
  }
  return "ParseError";
}

std::string_view family_name(const TailFamily& tail) {
  return std::visit(overloaded{
                        [](const tail::Constant&) { return std::string_view("Constant"); },
                        [](const tail::GeometricSelf&) { return std::string_view("GeometricSelf"); },
                        [](const tail::PowerSelf&) { return std::string_view("PowerSelf"); },
                        [](const tail::ProductPositive&) { return std::string_view("ProductPositive"); },
                        [](const tail::ZeroSelfTail&) { return std::string_view("ZeroSelfTail"); },
                        [](const tail::DriftDecay&) { return std::string_view("DriftDecay"); },
                    },
                    tail);
}

ChainSpec ChainSpec::build(std::vector<Transition> prefix, TailFamily tail) {
  ChainSpec chain;
  chain.tail_ = validate_tail(std::move(tail), prefix.size());

  for (State i = 0; i < prefix.size(); ++i) {
    Transition t = normalize(prefix[i], i);
    if (i == 0 && t.q != 0.0) {
      t = fold_row0(t);
      chain.row0_adjusted_ = true;
    }
    prefix[i] = t;
  }
  chain.prefix_ = std::move(prefix);
  if (chain.prefix_.empty() && chain.tail_row(0).q != 0.0) chain.row0_adjusted_ = true;

  bool any_self = false;
  for (const auto& t : chain.prefix_) any_self = any_self || t.r > 0.0;
  if (chain.prefix_.empty()) any_self = chain.row(0).r > 0.0;
  any_self = any_self || chain.tail_has_positive_self(std::max<State>(chain.n0(), 1));
  if (!any_self)
    fail(ChainErrorCode::AllZeroSelf, "every r_i is zero; the chain would have period 2");
  return chain;
}

Transition ChainSpec::tail_row(State i) const {
  const double x = static_cast<double>(i);
  // Families that split 1 - r_i between q and p in a fixed ratio.
  auto split = [](double r, double pw, double qw) {
    const double q = qw * (1.0 - r) / (pw + qw);
    return Transition{q, r, 1.0 - (q + r)};
  };
  return std::visit(
      overloaded{
          [](const tail::Constant& t) { return Transition{t.q, t.r, t.p}; },
          [](const tail::ZeroSelfTail& t) { return Transition{t.q, 0.0, t.p}; },
          [&](const tail::GeometricSelf& t) { return split(t.c * std::pow(t.rho, x), t.p, t.q); },
          [&](const tail::PowerSelf& t) { return split(t.c / std::pow(x + 1.0, t.alpha), t.p, t.q); },
          [&](const tail::ProductPositive& t) {
            const double m = t.c * std::pow(t.rho, x);
            return Transition{0.5 * m, 0.5 * m, 1.0 - m};
          },
          [&](const tail::DriftDecay& t) {
            const double d = t.a / std::pow(x + 1.0, t.alpha);
            const double q = 0.5 * (1.0 - t.r) * (1.0 - d);
            return Transition{q, t.r, 1.0 - (q + t.r)};
          },
      },
      tail_);
}

Transition ChainSpec::row(State i) const {
  if (i < prefix_.size()) return prefix_[i];
  const Transition t = tail_row(i);
  return i == 0 ? fold_row0(t) : t;
}

LogTransition ChainSpec::log_row(State i) const {
  const Transition t = row(i);
  LogTransition lt{std::log(t.q), std::log(t.r), std::log(t.p)};
  if (i < prefix_.size() || i == 0) return lt;
  const double x = static_cast<double>(i);
  if (const auto* pp = std::get_if<tail::ProductPositive>(&tail_)) {
    const double log_m = std::log(pp->c) + x * std::log(pp->rho);
    lt.log_q = lt.log_r = log_m - std::log(2.0);
    lt.log_p = std::log1p(-std::exp(log_m));
  } else if (const auto* gs = std::get_if<tail::GeometricSelf>(&tail_)) {
    if (gs->c > 0.0 && gs->rho > 0.0) lt.log_r = std::log(gs->c) + x * std::log(gs->rho);
  }
  return lt;
}

bool ChainSpec::tail_has_positive_self(State from) const {
  return std::visit(overloaded{
                        [](const tail::Constant& t) { return t.r > 0.0; },
                        [](const tail::ZeroSelfTail&) { return false; },
                        [&](const tail::GeometricSelf& t) {
                          return t.c > 0.0 && (t.rho > 0.0 || from == 0);
                        },
                        [](const tail::PowerSelf& t) { return t.c > 0.0; },
                        [](const tail::ProductPositive&) { return true; },
                        [](const tail::DriftDecay& t) { return t.r > 0.0; },
                    },
                    tail_);
}

// ---------------------------------------------------------------------------
// JSON

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed,
                    std::string_view where) {
  for (const auto& [key, _] : obj.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok)
      fail(ChainErrorCode::UnknownField,
           "unknown field \"" + key + "\" in " + std::string(where));
  }
}

double number(const json& obj, const char* key, std::string_view where) {
  if (!obj.contains(key))
    fail(ChainErrorCode::ParseError,
         std::string(where) + " is missing \"" + key + "\"");
  const json& v = obj.at(key);
  if (!v.is_number())
    fail(ChainErrorCode::ParseError,
         std::string(where) + " field \"" + key + "\" must be a number");
  return v.get<double>();
}

TailFamily parse_tail(const json& t) {
  if (!t.is_object()) fail(ChainErrorCode::ParseError, "\"tail\" must be an object");
  if (!t.contains("family") || !t.at("family").is_string())
    fail(ChainErrorCode::ParseError, "\"tail\" needs a string \"family\"");
  const auto name = t.at("family").get<std::string>();
  const std::string where = "tail " + name;
  if (name == "Constant") {
    reject_unknown(t, {"family", "p", "q", "r"}, where);
    return tail::Constant{number(t, "p", where), number(t, "q", where), number(t, "r", where)};
  }
  if (name == "GeometricSelf") {
    reject_unknown(t, {"family", "p", "q", "c", "rho"}, where);
    return tail::GeometricSelf{number(t, "p", where), number(t, "q", where),
                               number(t, "c", where), number(t, "rho", where)};
  }
  if (name == "PowerSelf") {
    reject_unknown(t, {"family", "p", "q", "c", "alpha"}, where);
    return tail::PowerSelf{number(t, "p", where), number(t, "q", where), number(t, "c", where),
                           number(t, "alpha", where)};
  }
  if (name == "ProductPositive") {
    reject_unknown(t, {"family", "c", "rho"}, where);
    return tail::ProductPositive{number(t, "c", where), number(t, "rho", where)};
  }
  if (name == "ZeroSelfTail") {
    reject_unknown(t, {"family", "p", "q"}, where);
    return tail::ZeroSelfTail{number(t, "p", where), number(t, "q", where)};
  }
  if (name == "DriftDecay") {
    reject_unknown(t, {"family", "r", "a", "alpha"}, where);
    return tail::DriftDecay{number(t, "r", where), number(t, "a", where),
                            number(t, "alpha", where)};
  }
  fail(ChainErrorCode::BadFamilyParams, "unknown tail family \"" + name + "\"");
}

}  // namespace

ChainSpec build_chain(const json& doc) {
  if (!doc.is_object()) fail(ChainErrorCode::ParseError, "chain spec must be a JSON object");
  reject_unknown(doc, {"prefix", "tail", "n0"}, "chain spec");
  if (!doc.contains("tail")) fail(ChainErrorCode::ParseError, "chain spec is missing \"tail\"");

  std::vector<Transition> prefix;
  if (doc.contains("prefix")) {
    const json& rows = doc.at("prefix");
    if (!rows.is_array()) fail(ChainErrorCode::ParseError, "\"prefix\" must be an array");
    for (const auto& r : rows) {
      if (!r.is_array() || r.size() != 3 || !r[0].is_number() || !r[1].is_number() ||
          !r[2].is_number())
        fail(ChainErrorCode::ParseError, "prefix rows must be [q, r, p] number triples");
      prefix.push_back({r[0].get<double>(), r[1].get<double>(), r[2].get<double>()});
    }
  }
  if (doc.contains("n0")) {
    const json& n0 = doc.at("n0");
    if (!n0.is_number_integer() || n0.get<std::int64_t>() != static_cast<std::int64_t>(prefix.size()))
      fail(ChainErrorCode::ParseError, "\"n0\" must equal the prefix length");
  }
  return ChainSpec::build(std::move(prefix), parse_tail(doc.at("tail")));
}

ChainSpec load_chain(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ChainErrorCode::ParseError, "cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    fail(ChainErrorCode::ParseError, path.string() + ": " + e.what());
  }
  return build_chain(doc);
}

json chain_to_json(const ChainSpec& chain) {
  json prefix = json::array();
  for (const auto& t : chain.prefix()) prefix.push_back({t.q, t.r, t.p});
  json tail = std::visit(
      overloaded{
          [](const tail::Constant& t) { return json{{"p", t.p}, {"q", t.q}, {"r", t.r}}; },
          [](const tail::GeometricSelf& t) {
            return json{{"p", t.p}, {"q", t.q}, {"c", t.c}, {"rho", t.rho}};
          },
          [](const tail::PowerSelf& t) {
            return json{{"p", t.p}, {"q", t.q}, {"c", t.c}, {"alpha", t.alpha}};
          },
          [](const tail::ProductPositive& t) { return json{{"c", t.c}, {"rho", t.rho}}; },
          [](const tail::ZeroSelfTail& t) { return json{{"p", t.p}, {"q", t.q}}; },
          [](const tail::DriftDecay& t) {
            return json{{"r", t.r}, {"a", t.a}, {"alpha", t.alpha}};
          },
      },
      chain.tail());
  tail["family"] = std::string(family_name(chain.tail()));
  return json{{"prefix", prefix}, {"tail", tail}, {"n0", chain.n0()}};
}

}  // namespace bdperiod
