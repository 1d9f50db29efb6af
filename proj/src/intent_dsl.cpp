// Copyright 2026 The gridibn Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gridibn/intent_dsl.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <system_error>

namespace gridibn::intent {

std::string_view to_string(Verb v) {
  switch (v) {
    case Verb::Connect: return "CONNECT";
    case Verb::Monitor: return "MONITOR";
    case Verb::Protect: return "PROTECT";
    case Verb::Measure: return "MEASURE";
    case Verb::Inspect: return "INSPECT";
  }
  return "?";
}

std::string_view to_string(Kpi k) {
  switch (k) {
    case Kpi::Latency: return "latency";
    case Kpi::Reliability: return "reliability";
    case Kpi::Bandwidth: return "bandwidth";
    case Kpi::Devices: return "devices";
  }
  return "?";
}

std::string_view to_string(Comparator c) {
  switch (c) {
    case Comparator::Lt: return "<";
    case Comparator::Le: return "<=";
    case Comparator::Eq: return "=";
    case Comparator::Ge: return ">=";
    case Comparator::Gt: return ">";
  }
  return "?";
}

std::string_view to_string(Unit u) {
  switch (u) {
    case Unit::Ms: return "ms";
    case Unit::Percent: return "%";
    case Unit::Mbps: return "Mbps";
    case Unit::Kbps: return "kbps";
    case Unit::Count: return "count";
  }
  return "?";
}

namespace {

constexpr std::array kVerbs = {Verb::Connect, Verb::Monitor, Verb::Protect, Verb::Measure,
                               Verb::Inspect};
constexpr std::array kKpis = {Kpi::Latency, Kpi::Reliability, Kpi::Bandwidth, Kpi::Devices};
constexpr std::array kUnits = {Unit::Ms, Unit::Percent, Unit::Mbps, Unit::Kbps, Unit::Count};
constexpr std::array kStakeholders = {Stakeholder::Dso, Stakeholder::Prosumer,
                                      Stakeholder::DrAggregator, Stakeholder::Csp};
constexpr std::array kApplications = {Application::Wams, Application::ProtectionFlisr,
                                      Application::Ami, Application::RemoteInspection};

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool keyword_is(std::string_view word, std::string_view keyword) {
  return lower(word) == lower(keyword);
}

bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return false;
  return std::all_of(s.begin(), s.end(), is_ident_char) && !is_reserved_word(s);
}

enum class TokKind { Word, Number, Comparator, Comma, Percent, End };

struct Token {
  TokKind kind = TokKind::End;
  std::string_view text;
  std::size_t pos = 0;
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  const auto n = src.size();
  auto digit = [&](std::size_t k) {
    return k < n && std::isdigit(static_cast<unsigned char>(src[k]));
  };
  while (true) {
    while (i < n && std::isspace(static_cast<unsigned char>(src[i]))) ++i;
    if (i >= n) break;
    const std::size_t start = i;
    const char c = src[i];
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (i < n && is_ident_char(src[i])) ++i;
      out.push_back({TokKind::Word, src.substr(start, i - start), start});
    } else if (digit(i) || (c == '-' && digit(i + 1))) {
      if (c == '-') ++i;
      while (digit(i)) ++i;
      if (i < n && src[i] == '.' && digit(i + 1)) {
        ++i;
        while (digit(i)) ++i;
      }
      out.push_back({TokKind::Number, src.substr(start, i - start), start});
    } else if (c == '<' || c == '>') {
      ++i;
      if (i < n && src[i] == '=') ++i;
      out.push_back({TokKind::Comparator, src.substr(start, i - start), start});
    } else if (c == '=') {
      ++i;
      out.push_back({TokKind::Comparator, src.substr(start, 1), start});
    } else if (c == ',') {
      ++i;
      out.push_back({TokKind::Comma, src.substr(start, 1), start});
    } else if (c == '%') {
      ++i;
      out.push_back({TokKind::Percent, src.substr(start, 1), start});
    } else {
      throw SyntaxError(start, {}, "unexpected character '" + std::string(1, c) + "' at " +
                                       std::to_string(start));
    }
  }
  out.push_back({TokKind::End, {}, n});
  return out;
}

template <typename Range, typename Fn>
std::vector<std::string> names(const Range& r, Fn&& fn) {
  std::vector<std::string> out;
  for (const auto& x : r) out.emplace_back(fn(x));
  return out;
}

std::optional<Comparator> parse_comparator(std::string_view s) {
  if (s == "<") return Comparator::Lt;
  if (s == "<=") return Comparator::Le;
  if (s == "=") return Comparator::Eq;
  if (s == ">=") return Comparator::Ge;
  if (s == ">") return Comparator::Gt;
  return std::nullopt;
}

std::optional<Unit> parse_unit(const Token& t) {
  if (t.kind == TokKind::Percent) return Unit::Percent;
  if (t.kind != TokKind::Word) return std::nullopt;
  for (auto u : kUnits) {
    if (u != Unit::Percent && keyword_is(t.text, to_string(u))) return u;
  }
  return std::nullopt;
}

class Parser {
 public:
  Parser(std::string_view src, Stakeholder default_stakeholder)
      : toks_(lex(src)), default_stakeholder_(default_stakeholder) {}

  IntentAst parse() {
    IntentAst ast;
    ast.stakeholder = default_stakeholder_;

    const Token& v = next();
    ast.verb = expect_verb(v);
    ast.subject = expect_endpoint();

    if (peek_keyword("TO")) {
      next();
      ast.target = expect_endpoint();
    } else if (ast.verb == Verb::Connect) {
      fail(peek(), {"TO"}, "CONNECT requires a target");
    }

    std::vector<std::string> tail = {"FOR", "WITH", "AS", "<end>"};
    if (peek_keyword("FOR")) {
      next();
      const Token& app = next();
      std::optional<Application> parsed;
      if (app.kind == TokKind::Word) parsed = parse_application(app.text);
      if (!parsed) {
        fail(app, names(kApplications, [](auto a) { return std::string(to_string(a)); }),
             "unknown application");
      }
      ast.application = parsed;
      tail.erase(tail.begin());
    }

    if (peek_keyword("WITH")) {
      next();
      parse_clauses(ast);
      tail = {",", "AS", "<end>"};
    }

    if (peek_keyword("AS")) {
      next();
      const Token& who = next();
      std::optional<Stakeholder> parsed;
      if (who.kind == TokKind::Word) parsed = parse_stakeholder(who.text);
      if (!parsed) {
        fail(who, names(kStakeholders, [](auto s) { return std::string(to_string(s)); }),
             "unknown stakeholder");
      }
      ast.stakeholder = *parsed;
      tail = {"<end>"};
    }

    if (peek().kind != TokKind::End) fail(peek(), tail, "unexpected trailing input");

    std::sort(ast.kpi_clauses.begin(), ast.kpi_clauses.end(),
              [](const KpiClause& a, const KpiClause& b) { return a.kpi < b.kpi; });
    return ast;
  }

 private:
  const Token& peek() const { return toks_[idx_]; }
  const Token& next() {
    const Token& t = toks_[idx_];
    if (t.kind != TokKind::End) ++idx_;
    return t;
  }
  bool peek_keyword(std::string_view kw) const {
    return peek().kind == TokKind::Word && keyword_is(peek().text, kw);
  }

  [[noreturn]] static void fail(const Token& at, std::vector<std::string> expected,
                                const std::string& msg,
                                ErrorCode code = ErrorCode::SyntaxError) {
    std::string what = msg + " at " + std::to_string(at.pos);
    if (at.kind == TokKind::End) {
      what += " (end of input)";
    } else {
      what += " near '" + std::string(at.text) + "'";
    }
    if (!expected.empty()) {
      what += "; expected one of:";
      for (const auto& e : expected) what += " " + e;
    }
    throw SyntaxError(at.pos, std::move(expected), what, code);
  }

  Verb expect_verb(const Token& t) {
    if (t.kind == TokKind::Word) {
      for (auto v : kVerbs) {
        if (keyword_is(t.text, to_string(v))) return v;
      }
    }
    fail(t, names(kVerbs, [](auto v) { return std::string(to_string(v)); }),
         "expected a verb");
  }

  std::string expect_endpoint() {
    const Token& t = next();
    if (t.kind != TokKind::Word || !is_identifier(t.text)) {
      fail(t, {"<endpoint>"}, "expected an endpoint identifier");
    }
    return std::string(t.text);
  }

  void parse_clauses(IntentAst& ast) {
    while (true) {
      const Token& name = next();
      std::optional<Kpi> kpi;
      if (name.kind == TokKind::Word) {
        for (auto k : kKpis) {
          if (keyword_is(name.text, to_string(k))) kpi = k;
        }
      }
      if (!kpi) {
        fail(name, names(kKpis, [](auto k) { return std::string(to_string(k)); }),
             "expected a KPI name");
      }
      for (const auto& c : ast.kpi_clauses) {
        if (c.kpi == *kpi) fail(name, {}, "duplicate KPI clause '" + std::string(name.text) + "'");
      }

      const auto& allowed_cmp = comparators_for(*kpi);
      const Token& cmp_tok = next();
      std::optional<Comparator> cmp;
      if (cmp_tok.kind == TokKind::Comparator) cmp = parse_comparator(cmp_tok.text);
      if (!cmp || std::find(allowed_cmp.begin(), allowed_cmp.end(), *cmp) == allowed_cmp.end()) {
        fail(cmp_tok, names(allowed_cmp, [](auto c) { return std::string(to_string(c)); }),
             "expected a comparator for " + std::string(to_string(*kpi)));
      }

      const Token& num = next();
      double value = 0.0;
      if (num.kind != TokKind::Number) fail(num, {"<number>"}, "expected a number");
      auto [ptr, ec] = std::from_chars(num.text.data(), num.text.data() + num.text.size(), value);
      if (ec != std::errc() || ptr != num.text.data() + num.text.size()) {
        fail(num, {"<number>"}, "malformed number");
      }

      const auto& allowed_units = units_for(*kpi);
      const Token& unit_tok = next();
      auto unit_names = names(allowed_units, [](auto u) { return std::string(to_string(u)); });
      if (unit_tok.kind == TokKind::End) fail(unit_tok, unit_names, "expected a unit");
      auto unit = parse_unit(unit_tok);
      if (!unit) {
        fail(unit_tok, names(kUnits, [](auto u) { return std::string(to_string(u)); }),
             "unknown unit", ErrorCode::UnknownUnit);
      }
      if (std::find(allowed_units.begin(), allowed_units.end(), *unit) == allowed_units.end()) {
        fail(unit_tok, unit_names,
             "unit not valid for " + std::string(to_string(*kpi)));
      }

      ast.kpi_clauses.push_back({*kpi, *cmp, value, *unit, name.pos});

      if (peek().kind != TokKind::Comma) break;
      next();
    }
  }

  std::vector<Token> toks_;
  std::size_t idx_ = 0;
  Stakeholder default_stakeholder_;
};

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed);
  if (ec != std::errc()) return std::to_string(v);
  return std::string(buf, ptr);
}

double round12(double v) { return std::round(v * 1e12) / 1e12; }

}  // namespace

bool is_reserved_word(std::string_view word) {
  static constexpr std::array kReserved = {"connect", "monitor", "protect", "measure",
                                           "inspect", "to",      "for",     "with",
                                           "as"};
  const auto w = lower(word);
  return std::find(kReserved.begin(), kReserved.end(), w) != kReserved.end();
}

const std::vector<Comparator>& comparators_for(Kpi k) {
  static const std::vector<Comparator> upper = {Comparator::Lt, Comparator::Le};
  static const std::vector<Comparator> lower_bound = {Comparator::Ge, Comparator::Gt};
  static const std::vector<Comparator> bandwidth = {Comparator::Eq, Comparator::Ge,
                                                    Comparator::Gt};
  static const std::vector<Comparator> any = {Comparator::Lt, Comparator::Le, Comparator::Eq,
                                              Comparator::Ge, Comparator::Gt};
  switch (k) {
    case Kpi::Latency: return upper;
    case Kpi::Reliability: return lower_bound;
    case Kpi::Bandwidth: return bandwidth;
    case Kpi::Devices: return any;
  }
  return any;
}

const std::vector<Unit>& units_for(Kpi k) {
  static const std::vector<Unit> ms = {Unit::Ms};
  static const std::vector<Unit> pct = {Unit::Percent};
  static const std::vector<Unit> bw = {Unit::Mbps, Unit::Kbps};
  static const std::vector<Unit> count = {Unit::Count};
  switch (k) {
    case Kpi::Latency: return ms;
    case Kpi::Reliability: return pct;
    case Kpi::Bandwidth: return bw;
    case Kpi::Devices: return count;
  }
  return count;
}

IntentAst parse_intent(std::string_view text, Stakeholder default_stakeholder) {
  return Parser(text, default_stakeholder).parse();
}

void check_ast(const IntentAst& ast) {
  auto bad = [](const std::string& why) { throw Error(ErrorCode::SyntaxError, "invalid AST: " + why); };
  if (!is_identifier(ast.subject)) bad("subject '" + ast.subject + "' is not an identifier");
  if (ast.target && !is_identifier(*ast.target)) bad("target '" + *ast.target + "' is not an identifier");
  if (ast.verb == Verb::Connect && !ast.target) bad("CONNECT requires a target");
  for (std::size_t i = 0; i < ast.kpi_clauses.size(); ++i) {
    const auto& c = ast.kpi_clauses[i];
    if (i > 0 && ast.kpi_clauses[i - 1].kpi >= c.kpi) bad("clauses not in canonical order");
    if (!std::isfinite(c.value)) bad("non-finite clause value");
    const auto& cmps = comparators_for(c.kpi);
    const auto& units = units_for(c.kpi);
    if (std::find(cmps.begin(), cmps.end(), c.comparator) == cmps.end()) bad("comparator");
    if (std::find(units.begin(), units.end(), c.unit) == units.end()) bad("unit");
  }
}

std::string render(const IntentAst& ast) {
  check_ast(ast);
  std::string out(to_string(ast.verb));
  out += ' ';
  out += ast.subject;
  if (ast.target) {
    out += " TO ";
    out += *ast.target;
  }
  if (ast.application) {
    out += " FOR ";
    out += to_string(*ast.application);
  }
  for (std::size_t i = 0; i < ast.kpi_clauses.size(); ++i) {
    const auto& c = ast.kpi_clauses[i];
    out += i == 0 ? " WITH " : ", ";
    out += to_string(c.kpi);
    out += ' ';
    out += to_string(c.comparator);
    out += ' ';
    out += format_number(c.value);
    out += ' ';
    out += to_string(c.unit);
  }
  if (ast.stakeholder != Stakeholder::Dso) {
    out += " AS ";
    out += to_string(ast.stakeholder);
  }
  return out;
}

RequirementCatalog RequirementCatalog::from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("applications") || !doc["applications"].is_object()) {
    throw SchemaError("/applications", "missing applications object");
  }
  std::map<Application, RequirementDefaults> entries;
  for (const auto& [key, v] : doc["applications"].items()) {
    const std::string path = "/applications/" + key;
    auto app = parse_application(key);
    if (!app) throw SchemaError(path, "unknown application");
    RequirementDefaults d;
    try {
      d.latency_ms = v.at("latency_ms").get<double>();
      d.reliability = v.at("reliability").get<double>();
      d.bandwidth_mbps = v.at("bandwidth_mbps").get<double>();
      d.device_count = v.at("device_count").get<std::int64_t>();
    } catch (const nlohmann::json::exception& e) {
      throw SchemaError(path, e.what());
    }
    if (!(d.latency_ms > 0) || !(d.reliability >= 0 && d.reliability <= 1) ||
        !(d.bandwidth_mbps > 0) || d.device_count < 1) {
      throw SchemaError(path, "default out of range");
    }
    entries[*app] = d;
  }
  return RequirementCatalog(std::move(entries));
}

nlohmann::json RequirementCatalog::to_json() const {
  nlohmann::json apps = nlohmann::json::object();
  for (const auto& [app, d] : entries_) {
    apps[std::string(gridibn::to_string(app))] = {{"latency_ms", d.latency_ms},
                                                  {"reliability", d.reliability},
                                                  {"bandwidth_mbps", d.bandwidth_mbps},
                                                  {"device_count", d.device_count}};
  }
  return {{"schema", "gridibn.requirement-catalog/1"}, {"applications", apps}};
}

const RequirementDefaults* RequirementCatalog::find(Application a) const {
  auto it = entries_.find(a);
  return it == entries_.end() ? nullptr : &it->second;
}

SliceCategory infer_category(double latency_ms, std::int64_t device_count) {
  if (device_count >= 1000) return SliceCategory::Mmtc;
  if (latency_ms <= 20.0) return SliceCategory::Urllc;
  return SliceCategory::Embb;
}

ServiceRequirementSet translate(const IntentAst& ast, const RequirementCatalog& catalog,
                                const std::string& intent_id) {
  std::optional<double> latency, reliability, bandwidth;
  std::optional<double> devices;
  for (const auto& c : ast.kpi_clauses) {
    switch (c.kpi) {
      case Kpi::Latency: latency = c.value; break;
      case Kpi::Reliability: reliability = round12(c.value / 100.0); break;
      case Kpi::Bandwidth:
        bandwidth = c.unit == Unit::Kbps ? round12(c.value / 1000.0) : c.value;
        break;
      case Kpi::Devices: devices = c.value; break;
    }
  }

  // Bad explicit values are contradictions whatever else the intent carries.
  if (latency && !(*latency > 0)) {
    throw Error(ErrorCode::ContradictoryClauses,
                "latency bound must be > 0 ms, got " + format_number(*latency));
  }
  if (reliability && !(*reliability >= 0.0 && *reliability <= 1.0)) {
    throw Error(ErrorCode::ContradictoryClauses,
                "reliability must lie in [0, 100] %, got " + format_number(*reliability * 100));
  }
  if (bandwidth && !(*bandwidth > 0)) {
    throw Error(ErrorCode::ContradictoryClauses, "bandwidth must be > 0, got " + format_number(*bandwidth));
  }
  if (devices && (*devices < 1 || *devices > 9e15 || std::floor(*devices) != *devices)) {
    throw Error(ErrorCode::ContradictoryClauses,
                "devices must be a whole count >= 1, got " + format_number(*devices));
  }

  const RequirementDefaults* defaults =
      ast.application ? catalog.find(*ast.application) : nullptr;
  const bool covered = latency && reliability && bandwidth;
  if (!defaults && !covered) {
    throw Error(ErrorCode::UntranslatableIntent,
                ast.application
                    ? "no catalog entry for '" + std::string(to_string(*ast.application)) +
                          "' and clauses do not cover latency, reliability and bandwidth"
                    : "intent names no application and clauses do not cover latency, "
                      "reliability and bandwidth");
  }

  ServiceRequirementSet r;
  r.subject = ast.subject;
  r.target = ast.target.value_or("");
  r.source_intent = intent_id;
  r.application = ast.application;
  r.latency_bound_ms = latency.value_or(defaults ? defaults->latency_ms : 0.0);
  r.reliability = reliability.value_or(defaults ? defaults->reliability : 0.0);
  r.bandwidth_mbps = bandwidth.value_or(defaults ? defaults->bandwidth_mbps : 0.0);

  r.device_count = devices ? static_cast<std::int64_t>(*devices) : defaults ? defaults->device_count : 1;

  r.category = ast.application ? category_for(*ast.application)
                               : infer_category(r.latency_bound_ms, r.device_count);
  return r;
}

nlohmann::json to_json(const ServiceRequirementSet& r) {
  nlohmann::json j = {{"category", std::string(gridibn::to_string(r.category))},
                      {"latency_bound_ms", r.latency_bound_ms},
                      {"reliability", r.reliability},
                      {"bandwidth_mbps", r.bandwidth_mbps},
                      {"device_count", r.device_count},
                      {"subject", r.subject},
                      {"target", r.target},
                      {"source_intent", r.source_intent}};
  j["application"] = r.application ? nlohmann::json(std::string(gridibn::to_string(*r.application)))
                                   : nlohmann::json(nullptr);
  return j;
}

ServiceRequirementSet requirements_from_json(const nlohmann::json& j) {
  ServiceRequirementSet r;
  r.category = parse_category(j.at("category").get<std::string>()).value();
  r.latency_bound_ms = j.at("latency_bound_ms").get<double>();
  r.reliability = j.at("reliability").get<double>();
  r.bandwidth_mbps = j.at("bandwidth_mbps").get<double>();
  r.device_count = j.at("device_count").get<std::int64_t>();
  r.subject = j.at("subject").get<std::string>();
  r.target = j.at("target").get<std::string>();
  r.source_intent = j.at("source_intent").get<std::string>();
  if (!j.at("application").is_null()) {
    r.application = parse_application(j["application"].get<std::string>());
  }
  return r;
}

}  // namespace gridibn::intent
