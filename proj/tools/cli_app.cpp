#include "cli_app.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include "apcf/covering_bounds.hpp"
#include "apcf/lambda_construct.hpp"
#include "apcf/suites.hpp"

namespace apcf::cli {

namespace {

// Correctly rounded when numerator and denominator are exact doubles; get_d truncates.
double to_double(const Rational& r) {
  if (mpz_sizeinbase(r.get_num_mpz_t(), 2) <= 53 && mpz_sizeinbase(r.get_den_mpz_t(), 2) <= 53)
    return r.get_num().get_d() / r.get_den().get_d();
  return r.get_d();
}

using json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

const std::vector<std::string> kCommands = {"expand", "convergents", "interval", "detect-ap", "construct",
                                            "localdim", "ratios", "dim", "certificate", "verify"};

const std::vector<std::string> kValueKeys = {"family", "nu",   "sigma", "t",    "seed",   "depth",  "horizon", "s",
                                             "tol",    "trunc", "mode", "format", "out", "k-max", "min-len"};

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool known_key(const std::string& key) {
  return key == "non-strict" || std::find(kValueKeys.begin(), kValueKeys.end(), key) != kValueKeys.end();
}

json rat(const Rational& x) { return json{{"num", x.get_num().get_str()}, {"den", x.get_den().get_str()}}; }

json num(long double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return static_cast<double>(x);
}

json digits_json(const DigitSeq& d) {
  json a = json::array();
  for (const auto& x : d.digits()) a.push_back(x.get_str());
  return a;
}

struct Outcome {
  json results = json::object();
  json provenance = json::object();
  std::string table;  // results key rendered as rows by csv and text output
  int status = 0;
};

// ---- typed access to settings ----

class Config {
 public:
  explicit Config(Settings s) : s_(std::move(s)) {}

  std::optional<std::string> get(const std::string& key) const {
    auto it = s_.find(key);
    if (it == s_.end()) return std::nullopt;
    return it->second;
  }

  std::uint64_t uint(const std::string& key, std::uint64_t def, std::uint64_t lo, std::uint64_t hi) const {
    auto v = get(key);
    if (!v) return def;
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
    if (ec != std::errc() || p != v->data() + v->size())
      throw UsageError("--" + key + " expects a non-negative integer, got '" + *v + "'");
    if (out < lo || out > hi)
      throw UsageError("--" + key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    return out;
  }

  long double real(const std::string& key, long double def) const {
    auto v = get(key);
    if (!v) return def;
    try {
      return to_double(parse_decimal(*v));
    } catch (const ParseError&) {
      throw UsageError("--" + key + " expects a decimal number, got '" + *v + "'");
    }
  }

  bool flag(const std::string& key) const {
    auto v = get(key);
    return v && (*v == "true" || *v == "1" || *v == "yes" || v->empty());
  }

  std::string choice(const std::string& key, const std::string& def, const std::vector<std::string>& allowed) const {
    std::string v = get(key).value_or(def);
    if (std::find(allowed.begin(), allowed.end(), v) == allowed.end())
      throw UsageError("--" + key + " does not accept '" + v + "'");
    return v;
  }

 private:
  Settings s_;
};

Rational parse_number(const std::string& text) {
  try {
    if (text.find('/') != std::string::npos) return parse_rational(text);
    return parse_decimal(text);
  } catch (const ParseError& e) {
    throw UsageError(std::string("cannot read '") + text + "' as a number: " + e.what());
  }
}

DigitSeq parse_digits(const std::string& text) {
  if (text.empty()) throw UsageError("expected a comma separated digit list");
  try {
    return DigitSeq::parse(text);
  } catch (const ParseError& e) {
    throw UsageError(std::string("cannot read digit list: ") + e.what());
  }
}

struct FamilySpec {
  Family family;
  SequenceSpec spec;
};

FamilySpec family_spec(const Config& cfg) {
  auto fam = cfg.get("family");
  auto nu = cfg.get("nu");
  auto sigma = cfg.get("sigma");
  Family family;
  if (fam) {
    if (*fam == "F") family = Family::F;
    else if (*fam == "G") family = Family::G;
    else throw UsageError("--family must be F or G");
  } else if (nu && !sigma) {
    family = Family::F;
  } else if (sigma && !nu) {
    family = Family::G;
  } else {
    throw UsageError("--family is required");
  }
  const auto& text = family == Family::F ? nu : sigma;
  if (!text) throw UsageError(family == Family::F ? "family F needs --nu" : "family G needs --sigma");
  const SeqKind kind = family == Family::F ? SeqKind::Nu : SeqKind::Sigma;
  try {
    SequenceSpec spec = parse_spec(*text, kind);
    if (spec.kind() != kind) throw UsageError("spec '" + *text + "' does not define " + std::string(to_string(kind)));
    return {family, std::move(spec)};
  } catch (const ParseError& e) {
    throw UsageError(std::string("cannot parse spec: ") + e.what());
  }
}

void validate_spec(const FamilySpec& fs, const Config& cfg, Index horizon) {
  Index h = horizon;
  if (auto size = fs.spec.table_size()) h = std::min(h, fs.family == Family::G ? *size - 1 : *size);
  const Monotonicity mode =
      fs.family == Family::F && cfg.flag("non-strict") ? Monotonicity::NonDecreasing : Monotonicity::Strict;
  ValidationReport rep = validate(fs.spec, h, mode);
  if (!rep.ok) {
    std::string where = rep.first_violation ? " at n = " + std::to_string(*rep.first_violation) : "";
    throw Error(ErrorCode::SpecConstraintViolated, rep.reason + where);
  }
}

unsigned get_t(const Config& cfg) { return static_cast<unsigned>(cfg.uint("t", 2, 2, 10000)); }

LambdaParams make_params(const FamilySpec& fs, unsigned t, Index depth) {
  if (fs.family == Family::F) {
    LambdaParams p = LambdaParams::for_F(fs.spec, t);
    if (depth > p.partition.covered())
      throw Error(ErrorCode::HorizonExceeded, "depth exceeds the positions covered by the F blocks");
    return p;
  }
  return LambdaParams::for_G_depth(fs.spec, t, depth);
}

json blocks_json(const BlockPartition& part, Index depth) {
  json a = json::array();
  for (std::size_t k = 1; k <= part.stages(); ++k) {
    const auto& st = part.stage(k);
    if (st.v.min > depth) break;
    a.push_back({{"k", k}, {"V", {st.v.min, st.v.max}}, {"W", {st.w.min, st.w.max}}});
  }
  return a;
}

SampleMode get_mode(const Config& cfg) {
  return cfg.choice("mode", "random", {"random", "min"}) == "min" ? SampleMode::Min : SampleMode::Random;
}

json log_provenance() {
  return {{"logs", "exact integer logarithms; window sums by MPFR (160 bits) with asymptotic tails"},
          {"direct_sum_limit", kDirectSumLimit}};
}

// ---- commands ----

Outcome cmd_expand(const std::string& operand, const Config&) {
  if (operand.empty()) throw UsageError("expand needs a rational argument");
  Rational x = parse_number(operand);
  DigitSeq d = expand(x);
  Outcome o;
  o.results = {{"value", rat(x)}, {"depth", d.size()}, {"digits", digits_json(d)}};
  o.provenance = {{"arithmetic", "exact"}};
  o.table = "digits";
  return o;
}

Outcome cmd_convergents(const std::string& operand, const Config&) {
  DigitSeq d = parse_digits(operand);
  json rows = json::array();
  for (const auto& c : convergents(d)) rows.push_back({{"n", c.index}, {"p", c.p.get_str()}, {"q", c.q.get_str()}});
  Outcome o;
  o.results = {{"digits", digits_json(d)}, {"convergents", rows}};
  o.provenance = {{"arithmetic", "exact"}};
  o.table = "convergents";
  return o;
}

Outcome cmd_interval(const std::string& operand, const Config&) {
  DigitSeq d = parse_digits(operand);
  FundInterval I = fundamental_interval(d);
  Outcome o;
  o.results = {{"digits", digits_json(d)}, {"depth", I.depth},        {"lo", rat(I.lo)},
               {"hi", rat(I.hi)},          {"length", rat(I.length())}, {"closed_left", I.closed_left}};
  o.provenance = {{"arithmetic", "exact"}};
  return o;
}

Outcome cmd_detect_ap(const std::string& operand, const Config& cfg) {
  DigitSeq d = parse_digits(operand);
  const Index min_len = cfg.uint("min-len", 3, 3, kPositionLimit);
  json runs = json::array();
  for (const auto& r : find_ap_runs(d, min_len))
    runs.push_back({{"start", r.start}, {"length", r.length}, {"first", r.first.get_str()},
                    {"difference", r.difference.get_str()}});
  Outcome o;
  o.results = {{"depth", d.size()}, {"min_len", min_len}, {"runs", runs}};
  auto membership = [&](const MembershipReport& rep) {
    json j = {{"verdict", std::string(to_string(rep.verdict))}, {"witnesses", rep.witnesses.size()}};
    if (rep.first_violation) j["first_violation"] = *rep.first_violation;
    else j["first_violation"] = nullptr;
    return j;
  };
  if (cfg.get("nu") || cfg.get("sigma")) {
    FamilySpec fs = family_spec(cfg);
    o.results["family"] = std::string(to_string(fs.family));
    o.results["spec"] = fs.spec.to_string();
    o.results["membership"] = fs.family == Family::F ? membership(check_F_membership(d, fs.spec))
                                                     : membership(check_G_membership(d, fs.spec, 1));
  }
  o.provenance = {{"arithmetic", "exact"}};
  o.table = "runs";
  return o;
}

Outcome cmd_construct(const std::string&, const Config& cfg) {
  FamilySpec fs = family_spec(cfg);
  const unsigned t = get_t(cfg);
  const Index depth = cfg.uint("depth", 50, 1, 1000000);
  const std::uint64_t seed = cfg.uint("seed", 1, 0, UINT64_MAX);
  const SampleMode mode = get_mode(cfg);
  validate_spec(fs, cfg, std::max<Index>(depth, 1000));
  LambdaParams params = make_params(fs, t, depth);
  DigitSeq d = sample_point(params, seed, depth, mode);
  json rows = json::array();
  for (Index n = 1; n <= d.size(); ++n) {
    DigitWindow w = digit_window(params, n);
    rows.push_back({{"n", n}, {"digit", d.at(n).get_str()}, {"forced", w.forced}});
  }
  Outcome o;
  o.results = {{"family", std::string(to_string(fs.family))},
               {"spec", fs.spec.to_string()},
               {"t", t},
               {"seed", seed},
               {"mode", mode == SampleMode::Min ? "min" : "random"},
               {"depth", depth},
               {"strictly_increasing", d.is_strictly_increasing()},
               {"admissible", is_admissible(params, d)},
               {"blocks", blocks_json(params.partition, depth)},
               {"digits", rows}};
  o.provenance = {{"rng", "GMP Mersenne Twister seeded with --seed; uniform on each free window"},
                  {"covered_positions", params.partition.covered()}};
  o.table = "digits";
  if (!d.is_strictly_increasing()) o.status = 1;
  return o;
}

Outcome cmd_localdim(const std::string&, const Config& cfg) {
  FamilySpec fs = family_spec(cfg);
  const unsigned t = get_t(cfg);
  const Index depth = cfg.uint("depth", 200, 1, 100000);
  const std::uint64_t seed = cfg.uint("seed", 1, 0, UINT64_MAX);
  validate_spec(fs, cfg, std::max<Index>(depth, 1000));
  LambdaParams params = make_params(fs, t, depth);
  RatioSeries series = ratio_series(params, params.partition.stages());
  DigitSeq d = sample_point(params, seed, depth, get_mode(cfg));
  json rows = json::array();
  bool all_ok = true;
  long double worst = std::numeric_limits<long double>::infinity();
  for (const auto& r : local_dim_series(params, series, d)) {
    rows.push_back({{"n", r.n}, {"k", r.k}, {"ratio", num(r.ratio)}, {"bound", num(r.bound)}, {"ok", r.ok}});
    all_ok = all_ok && r.ok;
    worst = std::min(worst, r.ratio - r.bound);
  }
  long double err = 0;
  for (const auto& r : series.rows) err = std::max({err, r.A_error, r.B_error});
  Outcome o;
  o.results = {{"family", std::string(to_string(fs.family))},
               {"spec", fs.spec.to_string()},
               {"t", t},
               {"seed", seed},
               {"depth", depth},
               {"all_ok", all_ok},
               {"min_margin", num(worst)},
               {"rows", rows}};
  o.provenance = log_provenance();
  o.provenance["tolerance"] = 1e-6;
  o.provenance["max_bound_error"] = num(err);
  o.table = "rows";
  o.status = all_ok ? 0 : 1;
  return o;
}

Outcome cmd_ratios(const std::string&, const Config& cfg) {
  FamilySpec fs = family_spec(cfg);
  const unsigned t = get_t(cfg);
  validate_spec(fs, cfg, 1000);
  std::optional<LambdaParams> params;
  std::size_t k_max;
  if (fs.family == Family::F) {
    params = LambdaParams::for_F(fs.spec, t);
    k_max = cfg.uint("k-max", params->partition.stages(), 1, 64);
  } else {
    k_max = cfg.uint("k-max", 8, 1, 4096);
    params = LambdaParams::for_G(fs.spec, t, k_max + 1);
  }
  RatioSeries series = ratio_series(*params, k_max);
  json rows = json::array();
  auto opt = [](const std::optional<long double>& v) { return v ? num(*v) : json(nullptr); };
  long double err = 0;
  for (const auto& r : series.rows) {
    rows.push_back({{"k", r.k},
                    {"A", num(r.A)},
                    {"A_error", num(r.A_error)},
                    {"B", opt(r.B)},
                    {"B_error", r.B ? num(r.B_error) : json(nullptr)},
                    {"B_argmin", r.B ? json(r.B_argmin) : json(nullptr)},
                    {"limit_A", num(series.limit_A)},
                    {"limit_B", num(series.limit_B)},
                    {"frac_even", opt(r.frac_even)},
                    {"frac_odd", opt(r.frac_odd)},
                    {"frac_ap", opt(r.frac_ap)}});
    err = std::max({err, r.A_error, r.B_error});
  }
  Outcome o;
  o.results = {{"family", std::string(to_string(fs.family))},
               {"spec", fs.spec.to_string()},
               {"t", t},
               {"growth", num(series.growth)},
               {"limit_A", num(series.limit_A)},
               {"limit_B", num(series.limit_B)},
               {"B0", num(series.B0)},
               {"rows", rows}};
  o.provenance = log_provenance();
  o.provenance["max_error"] = num(err);
  o.table = "rows";
  return o;
}

json certificate_json(const Certificate& c) {
  json j = {{"family", std::string(to_string(c.family))},
            {"s", rat(c.s)},
            {"s_decimal", to_double(c.s)},
            {"delta", rat(c.delta)},
            {"delta_decimal", to_double(c.delta)},
            {"threshold", c.threshold},
            {"checked_horizon", c.checked_horizon},
            {"accepted", c.accepted},
            {"slack_half", num(c.slack_half)},
            {"slack_end", num(c.slack_end)}};
  if (c.family == Family::F) j["tail_bound"] = num(c.tail_bound);
  json audit = json::array();
  for (const auto& st : c.audit)
    audit.push_back({{"n", st.n},
                     {"ell", st.ell},
                     {"gamma", num(st.gamma)},
                     {"prefactor", num(st.prefactor)},
                     {"free_sum", num(st.free_sum)},
                     {"factor", num(st.factor)},
                     {"closed_form", num(st.closed_form)},
                     {"ap_ok", st.ap_ok},
                     {"ok", st.ok},
                     {"note", st.note}});
  if (c.family == Family::G) j["audit"] = audit;
  return j;
}

Outcome cmd_dim(const std::string&, const Config& cfg) {
  FamilySpec fs = family_spec(cfg);
  const long double tol = cfg.real("tol", 5e-3L);
  if (!(tol >= 1e-3L)) throw UsageError("--tol must be at least 0.001");
  const Index horizon = cfg.uint("horizon", 100000, 10, 10000000);
  validate_spec(fs, cfg, std::min<Index>(horizon, 100000));
  const Index h = usable_horizon(fs.spec, horizon);
  GrowthEstimate g = growth_constants(fs.spec, h);
  const long double formula = dim_formula(fs.family, g.estimate);
  Outcome o;
  o.results = {{"family", std::string(to_string(fs.family))},
               {"spec", fs.spec.to_string()},
               {"growth", num(g.estimate)},
               {"growth_divergent", g.divergent},
               {"growth_converged", g.converged},
               {"formula", num(formula)}};
  try {
    ScanResult scan = dim_upper_scan(fs.spec, fs.family, tol, horizon);
    const long double v = to_double(scan.value);
    o.results["status"] = "ok";
    o.results["scan"] = rat(scan.value);
    o.results["scan_decimal"] = static_cast<double>(v);
    o.results["agreement"] = std::fabs(v - formula) <= 1e-2L;
    o.results["evaluations"] = scan.evaluations;
    o.results["certificate"] = certificate_json(scan.certificate);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoCertificate) throw;
    o.results["status"] = "no_certificate";
    o.results["reason"] = e.what();
    o.results["scan"] = nullptr;
    o.status = 1;
  }
  o.provenance = {{"tol", num(tol)}, {"horizon", h}, {"agreement_tolerance", 1e-2}};
  if (fs.family == Family::G) o.provenance["audit"] = "scan certificates skip the stage audit; run `certificate` for it";
  return o;
}

Outcome cmd_certificate(const std::string&, const Config& cfg) {
  FamilySpec fs = family_spec(cfg);
  auto s_text = cfg.get("s");
  if (!s_text) throw UsageError("certificate needs --s");
  const Rational s = parse_number(*s_text);
  const Index horizon = cfg.uint("horizon", 100000, 10, 10000000);
  const Index trunc = cfg.uint("trunc", 2000, 10, 10000000);
  validate_spec(fs, cfg, std::min<Index>(horizon, 100000));
  Outcome o;
  try {
    Certificate c = fs.family == Family::F ? f_certificate(fs.spec, s, horizon)
                                           : g_certificate(fs.spec, s, horizon, 4, trunc);
    o.results = certificate_json(c);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoCertificate) throw;
    o.results = {{"family", std::string(to_string(fs.family))}, {"s", rat(s)}, {"accepted", false}, {"reason", e.what()}};
    o.status = 1;
  }
  o.provenance = {{"horizon", usable_horizon(fs.spec, horizon)}, {"trunc", trunc}};
  if (fs.family == Family::G) o.provenance["audit_stages"] = 4;
  if (o.results.contains("audit")) o.table = "audit";
  return o;
}

Outcome cmd_verify(const std::string& operand, const Config& cfg) {
  const std::string suite = operand.empty() ? "all" : operand;
  const auto& names = suite_names();
  if (std::find(names.begin(), names.end(), suite) == names.end()) throw UsageError("unknown suite '" + suite + "'");
  SuiteOptions opt;
  opt.seed = cfg.uint("seed", opt.seed, 0, UINT64_MAX);
  json rows = json::array();
  std::size_t passed = 0;
  auto results = run_suite(suite, opt);
  for (const auto& r : results) {
    rows.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"seconds", r.seconds}});
    if (r.pass) ++passed;
  }
  Outcome o;
  o.results = {{"suite", suite}, {"passed", passed}, {"total", results.size()}, {"rows", rows}};
  o.provenance = {{"seed", opt.seed}};
  o.table = "rows";
  o.status = passed == results.size() ? 0 : 1;
  return o;
}

// ---- rendering ----

std::string cell(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return v.get<std::string>();
  if (v.is_object() && v.contains("num") && v.contains("den"))
    return v["num"].get<std::string>() + "/" + v["den"].get<std::string>();
  return v.dump();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Header plus rows; scalar arrays become (n, value) pairs.
std::vector<std::vector<std::string>> table_rows(const json& arr) {
  std::vector<std::vector<std::string>> out;
  if (arr.empty()) return out;
  if (arr.front().is_object()) {
    std::vector<std::string> header;
    for (auto it = arr.front().begin(); it != arr.front().end(); ++it) header.push_back(it.key());
    out.push_back(header);
    for (const auto& row : arr) {
      std::vector<std::string> line;
      for (const auto& key : header) line.push_back(row.contains(key) ? cell(row[key]) : "");
      out.push_back(line);
    }
  } else {
    out.push_back({"n", "value"});
    std::size_t n = 1;
    for (const auto& v : arr) out.push_back({std::to_string(n++), cell(v)});
  }
  return out;
}

std::string render_csv(const Outcome& o) {
  std::ostringstream out;
  auto emit = [&](const std::vector<std::string>& line) {
    for (std::size_t i = 0; i < line.size(); ++i) out << (i ? "," : "") << csv_escape(line[i]);
    out << "\n";
  };
  if (!o.table.empty()) {
    for (const auto& line : table_rows(o.results[o.table])) emit(line);
  } else {
    emit({"key", "value"});
    for (auto it = o.results.begin(); it != o.results.end(); ++it) emit({it.key(), cell(it.value())});
  }
  return out.str();
}

std::string render_text(const std::string& command, const Outcome& o) {
  std::ostringstream out;
  out << command << "\n";
  for (auto it = o.results.begin(); it != o.results.end(); ++it) {
    if (it.key() == o.table) continue;
    out << "  " << it.key() << ": " << cell(it.value()) << "\n";
  }
  if (!o.table.empty()) {
    auto rows = table_rows(o.results[o.table]);
    std::vector<std::size_t> width;
    for (const auto& line : rows)
      for (std::size_t i = 0; i < line.size(); ++i) {
        if (width.size() <= i) width.push_back(0);
        width[i] = std::max(width[i], line[i].size());
      }
    for (const auto& line : rows) {
      out << " ";
      for (std::size_t i = 0; i < line.size(); ++i) out << " " << std::left << std::setw(static_cast<int>(width[i])) << line[i];
      out << "\n";
    }
  }
  return out.str();
}

void write_atomically(const std::string& path, const std::string& text) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".partial";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::ValidationError, "cannot open '" + tmp.string() + "' for writing");
    f << text;
    f.close();
    if (!f) throw Error(ErrorCode::ValidationError, "write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::ValidationError, "cannot move output into '" + path + "'");
  }
}

Outcome dispatch(const std::string& command, const std::string& operand, const Config& cfg) {
  static const std::map<std::string, std::function<Outcome(const std::string&, const Config&)>> table = {
      {"expand", cmd_expand},       {"convergents", cmd_convergents}, {"interval", cmd_interval},
      {"detect-ap", cmd_detect_ap}, {"construct", cmd_construct},     {"localdim", cmd_localdim},
      {"ratios", cmd_ratios},       {"dim", cmd_dim},                 {"certificate", cmd_certificate},
      {"verify", cmd_verify}};
  return table.at(command)(operand, cfg);
}

}  // namespace

Settings parse_config_text(const std::string& text) {
  Settings out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    std::string key = trim(line.substr(0, eq));
    std::string value = eq == std::string::npos ? "true" : trim(line.substr(eq + 1));
    while (!key.empty() && key.front() == '-') key.erase(0, 1);
    if (!known_key(key)) throw UsageError("config line " + std::to_string(lineno) + ": unknown key '" + key + "'");
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    out[key] = value;
  }
  return out;
}

std::string config_hash(const std::string& command, const std::string& operand, const Settings& settings) {
  std::string canon = "command=" + command + "\noperand=" + operand + "\n";
  for (const auto& [k, v] : settings)
    if (k != "out") canon += k + "=" + v + "\n";
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream out;
  out << std::hex << std::setw(16) << std::setfill('0') << h;
  return out.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const auto t0 = std::chrono::steady_clock::now();
  CLI::App app{"apcf: continued fractions with arithmetic-progression digit structure"};
  std::string command, operand, config_path;
  app.add_option("command", command, "one of: expand convergents interval detect-ap construct localdim ratios dim "
                                      "certificate verify")
      ->required();
  app.add_option("operand", operand, "rational, digit list or suite name, depending on the command");
  app.add_option("--config", config_path, "flat key = value file; flags given here override it");
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> opts;
  const std::map<std::string, std::string> help = {
      {"family", "F or G (inferred from --nu / --sigma when omitted)"},
      {"nu", "nu spec, e.g. \"nu(n) = n\" or a table \"nu = [1,2,3]\""},
      {"sigma", "sigma spec, e.g. \"sigma(n) = n*(n+1)\""},
      {"t", "window exponent, 2..10000 (default 2)"},
      {"seed", "sampling seed (default 1; verify uses its own)"},
      {"depth", "number of digits (construct 50, localdim 200)"},
      {"horizon", "range of n checked by dim and certificate (default 100000)"},
      {"s", "exponent for certificate, in (0, 1/2]"},
      {"tol", "bisection tolerance for dim (default 0.005)"},
      {"trunc", "series truncation for the stage audit (default 2000)"},
      {"mode", "random or min (default random)"},
      {"format", "json, csv or text (default json)"},
      {"out", "write the result here instead of stdout"},
      {"k-max", "last stage for ratios"},
      {"min-len", "shortest AP run reported by detect-ap (default 3)"}};
  for (const auto& key : kValueKeys) opts[key] = app.add_option("--" + key, values[key], help.at(key));
  opts["non-strict"] = app.add_flag("--non-strict", "allow a non-decreasing nu");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n" << app.help();
    return 2;
  }

  try {
    if (std::find(kCommands.begin(), kCommands.end(), command) == kCommands.end())
      throw UsageError("unknown command '" + command + "'");
    Settings settings;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw UsageError("cannot read config file '" + config_path + "'");
      std::stringstream buf;
      buf << f.rdbuf();
      settings = parse_config_text(buf.str());
    }
    for (const auto& [key, opt] : opts)
      if (opt->count() > 0) settings[key] = key == "non-strict" ? "true" : values[key];
    Config cfg(settings);
    const std::string format = cfg.choice("format", "json", {"json", "csv", "text"});

    Outcome o = dispatch(command, operand, cfg);

    std::string text;
    if (format == "json") {
      const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0);
      json env = {{"command", command},
                  {"config_hash", config_hash(command, operand, settings)},
                  {"results", o.results},
                  {"provenance", o.provenance},
                  {"elapsed_ms", ms.count()}};
      text = env.dump(2) + "\n";
    } else if (format == "csv") {
      text = render_csv(o);
    } else {
      text = render_text(command, o);
    }
    if (auto path = cfg.get("out")) write_atomically(*path, text);
    else out << text;
    return o.status;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace apcf::cli
