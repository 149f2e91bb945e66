#include "apcf/suites.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <sstream>

#include "apcf/covering_bounds.hpp"
#include "apcf/lambda_construct.hpp"

namespace apcf {

namespace {

CheckResult timed(const std::string& name, const std::function<void(CheckResult&)>& body) {
  CheckResult r;
  r.name = name;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
  } catch (const std::exception& e) {
    r.pass = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  while (!r.detail.empty() && (r.detail.back() == ' ' || r.detail.back() == ';')) r.detail.pop_back();
  return r;
}

BigInt big(std::uint64_t n) { return BigInt(static_cast<unsigned long>(n)); }

LambdaParams config(Family family, unsigned t, Index depth) {
  if (family == Family::F) return LambdaParams::for_F(parse_spec("nu(n) = n"), t);
  return LambdaParams::for_G_depth(parse_spec("sigma(n) = n*(n+1)"), t, depth);
}

std::string config_name(Family family, unsigned t) {
  return std::string(to_string(family)) + "/t=" + std::to_string(t);
}

}  // namespace

CheckResult check_cf_oracle(const SuiteOptions& opt) {
  return timed("exact CF oracle", [&](CheckResult& r) {
    std::mt19937_64 rng(opt.seed);
    std::size_t fail_round = 0, fail_qn = 0;
    for (int i = 0; i < 10000; ++i) {
      std::uint64_t q = std::uniform_int_distribution<std::uint64_t>(2, 1000000)(rng);
      std::uint64_t p = std::uniform_int_distribution<std::uint64_t>(1, q - 1)(rng);
      Rational x = make_rational(big(p), big(q));
      auto conv = convergents(expand(x));
      if (make_rational(conv.back().p, conv.back().q) != x) ++fail_round;
    }
    for (int i = 0; i < 10000; ++i) {
      std::size_t n = std::uniform_int_distribution<std::size_t>(1, 30)(rng);
      std::vector<BigInt> digits;
      for (std::size_t j = 0; j < n; ++j) digits.push_back(big(std::uniform_int_distribution<std::uint64_t>(1, 1000)(rng)));
      std::size_t k = std::uniform_int_distribution<std::size_t>(1, n)(rng);
      if (!verify_qn_bounds(DigitSeq(std::move(digits)), k).all()) ++fail_qn;
    }
    r.pass = fail_round == 0 && fail_qn == 0;
    r.detail = "round-trip failures " + std::to_string(fail_round) + "/10000, qn-bound failures " +
               std::to_string(fail_qn) + "/10000";
  });
}

CheckResult check_measure(const SuiteOptions& opt) {
  return timed("measure normalisation and compatibility", [&](CheckResult& r) {
    std::mt19937_64 rng(opt.seed + 1);
    std::ostringstream out;
    bool ok = true;
    for (Family family : {Family::F, Family::G}) {
      for (unsigned t : {2u, 3u}) {
        LambdaParams params = config(family, t, 17);
        AdditivityReport root = mu_additivity_check(params, DigitSeq{});
        bool norm = root.pass && root.children_sum == 1;
        std::size_t failures = 0, forced = 0;
        for (int i = 0; i < 1000; ++i) {
          Index depth = std::uniform_int_distribution<Index>(1, 16)(rng);
          DigitSeq d = sample_point(params, rng(), depth);
          AdditivityReport rep = mu_additivity_check(params, d);
          if (!rep.pass) ++failures;
          if (rep.forced) ++forced;
        }
        ok = ok && norm && failures == 0;
        out << config_name(family, t) << ": sum mu(I_1) = " << to_string(root.children_sum) << ", "
            << failures << "/1000 failures (" << forced << " forced); ";
      }
    }
    r.pass = ok;
    r.detail = out.str();
  });
}

CheckResult check_lambda_in_J(const SuiteOptions& opt) {
  return timed("Lambda inside J", [&](CheckResult& r) {
    std::mt19937_64 rng(opt.seed + 2);
    std::ostringstream out;
    bool ok = true;
    const Index depth = 500;
    for (Family family : {Family::F, Family::G}) {
      for (unsigned t : {2u, 3u}) {
        LambdaParams params = config(family, t, depth);
        std::size_t failures = 0, boundaries = 0;
        for (int i = 0; i < 1000; ++i) {
          DigitSeq d = sample_point(params, rng(), depth);
          if (lambda_in_J_violation(params, d)) ++failures;
          if (family == Family::G &&
              check_G_membership(d, params.spec, 1).verdict != MembershipReport::Verdict::Consistent)
            ++failures;
        }
        for (const auto& st : params.partition.all())
          if (st.w.max < depth) ++boundaries;
        ok = ok && failures == 0;
        out << config_name(family, t) << ": " << failures << "/1000 failures over " << boundaries
            << " block boundaries; ";
      }
    }
    r.pass = ok;
    r.detail = out.str();
  });
}

CheckResult check_series(const SuiteOptions&) {
  return timed("series inequalities", [&](CheckResult& r) {
    const long double svals[] = {0.26L, 0.3L, 0.4L, 0.5L};
    std::size_t ap_points = 0, ap_fail = 0, ds_points = 0, ds_fail = 0;
    long double worst_ap = 0, worst_ds = 0;
    for (Index a = 1; a <= 10; ++a)
      for (unsigned ell = 3; ell <= 8; ++ell)
        for (long double s : svals) {
          if (!(2 * s * ell > 1)) continue;
          SeriesBound b = ap_series_bound(a, ell, s, 10000);
          ++ap_points;
          if (!b.holds) ++ap_fail;
          worst_ap = std::max(worst_ap, b.estimate.upper / b.rhs);
        }
    for (Index c = 2; c <= 6; ++c)
      for (unsigned n = 2; n <= 4; ++n)
        for (long double s : svals) {
          const long double g0 = 2 - (n - 1) * (2 * s - 1);
          for (long double gamma : {g0, g0 + 0.5L, g0 + 2.0L}) {
            SeriesBound b = descend_sum_bound(c, n, s, gamma, 10000);
            ++ds_points;
            if (!b.holds) ++ds_fail;
            worst_ds = std::max(worst_ds, b.estimate.upper / b.rhs);
          }
        }
    r.pass = ap_fail == 0 && ds_fail == 0;
    std::ostringstream out;
    out << "AP grid " << ap_points - ap_fail << "/" << ap_points << " (max upper/rhs " << static_cast<double>(worst_ap)
        << "), descend grid " << ds_points - ds_fail << "/" << ds_points << " (max upper/rhs "
        << static_cast<double>(worst_ds) << ")";
    r.detail = out.str();
  });
}

CheckResult check_local_dimension(const SuiteOptions& opt) {
  return timed("local dimension lower bound", [&](CheckResult& r) {
    std::mt19937_64 rng(opt.seed + 3);
    std::ostringstream out;
    bool ok = true;
    const Index depth = 200;
    for (Family family : {Family::F, Family::G}) {
      LambdaParams params = config(family, 2, depth);
      RatioSeries series = ratio_series(params, params.partition.stages());
      std::size_t rows = 0, bad = 0;
      long double worst = 1e9L;
      for (int i = 0; i < 21; ++i) {
        SampleMode mode = i == 0 ? SampleMode::Min : SampleMode::Random;
        DigitSeq d = sample_point(params, rng(), depth, mode);
        for (const auto& row : local_dim_series(params, series, d)) {
          ++rows;
          if (!row.ok) ++bad;
          worst = std::min(worst, row.ratio - row.bound);
        }
      }
      ok = ok && bad == 0;
      out << to_string(family) << ": " << rows - bad << "/" << rows << " rows, min(ratio - bound) = "
          << static_cast<double>(worst) << "; ";
    }
    r.pass = ok;
    r.detail = out.str();
  });
}

CheckResult check_closed_forms(const SuiteOptions&) {
  return timed("closed-form reproduction", [&](CheckResult& r) {
    const long double inf = std::numeric_limits<long double>::infinity();
    struct Formula { Family f; long double g; long double want; };
    const Formula formulas[] = {{Family::F, 1, 0.25L}, {Family::F, 3, 0.125L}, {Family::G, 2, 0.25L},
                          {Family::G, inf, 0.5L}, {Family::F, inf, 0.0L}};
    bool ok = true;
    std::ostringstream out;
    for (const auto& f : formulas) {
      long double v = dim_formula(f.f, f.g);
      ok = ok && std::fabs(v - f.want) < 1e-15L;
    }
    out << "formulas " << (ok ? "match" : "MISMATCH") << "; ";
    struct Scan { const char* spec; Family f; long double want; };
    const Scan scans[] = {{"nu(n) = n", Family::F, 0.25L}, {"nu(n) = 3*n", Family::F, 0.125L},
                       {"sigma(n) = n*(n+1)", Family::G, 0.25L}};
    for (const auto& s : scans) {
      ScanResult res = dim_upper_scan(parse_spec(s.spec), s.f, 5e-3L);
      long double v = res.value.get_d();
      bool good = std::fabs(v - s.want) <= 1e-2L;
      ok = ok && good;
      out << s.spec << " -> " << static_cast<double>(v) << " (formula " << static_cast<double>(s.want) << "); ";
    }
    r.pass = ok;
    r.detail = out.str();
  });
}

CheckResult check_bracketing(const SuiteOptions&) {
  return timed("bracketing", [&](CheckResult& r) {
    SequenceSpec nu = parse_spec("nu(n) = n");
    LambdaParams params = LambdaParams::for_F(nu, 10);
    RatioSeries series = ratio_series(params, params.partition.stages());
    const long double target = 9.0L / 40.0L;
    const long double trend = series.last_A();
    ScanResult scan = dim_upper_scan(nu, Family::F, 5e-3L);
    const long double upper = scan.value.get_d();
    r.pass = std::fabs(trend - target) <= 0.06L && trend <= upper + 1e-2L;
    std::ostringstream out;
    out << "A_" << series.rows.back().k << " = " << static_cast<double>(trend) << " (target 9/40 = 0.225), upper scan "
        << static_cast<double>(upper);
    r.detail = out.str();
  });
}

CheckResult check_neighbors(const SuiteOptions& opt) {
  return timed("neighbour bound", [&](CheckResult& r) {
    std::mt19937_64 rng(opt.seed + 4);
    const Index depth = 60;
    LambdaParams configs[] = {config(Family::F, 2, depth), config(Family::F, 3, depth), config(Family::G, 2, depth),
                              config(Family::G, 3, depth)};
    std::size_t bad = 0, max_count = 0;
    for (int i = 0; i < 1000; ++i) {
      const LambdaParams& params = configs[i % 4];
      DigitSeq d = sample_point(params, rng(), depth);
      Index n = std::uniform_int_distribution<Index>(1, depth - 2)(rng);
      Rational hi = interval_length(d.prefix(n)), lo = interval_length(d.prefix(n + 1));
      Rational u = make_rational(big(rng() >> 32), BigInt(1) << 32);
      Rational radius = lo + (hi - lo) * u;
      NeighborCount c = neighbor_count_check(d, radius);
      if (c.n != n || c.escaped || c.count > 4 || c.count < 1) ++bad;
      max_count = std::max(max_count, c.count);
    }
    r.pass = bad == 0;
    r.detail = std::to_string(1000 - bad) + "/1000 pairs within the bound, max count " + std::to_string(max_count);
  });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"qn-bounds", "measure", "series", "certificates", "lambda",
                                                 "ratio",     "bracket", "neighbors", "all"};
  return names;
}

std::vector<CheckResult> run_suite(const std::string& name, const SuiteOptions& opt) {
  if (name == "qn-bounds") return {check_cf_oracle(opt)};
  if (name == "measure") return {check_measure(opt), check_lambda_in_J(opt)};
  if (name == "series") return {check_series(opt)};
  if (name == "certificates") return {check_closed_forms(opt)};
  if (name == "lambda") return {check_lambda_in_J(opt)};
  if (name == "ratio") return {check_local_dimension(opt)};
  if (name == "bracket") return {check_bracketing(opt)};
  if (name == "neighbors") return {check_neighbors(opt)};
  if (name == "all")
    return {check_cf_oracle(opt),      check_measure(opt),      check_lambda_in_J(opt), check_series(opt),
            check_local_dimension(opt), check_closed_forms(opt), check_bracketing(opt),  check_neighbors(opt)};
  throw Error(ErrorCode::ValidationError, "unknown suite '" + name + "'");
}

}  // namespace apcf
