#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "kkflows/elliptic.hpp"
#include "kkflows/errors.hpp"
#include "kkflows/hierarchy.hpp"
#include "kkflows/kkpde.hpp"
#include "kkflows/motion.hpp"
#include "kkflows/projgeom.hpp"
#include "kkflows/verify.hpp"
#include "kkflows/waves.hpp"
#include "output.hpp"

namespace kkflows::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Options shared by every data-producing subcommand.
struct Common {
  std::string format;    // empty: the subcommand default
  std::string output;    // empty: standard output
  std::string manifest;  // empty: next to the output file
  std::uint64_t seed = 1;
};

struct Context {
  std::vector<std::string> args;
  std::ostream& out;
  std::ostream& err;
  Common common;
  Tolerances tolerances;

  Format format(Format fallback) const {
    return common.format.empty() ? fallback : format_from_name(common.format);
  }

  // Writes the content and its manifest.
  void emit(const std::string& content, Format format, bool symbolic) const {
    ManifestInfo info;
    info.command = args;
    info.seed = common.seed;
    info.tolerance_override = tolerances.text();
    info.symbolic = symbolic;
    info.format = format;
    if (common.output.empty() || common.output == "-") {
      out << content;
      if (!common.manifest.empty()) write_atomic(common.manifest, make_manifest(info, "-", content).dump(2) + "\n");
      return;
    }
    write_atomic(common.output, content);
    std::string mpath = common.manifest.empty() ? common.output + ".manifest.json" : common.manifest;
    write_atomic(mpath, make_manifest(info, common.output, content).dump(2) + "\n");
  }

  void emit(const Table& table, Format format, bool symbolic = false) const {
    emit(render(table, format), format, symbolic);
  }
};

void add_common(CLI::App* app, Common& c, bool with_format = true) {
  if (with_format) app->add_option("--out", c.format, "Output format: csv, json or text");
  app->add_option("-o,--output", c.output, "Write to FILE (atomically) and FILE.manifest.json");
  app->add_option("--manifest", c.manifest, "Manifest path (required to get a manifest when writing to stdout)");
  app->add_option("--seed", c.seed, "Random seed");
}

std::vector<double> linspace(double a, double b, int n) {
  if (n < 1) throw InvalidInput("--samples must be positive");
  if (n == 1) return {a};
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
  return out;
}

void check_range(const std::vector<double>& r) {
  if (r.size() != 2 || !(r[0] < r[1]) || !std::isfinite(r[0]) || !std::isfinite(r[1]))
    throw InvalidInput("--range needs two finite values a < b");
}

// ---------------------------------------------------------------------------
// hierarchy gen

struct HierarchyArgs {
  int n = 2;
  std::string format = "text";
};

int cmd_hierarchy(const Context& ctx, const HierarchyArgs& a) {
  if (a.n < 0 || a.n > 12) throw InvalidInput("--n must lie in 0..12");
  if (a.format != "text" && a.format != "json") throw InvalidInput("--format must be json or text");
  auto levels = generate_hierarchy(a.n);
  if (a.format == "json") {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& level : levels) {
      auto l = to_json(level);
      l["equation"] = equation_text(op_D(level.h));
      j.push_back(std::move(l));
    }
    ctx.emit(j.dump(2) + "\n", Format::Json, true);
    return 0;
  }
  std::string text;
  for (int n = 1; n <= a.n; ++n) text += equation_text(op_D(levels[static_cast<std::size_t>(n)].h)) + "\n";
  ctx.emit(text, Format::Text, true);
  return 0;
}

// ---------------------------------------------------------------------------
// wave

struct WaveArgs {
  std::string family = "cnA";
  ProfileParams params;
  std::vector<double> range;
  int samples = 200;
  int order = 7;
};

int cmd_wave(const Context& ctx, const WaveArgs& a) {
  if (a.order < 0 || a.order > 12) throw InvalidInput("--order must lie in 0..12");
  auto k = make_profile(family_from_name(a.family), a.params);
  double lo, hi;
  if (a.range.empty()) {
    auto w = k.sample_window();
    lo = w.lo;
    hi = w.hi;
  } else {
    check_range(a.range);
    lo = a.range[0];
    hi = a.range[1];
  }
  Table t;
  t.columns = {"s", "k"};
  for (int j = 1; j <= a.order; ++j) t.columns.push_back("k" + std::to_string(j));
  for (double s : linspace(lo, hi, a.samples)) {
    std::vector<double> jet;
    try {
      if (!k.in_domain(s)) continue;
      jet = k.jet(s, a.order);
    } catch (const DomainError&) {
      continue;
    }
    std::vector<Cell> row{s};
    for (double x : jet) row.emplace_back(x);
    t.rows.push_back(std::move(row));
  }
  ctx.emit(t, ctx.format(Format::Csv));
  return 0;
}

// ---------------------------------------------------------------------------
// curve analyze

struct CurveArgs {
  std::string curve = "builtin:exp-cos";
  std::vector<double> range{0.0, 2 * std::numbers::pi};
  int samples = 200;
  bool find_sextatic = false;
  int grid = 720;
};

Curve curve_from_name(const std::string& spec) {
  const std::string prefix = "builtin:";
  std::string name = spec.rfind(prefix, 0) == 0 ? spec.substr(prefix.size()) : spec;
  return builtin_curve(name);
}

int cmd_curve(const Context& ctx, const CurveArgs& a) {
  check_range(a.range);
  Curve c = curve_from_name(a.curve);
  double lo = a.range[0], hi = a.range[1];
  auto scan = find_sextatic(c, lo, hi, a.grid);
  Table t;
  if (a.find_sextatic) {
    t.columns = {"index", "t", "a - b'/2"};
    for (std::size_t i = 0; i < scan.roots.size(); ++i)
      t.rows.push_back({static_cast<double>(i + 1), scan.roots[i], sextatic_function(c, scan.roots[i])});
    ctx.emit(t, ctx.format(Format::Text));
    if (scan.degenerate) ctx.err << "note: a - b'/2 vanishes on the whole grid\n";
    return 0;
  }
  t.columns = {"t", "v", "k", "sextatic"};
  auto grid = linspace(lo, hi, a.samples);
  double half = a.samples > 1 ? 0.5 * (hi - lo) / (a.samples - 1) : 0.0;
  for (double x : grid) {
    double v = kNaN, k = kNaN;
    bool near = std::any_of(scan.roots.begin(), scan.roots.end(), [&](double r) { return std::abs(r - x) <= half; });
    try {
      v = speed_and_arc(c, x).v;
      k = curvature(c, x);
    } catch (const SextaticPoint&) {
      near = true;
    } catch (const DomainError&) {
    }
    t.rows.push_back({x, v, k, near ? 1.0 : 0.0});
  }
  ctx.emit(t, ctx.format(Format::Csv));
  return 0;
}

// ---------------------------------------------------------------------------
// congruence and motion

struct CongruenceArgs {
  double m = 0.5;
  std::string method = "quadrature";
  std::vector<double> range{0.0, 8.0};
  int samples = 201;
};

Vec3 unit(const Vec3& x) { return x / x.norm(); }

nlohmann::json matrix_json(const Mat3& A) {
  nlohmann::json j = nlohmann::json::array();
  for (int i = 0; i < 3; ++i) j.push_back({A(i, 0), A(i, 1), A(i, 2)});
  return j;
}

int cmd_congruence(const Context& ctx, const CongruenceArgs& a) {
  check_range(a.range);
  if (a.method != "quadrature" && a.method != "ode") throw InvalidInput("--method must be quadrature or ode");
  CnoidalCongruence cc(a.m);
  auto data = hamiltonian(cc.curvature(), DiffPoly(9L), cc.v());
  auto S = linspace(a.range[0], a.range[1], a.samples);
  std::vector<double> grid = S;
  grid.push_back(0.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<Mat3> frames;
  if (a.method == "quadrature") {
    auto Q = quadrature_integrate(data, grid);
    frames = Q.frames;
  } else {
    frames = integrate_frenet(cc.curvature(), constant_function(1.0), grid, 0.0).frames();
  }
  Table t;
  t.columns = {"s", "x0", "x1", "x2"};
  for (double s : S) {
    auto i = static_cast<std::size_t>(std::lower_bound(grid.begin(), grid.end(), s) - grid.begin());
    Vec3 x = unit(frames[i].col(0));
    t.rows.push_back({s, x(0), x(1), x(2)});
  }
  Format f = ctx.format(Format::Csv);
  if (f != Format::Json) {
    ctx.emit(t, f);
    return 0;
  }
  nlohmann::json j;
  j["m"] = a.m;
  j["v"] = cc.v();
  j["delta"] = cc.delta();
  j["xi"] = matrix_json(data.xi);
  j["taus"] = nlohmann::json::array();
  for (const auto& tau : cc.taus()) j["taus"].push_back({tau.real(), tau.imag()});
  j["method"] = a.method;
  j["curve"] = to_json(t);
  ctx.emit(j.dump(2) + "\n", Format::Json, false);
  return 0;
}

struct MotionArgs {
  double m = 0.7;
  std::vector<double> times{0.0, 0.5, 1.0, 1.5};
  std::vector<double> range{0.0, 8.0};
  int samples = 201;
};

int cmd_motion(const Context& ctx, const MotionArgs& a) {
  check_range(a.range);
  if (a.times.empty()) throw InvalidInput("--t needs at least one time");
  CnoidalCongruence cc(a.m);
  auto data = hamiltonian(cc.curvature(), DiffPoly(9L), cc.v());
  auto S = linspace(a.range[0], a.range[1], a.samples);
  auto [tmin, tmax] = std::minmax_element(a.times.begin(), a.times.end());
  double lo = a.range[0] + std::min(cc.v() * *tmin, cc.v() * *tmax) - 0.5;
  double hi = a.range[1] + std::max(cc.v() * *tmin, cc.v() * *tmax) + 0.5;
  lo = std::min(lo, 0.0);
  hi = std::max(hi, 0.0);
  int n = std::max(2, static_cast<int>(std::ceil((hi - lo) / 0.1)));
  auto grid = linspace(lo, hi, n + 1);
  auto F = integrate_frenet(cc.curvature(), constant_function(1.0), grid, 0.0);
  auto x = [&](double s) -> Vec3 { return F.frame_at(s).col(0); };
  auto g = motion_evolve(data.xi, cc.v(), x, S, a.times);
  Table t;
  t.columns = {"t", "s", "x0", "x1", "x2"};
  for (std::size_t i = 0; i < a.times.size(); ++i)
    for (std::size_t j = 0; j < S.size(); ++j) t.rows.push_back({a.times[i], S[j], g[i][j](0), g[i][j](1), g[i][j](2)});
  ctx.emit(t, ctx.format(Format::Csv));
  return 0;
}

// ---------------------------------------------------------------------------
// pde

struct PdeArgs {
  int order = 1;
  std::string init = "cnA:0.5";
  double T = 1.0;
  double dt = 1e-4;
  std::size_t n = 512;
  int snapshots = 10;
  bool measure_velocity = false;
};

CurvatureProfile profile_from_spec(const std::string& spec) {
  auto colon = spec.find(':');
  std::string name = spec.substr(0, colon);
  double x = 0.5;
  if (colon != std::string::npos) {
    std::size_t used = 0;
    std::string rest = spec.substr(colon + 1);
    try {
      x = std::stod(rest, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != rest.size()) throw InvalidInput("--init expects FAMILY:PARAMETER, got '" + spec + "'");
  }
  Family f = family_from_name(name);
  ProfileParams p;
  if (f == Family::Constant)
    p.value = x;
  else
    p.m = x;
  return make_profile(f, p);
}

int cmd_pde(const Context& ctx, const PdeArgs& a) {
  if (a.order != 1 && a.order != 2) throw InvalidInput("--order must be 1 or 2");
  if (!(a.T > 0) || !(a.dt > 0)) throw InvalidInput("--T and --dt must be positive");
  auto k = profile_from_spec(a.init);
  auto g = sample_profile(k, a.n);
  EvolveOptions o;
  o.snapshots = a.snapshots;
  auto tr = evolve_kk(g, a.order, a.T, a.dt, o);
  Table t;
  if (a.measure_velocity) {
    auto ve = measure_velocity(tr);
    t.columns = {"velocity", "profile_velocity", "fit_residual", "mean_drift", "h1_drift"};
    t.rows.push_back({ve.velocity, k.velocity(), ve.fit_residual, tr.mean_drift(), tr.h1_drift()});
    ctx.emit(t, ctx.format(Format::Text));
    return 0;
  }
  t.columns = {"t"};
  for (std::size_t i = 0; i < g.n(); ++i) t.columns.push_back("u" + std::to_string(i));
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    std::vector<Cell> row{tr.times[i]};
    for (double x : tr.snapshots[i]) row.emplace_back(x);
    t.rows.push_back(std::move(row));
  }
  ctx.emit(t, ctx.format(Format::Csv));
  return 0;
}

// ---------------------------------------------------------------------------
// special

struct SpecialArgs {
  std::string fn;
  std::vector<double> args;
};

int cmd_special(const Context& ctx, const SpecialArgs& a) {
  auto need = [&](std::size_t n, const char* usage) {
    if (a.args.size() != n) throw InvalidInput("--fn " + a.fn + " expects --args " + usage);
  };
  const auto& x = a.args;
  cplx value;
  if (a.fn == "sn" || a.fn == "cn" || a.fn == "dn" || a.fn == "am") {
    need(2, "u m");
    auto j = jacobi(x[0], x[1]);
    value = a.fn == "sn" ? j.sn : a.fn == "cn" ? j.cn : a.fn == "dn" ? j.dn : j.am;
  } else if (a.fn == "K") {
    need(1, "m");
    value = complete_K(x[0]);
  } else if (a.fn == "F") {
    need(2, "phi m");
    value = incomplete_F(x[0], x[1]);
  } else if (a.fn == "Pi") {
    if (x.size() == 3)
      value = incomplete_Pi(cplx(x[0], 0.0), x[1], x[2]);
    else if (x.size() == 4)
      value = incomplete_Pi(cplx(x[0], x[1]), x[2], x[3]);
    else
      throw InvalidInput("--fn Pi expects --args zeta phi m or --args re(zeta) im(zeta) phi m");
  } else if (a.fn == "wp") {
    need(3, "x g2 g3");
    value = weierstrass_p(x[0], x[1], x[2]);
  } else {
    throw InvalidInput("--fn must be one of sn, cn, dn, am, K, F, Pi, wp");
  }
  Table t;
  t.columns = {"fn", "re", "im"};
  t.rows.push_back({a.fn, value.real(), value.imag()});
  ctx.emit(t, ctx.format(Format::Text));
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
  std::vector<std::string> suites{"all"};
  bool sequential = false;
};

int cmd_verify(const Context& ctx, const VerifyArgs& a) {
  std::vector<std::string> names;
  for (const auto& s : a.suites) {
    if (s == "all") {
      for (const auto& n : suite_names())
        if (std::find(names.begin(), names.end(), n) == names.end()) names.push_back(n);
    } else if (std::find(names.begin(), names.end(), s) == names.end()) {
      names.push_back(s);
    }
  }
  auto results = run_suites(names, ctx.tolerances, ctx.common.seed, !a.sequential);
  Table t;
  t.columns = {"suite", "check", "residual", "tolerance", "status", "detail"};
  std::size_t passed = 0;
  for (const auto& r : results) {
    passed += r.pass ? 1 : 0;
    t.rows.push_back({r.suite, r.name, r.residual, r.exact ? std::string("exact") : Cell(r.tolerance),
                      std::string(r.pass ? "PASS" : "FAIL"), r.detail});
  }
  Format f = ctx.format(Format::Text);
  std::string content = render(t, f);
  if (f == Format::Text)
    content += std::to_string(passed) + " of " + std::to_string(results.size()) + " checks passed\n";
  ctx.emit(content, f, false);
  if (passed != results.size()) {
    ctx.err << "verify: " << results.size() - passed << " check(s) failed\n";
    return 1;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// replay

struct ReplayArgs {
  std::string manifest;
};

int cmd_replay(const Context& ctx, const ReplayArgs& a) {
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(read_file(a.manifest));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("malformed manifest: ") + e.what());
  }
  auto command = m.at("command").get<std::vector<std::string>>();
  const auto& output = m.at("outputs").at(0);
  std::string expected = output.at("fnv1a64").get<std::string>();
  bool symbolic = output.at("kind").get<std::string>() == "symbolic";
  double rtol = m.at("tolerances").at("replay_rtol").get<double>();
  if (!command.empty() && command[0] == "replay") throw InvalidInput("a replay manifest cannot be replayed");

  namespace fs = std::filesystem;
  fs::path tmp = fs::temp_directory_path() / ("kkflows-replay-" + hex64(fnv1a64(a.manifest + expected)));
  std::string tmp_out = tmp.string() + ".out", tmp_manifest = tmp.string() + ".manifest.json";
  std::vector<std::string> args;
  for (std::size_t i = 0; i < command.size(); ++i) {
    const auto& c = command[i];
    if ((c == "-o" || c == "--output" || c == "--manifest") && i + 1 < command.size()) {
      ++i;
      continue;
    }
    if (c.rfind("--output=", 0) == 0 || c.rfind("--manifest=", 0) == 0) continue;
    args.push_back(c);
  }
  args.insert(args.end(), {"--output", tmp_out, "--manifest", tmp_manifest});
  std::ostringstream sink_out, sink_err;
  int code = run_cli(args, sink_out, sink_err);
  std::string produced;
  if (fs::exists(tmp_out)) produced = read_file(tmp_out);
  std::error_code ec;
  fs::remove(tmp_out, ec);
  fs::remove(tmp_manifest, ec);
  if (code == 2) {
    ctx.err << sink_err.str();
    return 2;
  }
  std::string got = hex64(fnv1a64(produced));
  std::string verdict;
  int status = 0;
  if (got == expected) {
    verdict = "identical";
  } else if (!symbolic && m.at("outputs").at(0).contains("path") && fs::exists(output.at("path").get<std::string>())) {
    double dev = compare_numeric_text(read_file(output.at("path").get<std::string>()), produced);
    verdict = dev <= rtol ? "within tolerance (" + format_double(dev) + ")" : "differs (" + format_double(dev) + ")";
    status = dev <= rtol ? 0 : 1;
  } else {
    verdict = "differs";
    status = 1;
  }
  ctx.out << "replay: " << verdict << ", hash " << got << " against " << expected << "\n";
  return status;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kaup-Kupershmidt hierarchy, projective curve flows and their traveling waves", "kkflows"};
  app.require_subcommand(1);

  Context ctx{args, out, err, {}, {}};

  HierarchyArgs ha;
  auto* hierarchy = app.add_subcommand("hierarchy", "Symbolic hierarchy");
  hierarchy->require_subcommand(1);
  auto* gen = hierarchy->add_subcommand("gen", "Generate levels 0..n");
  gen->add_option("--n", ha.n, "Highest level")->capture_default_str();
  gen->add_option("--format", ha.format, "json or text")->capture_default_str();
  add_common(gen, ctx.common, false);

  WaveArgs wa;
  auto* wave = app.add_subcommand("wave", "Traveling-wave curvature profiles and their jets");
  wave->add_option("--family", wa.family, "cnA, nsA, wpA, cnB, nsB, wpB, cscA, cothA, sechA, cscB, cothB, sechB, soliton, constant")
      ->capture_default_str();
  wave->add_option("--m", wa.params.m, "Jacobi parameter or soliton width")->capture_default_str();
  wave->add_option("--c", wa.params.c, "Phase")->capture_default_str();
  wave->add_option("--g2", wa.params.g2, "Weierstrass invariant g2");
  wave->add_option("--g3", wa.params.g3, "Weierstrass invariant g3");
  wave->add_flag("--bounded", wa.params.bounded, "Bounded Weierstrass branch");
  wave->add_option("--alpha", wa.params.alpha, "Soliton amplitude prefactor")->capture_default_str();
  wave->add_option("--value", wa.params.value, "Constant profile value");
  wave->add_option("--range", wa.range, "Interval a b (default: one period or a window)")->expected(2);
  wave->add_option("--samples", wa.samples, "Number of samples")->capture_default_str();
  wave->add_option("--order", wa.order, "Highest derivative")->capture_default_str();
  add_common(wave, ctx.common);

  CurveArgs ca;
  auto* curve = app.add_subcommand("curve", "Projective invariants of plane curves");
  curve->require_subcommand(1);
  auto* analyze = curve->add_subcommand("analyze", "Speed, curvature and sextatic points");
  analyze->add_option("--curve", ca.curve, "builtin:exp-cos, builtin:conic or builtin:cubic")->capture_default_str();
  analyze->add_option("--range", ca.range, "Interval a b")->expected(2);
  analyze->add_option("--samples", ca.samples, "Number of samples")->capture_default_str();
  analyze->add_option("--grid", ca.grid, "Grid for the sextatic scan")->capture_default_str();
  analyze->add_flag("--find-sextatic", ca.find_sextatic, "Print the sextatic points");
  add_common(analyze, ctx.common);

  CongruenceArgs cga;
  auto* congruence = app.add_subcommand("congruence", "Cnoidal congruence curve");
  congruence->add_option("--m", cga.m, "Jacobi parameter")->capture_default_str();
  congruence->add_option("--method", cga.method, "quadrature or ode")->capture_default_str();
  congruence->add_option("--range", cga.range, "Interval a b")->expected(2);
  congruence->add_option("--samples", cga.samples, "Number of samples")->capture_default_str();
  add_common(congruence, ctx.common);

  MotionArgs ma;
  auto* motion = app.add_subcommand("motion", "Motion of the cnoidal congruence curve");
  motion->add_option("--m", ma.m, "Jacobi parameter")->capture_default_str();
  motion->add_option("--t", ma.times, "Times");
  motion->add_option("--range", ma.range, "Interval a b")->expected(2);
  motion->add_option("--samples", ma.samples, "Number of samples")->capture_default_str();
  add_common(motion, ctx.common);

  PdeArgs pa;
  auto* pde = app.add_subcommand("pde", "Periodic evolution of the first two equations");
  pde->add_option("--order", pa.order, "1 or 2")->capture_default_str();
  pde->add_option("--init", pa.init, "FAMILY:PARAMETER, one period of a periodic profile")->capture_default_str();
  pde->add_option("--T", pa.T, "Final time")->capture_default_str();
  pde->add_option("--dt", pa.dt, "Time step")->capture_default_str();
  pde->add_option("--n", pa.n, "Grid points (power of two, at least 64)")->capture_default_str();
  pde->add_option("--snapshots", pa.snapshots, "Snapshots after t = 0")->capture_default_str();
  pde->add_flag("--measure-velocity", pa.measure_velocity, "Print the measured speed instead of the snapshots");
  add_common(pde, ctx.common);

  SpecialArgs sa;
  auto* special = app.add_subcommand("special", "Evaluate a special function");
  special->add_option("--fn", sa.fn, "sn, cn, dn, am, K, F, Pi or wp")->required();
  special->add_option("--args", sa.args, "Arguments")->required();
  add_common(special, ctx.common);

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run invariant suites");
  std::string suite_help = "all";
  for (const auto& n : suite_names()) suite_help += ", " + n;
  verify->add_option("--suite", va.suites, suite_help)->capture_default_str();
  verify->add_flag("--sequential", va.sequential, "Run suites one after another");
  add_common(verify, ctx.common);

  ReplayArgs ra;
  auto* replay = app.add_subcommand("replay", "Re-run the command of a manifest and compare the output");
  replay->add_option("manifest", ra.manifest, "Manifest file")->required();

  if (args.empty()) {
    err << app.help();
    return 2;
  }
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    ctx.tolerances = Tolerances::from_env();
    if (gen->parsed()) return cmd_hierarchy(ctx, ha);
    if (wave->parsed()) return cmd_wave(ctx, wa);
    if (analyze->parsed()) return cmd_curve(ctx, ca);
    if (congruence->parsed()) return cmd_congruence(ctx, cga);
    if (motion->parsed()) return cmd_motion(ctx, ma);
    if (pde->parsed()) return cmd_pde(ctx, pa);
    if (special->parsed()) return cmd_special(ctx, sa);
    if (verify->parsed()) return cmd_verify(ctx, va);
    if (replay->parsed()) return cmd_replay(ctx, ra);
  } catch (const InvalidInput& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << app.help();
  return 2;
}

}  // namespace kkflows::cli
