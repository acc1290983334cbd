#include "coarse/cli.hpp"

#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>

#include <CLI11.hpp>

#include "coarse/colored_cover.hpp"
#include "coarse/flattening.hpp"
#include "coarse/fn_expr.hpp"
#include "coarse/hyperbolicity.hpp"
#include "coarse/io.hpp"
#include "coarse/qi_repair.hpp"

namespace coarse {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerificationFailed = 1;
constexpr int kExitParseError = 2;

struct Config {
  std::uint64_t seed = kDefaultSeed;
  double tolerance = kTol;
};

void apply_env_seed(Config& config) {
  if (const char* env = std::getenv("COARSE_FORGE_SEED")) {
    config.seed = std::strtoull(env, nullptr, 0);
  }
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << contents;
}

std::string join_tuple(const std::vector<std::int64_t>& t) {
  std::string out = "(";
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += " ";
    out += std::to_string(t[i]);
  }
  return out + ")";
}

std::vector<double> seeded_samples(std::size_t count, double lo_exclusive, double hi,
                                   std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    double v = lo_exclusive + (hi - lo_exclusive) * rng.next_unit();
    if (v <= lo_exclusive) v = hi;  // keep the interval half-open on the left
    out.push_back(v);
  }
  return out;
}

std::string flatten_report_csv(const FlattenReport& report) {
  std::string csv = "r_prime,D_tilde,excess\n";
  for (const auto& row : report.rows) {
    csv += format_number(row.r_prime) + "," + format_number(row.transported) + "," +
           format_number(row.excess) + "\n";
  }
  return csv;
}

int cmd_flatten(const std::vector<std::string>& controls, int steps, const std::string& out_path,
                std::ostream& out) {
  std::vector<PiecewiseLinearFn> fns;
  fns.reserve(controls.size());
  std::string source;
  for (const auto& expr : controls) {
    fns.push_back(parse_fn(expr));
    if (!source.empty()) source += ",";
    source += expr;
  }
  FlatteningSchedule schedule = FlatteningSchedule::build_multi(std::move(fns), steps, source);
  if (!out_path.empty()) save_json(to_json(schedule), out_path);
  const auto& a = schedule.anchors();
  out << "schedule with " << a.size() << " anchors";
  for (std::size_t i = 0; i < std::min<std::size_t>(a.size(), 8); ++i)
    out << (i ? "," : ": a = ") << format_number(a[i]);
  if (a.size() > 8) out << ",...";
  out << "\n";
  return kExitOk;
}

int cmd_verify_flatten(const std::string& schedule_path, const std::string& control_expr,
                       double rmax, std::size_t samples, std::size_t log_samples, double log_rmax,
                       const std::string& out_path, const std::string& log_out_path,
                       const Config& config, std::ostream& out) {
  const PiecewiseLinearFn control = parse_fn(control_expr);
  const PiecewiseLinearFn stored = load_pl_fn(schedule_path);

  // Rebuild an extendable schedule from the control and cross-check the
  // stored function against it on the stored anchor range.
  FlatteningSchedule schedule = FlatteningSchedule::build(control, 1, control_expr);
  schedule.ensure_anchor_at_least(stored.last_x());
  const PiecewiseLinearFn rebuilt = schedule.fn();
  for (const auto& bp : stored.breakpoints()) {
    const double expected = rebuilt.eval(bp.x);
    if (std::abs(expected - bp.y) > kTol * (1.0 + std::abs(expected)))
      throw std::runtime_error("schedule file does not match --control " + control_expr);
  }
  const std::vector<double> r_primes = seeded_samples(samples, 0.0, rmax, config.seed);
  FlattenReport report = verify_flattening(schedule, control, r_primes, config.tolerance);
  if (!out_path.empty()) write_file(out_path, flatten_report_csv(report));
  out << "flattening excess: max " << format_number(report.max_excess) << " over "
      << report.rows.size() << " samples (bound " << format_number(report.bound) << ")\n";

  bool pass = report.pass;
  if (log_samples > 0) {
    const std::vector<double> r_dprimes = seeded_samples(log_samples, 0.0, log_rmax, config.seed ^ 1);
    FlattenReport log_report = verify_log_control(schedule, control, r_dprimes, 4, config.tolerance);
    if (!log_out_path.empty()) write_file(log_out_path, flatten_report_csv(log_report));
    out << "post-log excess: max " << format_number(log_report.max_excess) << " over "
        << log_report.rows.size() << " samples (bound " << format_number(log_report.bound) << ")\n";
    pass = pass && log_report.pass;
  }
  return pass ? kExitOk : kExitVerificationFailed;
}

std::string cover_report_csv(const CoverReport& report) {
  std::string csv = "color,cell_id,diameter,min_same_color_gap\n";
  for (const auto& cell : report.cells) {
    std::string id;
    for (std::size_t i = 0; i < cell.cell.size(); ++i) {
      if (i) id += ";";
      id += std::to_string(cell.cell[i]);
    }
    csv += std::to_string(cell.color) + "," + id + "," + format_number(cell.diameter) + "," +
           format_number(cell.min_same_color_gap) + "\n";
  }
  return csv;
}

int cmd_cover(int n, std::int64_t r, std::int64_t box, bool verify, double check_scale,
              double check_bound, const std::string& transform_expr, const std::string& out_path,
              std::ostream& out) {
  const BrickCover cover(n, r);
  SpacePtr space = std::make_shared<LatticeSpace>(n, box);
  double scale = check_scale >= 0.0 ? check_scale : static_cast<double>(r);
  double bound = check_bound >= 0.0 ? check_bound : cover.advertised_diameter_bound();
  if (!transform_expr.empty()) {
    const PiecewiseLinearFn c = parse_fn(transform_expr);
    // Re-measure the same cells in the rescaled metric at the pushed scales.
    if (check_scale < 0.0) scale = c.eval(scale);
    if (check_bound < 0.0) bound = c.eval(bound);
    space = std::make_shared<TransformedSpace>(space, c);
  }
  const CoverReport report = verify_cover(*space, cover, scale, bound);
  if (!out_path.empty()) write_file(out_path, cover_report_csv(report));
  out << cover.describe() << " on " << space->describe() << ": " << report.cell_count
      << " cells, min gap " << format_number(report.min_separation) << ", max diameter "
      << format_number(report.max_diameter) << "\n";
  if (!verify) return kExitOk;
  if (!report.passed()) {
    for (const auto& v : report.separation_violations) {
      out << "separation violation: color " << v.color << " " << join_tuple(v.point_a) << " vs "
          << join_tuple(v.point_b) << " at distance " << format_number(v.distance) << "\n";
    }
    for (const auto& v : report.diameter_violations) {
      out << "diameter violation: color " << v.color << " " << join_tuple(v.point_a) << " vs "
          << join_tuple(v.point_b) << " at distance " << format_number(v.diameter) << "\n";
    }
    for (const auto& p : report.uncovered) out << "uncovered point " << join_tuple(p) << "\n";
    return kExitVerificationFailed;
  }
  out << "cover verified at scale " << format_number(scale) << " with bound "
      << format_number(bound) << "\n";
  return kExitOk;
}

int cmd_metric_check(const std::string& space_expr, std::size_t samples, const Config& config,
                     std::ostream& out) {
  const SpacePtr space = parse_space(space_expr);
  const SamplePlan plan = space->size() <= 1000 && samples == 0
                              ? SamplePlan::exhaustive_plan()
                              : SamplePlan::sampled(samples ? samples : 200000, config.seed);
  const AxiomReport report = verify_metric_axioms(*space, plan);
  out << space->describe() << ": " << report.triples_checked << " triples, max defect "
      << format_number(report.max_defect) << "\n";
  if (!report.passed()) {
    for (std::size_t i = 0; i < std::min<std::size_t>(report.violations.size(), 8); ++i) {
      const auto& v = report.violations[i];
      out << "triangle violation (" << v.x << "," << v.y << "," << v.z << ") defect "
          << format_number(v.defect) << "\n";
    }
    return kExitVerificationFailed;
  }
  return kExitOk;
}

int cmd_qi(const std::string& phi_expr, const std::string& big_phi_expr, int steps,
           std::int64_t box, bool log_correct, double epsilon, const std::string& out_path,
           const std::string& report_path, const Config& config, std::ostream& out) {
  CoarseProfile profile{parse_fn(phi_expr), parse_fn(big_phi_expr)};
  QISchedulePair pair = QISchedulePair::build(profile, steps);

  int status = kExitOk;
  if (box > 0) {
    pair.ensure_coverage(static_cast<double>(2 * box));
    const SpacePtr base = std::make_shared<LatticeSpace>(1, box);
    const SampledMap map{
        base, std::make_shared<TransformedSpace>(base, pair.profile().contraction),
        [](std::size_t i) { return i; }};
    PiecewiseLinearFn cx = pair.domain_fn();
    PiecewiseLinearFn cy = pair.codomain_fn();
    double lo = -2.0, hi = 1.0;
    if (log_correct) {
      cx = cx.log_corrected(4);
      cy = cy.log_corrected(4);
    }
    if (epsilon > 0.0) {
      cx = cx.scaled(epsilon);
      cy = cy.scaled(epsilon);
      lo *= epsilon;
      hi *= epsilon;
    }
    const PairDiffStats stats = verify_qi_additive(map, cx, cy, SamplePlan::exhaustive_plan());
    out << "differences in [" << format_number(stats.min_diff) << ", "
        << format_number(stats.max_diff) << "] over " << stats.pairs_checked << " pairs (bounds ["
        << format_number(lo) << ", " << format_number(hi) << "])\n";
    if (!report_path.empty()) {
      std::string csv = "x,x_prime,d_prime_X,d_prime_Y,diff\n";
      for (const auto& w : {stats.min_witness, stats.max_witness}) {
        const double dx = cx.eval(map.domain->distance(w[0], w[1]));
        const double dy = cy.eval(map.codomain->distance(w[0], w[1]));
        csv += std::to_string(w[0]) + "," + std::to_string(w[1]) + "," + format_number(dx) + "," +
               format_number(dy) + "," + format_number(dy - dx) + "\n";
      }
      write_file(report_path, csv);
    }
    if (!stats.within(lo, hi, config.tolerance)) status = kExitVerificationFailed;
  }
  if (!out_path.empty()) save_json(to_json(pair), out_path);
  return status;
}

int cmd_lsl(const std::string& big_phi_expr, int steps, double rmax, std::size_t samples,
            const std::string& out_path, const std::string& report_path, const Config& config,
            std::ostream& out) {
  const PiecewiseLinearFn dilation = parse_fn(big_phi_expr);
  const PiecewiseLinearFn cy = build_lsl_schedule(dilation, steps);

  double max_excess = -std::numeric_limits<double>::infinity();
  std::string csv = "r,value,excess\n";
  for (std::size_t i = 0; i <= samples; ++i) {
    const double r = rmax * static_cast<double>(i) / static_cast<double>(samples);
    const double value = cy.eval(dilation.eval(r));
    const double excess = value - r;
    max_excess = std::max(max_excess, excess);
    csv += format_number(r) + "," + format_number(value) + "," + format_number(excess) + "\n";
  }
  if (!out_path.empty()) save_json(to_json(cy), out_path);
  if (!report_path.empty()) write_file(report_path, csv);
  out << "large-scale Lipschitz excess: max " << format_number(max_excess) << " on [0, "
      << format_number(rmax) << "]\n";
  return max_excess <= 1.0 + config.tolerance ? kExitOk : kExitVerificationFailed;
}

int cmd_delta(int n, const std::vector<std::int64_t>& boxes, const std::string& transform,
              std::size_t quadruples, const std::string& out_path, const Config& config,
              std::ostream& out) {
  std::string csv = "box_radius,transform,quadruples,delta,witness\n";
  for (const std::int64_t box : boxes) {
    SpacePtr space = std::make_shared<LatticeSpace>(n, box);
    if (transform == "log") {
      space = std::make_shared<LogScaledSpace>(space);
    } else if (transform != "raw") {
      space = std::make_shared<TransformedSpace>(space, parse_fn(transform));
    }
    const SamplePlan plan = space->size() <= 40 ? SamplePlan::exhaustive_plan()
                                                : SamplePlan::sampled(quadruples, config.seed);
    const DeltaReport report = four_point_delta(*space, plan);
    const LatticeSpace* lattice = space->underlying_lattice();
    std::string witness;
    for (const std::size_t idx : report.witness) {
      if (!witness.empty()) witness += ";";
      witness += join_tuple(lattice->point(idx));
    }
    csv += std::to_string(box) + "," + transform + "," + std::to_string(report.quadruples_checked) +
           "," + format_number(report.delta) + ",\"" + witness + "\"\n";
    out << "box " << box << " (" << transform << "): delta " << format_number(report.delta)
        << " over " << report.quadruples_checked << " quadruples\n";
  }
  if (!out_path.empty()) write_file(out_path, csv);
  return kExitOk;
}

int cmd_product_demo(int steps, std::int64_t box, std::size_t samples, const std::string& out_dir,
                     const Config& config, std::ostream& out) {
  // Z^2 = Z x Z with the sup metric: one rescaling built from the product's
  // control and both factors' controls flattens all three at once.
  const PiecewiseLinearFn product_control = PiecewiseLinearFn::affine(6.0, 0.0);
  const PiecewiseLinearFn factor_control = PiecewiseLinearFn::affine(4.0, 0.0);
  FlatteningSchedule schedule = FlatteningSchedule::build_multi(
      {product_control, factor_control, factor_control}, steps, "affine:6,0,affine:4,0,affine:4,0");

  if (!out_dir.empty()) std::filesystem::create_directories(out_dir);
  const std::vector<double> r_primes = seeded_samples(samples, 0.0, steps / 2.0, config.seed);
  bool pass = true;
  const std::array<std::pair<const char*, const PiecewiseLinearFn*>, 2> checks{
      std::pair{"product", &product_control}, std::pair{"factor", &factor_control}};
  for (const auto& [name, control] : checks) {
    const FlattenReport report = verify_flattening(schedule, *control, r_primes, config.tolerance);
    out << name << " control: max excess " << format_number(report.max_excess) << "\n";
    pass = pass && report.pass;
    if (!out_dir.empty())
      write_file(out_dir + "/excess_" + std::string(name) + ".csv", flatten_report_csv(report));
  }

  // The rescaled sup metric equals the sup of the rescaled factor metrics.
  const PiecewiseLinearFn c = schedule.fn();
  const auto line = std::make_shared<LatticeSpace>(1, box);
  const auto plane = std::make_shared<LatticeSpace>(2, box);
  const SupProductSpace sup_of_transformed(
      {std::make_shared<TransformedSpace>(line, c), std::make_shared<TransformedSpace>(line, c)});
  const TransformedSpace transformed_plane(plane, c);
  double worst = 0.0;
  for (std::size_t i = 0; i < plane->size(); ++i) {
    for (std::size_t j = i + 1; j < plane->size(); ++j) {
      worst = std::max(worst, std::abs(transformed_plane.distance(i, j) -
                                       sup_of_transformed.distance(i, j)));
    }
  }
  out << "sup-product commutation: max deviation " << format_number(worst) << " on box " << box
      << "\n";
  pass = pass && worst <= config.tolerance;
  if (!out_dir.empty()) save_json(to_json(schedule), out_dir + "/schedule.json");
  return pass ? kExitOk : kExitVerificationFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"coarse-forge: concave metric rescaling toolkit"};
  app.require_subcommand(1);

  Config config;
  app.add_option("--seed", config.seed, "seed for every sampled plan");
  app.add_option("--tol", config.tolerance, "comparison tolerance");

  // flatten
  auto* flatten = app.add_subcommand("flatten", "build a flattening schedule");
  std::vector<std::string> controls;
  int steps = 12;
  std::string out_path, report_path, log_out_path;
  flatten->add_option("--control", controls, "control function expression (repeatable)")
      ->required();
  flatten->add_option("--steps", steps, "number of recursion steps");
  flatten->add_option("--out", out_path, "schedule JSON output path");

  // verify-flatten
  auto* verify_flatten_cmd = app.add_subcommand("verify-flatten", "measure transported control excess");
  std::string schedule_path, control_expr;
  double rmax = 10.0, log_rmax = 5.0;
  std::size_t samples = 1000, log_samples = 200;
  verify_flatten_cmd->add_option("--schedule", schedule_path, "schedule JSON")->required();
  verify_flatten_cmd->add_option("--control", control_expr, "control function")->required();
  verify_flatten_cmd->add_option("--rmax", rmax, "largest sampled r'");
  verify_flatten_cmd->add_option("--samples", samples, "number of sampled r'");
  verify_flatten_cmd->add_option("--log-samples", log_samples, "post-log samples (0 disables)");
  verify_flatten_cmd->add_option("--log-rmax", log_rmax, "largest sampled r''");
  verify_flatten_cmd->add_option("--out", out_path, "excess report CSV");
  verify_flatten_cmd->add_option("--log-out", log_out_path, "post-log report CSV");

  // cover / verify-cover
  auto* cover_cmd = app.add_subcommand("cover", "build a brick cover and report its cells");
  auto* verify_cover_cmd = app.add_subcommand("verify-cover", "build and exhaustively check a brick cover");
  int cover_n = 1;
  std::int64_t cover_r = 1, cover_box = 50;
  bool cover_verify = false;
  double check_scale = -1.0, check_bound = -1.0;
  std::string transform_expr;
  for (auto* cmd : {cover_cmd, verify_cover_cmd}) {
    cmd->add_option("--n", cover_n, "lattice dimension")->required();
    cmd->add_option("--r", cover_r, "separation scale")->required();
    cmd->add_option("--box", cover_box, "box radius for the exhaustive scan");
    cmd->add_option("--check-scale", check_scale, "separation to verify (defaults to r)");
    cmd->add_option("--check-bound", check_bound, "diameter bound to verify (defaults to 2(n+1)r)");
    cmd->add_option("--transform", transform_expr, "re-measure in the rescaled metric");
    cmd->add_option("--out", out_path, "cell report CSV");
  }
  cover_cmd->add_flag("--verify", cover_verify, "fail on any violation");

  // metric-check
  auto* metric_cmd = app.add_subcommand("metric-check", "verify metric axioms of a space");
  std::string space_expr;
  std::size_t metric_samples = 0;
  metric_cmd->add_option("--space", space_expr, "space expression")->required();
  metric_cmd->add_option("--samples", metric_samples, "sampled triples (0 = auto)");

  // qi
  auto* qi_cmd = app.add_subcommand("qi", "repair a coarse equivalence into a quasi-isometry");
  std::string phi_expr = "id", big_phi_expr = "id";
  std::int64_t qi_box = 0;
  bool qi_log = false;
  double qi_epsilon = 0.0;
  qi_cmd->add_option("--phi", phi_expr, "contraction expression")->required();
  qi_cmd->add_option("--Phi", big_phi_expr, "dilation expression")->required();
  qi_cmd->add_option("--steps", steps, "recursion steps");
  qi_cmd->add_option("--box", qi_box, "verify the identity map exhaustively on this box");
  qi_cmd->add_flag("--log-correct", qi_log, "verify after the hyperbolizing correction");
  qi_cmd->add_option("--epsilon", qi_epsilon, "scale both rescalings before verifying");
  qi_cmd->add_option("--out", out_path, "schedule pair JSON");
  qi_cmd->add_option("--report", report_path, "witness rows CSV");

  // lsl
  auto* lsl_cmd = app.add_subcommand("lsl", "repair a coarse map into a large-scale Lipschitz one");
  double lsl_rmax = 50.0;
  std::size_t lsl_samples = 2000;
  lsl_cmd->add_option("--Phi", big_phi_expr, "dilation expression")->required();
  lsl_cmd->add_option("--steps", steps, "recursion steps");
  lsl_cmd->add_option("--rmax", lsl_rmax, "sweep upper end");
  lsl_cmd->add_option("--samples", lsl_samples, "sweep sample count");
  lsl_cmd->add_option("--out", out_path, "rescaling JSON");
  lsl_cmd->add_option("--report", report_path, "sweep CSV");

  // delta
  auto* delta_cmd = app.add_subcommand("delta", "empirical four-point hyperbolicity constants");
  int delta_n = 2;
  std::vector<std::int64_t> delta_boxes{4, 8, 16};
  std::string delta_transform = "log";
  std::size_t quadruples = 1000000;
  delta_cmd->add_option("--n", delta_n, "lattice dimension");
  delta_cmd->add_option("--boxes", delta_boxes, "box radii to sweep")->delimiter(',');
  delta_cmd->add_option("--transform", delta_transform, "raw | log | function expression");
  delta_cmd->add_option("--quadruples", quadruples, "sampled quadruples per box");
  delta_cmd->add_option("--out", out_path, "delta report CSV");

  // product-demo
  auto* demo_cmd = app.add_subcommand("product-demo", "shared rescaling for a sup product and its factors");
  std::int64_t demo_box = 10;
  std::size_t demo_samples = 400;
  demo_cmd->add_option("--steps", steps, "recursion steps");
  demo_cmd->add_option("--box", demo_box, "box radius for the sup commutation scan");
  demo_cmd->add_option("--samples", demo_samples, "sampled r' per control");
  demo_cmd->add_option("--out-dir", out_path, "directory for reports");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "error: " << e.what() << "\n";
    return kExitParseError;
  }

  apply_env_seed(config);

  try {
    if (flatten->parsed()) return cmd_flatten(controls, steps, out_path, out);
    if (verify_flatten_cmd->parsed())
      return cmd_verify_flatten(schedule_path, control_expr, rmax, samples, log_samples, log_rmax,
                                out_path, log_out_path, config, out);
    if (cover_cmd->parsed())
      return cmd_cover(cover_n, cover_r, cover_box, cover_verify, check_scale, check_bound,
                       transform_expr, out_path, out);
    if (verify_cover_cmd->parsed())
      return cmd_cover(cover_n, cover_r, cover_box, true, check_scale, check_bound, transform_expr,
                       out_path, out);
    if (metric_cmd->parsed()) return cmd_metric_check(space_expr, metric_samples, config, out);
    if (qi_cmd->parsed())
      return cmd_qi(phi_expr, big_phi_expr, steps, qi_box, qi_log, qi_epsilon, out_path,
                    report_path, config, out);
    if (lsl_cmd->parsed())
      return cmd_lsl(big_phi_expr, steps, lsl_rmax, lsl_samples, out_path, report_path, config, out);
    if (delta_cmd->parsed())
      return cmd_delta(delta_n, delta_boxes, delta_transform, quadruples, out_path, config, out);
    if (demo_cmd->parsed()) return cmd_product_demo(steps, demo_box, demo_samples, out_path, config, out);
  } catch (const ExprParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParseError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitParseError;
  }
  err << "error: no subcommand\n";
  return kExitParseError;
}

}  // namespace coarse
