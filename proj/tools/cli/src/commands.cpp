#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <thread>

#include "sdflow/csv_io.hpp"
#include "sdflow/version.hpp"
#include "sdflow_cli/cli.hpp"
#include "sdflow_cli/reports.hpp"

namespace sdflow::cli {

namespace fs = std::filesystem;

namespace {

// Bad flag values detected after CLI11 parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json effective_config(const CLI::App& sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto res = opt->reduced_results();
      for (std::size_t i = 0; i < res.size(); ++i) value += (i ? "," : "") + res[i];
    } else {
      value = opt->get_default_str();
    }
    cfg[name] = value;
  }
  return cfg;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  const char* p = text.data();
  const char* end = p + text.size();
  while (p < end) {
    double v = 0.0;
    const auto r = std::from_chars(p, end, v);
    if (r.ec != std::errc{} || !std::isfinite(v)) throw UsageError("bad number in " + what);
    out.push_back(v);
    p = r.ptr;
    if (p == end) break;
    if (*p != ',') throw UsageError("expected ',' in " + what);
    ++p;
  }
  return out;
}

SolitonKind make_kind(const std::string& name, double a, double b) {
  SolitonKind kind;
  if (name == "steady") {
    kind = Steady{};
  } else if (name == "selfsimilar") {
    kind = SelfSimilar{};
  } else if (name == "travelling") {
    kind = TravellingWave{a, b};
  } else {
    throw UsageError("unknown kind '" + name + "'");
  }
  try {
    validate_kind(kind);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return kind;
}

// "steady", "selfsimilar" or "travelling:a:b".
SolitonKind parse_kind_spec(const std::string& spec) {
  if (spec.rfind("travelling", 0) == 0) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw UsageError("travelling kind needs :a:b");
    std::string rest = spec.substr(colon + 1);
    std::replace(rest.begin(), rest.end(), ':', ',');
    const auto ab = parse_list(rest, "kind " + spec);
    if (ab.size() != 2) throw UsageError("travelling kind needs :a:b");
    return make_kind("travelling", ab[0], ab[1]);
  }
  return make_kind(spec, 0.0, 0.0);
}

std::string kind_stem(const SolitonKind& kind) {
  std::string stem(kind_name(kind));
  if (const auto* tw = std::get_if<TravellingWave>(&kind)) {
    stem += "_a" + format_double(tw->a) + "_b" + format_double(tw->b);
  }
  return stem;
}

struct IntegratorFlags {
  IntegratorOptions opts;
  double budget = 200.0;

  void attach(CLI::App* sub) {
    sub->add_option("--budget", budget, "y range integrated in each direction");
    sub->add_option("--rtol", opts.rtol);
    sub->add_option("--atol", opts.atol);
    sub->add_option("--min-step", opts.min_step);
    sub->add_option("--max-step", opts.max_step);
    sub->add_option("--slope-ceiling", opts.slope_ceiling);
    sub->add_option("--event-tol", opts.event_tolerance);
    sub->add_option("--sample-spacing", opts.sample_spacing);
    sub->add_option("--max-angle", opts.max_angle_increment);
    sub->add_option("--triviality-tol", opts.triviality_tolerance);
  }

  void validate() const {
    try {
      opts.validate();
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
    if (!(budget > 0.0)) throw UsageError("--budget must be positive");
  }
};

// Runs f(i) for i < count on `workers` threads; rethrows the first failure.
template <class F>
void parallel_for(std::size_t count, unsigned workers, F f) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(count)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex m;
  auto body = [&] {
    for (std::size_t i; (i = next++) < count;) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(m);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(body);
  }
  if (failure) std::rethrow_exception(failure);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

json envelope(const CLI::App& sub) {
  return json{{"command", sub.get_name()}, {"config", effective_config(sub)}, {"version", kVersion}};
}

// ---------------------------------------------------------------- shoot

struct ShootArgs {
  std::string kind = "steady";
  double a = 0.0;
  double b = 0.0;
  std::string init;
  bool random = false;
  std::uint64_t seed = 0;
  std::size_t count = 1;
  unsigned workers = 1;
  std::string out;
  IntegratorFlags integ;
};

int cmd_shoot(const CLI::App& sub, const ShootArgs& args, std::ostream& out) {
  args.integ.validate();
  const SolitonKind kind = make_kind(args.kind, args.a, args.b);
  if (args.random == !args.init.empty()) throw UsageError("give exactly one of --init or --random");
  if (args.count == 0) throw UsageError("--count must be positive");

  struct Job {
    ProfileState init;
    std::optional<std::uint64_t> seed;
    std::string stem;
  };
  std::vector<Job> jobs;
  if (args.random) {
    for (std::size_t i = 0; i < args.count; ++i) {
      const std::uint64_t seed = args.seed + i;
      jobs.push_back({sample_initial_state(seed), seed,
                      "shoot_" + kind_stem(kind) + "_seed" + std::to_string(seed)});
    }
  } else {
    auto v = parse_list(args.init, "--init");
    if (v.size() < 4 || v.size() > 6) throw UsageError("--init expects y,phi,psi,k[,w[,S]]");
    v.resize(6, 0.0);
    jobs.push_back({ProfileState{v[0], v[1], v[2], v[3], v[4], v[5]}, std::nullopt,
                    "shoot_" + kind_stem(kind)});
  }

  const fs::path root = output_root(args.out);
  std::vector<ClassificationReport> reports(jobs.size());
  parallel_for(jobs.size(), args.workers, [&](std::size_t i) {
    reports[i] = shoot_bidirectional(kind, jobs[i].init, args.integ.budget, args.integ.opts);
  });

  std::map<std::string, int> counts;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& r = reports[i];
    const auto traj = r.merged_trajectory();
    std::ostringstream csv;
    write_trajectory_csv(csv, traj.samples);
    write_text(root / (jobs[i].stem + ".csv"), csv.str());
    json j = envelope(sub);
    j["report"] = classification_json(r, jobs[i].seed, args.integ.opts, args.integ.budget);
    j["trajectory_file"] = jobs[i].stem + ".csv";
    write_json(root / (jobs[i].stem + ".json"), j);

    const std::string verdict(verdict_name(r.verdict));
    ++counts[verdict];
    out << jobs[i].stem << ' ' << verdict;
    if (r.certificate) {
      out << ' ' << certificate_name(r.certificate->type) << " y=" << r.certificate->y_event;
    }
    out << '\n';
  }
  if (jobs.size() > 1) {
    json summary = envelope(sub);
    summary["counts"] = counts;
    write_json(root / ("shoot_" + kind_stem(kind) + "_summary.json"), summary);
  }
  return counts.count("inconclusive") ? kNotCertified : kOk;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
  std::vector<std::string> kinds{"steady", "selfsimilar", "travelling:1:0", "travelling:1:1",
                                 "travelling:0:1"};
  std::uint64_t seed = 0;
  std::size_t count = 100;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::string out;
  IntegratorFlags integ;
};

int cmd_sweep(const CLI::App& sub, const SweepArgs& args, std::ostream& out) {
  args.integ.validate();
  if (args.count == 0) throw UsageError("--count must be positive");
  std::vector<SolitonKind> kinds;
  for (const auto& k : args.kinds) kinds.push_back(parse_kind_spec(k));

  const std::size_t total = kinds.size() * args.count;
  std::vector<ClassificationReport> reports(total);
  parallel_for(total, args.workers, [&](std::size_t i) {
    const std::size_t kind_index = i / args.count;
    const std::uint64_t seed = args.seed + i % args.count;
    reports[i] = shoot_bidirectional(kinds[kind_index], sample_initial_state(seed),
                                     args.integ.budget, args.integ.opts);
  });

  std::ostringstream runs;
  runs << "kind,seed,outcome,certificate,y_event,direction\n";
  json per_kind = json::array();
  bool inconclusive = false;
  for (std::size_t k = 0; k < kinds.size(); ++k) {
    std::map<std::string, int> outcomes;
    std::map<std::string, int> certs;
    for (std::size_t j = 0; j < args.count; ++j) {
      const auto& r = reports[k * args.count + j];
      const std::string verdict(verdict_name(r.verdict));
      ++outcomes[verdict];
      runs << kind_stem(kinds[k]) << ',' << args.seed + j << ',' << verdict << ',';
      if (r.certificate) {
        ++certs[std::string(certificate_name(r.certificate->type))];
        runs << certificate_name(r.certificate->type) << ',' << format_double(r.certificate->y_event)
             << ',' << r.certificate->direction;
      } else {
        runs << ",,";
      }
      runs << '\n';
    }
    inconclusive = inconclusive || outcomes.count("inconclusive");
    per_kind.push_back({{"kind", kind_json(kinds[k])}, {"outcomes", outcomes}, {"certificates", certs}});
    out << kind_stem(kinds[k]) << ':';
    for (const auto& [name, n] : outcomes) out << ' ' << name << '=' << n;
    out << '\n';
  }
  const fs::path root = output_root(args.out);
  write_text(root / "sweep_runs.csv", runs.str());
  json summary = envelope(sub);
  summary["kinds"] = per_kind;
  summary["integrator"] = options_json(args.integ.opts);
  write_json(root / "sweep_summary.json", summary);
  return inconclusive ? kNotCertified : kOk;
}

// ---------------------------------------------------------------- verify

struct VerifyArgs {
  std::vector<std::string> files;
  std::string kind;
  double a = 0.0;
  double b = 0.0;
  std::string identity = "auto";
  double max_slope = IdentityOptions{}.max_slope;
  std::string out;
};

struct ParseFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int cmd_verify(const CLI::App& sub, const VerifyArgs& args, std::ostream& out) {
  json files = json::array();
  bool all_pass = true;
  for (const auto& file : args.files) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("cannot open " + file);
    Trajectory traj;
    try {
      traj.samples = read_trajectory_csv(in);
    } catch (const ParseError& e) {
      throw ParseFailure(file + ": " + e.what());
    }
    if (traj.samples.size() < 7) throw ParseFailure(file + ": too few samples");

    std::optional<SolitonKind> meta_kind;
    const fs::path sidecar = fs::path(file).replace_extension(".json");
    if (fs::exists(sidecar)) {
      try {
        std::ifstream js(sidecar);
        const json meta = json::parse(js);
        const json& report = meta.at("report");
        meta_kind = kind_from_json(report.at("kind"));
        traj.lattice_spacing = report.at("integrator").at("sample_spacing").get<double>();
        traj.lattice_origin = report.at("init").at("y").get<double>();
      } catch (const std::exception& e) {
        throw ParseFailure(sidecar.string() + ": " + e.what());
      }
    }
    if (!args.kind.empty()) {
      const SolitonKind requested = make_kind(args.kind, args.a, args.b);
      if (meta_kind && kind_name(*meta_kind) != kind_name(requested)) {
        throw UsageError(file + ": file holds a " + std::string(kind_name(*meta_kind)) +
                         " trajectory, not " + args.kind);
      }
      if (!meta_kind) meta_kind = requested;
    }
    if (!meta_kind) throw UsageError(file + ": no sidecar report; pass --kind");
    traj.kind = *meta_kind;

    const std::string_view kname = kind_name(traj.kind);
    std::vector<std::string> identities;
    if (args.identity == "auto") {
      if (kname == "selfsimilar") {
        identities = {"q-convexity"};
        // The bound is anchored at y = 0.
        const bool anchored = std::any_of(traj.samples.begin(), traj.samples.end(),
                                          [](const ProfileState& s) { return s.S == 0.0 && s.y == 0.0; });
        if (anchored) identities.push_back("q-bound");
      }
      if (kname == "travelling") identities = {"m-convexity", "tangential"};
      if (kname == "steady") identities = {"first-integrals"};
    } else {
      const bool ok = ((args.identity == "q-convexity" || args.identity == "q-bound") &&
                       kname == "selfsimilar") ||
                      ((args.identity == "m-convexity" || args.identity == "tangential") &&
                       kname == "travelling") ||
                      (args.identity == "first-integrals" && kname == "steady");
      if (!ok) {
        throw UsageError(file + ": identity " + args.identity + " does not apply to a " +
                         std::string(kname) + " trajectory");
      }
      identities = {args.identity};
    }

    const double h = traj.lattice_spacing > 0.0 ? traj.lattice_spacing : [&] {
      double g = 0.0;
      for (std::size_t i = 1; i < traj.samples.size(); ++i) {
        g = std::max(g, std::abs(traj.samples[i].y - traj.samples[i - 1].y));
      }
      return g;
    }();
    // Thresholds are pinned at h = 1e-3 and scale like the O(h^2) stencil error.
    const double scale = std::max(1.0, (h / 1e-3) * (h / 1e-3));
    const double residual_thr = 1e-4 * scale;
    const double nonneg_thr = -1e-6 * scale;
    IdentityOptions iopts;
    iopts.max_slope = args.max_slope;

    json checks = json::array();
    auto convexity = [&](const std::string& name, const IdentityReport& r) {
      const bool pass = r.samples_used > 0 && r.max_residual <= residual_thr &&
                        !(r.min_lhs < nonneg_thr);
      checks.push_back(identity_json(
          name, r.max_residual, r.location, r.samples_used,
          {{"max_residual", residual_thr}, {"min_lhs", nonneg_thr}, {"h", h}}, pass));
      checks.back()["min_lhs"] = r.min_lhs;
      return pass;
    };
    for (const auto& id : identities) {
      if (id == "q-convexity") {
        convexity("q_convexity", convexity_residual_q(traj, QParams{}, iopts));
        const auto anchor = std::find_if(traj.samples.begin(), traj.samples.end(),
                                         [](const ProfileState& s) { return s.S == 0.0; });
        const QParams paper =
            q_paper_constants(anchor != traj.samples.end() ? anchor->phi : traj.samples.front().phi);
        convexity("q_convexity_paper_constants", convexity_residual_q(traj, paper, iopts));
      } else if (id == "q-bound") {
        QBoundReport r;
        try {
          r = q_bound(traj);
        } catch (const std::invalid_argument& e) {
          throw UsageError(file + ": " + e.what());
        }
        checks.push_back(identity_json("q_bound", std::max(0.0, r.max_excess), r.location,
                                       r.samples_used, {{"max_excess", 1e-9}},
                                       r.max_excess <= 1e-9));
      } else if (id == "m-convexity") {
        const auto& tw = std::get<TravellingWave>(traj.kind);
        convexity("m_convexity", convexity_residual_m(traj, tw.a, tw.b, iopts));
      } else if (id == "tangential") {
        const auto& tw = std::get<TravellingWave>(traj.kind);
        const auto r = tangential_identity_residual(traj, tw.a, tw.b, iopts);
        checks.push_back(identity_json("tangential", r.max_residual, r.location, r.samples_used,
                                       {{"max_residual", residual_thr}, {"h", h}},
                                       r.samples_used > 0 && r.max_residual <= residual_thr));
      } else if (id == "first-integrals") {
        const auto r = steady_first_integrals(traj);
        const bool pass = r.max_w_drift <= 1e-8 && r.max_k_drift <= 1e-7;
        json c = identity_json("first_integrals", std::max(r.max_w_drift, r.max_k_drift),
                               std::nan(""), r.samples_used,
                               {{"w_drift", 1e-8}, {"k_drift", 1e-7}}, pass);
        c["w_drift"] = r.max_w_drift;
        c["k_drift"] = r.max_k_drift;
        checks.push_back(c);
      }
    }
    bool file_pass = true;
    for (const auto& c : checks) {
      const bool pass = c.at("pass").get<bool>();
      file_pass = file_pass && pass;
      out << file << ' ' << c.at("identity").get<std::string>() << ' '
          << c.at("max_residual").get<double>() << ' ' << (pass ? "PASS" : "FAIL") << '\n';
    }
    all_pass = all_pass && file_pass;
    files.push_back({{"file", file}, {"kind", kind_json(traj.kind)}, {"checks", checks},
                     {"pass", file_pass}});
  }
  json report = envelope(sub);
  report["files"] = files;
  report["pass"] = all_pass;
  write_json(output_root(args.out) / "verify_report.json", report);
  return all_pass ? kOk : kNotCertified;
}

// ---------------------------------------------------------------- flow-graph

struct FlowGraphArgs {
  std::size_t n = 128;
  double length = 2.0 * std::numbers::pi;
  double slope = 0.0;
  double eps = 1e-3;
  int mode = 1;
  std::string input;
  FlowConfig cfg;
  std::string scheme = "semi";
  bool plot = false;
  std::string out;
};

void append_series(std::ostringstream& os, double t, const std::string& series, double v) {
  os << format_double(t) << ',' << series << ',' << format_double(v) << '\n';
}

int cmd_flow_graph(const CLI::App& sub, FlowGraphArgs args, std::ostream& out) {
  args.cfg.scheme = args.scheme == "explicit" ? Scheme::ExplicitRK : Scheme::SemiImplicit;
  try {
    args.cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  std::optional<GraphField> f0;
  if (!args.input.empty()) {
    std::ifstream in(args.input);
    if (!in) throw std::runtime_error("cannot open " + args.input);
    try {
      f0 = read_graph_field_csv(in, args.slope);
    } catch (const ParseError& e) {
      throw ParseFailure(args.input + ": " + e.what());
    }
  } else {
    try {
      const double q = 2.0 * std::numbers::pi * args.mode / args.length;
      f0 = GraphField::from_function(args.length, args.slope, args.n,
                                     [&](double x) { return args.eps * std::sin(q * x) + 0.0; });
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }

  GraphEvolution ev = [&] {
    try {
      return evolve(*f0, args.cfg);
    } catch (const StabilityError& e) {
      throw UsageError(std::string(e.what()) + " (h = " + format_double(f0->spacing()) + ")");
    }
  }();

  const fs::path dir = output_root(args.out) / "flow-graph";
  json frames = json::array();
  std::ostringstream plot;
  plot << "t,series,value\n";
  for (std::size_t j = 0; j < ev.frames.size(); ++j) {
    std::ostringstream name;
    name << "frame_" << std::setw(4) << std::setfill('0') << j << ".csv";
    std::ostringstream csv;
    write_graph_field_csv(csv, ev.frames[j]);
    write_text(dir / name.str(), csv.str());
    const auto& m = ev.series[j];
    frames.push_back({{"t", m.t}, {"frame_file", name.str()}, {"monitors", graph_monitors_json(m)}});
    append_series(plot, m.t, "max_slope", m.max_slope);
    append_series(plot, m.t, "total_turning", m.total_turning);
    append_series(plot, m.t, "max_abs_w", m.max_abs_w);
    append_series(plot, m.t, "l2_norm", m.l2_norm);
    append_series(plot, m.t, "dirichlet", m.dirichlet);
  }
  json manifest = envelope(sub);
  manifest["frames"] = frames;
  manifest["dt_used"] = ev.dt_used;
  manifest["steps"] = ev.steps;
  manifest["graphicality_lost"] = ev.graphicality_lost;
  if (ev.graphicality_lost) {
    manifest["abort"] = {{"t", ev.abort_time}, {"slope", ev.abort_slope}};
  }
  write_json(dir / "manifest.json", manifest);
  if (args.plot) write_text(dir / "plot_data.csv", plot.str());

  const auto& last = ev.series.back();
  out << "flow-graph t=" << last.t << " steps=" << ev.steps << " max|w|=" << last.max_abs_w
      << " max|psi|=" << last.max_slope << (ev.graphicality_lost ? " graphicality lost" : "")
      << '\n';
  return ev.graphicality_lost ? kNotCertified : kOk;
}

// ---------------------------------------------------------------- flow-curve

struct FlowCurveArgs {
  std::string seed = "circle";
  std::string input;
  double kappa = 2.0;
  double axis_a = 2.0;
  double axis_b = 1.0;
  std::size_t n = 512;
  CurveFlowOptions opts;
  double relative_dt = -1.0;
  bool no_milestones = false;
  bool plot = false;
  std::string out;
};

int cmd_flow_curve(const CLI::App& sub, FlowCurveArgs args, std::ostream& out) {
  std::optional<ClosedCurve> c0;
  try {
    if (!args.input.empty()) {
      std::ifstream in(args.input);
      if (!in) throw std::runtime_error("cannot open " + args.input);
      std::vector<Vec2> pts;
      try {
        pts = read_curve_csv(in);
      } catch (const ParseError& e) {
        throw ParseFailure(args.input + ": " + e.what());
      }
      c0 = ClosedCurve(std::move(pts));
    } else if (args.seed == "circle") {
      c0 = seed_circle(args.kappa, args.n);
    } else if (args.seed == "ellipse") {
      c0 = seed_ellipse(args.axis_a, args.axis_b, args.n);
    } else {
      c0 = seed_lemniscate(args.n);
    }
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  args.opts.diameter_milestones = !args.no_milestones;
  if (args.relative_dt < 0.0) {
    // dt is the step at the initial size; it shrinks with diameter^4.
    const double d = curve_monitors(*c0).diameter;
    args.opts.relative_dt = args.opts.dt / (d * d * d * d);
  } else {
    args.opts.relative_dt = args.relative_dt;
  }
  try {
    args.opts.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  const CurveFlowResult res = flow(*c0, args.opts);
  const fs::path dir = output_root(args.out) / "flow-curve";
  json frames = json::array();
  std::ostringstream plot;
  plot << "t,series,value\n";
  for (std::size_t j = 0; j < res.frames.size(); ++j) {
    const auto& fr = res.frames[j];
    std::ostringstream name;
    name << "frame_" << std::setw(4) << std::setfill('0') << j << ".csv";
    std::ostringstream csv;
    write_curve_csv(csv, fr.curve.points());
    write_text(dir / name.str(), csv.str());
    json entry{{"t", fr.t}, {"file", name.str()}};
    entry.update(curve_monitors_json(fr.monitors));
    frames.push_back(entry);
    append_series(plot, fr.t, "length", fr.monitors.length);
    append_series(plot, fr.t, "signed_area", fr.monitors.signed_area);
    append_series(plot, fr.t, "max_curvature", fr.monitors.max_curvature);
    append_series(plot, fr.t, "diameter", fr.monitors.diameter);
  }
  json manifest = envelope(sub);
  manifest["frames"] = frames;
  manifest["outcome"] = std::string(curve_outcome_name(res.outcome));
  manifest["t_ext"] = res.outcome == CurveOutcome::Extinct ? json(res.t_ext) : json(nullptr);
  manifest["steps"] = res.steps;
  if (!res.failure.empty()) manifest["failure"] = res.failure;
  write_json(dir / "manifest.json", manifest);
  if (args.plot) write_text(dir / "plot_data.csv", plot.str());

  out << "flow-curve " << curve_outcome_name(res.outcome);
  if (res.outcome == CurveOutcome::Extinct) out << " t_ext=" << res.t_ext;
  if (!res.failure.empty()) out << " (" << res.failure << ')';
  out << " frames=" << res.frames.size() << " steps=" << res.steps << '\n';
  return res.outcome == CurveOutcome::Failed ? kRuntimeError : kOk;
}

// Splices `--config FILE` contents in front of the command line so explicit
// flags win (options take the last value).
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  std::vector<std::string> from_file;
  for (std::size_t i = 0; i < args.size(); ++i) {
    std::string path;
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      out.push_back(args[i]);
      continue;
    }
    auto extra = load_config_args(path);
    from_file.insert(from_file.end(), extra.begin(), extra.end());
  }
  if (!from_file.empty() && !out.empty()) {
    out.insert(out.begin() + 1, from_file.begin(), from_file.end());
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Surface diffusion flow laboratory: soliton shooting, identity checks, graph and curve flows",
               "sdflow"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->take_last();

  ShootArgs shoot;
  auto* shoot_cmd = app.add_subcommand("shoot", "Classify a soliton profile by bidirectional shooting");
  shoot_cmd->add_option("kind", shoot.kind, "steady | selfsimilar | travelling")
      ->check(CLI::IsMember({"steady", "selfsimilar", "travelling"}));
  shoot_cmd->add_option("--a", shoot.a, "travelling wave: horizontal speed");
  shoot_cmd->add_option("--b", shoot.b, "travelling wave: vertical speed");
  shoot_cmd->add_option("--init", shoot.init, "y,phi,psi,k[,w[,S]]; omitted entries are 0");
  shoot_cmd->add_flag("--random", shoot.random, "sample initial data from --seed");
  shoot_cmd->add_option("--seed", shoot.seed);
  shoot_cmd->add_option("--count", shoot.count, "number of seeds (seed, seed+1, ...)");
  shoot_cmd->add_option("--workers", shoot.workers)->check(CLI::PositiveNumber);
  shoot_cmd->add_option("--out", shoot.out, "output directory");
  shoot.integ.attach(shoot_cmd);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Random-initial-data sweep over soliton kinds");
  sweep_cmd->add_option("--kinds", sweep.kinds, "steady, selfsimilar, travelling:a:b")
      ->delimiter(',');
  sweep_cmd->add_option("--seed", sweep.seed);
  sweep_cmd->add_option("--count", sweep.count, "seeds per kind");
  sweep_cmd->add_option("--workers", sweep.workers)->check(CLI::PositiveNumber);
  sweep_cmd->add_option("--out", sweep.out);
  sweep.integ.attach(sweep_cmd);

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Check profile identities along trajectory files");
  verify_cmd->add_option("files", verify.files, "trajectory CSV files")->required();
  verify_cmd->add_option("--kind", verify.kind, "kind when no sidecar report exists")
      ->check(CLI::IsMember({"steady", "selfsimilar", "travelling"}));
  verify_cmd->add_option("--a", verify.a);
  verify_cmd->add_option("--b", verify.b);
  verify_cmd->add_option("--identity", verify.identity)
      ->check(CLI::IsMember(
          {"auto", "q-convexity", "q-bound", "m-convexity", "tangential", "first-integrals"}));
  verify_cmd->add_option("--max-slope", verify.max_slope, "skip stencils with |psi| above this");
  verify_cmd->add_option("--out", verify.out);

  FlowGraphArgs fg;
  auto* fg_cmd = app.add_subcommand("flow-graph", "Evolve a periodic perturbation of a line");
  fg_cmd->add_option("--n", fg.n);
  fg_cmd->add_option("--L", fg.length, "cell length");
  fg_cmd->add_option("--A", fg.slope, "background slope");
  fg_cmd->add_option("--eps", fg.eps, "sine amplitude");
  fg_cmd->add_option("--mode", fg.mode, "sine mode number");
  fg_cmd->add_option("--input", fg.input, "initial w as x,w CSV");
  fg_cmd->add_option("--dt", fg.cfg.dt);
  fg_cmd->add_option("--t-end", fg.cfg.t_end);
  fg_cmd->add_option("--scheme", fg.scheme)->check(CLI::IsMember({"semi", "explicit"}));
  fg_cmd->add_option("--safety", fg.cfg.stability_safety);
  fg_cmd->add_option("--frames", fg.cfg.frames);
  fg_cmd->add_option("--slope-ceiling", fg.cfg.slope_ceiling);
  fg_cmd->add_flag("--emit-plot-data", fg.plot);
  fg_cmd->add_option("--out", fg.out);

  FlowCurveArgs fc;
  auto* fc_cmd = app.add_subcommand("flow-curve", "Evolve a closed curve by curve diffusion");
  fc_cmd->add_option("--seed", fc.seed)->check(CLI::IsMember({"circle", "ellipse", "lemniscate"}));
  fc_cmd->add_option("--input", fc.input, "initial curve as x,y CSV");
  fc_cmd->add_option("--kappa", fc.kappa, "circle curvature");
  fc_cmd->add_option("--axis-a", fc.axis_a, "ellipse semi-axis along x");
  fc_cmd->add_option("--axis-b", fc.axis_b, "ellipse semi-axis along y");
  fc_cmd->add_option("--n", fc.n);
  fc_cmd->add_option("--dt", fc.opts.dt);
  fc_cmd->add_option("--t-end", fc.opts.t_end);
  fc_cmd->add_option("--resample-every", fc.opts.resample_every);
  fc_cmd->add_option("--relative-dt", fc.relative_dt,
                     "step factor on diameter^4; negative: dt / initial diameter^4");
  fc_cmd->add_option("--extinction-frac", fc.opts.extinction_frac);
  fc_cmd->add_option("--frame-interval", fc.opts.frame_interval);
  fc_cmd->add_flag("--no-milestones", fc.no_milestones);
  fc_cmd->add_flag("--emit-plot-data", fc.plot);
  fc_cmd->add_option("--out", fc.out);

  for (auto* sub : {shoot_cmd, sweep_cmd, verify_cmd, fg_cmd, fc_cmd}) {
    sub->add_option("--config", "key=value file; command-line flags override it");
  }

  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const ConfigError& e) {
    err << "sdflow: " << e.what() << '\n';
    return kParse;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*shoot_cmd) return cmd_shoot(*shoot_cmd, shoot, out);
    if (*sweep_cmd) return cmd_sweep(*sweep_cmd, sweep, out);
    if (*verify_cmd) return cmd_verify(*verify_cmd, verify, out);
    if (*fg_cmd) return cmd_flow_graph(*fg_cmd, fg, out);
    if (*fc_cmd) return cmd_flow_curve(*fc_cmd, fc, out);
  } catch (const UsageError& e) {
    err << "sdflow: " << e.what() << '\n';
    return kUsage;
  } catch (const ParseFailure& e) {
    err << "sdflow: parse error: " << e.what() << '\n';
    return kParse;
  } catch (const std::exception& e) {
    err << "sdflow: error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsage;
}

int main_entry(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace sdflow::cli
