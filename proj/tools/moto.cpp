// Command-line front end: generate, solve, verify, trace, render, bench.
//
// Exit codes: 0 success, 1 verification mismatch, 2 invalid input or usage.

#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "moto/generate.hpp"
#include "moto/oracle.hpp"
#include "moto/svg.hpp"

namespace {

std::string slurp(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream in(path);
  if (!in.good()) throw moto::InvalidInput("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spill(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out.good()) throw moto::InvalidInput("cannot write '" + path + "'");
  out << text;
}

moto::Polygon<double> to_float_polygon(const moto::Polygon<moto::Rat>& p) {
  moto::Polygon<double> out;
  for (const auto& v : p.outer) out.outer.push_back(moto::convert_point<double>(v));
  for (const auto& h : p.holes) {
    out.holes.emplace_back();
    for (const auto& v : h) out.holes.back().push_back(moto::convert_point<double>(v));
  }
  return out;
}

struct RunSettings {
  std::string halving;  // empty: take the file's
  std::string shooter;
  std::string backend;
  std::string spawn = "none";  // none | induced | cascade
  bool verify_each = false;
};

// Everything a run of one backend produces.
template <class S>
struct RunOutput {
  moto::MGResult<S> result;
  moto::EngineStats stats;
  std::vector<moto::TraceEvent<S>> trace;
  moto::Instance<S> instance;  // prepared
};

template <class S>
RunOutput<S> run_backend(const moto::InstanceFile& f, const moto::Instance<S>& raw,
                         const RunSettings& rs, bool want_trace) {
  moto::SolveOptions<S> opt;
  opt.halving = rs.halving.empty() ? f.config.halving : moto::halving_from(rs.halving);
  opt.shooter = rs.shooter.empty() ? f.config.shooter : moto::shooter_from(rs.shooter);
  opt.verify_every_event = rs.verify_each;
  opt.induced_regime = f.polygon.has_value();
  if (rs.spawn == "induced") {
    if (!f.polygon) throw moto::InvalidInput("--spawn induced needs a polygon file");
    if constexpr (std::is_same_v<S, moto::Rat>)
      opt.spawn = moto::induced_spawn_policy(*f.polygon);
    else
      opt.spawn = moto::induced_spawn_policy(to_float_polygon(*f.polygon));
  } else if (rs.spawn == "cascade") {
    opt.spawn = moto::cascade_spawn_policy(raw);
  } else if (rs.spawn != "none") {
    throw moto::InvalidInput("unknown spawn policy '" + rs.spawn + "'");
  }
  if (opt.spawn && opt.halving != moto::HalvingKind::Midpoint)
    opt.allow_spawn_with_counting = true;

  RunOutput<S> out;
  out.instance = moto::prepare_instance(raw);
  std::vector<moto::TraceEvent<S>> log;
  if (want_trace) opt.observer = [&](const moto::TraceEvent<S>& ev) { log.push_back(ev); };
  moto::MotorcycleEngine<S> eng(out.instance, std::move(opt));
  out.result = eng.run();
  out.stats = eng.stats();
  out.trace = std::move(log);
  return out;
}

bool use_float(const moto::InstanceFile& f, const RunSettings& rs) {
  if (rs.backend == "float") return true;
  if (rs.backend == "exact") return false;
  if (!rs.backend.empty()) throw moto::InvalidInput("unknown backend '" + rs.backend + "'");
  return f.config.backend == moto::Backend::Float;
}

// Runs the file on its configured backend and hands the typed output to fn.
template <class Fn>
void dispatch(const moto::InstanceFile& f, const RunSettings& rs, bool want_trace, Fn&& fn) {
  auto exact = moto::effective_instance(f);
  if (use_float(f, rs))
    fn(run_backend<double>(f, moto::to_float_instance(exact), rs, want_trace));
  else
    fn(run_backend<moto::Rat>(f, exact, rs, want_trace));
}

template <class S>
moto::SpawnPolicy<S> oracle_policy(const moto::InstanceFile& f, const moto::Instance<S>& inst,
                                   const RunSettings& rs) {
  if (rs.spawn == "induced") {
    if constexpr (std::is_same_v<S, moto::Rat>)
      return moto::induced_spawn_policy(*f.polygon);
    else
      return moto::induced_spawn_policy(to_float_polygon(*f.polygon));
  }
  if (rs.spawn == "cascade") return moto::cascade_spawn_policy(inst);
  return {};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"motorcycle graph toolkit"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "emit a deterministic instance file");
  std::string gen_kind = "uniform";
  moto::GenConfig gen_cfg;
  std::string gen_out = "-";
  gen->add_option("--kind", gen_kind,
                  "uniform | coriented | collinear | cascade | rect-polygon | slope-polygon");
  gen->add_option("--n", gen_cfg.n, "riders (levels for cascade, size for polygons)");
  gen->add_option("--seed", gen_cfg.seed, "RNG seed");
  gen->add_option("--directions", gen_cfg.directions, "direction count for coriented (2..8)");
  gen->add_option("-o,--output", gen_out, "output path, - for stdout");

  // shared run settings
  RunSettings rs;
  std::string in_path;
  std::string out_path = "-";
  auto add_run_opts = [&](CLI::App* cmd) {
    cmd->add_option("input", in_path, "instance file, - for stdin")->required();
    cmd->add_option("--halving", rs.halving, "counting | midpoint | coriented");
    cmd->add_option("--shooter", rs.shooter, "linear | grid");
    cmd->add_option("--backend", rs.backend, "exact | float");
    cmd->add_option("--spawn", rs.spawn, "none | induced | cascade");
    cmd->add_flag("--check-invariants", rs.verify_each, "audit engine state after every event");
  };

  auto* solve = app.add_subcommand("solve", "compute final verdicts");
  add_run_opts(solve);
  std::string solve_trace, solve_svg;
  solve->add_option("-o,--output", out_path, "result path, - for stdout");
  solve->add_option("--trace", solve_trace, "also write the event trace here");
  solve->add_option("--svg", solve_svg, "also render the final picture here");

  auto* verify = app.add_subcommand("verify", "compare the engine against the reference");
  add_run_opts(verify);

  auto* trace = app.add_subcommand("trace", "print the event trace");
  add_run_opts(trace);
  trace->add_option("-o,--output", out_path, "trace path, - for stdout");

  auto* render = app.add_subcommand("render", "draw the final tracks as SVG");
  add_run_opts(render);
  render->add_option("-o,--output", out_path, "SVG path, - for stdout");

  auto* bench = app.add_subcommand("bench", "time generated instances, one row per size");
  std::string bench_kind = "uniform";
  std::vector<int> bench_sizes{256, 512, 1024};
  std::uint64_t bench_seed = 1;
  bool bench_oracle = false;
  bench->add_option("--kind", bench_kind, "generator kind");
  bench->add_option("--sizes", bench_sizes, "rider counts")->delimiter(',');
  bench->add_option("--seed", bench_seed, "RNG seed");
  bench->add_flag("--oracle", bench_oracle, "also time the quadratic reference");
  bench->add_option("--halving", rs.halving, "counting | midpoint | coriented");
  bench->add_option("--shooter", rs.shooter, "linear | grid");
  bench->add_option("--backend", rs.backend, "exact | float");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) {
      auto f = moto::generate_instance(moto::gen_kind_from(gen_kind), gen_cfg);
      spill(gen_out, moto::write_instance(f));
      return 0;
    }
    if (bench->parsed()) {
      if (rs.backend.empty()) rs.backend = "float";
      std::cout << "n\tbackend\tshooter\thalving\tseconds\tevents\tray-queries\t"
                   "halving-queries\tmax-cross\toracle-seconds\n";
      for (int n : bench_sizes) {
        moto::GenConfig cfg;
        cfg.n = n;
        cfg.seed = bench_seed;
        auto bf = moto::generate_instance(moto::gen_kind_from(bench_kind), cfg);
        dispatch(bf, rs, false, [&](const auto& run) {
          double oracle_s = -1;
          if (bench_oracle) {
            auto t0 = std::chrono::steady_clock::now();
            moto::oracle_solve(run.instance, oracle_policy(bf, run.instance, rs));
            oracle_s =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
          }
          std::cout << n << "\t" << (use_float(bf, rs) ? "float" : "exact") << "\t"
                    << moto::shooter_name(rs.shooter.empty() ? bf.config.shooter
                                                             : moto::shooter_from(rs.shooter))
                    << "\t"
                    << moto::halving_name(rs.halving.empty() ? bf.config.halving
                                                             : moto::halving_from(rs.halving))
                    << "\t" << run.stats.wall_seconds << "\t" << run.stats.events << "\t"
                    << run.stats.ray_queries << "\t" << run.stats.halving_queries << "\t"
                    << run.stats.max_cross_targets << "\t";
          if (oracle_s >= 0)
            std::cout << oracle_s;
          else
            std::cout << "-";
          std::cout << "\n";
        });
      }
      return 0;
    }

    auto f = moto::parse_instance(slurp(in_path));

    if (solve->parsed()) {
      dispatch(f, rs, !solve_trace.empty(), [&](const auto& run) {
        spill(out_path, moto::write_result(run.result, run.stats));
        if (!solve_trace.empty()) spill(solve_trace, moto::write_trace(run.instance, run.trace));
        if (!solve_svg.empty()) spill(solve_svg, moto::render_result_svg(run.instance, run.result));
      });
      return 0;
    }
    if (verify->parsed()) {
      int rc = 0;
      dispatch(f, rs, false, [&](const auto& run) {
        auto ref = moto::oracle_solve(run.instance, oracle_policy(f, run.instance, rs));
        auto bad = moto::compare_results(run.result, ref, 1e-9);
        if (bad.empty()) {
          std::cout << "ok: " << run.result.records.size() << " riders agree\n";
        } else {
          std::cout << "mismatch: " << bad.front() << "\n";
          rc = 1;
        }
      });
      return rc;
    }
    if (trace->parsed()) {
      dispatch(f, rs, true,
               [&](const auto& run) { spill(out_path, moto::write_trace(run.instance, run.trace)); });
      return 0;
    }
    if (render->parsed()) {
      dispatch(f, rs, false, [&](const auto& run) {
        spill(out_path, moto::render_result_svg(run.instance, run.result));
      });
      return 0;
    }
  } catch (const moto::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
