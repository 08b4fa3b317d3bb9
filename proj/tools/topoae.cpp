// topoae command-line tool: dataset generation, persistence diagrams,
// topology-preserving projection, quality metrics, benchmarks, self-check.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "topoae/topoae.hpp"

using namespace topoae;

namespace {

enum Exit { kOk = 0, kValidation = 1, kInternal = 2, kIo = 3 };

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

template <class T>
std::vector<T> parse_list(const std::string& s, const char* what) {
  std::vector<T> out;
  for (const auto& item : split_list(s)) {
    std::istringstream is(item);
    T v{};
    if (!(is >> v) || !is.eof()) throw ValidationError(std::string("bad ") + what + " entry '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError(std::string("empty ") + what + " list");
  return out;
}

void emit(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-")
    std::cout << content;
  else
    io::write_file(path, content);
}

PointCloud load(const std::string& path) {
  if (path == "-") return io::parse_csv(std::cin);
  return io::read_csv(path);
}

// Flat key=value file; blank lines and '#' comments are skipped.
std::vector<std::string> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path);
  std::vector<std::string> args;
  std::string line;
  int no = 0;
  while (std::getline(in, line)) {
    ++no;
    const auto t = std::string(io::detail::trim(line));
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos || eq == 0)
      throw ValidationError(path + ":" + std::to_string(no) + ": expected key=value");
    const auto key = std::string(io::detail::trim(std::string_view(t).substr(0, eq)));
    const auto value = std::string(io::detail::trim(std::string_view(t).substr(eq + 1)));
    args.push_back("--" + key + "=" + value);
  }
  return args;
}

// Config entries are appended after the command line; every scalar option
// keeps its last value, so the file wins.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> in(argv + 1, argv + argc), out, extra;
  for (std::size_t i = 0; i < in.size(); ++i) {
    const std::string& a = in[i];
    if (a == "--config") {
      if (i + 1 >= in.size()) throw ValidationError("--config needs a file");
      const auto c = read_config(in[++i]);
      extra.insert(extra.end(), c.begin(), c.end());
    } else if (a.rfind("--config=", 0) == 0) {
      const auto c = read_config(a.substr(9));
      extra.insert(extra.end(), c.begin(), c.end());
    } else {
      out.push_back(a);
    }
  }
  out.insert(out.end(), extra.begin(), extra.end());
  return out;
}

TopoLossKind loss_kind(const std::string& s) {
  static const std::map<std::string, TopoLossKind> m{{"topoae0", TopoLossKind::TopoAE0},
                                                     {"topoae1", TopoLossKind::TopoAE1},
                                                     {"cd0", TopoLossKind::CascadeDistortion0},
                                                     {"cd1", TopoLossKind::CascadeDistortion1},
                                                     {"taew1", TopoLossKind::TopoAEW1}};
  const auto it = m.find(s);
  if (it == m.end()) throw ValidationError("unknown loss '" + s + "'");
  return it->second;
}

Engine engine_of(const std::string& s) {
  if (s == "planar") return Engine::Planar;
  if (s == "reduction") return Engine::Reduction;
  throw ValidationError("unknown engine '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Topology-preserving dimensionality reduction via persistent homology"};
  app.name("topoae");
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_version_flag("--version", "topoae 1.0");
  // documented here, consumed before parsing
  std::string config_path;
  app.add_option("--config", config_path, "flat key=value file overriding flags (keys are long option names)");

  std::uint64_t seed = 0;
  unsigned threads = 1;
  auto common = [&](CLI::App* s) {
    s->add_option("--seed", seed, "random seed");
    s->add_option("--threads", threads, "worker threads (0 = all cores)");
  };

  // gen
  DatasetSpec spec;
  long gen_n = 0;
  double gen_noise = 0;
  std::vector<std::string> gen_params;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen", "generate a synthetic dataset as CSV");
  gen->add_option("--kind", spec.kind, "3clusters|twist|k4|k5|circle_noise|grid|uniform|csv")->capture_default_str();
  auto* gen_n_opt = gen->add_option("--n", gen_n, "number of points (kind default if omitted)");
  auto* gen_noise_opt = gen->add_option("--noise", gen_noise, "noise sigma (kind default if omitted)");
  gen->add_option("--param", gen_params, "kind-specific key=value, repeatable (csv: path=FILE)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  gen->add_option("-o,--output", gen_out, "output CSV (default stdout)");
  common(gen);

  // ph
  std::string ph_in, ph_out, ph_engine = "auto";
  int ph_dim = 1;
  std::size_t ph_max_points = 3000;
  auto* ph = app.add_subcommand("ph", "Vietoris-Rips persistence diagrams of a CSV cloud as JSON");
  ph->add_option("input", ph_in, "input CSV ('-' for stdin)")->required();
  ph->add_option("--dim", ph_dim, "maximal homology dimension")->check(CLI::Range(0, 1))->capture_default_str();
  ph->add_option("--engine", ph_engine, "auto|planar|reduction")->capture_default_str();
  ph->add_option("--max-points", ph_max_points, "size cap of the reduction engine")->capture_default_str();
  ph->add_option("-o,--output", ph_out, "output JSON (default stdout)");
  common(ph);

  // project
  std::string pj_in, pj_prefix = "embedding", pj_loss = "cd1", pj_mode = "autoencoder", pj_init, pj_hidden = "128,32";
  TrainConfig tc;
  bool pj_no_bn = false;
  auto* pj = app.add_subcommand("project", "embed a CSV cloud in the plane");
  pj->add_option("input", pj_in, "input CSV")->required();
  pj->add_option("-o,--prefix", pj_prefix, "output prefix")->capture_default_str();
  pj->add_option("--loss", pj_loss, "topoae0|topoae1|cd1|taew1 (cd0 also accepted)")->capture_default_str();
  pj->add_option("--mode", pj_mode, "autoencoder|free")->capture_default_str();
  pj->add_option("--restarts", tc.restarts, "independent runs, best MW1 kept")->capture_default_str();
  pj->add_option("--weight", tc.weight, "topological loss weight")->capture_default_str();
  pj->add_option("--iters", tc.iterations, "iterations per run")->capture_default_str();
  pj->add_option("--lr", tc.adam.lr, "Adam learning rate")->capture_default_str();
  pj->add_option("--mw-every", tc.mw_every, "trace MW0/MW1 every k iterations (0 = final only)")->capture_default_str();
  pj->add_option("--stop-loss", tc.stop_loss, "free mode: stop once the topological loss is at most this");
  pj->add_option("--init", pj_init, "free mode: initial embedding CSV");
  pj->add_option("--hidden", pj_hidden, "encoder widths, comma separated")->capture_default_str();
  pj->add_flag("--no-batch-norm", pj_no_bn, "plain Linear-ReLU hidden layers");
  pj->add_flag("--standardize", tc.standardize, "zero-mean unit-variance input columns");
  common(pj);

  // metrics
  std::string mx_x, mx_z, mx_out;
  QualityOptions qo;
  auto* mx = app.add_subcommand("metrics", "quality report of an embedding Z of X");
  mx->add_option("X", mx_x, "input CSV")->required();
  mx->add_option("Z", mx_z, "embedding CSV, same row order")->required();
  mx->add_option("--k", qo.k, "neighborhood size for trustworthiness/continuity")->capture_default_str();
  mx->add_option("--triplets", qo.triplet_samples, "sampled triplets (0 = default policy)")->capture_default_str();
  mx->add_option("-o,--output", mx_out, "output JSON (default stdout)");
  common(mx);

  // bench
  BenchOptions bo;
  std::string bn_sizes = "1000,3000,10000", bn_engines = "planar", bn_threads = "1", bn_out;
  auto* bn = app.add_subcommand("bench", "persistence scaling sweep as CSV");
  bn->add_option("--kind", bo.kind, "dataset kind")->capture_default_str();
  bn->add_option("--sizes", bn_sizes, "comma separated sizes")->capture_default_str();
  bn->add_option("--engines", bn_engines, "comma separated: planar,reduction")->capture_default_str();
  bn->add_option("--threads", bn_threads, "comma separated thread counts")->capture_default_str();
  bn->add_option("--repeats", bo.repeats, "runs per cell, medians reported")->capture_default_str();
  bn->add_option("--max-points", bo.max_points, "size cap of the reduction engine")->capture_default_str();
  bn->add_option("--seed", bo.seed, "random seed");
  bn->add_option("-o,--output", bn_out, "output CSV (default stdout)");

  // verify
  VerifyOptions vo;
  auto* vf = app.add_subcommand("verify", "engine equivalence and invariant self-check");
  vf->add_option("--clouds", vo.clouds, "random planar clouds compared across engines")->capture_default_str();
  vf->add_option("--max-n", vo.max_n, "largest cloud size")->capture_default_str();
  common(vf);

  try {
    auto args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 consumes the vector from the back
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  }

  try {
    if (*gen) {
      spec.seed = seed;
      if (*gen_n_opt) spec.n = gen_n;
      if (*gen_noise_opt) spec.noise = gen_noise;
      for (const auto& p : gen_params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos) throw ValidationError("--param expects key=value, got '" + p + "'");
        spec.params[p.substr(0, eq)] = p.substr(eq + 1);
      }
      std::ostringstream os;
      io::write_csv(os, generate(spec));
      emit(gen_out, os.str());
    } else if (*ph) {
      const auto x = load(ph_in);
      std::string engine = ph_engine;
      if (engine == "auto") engine = x.dim() == 2 ? "planar" : "reduction";
      RipsDiagrams d;
      if (engine == "planar") {
        if (x.dim() != 2) throw ValidationError("the planar engine needs 2D input");
        d = planar_rips_persistence(x, PlanarOptions{threads});
      } else if (engine == "reduction") {
        RipsOptions ro;
        ro.max_points = ph_max_points;
        d = rips_persistence(x, ph_dim, ro);
      } else {
        throw ValidationError("unknown engine '" + ph_engine + "'");
      }
      io::Json j{{"engine", engine}, {"n", x.size()}, {"dim", ph_dim}, {"dgm0", io::diagram_json(d.dgm0)}};
      if (ph_dim >= 1) j["dgm1"] = io::diagram_json(d.dgm1);
      emit(ph_out, j.dump(2) + "\n");
    } else if (*pj) {
      const auto x = io::read_csv(pj_in);
      tc.loss = loss_kind(pj_loss);
      tc.seed = seed;
      tc.threads = threads;
      TrainResult r;
      if (pj_mode == "autoencoder") {
        if (!pj_init.empty()) throw ValidationError("--init applies to free mode only");
        AutoencoderConfig ae;
        ae.hidden = parse_list<int>(pj_hidden, "hidden width");
        ae.batch_norm = !pj_no_bn;
        r = train(x, ae, tc);
      } else if (pj_mode == "free") {
        std::optional<PointCloud> init;
        if (!pj_init.empty()) init = io::read_csv(pj_init);
        r = embed_free(x, tc, init);
      } else {
        throw ValidationError("unknown mode '" + pj_mode + "'");
      }
      const PointCloud& z = r.best.z;
      const PointCloud ref = tc.standardize ? standardized(x) : x;
      QualityOptions q;
      q.seed = seed;
      q.threads = threads;
      const auto report = quality_report(ref, z, q);
      const auto gens = project_generators(ref, z);
      int crossings = 0;
      for (const auto& g : gens) crossings += g.self_intersections;

      io::write_csv(pj_prefix + ".csv", z, {"z0", "z1"});
      io::write_file(pj_prefix + ".svg", io::render_svg(z, gens));
      io::write_file(pj_prefix + ".generators.csv", io::generators_csv(gens));
      io::write_trace_csv(pj_prefix + ".trace.csv", r.best.trace);
      auto qj = io::quality_json(report);
      qj["restart_MW1"] = r.restart_mw1;
      qj["best_restart"] = r.best_restart;
      qj["seed"] = r.best.seed;
      qj["generator_crossings"] = crossings;
      qj["warnings"] = r.warnings;
      io::write_json(pj_prefix + ".quality.json", qj);
      if (r.best.model) io::write_json(pj_prefix + ".model.json", io::model_json(*r.best.model));
      for (const auto& w : r.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << "MW1 " << io::format_double(report.mw1) << "  MW0 " << io::format_double(report.mw0)
                << "  generators " << gens.size() << "  crossings " << crossings << "  best restart "
                << r.best_restart << "\n";
    } else if (*mx) {
      const auto x = load(mx_x);
      const auto z = io::read_csv(mx_z);
      qo.seed = seed;
      qo.threads = threads;
      emit(mx_out, io::quality_json(quality_report(x, z, qo)).dump(2) + "\n");
    } else if (*bn) {
      bo.sizes = parse_list<long>(bn_sizes, "size");
      bo.threads = parse_list<unsigned>(bn_threads, "thread count");
      bo.engines.clear();
      for (const auto& e : split_list(bn_engines)) bo.engines.push_back(engine_of(e));
      if (bo.engines.empty()) throw ValidationError("empty engine list");
      const auto rows = bench_scaling(bo);
      std::ostringstream os;
      os << "n,engine,threads,wall_ms,build_ms,mml_ms,pairing_ms,discard_fraction,pairs\n";
      for (const auto& row : rows)
        os << row.n << ',' << engine_name(row.engine) << ',' << row.threads << ',' << io::format_double(row.wall_ms)
           << ',' << io::format_double(row.build_ms) << ',' << io::format_double(row.mml_ms) << ','
           << io::format_double(row.pairing_ms) << ','
           << (std::isnan(row.discard_fraction) ? std::string() : io::format_double(row.discard_fraction)) << ','
           << row.pairs << '\n';
      emit(bn_out, os.str());
      for (Engine e : bo.engines)
        for (unsigned t : bo.threads) {
          std::vector<double> n, ms;
          for (const auto& row : rows)
            if (row.engine == e && row.threads == t) {
              n.push_back(static_cast<double>(row.n));
              ms.push_back(row.wall_ms);
            }
          if (n.size() >= 2)
            std::cerr << engine_name(e) << " threads=" << t << " log-log slope " << loglog_slope(n, ms) << "\n";
        }
    } else if (*vf) {
      vo.seed = seed;
      vo.threads = threads;
      bool ok = true;
      for (const auto& c : run_verify(vo)) {
        std::printf("[%s] %-55s %6zu cases  %7.2fs%s%s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.cases,
                    c.seconds, c.passed ? "" : "  ", c.detail.c_str());
        ok = ok && c.passed;
      }
      return ok ? kOk : kInternal;
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kOk;
}
