#include "cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "hermsketch/errors.hpp"
#include "hermsketch/eval.hpp"
#include "hermsketch/merge.hpp"
#include "hermsketch/sketch_file.hpp"
#include "hermsketch/text_io.hpp"

namespace hermsketch::cli {

namespace {

// All numeric output at 17 significant digits so identical inputs give
// byte-identical stdout.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

BadLinePolicy policy_of(const std::string& name) {
  if (name == "skip") return BadLinePolicy::kSkip;
  if (name == "fail") return BadLinePolicy::kFail;
  throw std::invalid_argument("--on-bad-line must be 'skip' or 'fail'");
}

std::vector<double> parse_number_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && (text[pos] == ',' || text[pos] == ' ')) ++pos;
    if (pos >= text.size()) break;
    std::size_t end = text.find_first_of(", ", pos);
    if (end == std::string::npos) end = text.size();
    try {
      std::size_t used = 0;
      const double v = std::stod(text.substr(pos, end - pos), &used);
      if (used != end - pos || !std::isfinite(v)) throw std::invalid_argument("");
      out.push_back(v);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string(what) + ": cannot parse '" +
                                  text.substr(pos, end - pos) + "' as a number");
    }
    pos = end;
  }
  if (out.empty()) throw std::invalid_argument(std::string(what) + ": no values given");
  return out;
}

// Reads from the process stream for "-", otherwise from the named file.
struct InputSource {
  InputSource(const std::string& path, std::istream& fallback) {
    if (path == "-") {
      stream = &fallback;
      return;
    }
    file.open(path, std::ios::binary);
    if (!file) throw data_error("cannot open input '" + path + "'");
    stream = &file;
  }
  std::ifstream file;
  std::istream* stream = nullptr;
};

struct BuildOptions {
  std::string type = "univariate";
  int order_n = kDefaultOrder;
  bool standardize = true;
  std::optional<double> lambda;
  std::string input = "-";
  std::string out_path;
  std::string on_bad_line = "fail";
  int threads = 1;
};

template <typename Sketch, typename Data>
Sketch build_sharded(const BuildOptions& opt, const Data& data) {
  const std::size_t threads = std::min<std::size_t>(opt.threads, data.size());
  std::vector<std::future<Sketch>> futures;
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t lo = data.size() * t / threads;
    const std::size_t hi = data.size() * (t + 1) / threads;
    futures.push_back(std::async(std::launch::async, [&, lo, hi] {
      Sketch shard(opt.order_n, false);
      shard.update_batch(std::span(data.data() + lo, hi - lo));
      return shard;
    }));
  }
  std::vector<Sketch> shards;
  shards.reserve(futures.size());
  for (auto& f : futures) shards.push_back(f.get());
  return merge_sketches(std::span<const Sketch>(shards));
}

int cmd_build(const BuildOptions& opt, std::istream& in, std::ostream& err) {
  const BadLinePolicy policy = policy_of(opt.on_bad_line);
  if (opt.threads < 1) throw std::invalid_argument("--threads must be positive");
  if (opt.threads > 1 && (opt.standardize || opt.lambda)) {
    throw std::invalid_argument("--threads applies only with --standardize false and no --lambda");
  }
  InputSource source(opt.input, in);
  AnySketch sketch = [&]() -> AnySketch {
    if (opt.type == "univariate") {
      const auto stream = ingest_univariate(*source.stream, policy);
      if (stream.skipped_lines) err << "note: skipped " << stream.skipped_lines << " bad line(s)\n";
      if (opt.lambda) {
        UnivariateSketch s(opt.order_n, opt.standardize, opt.lambda);
        for (double x : stream.values) s.update(x);
        return s;
      }
      if (opt.threads > 1) return build_sharded<UnivariateSketch>(opt, stream.values);
      UnivariateSketch s(opt.order_n, opt.standardize);
      if (!stream.values.empty()) s.update_batch(stream.values);
      return s;
    }
    if (opt.type == "bivariate") {
      const auto stream = ingest_bivariate(*source.stream, policy);
      if (stream.skipped_lines) err << "note: skipped " << stream.skipped_lines << " bad line(s)\n";
      if (opt.lambda) {
        BivariateSketch s(opt.order_n, opt.standardize, opt.lambda);
        for (const auto& p : stream.values) s.update(p[0], p[1]);
        return s;
      }
      if (opt.threads > 1) return build_sharded<BivariateSketch>(opt, stream.values);
      BivariateSketch s(opt.order_n, opt.standardize);
      if (!stream.values.empty()) s.update_batch(stream.values);
      return s;
    }
    throw std::invalid_argument("--type must be 'univariate' or 'bivariate'");
  }();
  save_sketch(opt.out_path, sketch);
  return 0;
}

int cmd_update(const std::string& sketch_path, const std::string& input, bool sequential,
               const std::string& on_bad_line, std::istream& in, std::ostream& err) {
  const BadLinePolicy policy = policy_of(on_bad_line);
  AnySketch sketch = load_sketch(sketch_path);
  InputSource source(input, in);
  std::visit(
      [&](auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, UnivariateSketch>) {
          const auto stream = ingest_univariate(*source.stream, policy);
          if (stream.skipped_lines) err << "note: skipped " << stream.skipped_lines << " bad line(s)\n";
          if (sequential) {
            for (double x : stream.values) s.update(x);
          } else if (!stream.values.empty()) {
            s.update_batch(stream.values);
          }
        } else {
          const auto stream = ingest_bivariate(*source.stream, policy);
          if (stream.skipped_lines) err << "note: skipped " << stream.skipped_lines << " bad line(s)\n";
          if (sequential) {
            for (const auto& p : stream.values) s.update(p[0], p[1]);
          } else if (!stream.values.empty()) {
            s.update_batch(stream.values);
          }
        }
      },
      sketch);
  save_sketch(sketch_path, sketch);
  return 0;
}

int cmd_query(const std::string& sketch_path, const std::string& stat, const std::string& at,
              const std::string& algorithm, bool no_accelerate, bool clipped, std::ostream& out) {
  const AnySketch sketch = load_sketch(sketch_path);
  const std::vector<double> values = parse_number_list(at, "--at");
  const bool accelerate = !no_accelerate;

  QuantileAlgorithm alg = QuantileAlgorithm::kInterpolate;
  if (algorithm == "bisection") {
    alg = QuantileAlgorithm::kBisection;
  } else if (algorithm != "interpolate") {
    throw std::invalid_argument("--algorithm must be 'interpolate' or 'bisection'");
  }

  if (std::holds_alternative<UnivariateSketch>(sketch)) {
    const auto& s = std::get<UnivariateSketch>(sketch);
    if (stat == "pdf") {
      for (double v : s.pdf(values, clipped, accelerate)) out << fmt(v) << "\n";
    } else if (stat == "cdf") {
      for (double v : s.cdf(values, clipped, accelerate)) out << fmt(v) << "\n";
    } else if (stat == "quantile") {
      for (double v : s.quantiles(values, alg, accelerate)) out << fmt(v) << "\n";
    } else {
      throw std::invalid_argument("query: statistic must be 'pdf', 'cdf' or 'quantile'");
    }
    return 0;
  }

  const auto& s = std::get<BivariateSketch>(sketch);
  if (stat == "quantile") {
    throw std::invalid_argument("query: quantiles are defined for univariate sketches only");
  }
  if (values.size() % 2 != 0) {
    throw std::invalid_argument("query: bivariate --at needs an even number of values (x,y pairs)");
  }
  std::vector<std::array<double, 2>> points;
  points.reserve(values.size() / 2);
  for (std::size_t i = 0; i + 1 < values.size(); i += 2) points.push_back({values[i], values[i + 1]});
  if (stat == "pdf") {
    for (double v : s.pdf(points, clipped)) out << fmt(v) << "\n";
  } else if (stat == "cdf") {
    for (double v : s.cdf(points, clipped)) out << fmt(v) << "\n";
  } else {
    throw std::invalid_argument("query: statistic must be 'pdf', 'cdf' or 'quantile'");
  }
  return 0;
}

int cmd_merge(const std::vector<std::string>& paths, const std::string& out_path) {
  std::vector<UnivariateSketch> uni;
  std::vector<BivariateSketch> biv;
  for (const auto& p : paths) {
    AnySketch s = load_sketch(p);
    if (std::holds_alternative<UnivariateSketch>(s)) {
      uni.push_back(std::get<UnivariateSketch>(std::move(s)));
    } else {
      biv.push_back(std::get<BivariateSketch>(std::move(s)));
    }
  }
  if (!uni.empty() && !biv.empty()) {
    throw incompatible_sketch_error("merge: cannot mix univariate and bivariate sketches");
  }
  if (!uni.empty()) {
    save_sketch(out_path, merge_sketches(std::span<const UnivariateSketch>(uni)));
  } else {
    save_sketch(out_path, merge_sketches(std::span<const BivariateSketch>(biv)));
  }
  return 0;
}

int cmd_corr(const std::string& sketch_path, const std::string& stat, std::ostream& out) {
  const AnySketch sketch = load_sketch(sketch_path);
  if (!std::holds_alternative<BivariateSketch>(sketch)) {
    throw std::invalid_argument("corr: requires a bivariate sketch");
  }
  const auto& s = std::get<BivariateSketch>(sketch);
  if (stat == "spearman") {
    out << fmt(s.spearman()) << "\n";
  } else if (stat == "kendall") {
    out << fmt(s.kendall()) << "\n";
  } else {
    throw std::invalid_argument("corr: statistic must be 'spearman' or 'kendall'");
  }
  return 0;
}

struct BenchOptions {
  std::string study;
  std::vector<std::uint64_t> ns;
  int reps = 20;
  int order_n = kDefaultOrder;
  int qmc_points = eval::kDefaultQmcPoints;
  std::uint64_t seed = 1;
  std::vector<double> rhos;
  std::vector<std::string> dists;
  std::string out_path;
};

void bench_csv(const BenchOptions& opt, std::ostream& out) {
  out << "study,name,n,replications,miae,pmiae,mae,error_std\n";
  if (opt.study == "quantile-iae") {
    std::vector<eval::TestDistribution> dists;
    if (opt.dists.empty()) {
      dists = eval::test_distributions();
    } else {
      for (const auto& name : opt.dists) dists.push_back(eval::test_distribution(name));
    }
    for (std::uint64_t n : opt.ns) {
      const auto results = eval::quantile_iae_study(dists, n, opt.reps, opt.order_n,
                                                    opt.qmc_points, opt.seed);
      for (const auto& r : results) {
        out << "quantile-iae," << r.name << "," << r.sample_size << "," << r.replications << ","
            << fmt(r.miae) << "," << fmt(r.pmiae) << ",," << fmt(r.error_std) << "\n";
      }
    }
    return;
  }
  if (opt.study == "correlation-mae") {
    std::vector<double> rhos = opt.rhos;
    if (rhos.empty()) rhos = {-0.75, -0.5, -0.25, 0.25, 0.5, 0.75};
    for (std::uint64_t n : opt.ns) {
      const auto study = eval::correlation_mae_study(n, rhos, opt.reps, opt.order_n, opt.seed);
      auto row = [&](const char* stat, const eval::StudyResult& r) {
        out << "correlation-mae," << stat << ":" << r.name << "," << r.sample_size << ","
            << r.replications << ",,," << fmt(r.mae) << "," << fmt(r.error_std) << "\n";
      };
      for (const auto& r : study.spearman) row("spearman", r);
      for (const auto& r : study.kendall) row("kendall", r);
      out << "correlation-mae,spearman:avg," << n << "," << opt.reps << ",,,"
          << fmt(study.spearman_mae_avg) << "," << fmt(study.spearman_mae_std) << "\n";
      out << "correlation-mae,kendall:avg," << n << "," << opt.reps << ",,,"
          << fmt(study.kendall_mae_avg) << "," << fmt(study.kendall_mae_std) << "\n";
    }
    return;
  }
  throw std::invalid_argument("--study must be 'quantile-iae' or 'correlation-mae'");
}

int cmd_bench(const BenchOptions& opt, std::ostream& out) {
  if (opt.out_path.empty() || opt.out_path == "-") {
    bench_csv(opt, out);
    return 0;
  }
  std::ofstream file(opt.out_path, std::ios::trunc);
  if (!file) throw data_error("cannot write '" + opt.out_path + "'");
  bench_csv(opt, file);
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Streaming distribution sketches: univariate pdf/cdf/quantiles and "
               "bivariate pdf/cdf/rank correlations with constant-size state"};
  app.require_subcommand(1);

  BuildOptions build;
  auto* sub_build = app.add_subcommand("build", "Build a sketch from a numeric stream");
  sub_build->add_option("--type,-t", build.type, "Sketch type: univariate or bivariate")
      ->capture_default_str();
  sub_build->add_option("--n,-n", build.order_n, "Series truncation order")->capture_default_str();
  sub_build->add_option("--standardize", build.standardize, "Standardize observations")
      ->capture_default_str();
  sub_build->add_option("--lambda", build.lambda,
                        "Exponential forgetting factor in (0,1]; updates sequentially");
  sub_build->add_option("--input,-i", build.input, "Input path, or - for stdin")
      ->capture_default_str();
  sub_build->add_option("--out,-o", build.out_path, "Output sketch path")->required();
  sub_build->add_option("--on-bad-line", build.on_bad_line, "Bad input line policy: skip or fail")
      ->capture_default_str();
  sub_build->add_option("--threads", build.threads,
                        "Shard the batch and merge (standardize=false only)")
      ->capture_default_str();

  std::string upd_sketch;
  std::string upd_input = "-";
  std::string upd_bad = "fail";
  bool upd_sequential = false;
  auto* sub_update = app.add_subcommand("update", "Update an existing sketch in place");
  sub_update->add_option("--sketch", upd_sketch, "Sketch path")->required();
  sub_update->add_option("--input,-i", upd_input, "Input path, or - for stdin")
      ->capture_default_str();
  sub_update->add_flag("--sequential", upd_sequential,
                       "Per-observation updates (required for lambda sketches)");
  sub_update->add_option("--on-bad-line", upd_bad, "Bad input line policy: skip or fail")
      ->capture_default_str();

  std::string q_sketch;
  std::string q_stat;
  std::string q_at;
  std::string q_algorithm = "interpolate";
  bool q_noaccel = false;
  bool q_clipped = false;
  auto* sub_query = app.add_subcommand("query", "Evaluate pdf, cdf or quantiles");
  sub_query->add_option("--sketch", q_sketch, "Sketch path")->required();
  sub_query->add_option("stat", q_stat, "pdf, cdf or quantile")->required();
  sub_query->add_option("--at", q_at, "Comma-separated evaluation points (bivariate: x,y pairs)")
      ->required();
  sub_query->add_option("--algorithm", q_algorithm, "Quantile algorithm: interpolate or bisection")
      ->capture_default_str();
  sub_query->add_flag("--no-accelerate", q_noaccel, "Disable series acceleration");
  sub_query->add_option("--clipped", q_clipped, "Clip densities at 0 and probabilities to [0,1]")
      ->capture_default_str();

  std::vector<std::string> merge_paths;
  std::string merge_out;
  auto* sub_merge = app.add_subcommand("merge", "Merge sketches built on disjoint data");
  sub_merge->add_option("sketches", merge_paths, "Sketch paths")->required()->expected(-1);
  sub_merge->add_option("--out,-o", merge_out, "Output sketch path")->required();

  std::string corr_sketch;
  std::string corr_stat;
  auto* sub_corr = app.add_subcommand("corr", "Rank correlation of a bivariate sketch");
  sub_corr->add_option("--sketch", corr_sketch, "Sketch path")->required();
  sub_corr->add_option("stat", corr_stat, "spearman or kendall")->required();

  BenchOptions bench;
  auto* sub_bench = app.add_subcommand("bench", "Accuracy studies; emits CSV");
  sub_bench->add_option("--study", bench.study, "quantile-iae or correlation-mae")->required();
  sub_bench->add_option("--n", bench.ns, "Sample size(s)");
  sub_bench->add_option("--reps", bench.reps, "Replications per setting")->capture_default_str();
  sub_bench->add_option("--order", bench.order_n, "Series truncation order")->capture_default_str();
  sub_bench->add_option("--qmc-points", bench.qmc_points, "Quasi-Monte Carlo point count")
      ->capture_default_str();
  sub_bench->add_option("--seed", bench.seed, "Base seed")->capture_default_str();
  sub_bench->add_option("--rho", bench.rhos, "Correlation value(s) for correlation-mae");
  sub_bench->add_option("--dist", bench.dists,
                        "Test distribution(s) for quantile-iae (default: all)");
  sub_bench->add_option("--out", bench.out_path, "CSV output path (default: stdout)");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("hsk");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (sub_build->parsed()) return cmd_build(build, in, err);
    if (sub_update->parsed()) return cmd_update(upd_sketch, upd_input, upd_sequential, upd_bad, in, err);
    if (sub_query->parsed())
      return cmd_query(q_sketch, q_stat, q_at, q_algorithm, q_noaccel, q_clipped, out);
    if (sub_merge->parsed()) return cmd_merge(merge_paths, merge_out);
    if (sub_corr->parsed()) return cmd_corr(corr_sketch, corr_stat, out);
    if (sub_bench->parsed()) {
      if (bench.ns.empty()) bench.ns.push_back(bench.study == "quantile-iae" ? 100000 : 10000);
      return cmd_bench(bench, out);
    }
    err << "usage error: no subcommand given\n";
    return 2;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const incompatible_sketch_error& e) {
    err << "incompatible sketch: " << e.what() << "\n";
    return 4;
  } catch (const data_error& e) {
    err << "data error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace hermsketch::cli
