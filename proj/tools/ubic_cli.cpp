// Command-line front end: one subcommand per pipeline stage plus `pipeline`
// for the whole chain. Exit codes: 0 ok, 1 unexpected error, 2 bad
// configuration or arguments, 3 numerical failure, 4 false equation
// (support differs from the truth), 5 malformed input file.
#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "ubic/config.hpp"
#include "ubic/datagen.hpp"
#include "ubic/denoise.hpp"
#include "ubic/error.hpp"
#include "ubic/pipeline.hpp"
#include "ubic/serialize.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUnexpected = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitFalseEquation = 4;
constexpr int kExitFormat = 5;

struct GenerateArgs {
  std::string pde = "burgers";
  std::size_t nx = 0, nt = 0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  int oversample = 1;
  std::string out, csv;
};

struct DenoiseArgs {
  std::string in, out, method = "rksvd";
  ubic::KsvdOptions ksvd{};
  std::size_t window = 11;
  int order = 2;
  std::size_t rank = 10;
};

struct LibraryArgs {
  std::string in, out;
  int max_power = 2, max_deriv = 2, weight_power = 0;
  std::size_t ndomains = 500;
  double hx_frac = 0.1, ht_frac = 0.1;
  std::uint64_t seed = 0;
  bool intercept = false, denoised_wf = false;
  std::size_t alpha = 7;
};

struct FitArgs {
  std::string library, out, solver = "exhaustive";
  std::size_t max_support = 0;
  double budget = ubic::kDefaultSubsetBudget;
};

struct SelectArgs {
  std::string library, sweep, out, csv;
  double tau0 = ubic::kDefaultTau0;
  double percentile = -1.0;
  int n_delta = 3;
  double gamma = 0.0;
};

struct EvaluateArgs {
  std::string report, pde;
};

struct PipelineArgs {
  std::string config, out, tau0_sweep;
  bool no_denoise = false;
  std::optional<std::uint64_t> seed;
};

int generate(const GenerateArgs& a) {
  ubic::PdeSpec spec = ubic::default_spec(ubic::parse_pde(a.pde));
  if (a.nx) spec.x.count = a.nx;
  if (a.nt) spec.t.count = a.nt;
  ubic::Field field = ubic::solve(spec, a.oversample);
  field = ubic::add_noise(field, {a.eps, a.seed});
  ubic::write_field(field, a.out);
  if (!a.csv.empty()) ubic::write_field_csv(field, a.csv);
  return kExitOk;
}

int denoise(const DenoiseArgs& a) {
  const ubic::Field noisy = ubic::read_field(a.in);
  const ubic::Denoiser method = ubic::parse_denoiser(a.method);
  ubic::Field out = noisy;
  if (method == ubic::Denoiser::Rksvd) {
    ubic::KsvdTrace trace;
    out = ubic::rksvd_denoise(noisy, a.ksvd, &trace);
    if (!trace.objective.empty())
      std::cerr << "rksvd: final objective " << trace.objective.back() << ", reseeded " << trace.reseeded_atoms
                << " atoms\n";
  } else if (method == ubic::Denoiser::Savgol) {
    out = ubic::savgol2d(noisy, ubic::SavgolSpec{a.window, a.window, a.order, a.order});
  } else if (method == ubic::Denoiser::Svd) {
    out = ubic::svd_truncate(noisy, a.rank);
  }
  ubic::write_field(out, a.out);
  return kExitOk;
}

int library(const LibraryArgs& a) {
  const ubic::Field field = ubic::read_field(a.in);
  const int power = a.weight_power > 0 ? a.weight_power : std::max(2, a.max_deriv);
  const auto spec = ubic::default_subdomains(field, a.ndomains, a.hx_frac, a.ht_frac, a.seed, power);
  const auto terms = ubic::enumerate_terms(a.max_power, a.max_deriv);
  const ubic::WeakLibrary lib = a.denoised_wf ? ubic::denoised_build(field, terms, spec, a.alpha, a.intercept)
                                              : ubic::build(field, terms, spec, a.intercept);
  ubic::write_library(lib, a.out);
  return kExitOk;
}

int fit(const FitArgs& a) {
  const ubic::WeakLibrary lib = ubic::read_library(a.library);
  const std::size_t max_s = a.max_support ? a.max_support : lib.n_candidates();
  const auto result = ubic::sweep(lib, max_s, ubic::parse_solver(a.solver), a.budget);
  const ubic::Json j = ubic::sweep_to_json(result, lib);
  if (a.out.empty()) std::cout << j.dump(2) << '\n';
  else ubic::write_json(j, a.out);
  return kExitOk;
}

int select(const SelectArgs& a) {
  const ubic::WeakLibrary lib = ubic::read_library(a.library);
  const ubic::SubsetSweep models = ubic::sweep_from_json(ubic::read_json(a.sweep));
  const auto uncertainty = ubic::uncertainty_sweep(lib, models);
  const auto inputs = ubic::score_inputs(lib.phi, lib.q0, uncertainty);
  ubic::TunerOptions options;
  options.tau0 = a.percentile >= 0.0 ? ubic::tau0_heuristic(inputs, a.percentile).tau0 : a.tau0;
  options.n_delta = a.n_delta;
  options.gamma = a.gamma;
  const auto report = ubic::tune(inputs, options);
  const ubic::Json j = ubic::report_to_json(report, uncertainty, lib);
  if (a.out.empty()) std::cout << j.dump(2) << '\n';
  else ubic::write_json(j, a.out);
  if (!a.csv.empty()) ubic::write_scores_csv(report.table, a.csv);
  if (report.overfit_warning) std::cerr << "warning: chosen model barely improves on the next smaller one\n";
  return kExitOk;
}

int evaluate(const EvaluateArgs& a) {
  const ubic::Json report = ubic::read_json(a.report);
  std::vector<ubic::CandidateTerm> terms;
  Eigen::VectorXd coef;
  ubic::chosen_model_from_report(report, terms, coef);
  const auto truth = ubic::truth_from(ubic::default_spec(ubic::parse_pde(a.pde)));
  const auto ce = ubic::percent_ce(terms, coef, truth);
  const double rb = ubic::r_bic(ubic::scores_from_report(report));
  std::cout << ubic::evaluation_to_json(ce, rb).dump(2) << '\n';
  return std::holds_alternative<ubic::FalseEquation>(ce) ? kExitFalseEquation : kExitOk;
}

ubic::PipelineConfig pipeline_config(const PipelineArgs& a) {
  ubic::PipelineConfig config = ubic::load_config(a.config);
  if (a.no_denoise) config.denoiser = ubic::Denoiser::None;
  if (a.seed) config.seed = *a.seed;
  if (!a.out.empty()) config.output_dir = a.out;
  return config;
}

void print_tau0_sweep(const ubic::PipelineResult& result, const std::string& range) {
  const auto rows = ubic::tau0_sweep(result, ubic::parse_range(range));
  std::size_t hits = 0;
  std::printf("tau0,chosen_s,success\n");
  for (const auto& row : rows) {
    std::printf("%.6g,%zu,%d\n", row.tau0, row.chosen_s, row.success ? 1 : 0);
    hits += row.success ? 1 : 0;
  }
  if (result.truth)
    std::fprintf(stderr, "success rate: %zu/%zu (%.1f%%)\n", hits, rows.size(),
                 100.0 * static_cast<double>(hits) / static_cast<double>(rows.size()));
}

int pipeline(const PipelineArgs& a) {
  const ubic::PipelineResult result = ubic::run_pipeline(pipeline_config(a));
  if (!a.tau0_sweep.empty()) {
    print_tau0_sweep(result, a.tau0_sweep);
  } else {
    std::cout << result.report_json().dump(2) << '\n';
  }
  return result.false_equation() ? kExitFalseEquation : kExitOk;
}

template <class Fn>
int guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const ubic::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ubic::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ubic::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ubic::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return kExitFormat;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUnexpected;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weak-form PDE discovery with uncertainty-penalized model selection"};
  app.require_subcommand(1);
  int code = kExitOk;

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Integrate a reference PDE and optionally add noise");
  g->add_option("--pde", gen.pde, "burgers | kdv | ks")->check(CLI::IsMember({"burgers", "kdv", "ks"}));
  g->add_option("--nx", gen.nx, "spatial samples (default: the PDE's grid)");
  g->add_option("--nt", gen.nt, "time samples");
  g->add_option("--eps", gen.eps, "noise level in percent of the field's standard deviation");
  g->add_option("--seed", gen.seed, "noise seed");
  g->add_option("--oversample", gen.oversample, "extra integrator substeps factor");
  g->add_option("--out", gen.out, "field file")->required();
  g->add_option("--csv", gen.csv, "also write x,t,u rows");
  g->callback([&] { code = guarded([&] { return generate(gen); }); });

  DenoiseArgs den;
  auto* d = app.add_subcommand("denoise", "Denoise a field file");
  d->add_option("--in", den.in)->required();
  d->add_option("--out", den.out)->required();
  d->add_option("--method", den.method, "rksvd | savgol | svd | none");
  d->add_option("--patch", den.ksvd.patch, "rksvd patch side");
  d->add_option("--stride", den.ksvd.stride, "rksvd patch stride (0: non-overlapping)");
  d->add_option("--rho", den.ksvd.rho, "rksvd code regularization");
  d->add_option("--atoms", den.ksvd.atoms, "rksvd dictionary size (0: 2 p^2)");
  d->add_option("--iters", den.ksvd.iterations, "rksvd training iterations");
  d->add_option("--train-sparsity", den.ksvd.train_sparsity);
  d->add_option("--final-sparsity", den.ksvd.final_sparsity, "0: floor(p^2 / 10)");
  d->add_option("--seed", den.ksvd.seed, "dictionary initialization seed");
  d->add_option("--window", den.window, "savgol window (odd)");
  d->add_option("--order", den.order, "savgol polynomial order");
  d->add_option("--rank", den.rank, "svd truncation rank");
  d->callback([&] { code = guarded([&] { return denoise(den); }); });

  LibraryArgs lib;
  auto* l = app.add_subcommand("library", "Build the weak-form candidate library");
  l->add_option("--in", lib.in)->required();
  l->add_option("--out", lib.out)->required();
  l->add_option("--max-power", lib.max_power);
  l->add_option("--max-deriv", lib.max_deriv);
  l->add_option("--ndomains", lib.ndomains);
  l->add_option("--hx-frac", lib.hx_frac);
  l->add_option("--ht-frac", lib.ht_frac);
  l->add_option("--seed", lib.seed);
  l->add_option("--weight-power", lib.weight_power, "0: max(2, max-deriv)");
  l->add_flag("--intercept", lib.intercept);
  l->add_flag("--denoised-wf", lib.denoised_wf, "smooth each subdomain block first");
  l->add_option("--alpha", lib.alpha, "smoothing window for --denoised-wf");
  l->callback([&] { code = guarded([&] { return library(lib); }); });

  FitArgs fa;
  auto* f = app.add_subcommand("fit", "Best-subset sweep over a library");
  f->add_option("--library", fa.library)->required();
  f->add_option("--out", fa.out, "sweep JSON (stdout when omitted)");
  f->add_option("--solver", fa.solver)->check(CLI::IsMember({"exhaustive", "frols", "refine"}));
  f->add_option("--max-support", fa.max_support, "0: every column");
  f->add_option("--budget", fa.budget, "max subsets per support size");
  f->callback([&] { code = guarded([&] { return fit(fa); }); });

  SelectArgs sa;
  auto* s = app.add_subcommand("select", "Score a sweep and tune lambda_u");
  s->add_option("--library", sa.library)->required();
  s->add_option("--sweep", sa.sweep)->required();
  s->add_option("--out", sa.out, "report JSON (stdout when omitted)");
  s->add_option("--csv", sa.csv, "score curves");
  s->add_option("--tau0", sa.tau0);
  s->add_option("--tau0-percentile", sa.percentile, "derive tau0 from BIC improvements");
  s->add_option("--n-delta", sa.n_delta);
  s->add_option("--gamma", sa.gamma, "<= 0: log N");
  s->callback([&] { code = guarded([&] { return select(sa); }); });

  EvaluateArgs ea;
  auto* e = app.add_subcommand("evaluate", "Score a report against a reference PDE");
  e->add_option("--report", ea.report)->required();
  e->add_option("--pde", ea.pde)->required()->check(CLI::IsMember({"burgers", "kdv", "ks"}));
  e->callback([&] { code = guarded([&] { return evaluate(ea); }); });

  PipelineArgs pa;
  auto* p = app.add_subcommand("pipeline", "Run every stage from a config file");
  p->add_option("--config", pa.config)->required();
  p->add_option("--out", pa.out, "artifact directory (overrides output_dir)");
  p->add_option("--seed", pa.seed, "root seed override");
  p->add_flag("--no-denoise", pa.no_denoise);
  p->add_option("--tau0-sweep", pa.tau0_sweep, "start:stop:count");
  p->callback([&] { code = guarded([&] { return pipeline(pa); }); });

  PipelineArgs ta;
  auto* t = app.add_subcommand("tau0-sweep", "Selected support size per tau0 on one pipeline run");
  t->add_option("--config", ta.config)->required();
  t->add_option("--range", ta.tau0_sweep, "start:stop:count")->required();
  t->add_option("--seed", ta.seed);
  t->add_flag("--no-denoise", ta.no_denoise);
  t->callback([&] { code = guarded([&] { return pipeline(ta); }); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : kExitConfig;
  }
  return code;
}
