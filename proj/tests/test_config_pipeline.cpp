#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "helpers.hpp"
#include "ubic/error.hpp"
#include "ubic/pipeline.hpp"

using namespace ubic;

namespace {

int run_cli(const std::string& args) {
  const std::string cmd = std::string(UBIC_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

std::vector<std::string> names(const std::vector<CandidateTerm>& terms) {
  std::vector<std::string> out;
  for (const auto& t : terms) out.push_back(t.name());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("config parsing") {
  const PipelineConfig c = parse_config(
      "# comment line\n"
      "patch = 10        # applied after the PDE defaults\n"
      "pde = \"kdv\"\n"
      "noise_percent = 12.5\n"
      "denoiser = savgol\n"
      "solver = frols\n"
      "tau0_mode = percentile\n"
      "\n");
  CHECK(c.pde == Pde::KdV);
  CHECK(c.ksvd.patch == 10);
  CHECK(c.max_deriv == 4);
  CHECK(c.noise_percent == 12.5);
  CHECK(c.denoiser == Denoiser::Savgol);
  CHECK(c.solver == Solver::Frols);
  CHECK(c.tau0_mode == Tau0Mode::Percentile);
  CHECK(c.effective_weight_power() == 4);

  CHECK_THROWS_AS(parse_config("nosuchkey = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("nx = many\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("pde = heat\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("just a line\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("tau0 = -1\n").validate(), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/ubic.cfg"), ConfigError);
}

TEST_CASE("sub-seeds differ per stage and follow the root seed") {
  PipelineConfig c = default_config(Pde::Burgers);
  const auto a = noise_seed(c), b = subdomain_seed(c), d = dictionary_seed(c);
  CHECK(a != b);
  CHECK(b != d);
  c.seed = 1;
  CHECK(noise_seed(c) != a);
  c.noise_seed = 77;
  CHECK(noise_seed(c) == 77);
}

TEST_CASE("pipeline reports are reproducible byte for byte") {
  PipelineConfig c = default_config(Pde::Burgers);
  const std::string first = run_pipeline(c).report_json().dump(2);
  const std::string second = run_pipeline(c).report_json().dump(2);
  CHECK(first == second);
  c.seed = 5;
  CHECK(run_pipeline(c).report_json().dump(2) != first);
}

TEST_CASE("clean Burgers data without denoising recovers the equation") {
  // Without noise the P = 2 trapezoid error is what spurious terms fit; a
  // smoother weight leaves only the true terms.
  PipelineConfig c = default_config(Pde::Burgers);
  c.noise_percent = 0.0;
  c.denoiser = Denoiser::None;
  c.weight_power = 4;
  const PipelineResult r = run_pipeline(c);
  CHECK(names(r.chosen_terms) == std::vector<std::string>{"u*u_x", "u_xx"});
  REQUIRE(r.ce.has_value());
  REQUIRE(std::holds_alternative<CoefficientError>(*r.ce));
  CHECK(std::get<CoefficientError>(*r.ce).mean_percent < 1.0);
  CHECK(r.r_bic < 0.0);
}

TEST_CASE("artifacts can be read back") {
  test::TempDir dir;
  PipelineConfig c = default_config(Pde::Burgers);
  c.output_dir = dir.path();
  const PipelineResult r = run_pipeline(c);
  for (const char* f : {"clean.field", "noisy.field", "denoised.field", "library.bin", "sweep.json", "report.json",
                        "scores.csv"})
    CHECK(std::filesystem::exists(dir / f));
  CHECK(read_field(dir / "noisy.field").values() == r.noisy->values());
  const WeakLibrary lib = read_library(dir / "library.bin");
  CHECK(lib.phi == r.library.phi);
  const SubsetSweep sw = sweep_from_json(read_json(dir / "sweep.json"));
  REQUIRE(sw.models.size() == r.sweep.models.size());
  for (std::size_t k = 0; k < sw.models.size(); ++k) CHECK(sw.models[k].support == r.sweep.models[k].support);
  const Json report = read_json(dir / "report.json");
  CHECK(report["chosen_support_size"].get<std::size_t>() == r.report.chosen_support_size());
  std::vector<CandidateTerm> terms;
  Eigen::VectorXd coef;
  chosen_model_from_report(report, terms, coef);
  CHECK(terms == r.chosen_terms);
}

TEST_CASE("ingested field files run through the same stages") {
  test::TempDir dir;
  const Field clean = solve(default_spec(Pde::Burgers));
  write_field(clean, dir / "in.field");
  PipelineConfig c = default_config(Pde::Burgers);
  c.pde.reset();
  c.input = dir / "in.field";
  c.truth = Pde::Burgers;
  c.noise_percent = 0.0;
  c.denoiser = Denoiser::None;
  c.weight_power = 4;
  const PipelineResult r = run_pipeline(c);
  CHECK_FALSE(r.clean.has_value());
  CHECK_FALSE(r.false_equation());
}

TEST_CASE("tau0 sweep and ranges") {
  const std::vector<double> v = parse_range("0.01:0.05:5");
  REQUIRE(v.size() == 5);
  CHECK(v.front() == doctest::Approx(0.01));
  CHECK(v[2] == doctest::Approx(0.03));
  CHECK(v.back() == doctest::Approx(0.05));
  CHECK_THROWS_AS(parse_range("0.1:0.2"), InvalidArgument);
  CHECK_THROWS_AS(parse_range("a:b:3"), InvalidArgument);
  CHECK_THROWS_AS(parse_range("0.1:0.2:0"), InvalidArgument);

  const PipelineResult r = run_pipeline(default_config(Pde::Burgers));
  const auto rows = tau0_sweep(r, {0.02});
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].chosen_s == r.report.chosen_support_size());
  CHECK(rows[0].success == !r.false_equation());
}

TEST_CASE("command line exit codes") {
  test::TempDir dir;
  write_text(dir / "ok.cfg", "pde = burgers\n");
  write_text(dir / "bad.cfg", "pde = burgers\nwhat = 1\n");
  write_text(dir / "junk.json", "{not json");

  CHECK(run_cli("") == 2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("pipeline --config " + (dir / "bad.cfg").string()) == 2);
  CHECK(run_cli("pipeline --config " + (dir / "ok.cfg").string() + " --out " + (dir / "run").string()) == 0);
  CHECK(std::filesystem::exists(dir / "run" / "report.json"));
  CHECK(run_cli("evaluate --pde burgers --report " + (dir / "run" / "report.json").string()) == 0);
  CHECK(run_cli("evaluate --pde kdv --report " + (dir / "run" / "report.json").string()) == 4);
  CHECK(run_cli("evaluate --pde burgers --report " + (dir / "junk.json").string()) == 5);
  CHECK(run_cli("fit --library " + (dir / "junk.json").string()) == 5);

  // the staged commands chain end to end
  const std::string d = dir.path().string();
  REQUIRE(run_cli("generate --pde burgers --eps 30 --seed 3 --out " + d + "/noisy.field") == 0);
  REQUIRE(run_cli("denoise --in " + d + "/noisy.field --out " + d + "/den.field --method rksvd --patch 8") == 0);
  REQUIRE(run_cli("library --in " + d + "/den.field --out " + d + "/lib.bin") == 0);
  REQUIRE(run_cli("fit --library " + d + "/lib.bin --out " + d + "/sweep.json") == 0);
  REQUIRE(run_cli("select --library " + d + "/lib.bin --sweep " + d + "/sweep.json --out " + d + "/rep.json") == 0);
  CHECK(read_json(dir / "rep.json")["chosen_support_size"].get<std::size_t>() >= 1);
}
