#include "ubic/serialize.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>

#include "ubic/error.hpp"

namespace ubic {
namespace {

// JSON has no infinities; an unbounded uncertainty is written as null.
Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

double number_from(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace

Json term_json(const CandidateTerm& term) { return Json{{"d1", term.power}, {"d2", term.derivative}}; }

CandidateTerm term_from_json(const Json& j) { return {j.at("d1").get<int>(), j.at("d2").get<int>()}; }

Json sweep_to_json(const SubsetSweep& sweep, const WeakLibrary& library) {
  Json out;
  out["solver"] = to_string(sweep.solver);
  Json models = Json::array();
  for (const auto& m : sweep.models) {
    Json jm;
    jm["s"] = m.support_size();
    jm["support"] = m.support;
    Json terms = Json::array();
    for (std::size_t idx : m.support) {
      if (idx < library.terms.size())
        terms.push_back(term_json(library.terms[idx]));
      else
        terms.push_back("intercept");
    }
    jm["terms"] = terms;
    jm["coefficients"] = std::vector<double>(m.coefficients.data(), m.coefficients.data() + m.coefficients.size());
    jm["sse"] = m.sse;
    jm["rank_deficient"] = m.rank_deficient;
    models.push_back(jm);
  }
  out["models"] = models;
  return out;
}

SubsetSweep sweep_from_json(const Json& j) {
  try {
    SubsetSweep sweep;
    sweep.solver = parse_solver(j.at("solver").get<std::string>());
    for (const auto& jm : j.at("models")) {
      SubsetModel m;
      m.support = jm.at("support").get<std::vector<std::size_t>>();
      const auto coef = jm.at("coefficients").get<std::vector<double>>();
      m.coefficients = Eigen::Map<const Eigen::VectorXd>(coef.data(), static_cast<Eigen::Index>(coef.size()));
      m.sse = jm.at("sse").get<double>();
      m.rank_deficient = jm.value("rank_deficient", false);
      sweep.models.push_back(std::move(m));
    }
    return sweep;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed sweep document: ") + e.what());
  }
}

Json report_to_json(const SelectionReport& report, const UncertaintySweep& uncertainty,
                    const WeakLibrary& library) {
  Json out;
  out["n_omega"] = report.table.n_samples;
  out["gamma"] = report.table.gamma;
  out["lambda_u"] = report.lambda_u;
  out["lambda_max"] = number_or_null(report.lambda_max);
  out["tau0"] = report.tau0_used;
  out["chosen_support_size"] = report.chosen_support_size();
  out["warning"] = report.overfit_warning;
  Json scores = Json::array();
  for (const auto& r : report.table.records)
    scores.push_back({{"s", r.s}, {"logL", r.log_likelihood}, {"bic", r.bic}, {"u", number_or_null(r.u)},
                      {"ubic", number_or_null(r.ubic)}});
  out["scores"] = scores;
  Json coefficients = Json::array();
  const PosteriorModel& post = uncertainty.posteriors.at(report.chosen);
  for (std::size_t m = 0; m < post.support.size(); ++m) {
    const std::size_t idx = post.support[m];
    const auto mi = static_cast<Eigen::Index>(m);
    coefficients.push_back({{"term", idx < library.terms.size() ? term_json(library.terms[idx]) : Json("intercept")},
                            {"mean", post.mean[mi]},
                            {"sd", std::sqrt(std::max(post.covariance(mi, mi), 0.0))}});
  }
  out["coefficients"] = coefficients;
  Json trace = Json::array();
  for (const auto& step : report.trace)
    trace.push_back({{"lambda", number_or_null(step.lambda)},
                     {"argmin_s", report.table.records[step.argmin].s},
                     {"delta_s", step.delta_s},
                     {"delta_bic", step.delta_bic},
                     {"tau", step.tau},
                     {"terminated", step.terminated}});
  out["trace"] = trace;
  return out;
}

ScoreTable scores_from_report(const Json& report) {
  try {
    ScoreTable table;
    table.n_samples = report.at("n_omega").get<std::size_t>();
    table.gamma = report.at("gamma").get<double>();
    table.lambda_u = report.at("lambda_u").get<double>();
    for (const auto& r : report.at("scores"))
      table.records.push_back({r.at("s").get<std::size_t>(), r.at("logL").get<double>(), r.at("bic").get<double>(),
                               number_from(r.at("u")), number_from(r.at("ubic"))});
    return table;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
}

void chosen_model_from_report(const Json& report, std::vector<CandidateTerm>& terms,
                              Eigen::VectorXd& coefficients) {
  try {
    terms.clear();
    std::vector<double> coef;
    for (const auto& c : report.at("coefficients")) {
      if (!c.at("term").is_object()) throw FormatError("intercept terms cannot be scored against a PDE");
      terms.push_back(term_from_json(c.at("term")));
      coef.push_back(c.at("mean").get<double>());
    }
    coefficients = Eigen::Map<const Eigen::VectorXd>(coef.data(), static_cast<Eigen::Index>(coef.size()));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
}

Json evaluation_to_json(const CeOutcome& ce, double r_bic_value) {
  Json out;
  if (const auto* err = std::get_if<CoefficientError>(&ce)) {
    out["outcome"] = "match";
    out["percent_ce"] = err->mean_percent;
    out["per_term_percent_ce"] = err->per_term;
  } else {
    out["outcome"] = "False Eq.";
    out["percent_ce"] = nullptr;
  }
  out["r_bic"] = r_bic_value;
  return out;
}

void write_json(const Json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  out << j.dump(2) << '\n';
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_scores_csv(const ScoreTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  out << std::setprecision(17) << "s,logL,bic,u,ubic\n";
  for (const auto& r : table.records) out << r.s << ',' << r.log_likelihood << ',' << r.bic << ',' << r.u << ',' << r.ubic << '\n';
}

}  // namespace ubic
