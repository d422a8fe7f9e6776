#include "ubic/weaklib.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "ubic/denoise.hpp"
#include "ubic/error.hpp"
#include "ubic/finite_difference.hpp"
#include "ubic/parallel.hpp"

namespace ubic {
namespace {

constexpr std::size_t kMinPointsPerAxis = 5;

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Trapezoid-weighted samples of d^k w / dx^k along one axis of the subdomain:
// kernel[m] = tau_m * w^(k)(z_m) / H^k with z_m = (m - half) / half.
Eigen::VectorXd axis_kernel(int power, int k, std::size_t half, double spacing) {
  const std::size_t n = 2 * half + 1;
  const double hw = static_cast<double>(half) * spacing;
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (std::size_t m = 0; m < n; ++m) {
    const double z = (static_cast<double>(m) - static_cast<double>(half)) / static_cast<double>(half);
    const double tau = (m == 0 || m + 1 == n) ? 0.5 * spacing : spacing;
    out[static_cast<Eigen::Index>(m)] = tau * weight_derivative(power, k, z) / std::pow(hw, k);
  }
  return out;
}

struct Kernels {
  std::vector<Eigen::VectorXd> x;  // x[k] for k = 0 .. max pure derivative (at least 1)
  Eigen::VectorXd t0;
  Eigen::VectorXd t1;
};

void validate_terms(const std::vector<CandidateTerm>& terms, int weight_power) {
  if (weight_power < 2) throw InvalidArgument("weight_power must be >= 2");
  if (terms.empty()) throw InvalidArgument("candidate list is empty");
  for (const auto& term : terms) {
    if (term.power < 0 || term.derivative < 0 || term.power + term.derivative < 1)
      throw InvalidArgument("invalid candidate term");
    if (term.power == 0 && term.derivative > weight_power)
      throw InvalidArgument("weight_power " + std::to_string(weight_power) +
                            " cannot absorb " + term.name() + " by integration by parts");
  }
}

Eigen::MatrixXd elementwise_power(const Eigen::MatrixXd& u, int p) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Ones(u.rows(), u.cols());
  for (int i = 0; i < p; ++i) out = out.cwiseProduct(u);
  return out;
}

// Fills row i of the library from one subdomain block of the (possibly
// smoothed) field. `derivs[d]` holds the matching block of d^d u / dx^d for
// the finite-difference terms.
void integrate_block(const Eigen::MatrixXd& block, const std::vector<Eigen::MatrixXd>& derivs,
                     const std::vector<CandidateTerm>& terms, bool intercept,
                     const Kernels& k, Eigen::Index row, WeakLibrary& lib) {
  auto form = [](const Eigen::VectorXd& kx, const Eigen::MatrixXd& m, const Eigen::VectorXd& kt) {
    return kx.dot(m * kt);
  };
  lib.q0[row] = -form(k.x[0], block, k.t1);
  for (std::size_t j = 0; j < terms.size(); ++j) {
    const auto [p, d] = terms[j];
    double value = 0.0;
    if (d == 0) {
      value = form(k.x[0], elementwise_power(block, p), k.t0);
    } else if (p == 0) {
      value = ((d % 2) ? -1.0 : 1.0) * form(k.x[static_cast<std::size_t>(d)], block, k.t0);
    } else if (d == 1) {
      value = -form(k.x[1], elementwise_power(block, p + 1), k.t0) / (p + 1);
    } else {
      value = form(k.x[0], elementwise_power(block, p).cwiseProduct(derivs[static_cast<std::size_t>(d)]), k.t0);
    }
    lib.phi(row, static_cast<Eigen::Index>(j)) = value;
  }
  if (intercept) {
    lib.phi(row, static_cast<Eigen::Index>(terms.size())) =
        form(k.x[0], Eigen::MatrixXd::Ones(block.rows(), block.cols()), k.t0);
  }
}

WeakLibrary build_impl(const Field& field, const std::vector<CandidateTerm>& terms,
                       const SubdomainSpec& spec, std::size_t alpha, bool include_intercept) {
  validate_terms(terms, spec.weight_power);
  const SubdomainLayout layout = layout_subdomains(field, spec);
  const bool smooth = alpha > 1;
  if (smooth) {
    if (alpha % 2 == 0) throw InvalidArgument("savgol window alpha must be odd");
    if (alpha > 2 * std::min(layout.half_x, layout.half_t) + 1)
      throw InvalidArgument("savgol window alpha does not fit inside a subdomain");
  }

  int max_pure = 1;
  int max_fd = 0;
  for (const auto& term : terms) {
    if (term.power == 0) max_pure = std::max(max_pure, term.derivative);
    if (term.power >= 1 && term.derivative >= 2) max_fd = std::max(max_fd, term.derivative);
  }
  Kernels kernels;
  for (int d = 0; d <= max_pure; ++d)
    kernels.x.push_back(axis_kernel(spec.weight_power, d, layout.half_x, field.x().spacing()));
  kernels.t0 = axis_kernel(spec.weight_power, 0, layout.half_t, field.t().spacing());
  kernels.t1 = axis_kernel(spec.weight_power, 1, layout.half_t, field.t().spacing());

  const auto& u = field.values();
  const double dx = field.x().spacing();
  // Without smoothing, derivatives come from the full field so interior
  // stencils reach across subdomain edges.
  std::vector<Eigen::MatrixXd> global_derivs(static_cast<std::size_t>(max_fd + 1));
  if (!smooth)
    for (int d = 2; d <= max_fd; ++d) global_derivs[static_cast<std::size_t>(d)] = differentiate_rows(u, d, dx);

  WeakLibrary lib;
  lib.terms = terms;
  lib.include_intercept = include_intercept;
  lib.spec = spec;
  const auto n_rows = static_cast<Eigen::Index>(layout.domains.size());
  lib.phi.resize(n_rows, static_cast<Eigen::Index>(terms.size() + (include_intercept ? 1 : 0)));
  lib.q0.resize(n_rows);

  const auto bx = static_cast<Eigen::Index>(2 * layout.half_x + 1);
  const auto bt = static_cast<Eigen::Index>(2 * layout.half_t + 1);
  const SavgolSpec filter{alpha, alpha, 2, 2};

  parallel_for(layout.domains.size(), [&](std::size_t i) {
    const auto x0 = static_cast<Eigen::Index>(layout.domains[i].x0);
    const auto t0 = static_cast<Eigen::Index>(layout.domains[i].t0);
    Eigen::MatrixXd block = u.block(x0, t0, bx, bt);
    std::vector<Eigen::MatrixXd> derivs(static_cast<std::size_t>(max_fd + 1));
    if (smooth) {
      block = savgol2d(block, filter);
      for (int d = 2; d <= max_fd; ++d) derivs[static_cast<std::size_t>(d)] = differentiate_rows(block, d, dx);
    } else {
      for (int d = 2; d <= max_fd; ++d)
        derivs[static_cast<std::size_t>(d)] = global_derivs[static_cast<std::size_t>(d)].block(x0, t0, bx, bt);
    }
    integrate_block(block, derivs, terms, include_intercept, kernels, static_cast<Eigen::Index>(i), lib);
  });

  if (!lib.phi.allFinite() || !lib.q0.allFinite())
    throw NumericalError("weak library contains non-finite entries");
  return lib;
}

}  // namespace

SubdomainSpec default_subdomains(const Field& field, std::size_t n_domains, double hx_fraction,
                                 double ht_fraction, std::uint64_t seed, int weight_power) {
  return SubdomainSpec{n_domains, hx_fraction * field.x().extent(), ht_fraction * field.t().extent(),
                       seed, weight_power};
}

SubdomainLayout layout_subdomains(const Field& field, const SubdomainSpec& spec) {
  if (spec.n_domains == 0) throw InvalidArgument("need at least one subdomain");
  if (!(spec.half_width_x > 0.0) || !(spec.half_width_t > 0.0))
    throw InvalidArgument("subdomain half widths must be positive");
  if (!(2.0 * spec.half_width_x < field.x().extent()) || !(2.0 * spec.half_width_t < field.t().extent()))
    throw InvalidArgument("subdomain does not fit inside the grid");

  SubdomainLayout layout;
  layout.half_x = static_cast<std::size_t>(std::lround(spec.half_width_x / field.x().spacing()));
  layout.half_t = static_cast<std::size_t>(std::lround(spec.half_width_t / field.t().spacing()));
  if (2 * layout.half_x + 1 < kMinPointsPerAxis || 2 * layout.half_t + 1 < kMinPointsPerAxis)
    throw InvalidArgument("subdomain contains fewer than 5 grid points per axis");
  if (2 * layout.half_x + 1 > field.nx() || 2 * layout.half_t + 1 > field.nt())
    throw InvalidArgument("subdomain out of bounds");
  layout.hx = static_cast<double>(layout.half_x) * field.x().spacing();
  layout.ht = static_cast<double>(layout.half_t) * field.t().spacing();

  Rng rng(spec.seed);
  std::uniform_int_distribution<std::size_t> pick_x(0, field.nx() - (2 * layout.half_x + 1));
  std::uniform_int_distribution<std::size_t> pick_t(0, field.nt() - (2 * layout.half_t + 1));
  layout.domains.reserve(spec.n_domains);
  for (std::size_t i = 0; i < spec.n_domains; ++i) {
    const std::size_t x0 = pick_x(rng);
    const std::size_t t0 = pick_t(rng);
    layout.domains.push_back({x0, t0});
  }
  return layout;
}

double weight_derivative(int power, int k, double z) {
  // (z^2 - 1)^P = sum_m C(P, m) (-1)^(P - m) z^(2m)
  double value = 0.0;
  for (int m = 0; m <= power; ++m) {
    const int degree = 2 * m;
    if (degree < k) continue;
    double falling = 1.0;
    for (int i = 0; i < k; ++i) falling *= degree - i;
    const double sign = ((power - m) % 2) ? -1.0 : 1.0;
    value += sign * binomial(power, m) * falling * std::pow(z, degree - k);
  }
  return value;
}

std::string WeakLibrary::column_name(std::size_t j) const {
  if (j < terms.size()) return terms[j].name();
  return "1";
}

WeakLibrary build(const Field& field, const std::vector<CandidateTerm>& terms,
                  const SubdomainSpec& spec, bool include_intercept) {
  return build_impl(field, terms, spec, 0, include_intercept);
}

WeakLibrary denoised_build(const Field& field, const std::vector<CandidateTerm>& terms,
                           const SubdomainSpec& spec, std::size_t alpha, bool include_intercept) {
  return build_impl(field, terms, spec, alpha, include_intercept);
}

void write_library(const WeakLibrary& library, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  nlohmann::ordered_json header;
  header["n_omega"] = library.n_samples();
  header["n_q"] = library.n_candidates();
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& t : library.terms) terms.push_back({{"d1", t.power}, {"d2", t.derivative}});
  header["terms"] = terms;
  header["intercept"] = library.include_intercept;
  header["n_domains"] = library.spec.n_domains;
  header["half_width_x"] = library.spec.half_width_x;
  header["half_width_t"] = library.spec.half_width_t;
  header["seed"] = library.spec.seed;
  header["weight_power"] = library.spec.weight_power;
  header["layout"] = "row-major,q0-first";
  header["dtype"] = "f64le";
  out << header.dump() << '\n';
  Eigen::MatrixXd joined(library.phi.rows(), library.phi.cols() + 1);
  joined << library.q0, library.phi;
  const Eigen::MatrixXd row_major = joined.transpose();
  detail::write_f64le(out, row_major.data(), static_cast<std::size_t>(row_major.size()));
  if (!out) throw InvalidArgument("write failed: " + path.string());
}

WeakLibrary read_library(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing header line");
  WeakLibrary lib;
  std::size_t rows = 0, cols = 0;
  try {
    const auto header = nlohmann::json::parse(line);
    rows = header.at("n_omega").get<std::size_t>();
    cols = header.at("n_q").get<std::size_t>();
    for (const auto& t : header.at("terms")) lib.terms.push_back({t.at("d1").get<int>(), t.at("d2").get<int>()});
    lib.include_intercept = header.at("intercept").get<bool>();
    lib.spec.n_domains = header.at("n_domains").get<std::size_t>();
    lib.spec.half_width_x = header.at("half_width_x").get<double>();
    lib.spec.half_width_t = header.at("half_width_t").get<double>();
    lib.spec.seed = header.at("seed").get<std::uint64_t>();
    lib.spec.weight_power = header.at("weight_power").get<int>();
    if (header.at("dtype").get<std::string>() != "f64le") throw FormatError("unsupported dtype");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed library header: ") + e.what());
  }
  if (lib.terms.size() + (lib.include_intercept ? 1 : 0) != cols)
    throw FormatError("library column count does not match its terms");

  const auto start = in.tellg();
  in.seekg(0, std::ios::end);
  const auto bytes = static_cast<std::uint64_t>(in.tellg() - start);
  in.seekg(start);
  if (bytes != static_cast<std::uint64_t>(rows) * (cols + 1) * 8)
    throw FormatError("size mismatch between library header and payload");
  Eigen::MatrixXd row_major(static_cast<Eigen::Index>(cols + 1), static_cast<Eigen::Index>(rows));
  detail::read_f64le(in, row_major.data(), rows * (cols + 1));
  if (!row_major.allFinite()) throw FormatError("library payload contains non-finite values");
  const Eigen::MatrixXd joined = row_major.transpose();
  lib.q0 = joined.col(0);
  lib.phi = joined.rightCols(static_cast<Eigen::Index>(cols));
  return lib;
}

}  // namespace ubic
