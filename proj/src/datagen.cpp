#include "ubic/datagen.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include <fftw3.h>

#include "ubic/error.hpp"

namespace ubic {
namespace {

using Complex = std::complex<double>;
using ComplexVector = Eigen::Matrix<Complex, Eigen::Dynamic, 1>;

// Real-to-complex transform pair of fixed length with owned buffers.
class RealFft {
 public:
  explicit RealFft(int n) : n_(n), modes_(n / 2 + 1) {
    real_ = fftw_alloc_real(static_cast<std::size_t>(n));
    spec_ = fftw_alloc_complex(static_cast<std::size_t>(modes_));
    forward_ = fftw_plan_dft_r2c_1d(n, real_, spec_, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_1d(n, spec_, real_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(real_);
    fftw_free(spec_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int modes() const { return modes_; }

  ComplexVector forward(const Eigen::VectorXd& u) {
    for (int i = 0; i < n_; ++i) real_[i] = u[i];
    fftw_execute(forward_);
    ComplexVector out(modes_);
    for (int k = 0; k < modes_; ++k) out[k] = Complex(spec_[k][0], spec_[k][1]);
    return out;
  }

  Eigen::VectorXd backward(const ComplexVector& v) {
    for (int k = 0; k < modes_; ++k) {
      spec_[k][0] = v[k].real();
      spec_[k][1] = v[k].imag();
    }
    fftw_execute(backward_);
    Eigen::VectorXd out(n_);
    for (int i = 0; i < n_; ++i) out[i] = real_[i] / n_;
    return out;
  }

 private:
  int n_;
  int modes_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_{};
  fftw_plan backward_{};
};

struct AdvectionTerm {
  int power;  // u^power u_x
  double coefficient;
};

// phi-function coefficients for ETDRK4, evaluated by averaging over a circle
// of radius 1 around each h*L (Kassam & Trefethen contour trick).
struct EtdCoefficients {
  ComplexVector e, e2, q, f1, f2, f3;
};

EtdCoefficients etd_coefficients(const ComplexVector& linear, double h) {
  constexpr int kContour = 64;
  const auto n = linear.size();
  EtdCoefficients c{ComplexVector(n), ComplexVector(n), ComplexVector::Zero(n),
                    ComplexVector::Zero(n), ComplexVector::Zero(n), ComplexVector::Zero(n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const Complex hl = h * linear[k];
    c.e[k] = std::exp(hl);
    c.e2[k] = std::exp(hl / 2.0);
    for (int m = 0; m < kContour; ++m) {
      const double angle = 2.0 * std::numbers::pi * (m + 0.5) / kContour;
      const Complex z = hl + std::polar(1.0, angle);
      const Complex ez = std::exp(z);
      const Complex z3 = z * z * z;
      c.q[k] += (std::exp(z / 2.0) - 1.0) / z;
      c.f1[k] += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
      c.f2[k] += (2.0 + z + ez * (z - 2.0)) / z3;
      c.f3[k] += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
    }
    c.q[k] *= h / kContour;
    c.f1[k] *= h / kContour;
    c.f2[k] *= h / kContour;
    c.f3[k] *= h / kContour;
  }
  return c;
}

}  // namespace

PdeSpec default_spec(Pde pde) {
  switch (pde) {
    case Pde::Burgers:
      return {pde, {{{0, 2}, 0.1}, {{1, 1}, -1.0}}, InitialCondition::Gaussian,
              Axis{-8.0, 8.0, 256}, Axis{0.0, 10.0, 101}};
    case Pde::KdV:
      return {pde, {{{0, 3}, -1.0}, {{1, 1}, -1.0}}, InitialCondition::NegSine,
              Axis{-20.0, 20.0, 512}, Axis{0.0, 40.0, 501}};
    case Pde::KS:
      return {pde, {{{0, 2}, -1.0}, {{0, 4}, -1.0}, {{1, 1}, -1.0}}, InitialCondition::KsCosine,
              Axis{0.0, 32.0 * std::numbers::pi, 1024}, Axis{0.0, 100.0, 251}};
  }
  throw InvalidArgument("unknown PDE");
}

Pde parse_pde(const std::string& name) {
  if (name == "burgers") return Pde::Burgers;
  if (name == "kdv") return Pde::KdV;
  if (name == "ks") return Pde::KS;
  throw InvalidArgument("unknown PDE '" + name + "' (expected burgers|kdv|ks)");
}

std::string to_string(Pde pde) {
  switch (pde) {
    case Pde::Burgers: return "burgers";
    case Pde::KdV: return "kdv";
    case Pde::KS: return "ks";
  }
  return "unknown";
}

double initial_value(InitialCondition ic, double x) {
  switch (ic) {
    case InitialCondition::Gaussian: return std::exp(-(x + 2.0) * (x + 2.0));
    case InitialCondition::NegSine: return -std::sin(std::numbers::pi * x / 20.0);
    case InitialCondition::KsCosine: return std::cos(x / 16.0) * (1.0 + std::sin(x / 16.0));
    case InitialCondition::Zero: return 0.0;
  }
  return 0.0;
}

Field solve(const PdeSpec& spec, int oversample) {
  if (oversample < 1) throw InvalidArgument("oversample must be >= 1");
  spec.x.validate();
  spec.t.validate();
  if (spec.x.count < 4) throw InvalidArgument("spectral grid needs at least 4 samples");

  // The last sample duplicates the first, so the periodic grid has count-1 nodes.
  const int n = static_cast<int>(spec.x.count) - 1;
  const double period = spec.x.extent();
  RealFft fft(n);
  const int modes = fft.modes();

  ComplexVector ik(modes);
  for (int k = 0; k < modes; ++k) {
    // The Nyquist mode of an even grid has no well-defined odd derivative.
    const bool nyquist = (n % 2 == 0) && (k == n / 2);
    ik[k] = Complex(0.0, nyquist ? 0.0 : 2.0 * std::numbers::pi * k / period);
  }

  ComplexVector linear = ComplexVector::Zero(modes);
  std::vector<AdvectionTerm> advection;
  for (const auto& [term, coef] : spec.coefficients) {
    if (term.power == 0 && term.derivative >= 1) {
      for (int k = 0; k < modes; ++k) linear[k] += coef * std::pow(ik[k], term.derivative);
    } else if (term.power >= 1 && term.derivative == 1) {
      advection.push_back({term.power, coef});
    } else {
      throw InvalidArgument("solver supports pure-derivative and u^p u_x terms only, got " +
                            term.name());
    }
  }

  // Modes above 2/3 of the largest wavenumber are removed from nonlinear products.
  const int kmax = n / 2;
  Eigen::VectorXd dealias(modes);
  for (int k = 0; k < modes; ++k) dealias[k] = (3 * k <= 2 * kmax) ? 1.0 : 0.0;

  auto nonlinear = [&](const ComplexVector& v) {
    ComplexVector out = ComplexVector::Zero(modes);
    if (advection.empty()) return out;
    const Eigen::VectorXd u = fft.backward(v);
    for (const auto& term : advection) {
      const Eigen::VectorXd flux = u.array().pow(term.power + 1).matrix();
      const ComplexVector flux_hat = fft.forward(flux);
      const double scale = term.coefficient / (term.power + 1);
      for (int k = 0; k < modes; ++k) out[k] += scale * ik[k] * flux_hat[k] * dealias[k];
    }
    return out;
  };

  const int steps_per_sample = 50 * oversample;
  const double h = spec.t.spacing() / steps_per_sample;
  const EtdCoefficients c = etd_coefficients(linear, h);

  Eigen::VectorXd u0(n);
  for (int i = 0; i < n; ++i) u0[i] = initial_value(spec.initial_condition, spec.x.at(i));

  Eigen::MatrixXd values(spec.x.count, spec.t.count);
  auto store = [&](std::size_t j, const Eigen::VectorXd& u) {
    values.col(static_cast<Eigen::Index>(j)).head(n) = u;
    values(n, static_cast<Eigen::Index>(j)) = u[0];
  };
  store(0, u0);

  ComplexVector v = fft.forward(u0);
  for (std::size_t j = 1; j < spec.t.count; ++j) {
    for (int step = 0; step < steps_per_sample; ++step) {
      const ComplexVector nv = nonlinear(v);
      const ComplexVector a = c.e2.cwiseProduct(v) + c.q.cwiseProduct(nv);
      const ComplexVector na = nonlinear(a);
      const ComplexVector b = c.e2.cwiseProduct(v) + c.q.cwiseProduct(na);
      const ComplexVector nb = nonlinear(b);
      const ComplexVector cc = c.e2.cwiseProduct(a) + c.q.cwiseProduct(2.0 * nb - nv);
      const ComplexVector nc = nonlinear(cc);
      v = c.e.cwiseProduct(v) + nv.cwiseProduct(c.f1) + 2.0 * (na + nb).cwiseProduct(c.f2) +
          nc.cwiseProduct(c.f3);
    }
    const Eigen::VectorXd u = fft.backward(v);
    if (!u.allFinite()) {
      throw NumericalError("integration blew up before t = " + std::to_string(spec.t.at(j)));
    }
    store(j, u);
  }
  return Field(spec.x, spec.t, std::move(values));
}

}  // namespace ubic
