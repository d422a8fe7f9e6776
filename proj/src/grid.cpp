#include "ubic/grid.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "ubic/error.hpp"

namespace ubic {

void Axis::validate() const {
  if (count < 2) throw InvalidArgument("axis needs at least 2 samples");
  if (!(std::isfinite(min) && std::isfinite(max)) || !(max > min))
    throw InvalidArgument("axis requires finite max > min");
  if (!(spacing() > 0.0)) throw InvalidArgument("axis spacing must be positive");
}

Field::Field(Axis x, Axis t, Eigen::MatrixXd values)
    : x_(x), t_(t), values_(std::move(values)) {
  x_.validate();
  t_.validate();
  if (static_cast<std::size_t>(values_.rows()) != x_.count ||
      static_cast<std::size_t>(values_.cols()) != t_.count)
    throw InvalidArgument("field values must be nx x nt");
  if (!values_.allFinite()) throw InvalidArgument("field contains non-finite values");
}

double population_sd(const Eigen::MatrixXd& values) {
  const double n = static_cast<double>(values.size());
  const double mean = values.sum() / n;
  return std::sqrt((values.array() - mean).square().sum() / n);
}

Field add_noise(const Field& field, const NoiseSpec& spec) {
  if (!std::isfinite(spec.epsilon_percent) || spec.epsilon_percent < 0.0)
    throw InvalidArgument("noise level must be finite and non-negative");
  if (spec.epsilon_percent == 0.0) return field;
  const double scale = spec.epsilon_percent * population_sd(field.values()) / 100.0;
  Rng rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd noisy = field.values();
  for (Eigen::Index i = 0; i < noisy.rows(); ++i)
    for (Eigen::Index j = 0; j < noisy.cols(); ++j) noisy(i, j) += scale * normal(rng);
  return field.with_values(std::move(noisy));
}

namespace detail {

void write_f64le(std::ostream& out, const double* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(data[i]);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    char bytes[8];
    std::memcpy(bytes, &bits, 8);
    out.write(bytes, 8);
  }
}

void read_f64le(std::istream& in, double* data, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    char bytes[8];
    if (!in.read(bytes, 8)) throw FormatError("payload shorter than header claims");
    std::uint64_t bits;
    std::memcpy(&bits, bytes, 8);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap64(bits);
    data[i] = std::bit_cast<double>(bits);
  }
}

}  // namespace detail

void write_field(const Field& field, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  nlohmann::ordered_json header;
  header["nx"] = field.nx();
  header["nt"] = field.nt();
  header["xmin"] = field.x().min;
  header["xmax"] = field.x().max;
  header["tmin"] = field.t().min;
  header["tmax"] = field.t().max;
  header["layout"] = "x-major";
  header["dtype"] = "f64le";
  header["prng"] = std::string(kRngName);
  out << header.dump() << '\n';
  // Eigen is column-major; transpose so each spatial row is contiguous.
  const Eigen::MatrixXd row_major = field.values().transpose();
  detail::write_f64le(out, row_major.data(), static_cast<std::size_t>(row_major.size()));
  if (!out) throw InvalidArgument("write failed: " + path.string());
}

Field read_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed header: ") + e.what());
  }
  std::size_t nx = 0, nt = 0;
  Axis x, t;
  try {
    nx = header.at("nx").get<std::size_t>();
    nt = header.at("nt").get<std::size_t>();
    x = Axis{header.at("xmin").get<double>(), header.at("xmax").get<double>(), nx};
    t = Axis{header.at("tmin").get<double>(), header.at("tmax").get<double>(), nt};
    if (header.at("layout").get<std::string>() != "x-major")
      throw FormatError("unsupported layout");
    if (header.at("dtype").get<std::string>() != "f64le") throw FormatError("unsupported dtype");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed header: ") + e.what());
  }
  try {
    x.validate();
    t.validate();
  } catch (const InvalidArgument& e) {
    throw FormatError(std::string("malformed header: ") + e.what());
  }

  const auto payload_start = in.tellg();
  in.seekg(0, std::ios::end);
  const auto payload_bytes = static_cast<std::uint64_t>(in.tellg() - payload_start);
  in.seekg(payload_start);
  if (payload_bytes != static_cast<std::uint64_t>(nx) * nt * 8)
    throw FormatError("size mismatch: header claims " + std::to_string(nx) + "x" +
                      std::to_string(nt) + " values, payload has " +
                      std::to_string(payload_bytes) + " bytes");

  Eigen::MatrixXd row_major(nt, nx);
  detail::read_f64le(in, row_major.data(), nx * nt);
  if (!row_major.allFinite()) throw FormatError("payload contains non-finite values");
  return Field(x, t, row_major.transpose());
}

void write_field_csv(const Field& field, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument("cannot open " + path.string() + " for writing");
  out << std::setprecision(17);
  const auto& v = field.values();
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) out << (j ? "," : "") << v(i, j);
    out << '\n';
  }
}

}  // namespace ubic
