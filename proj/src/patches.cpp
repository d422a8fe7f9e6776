#include "ubic/denoise.hpp"
#include "ubic/error.hpp"

namespace ubic {

std::vector<std::size_t> patch_offsets(std::size_t n, std::size_t patch, std::size_t stride) {
  std::vector<std::size_t> offsets;
  for (std::size_t o = 0; o + patch <= n; o += stride) offsets.push_back(o);
  if (offsets.back() + patch != n) offsets.push_back(n - patch);
  return offsets;
}

PatchStack to_patches(const Field& field, std::size_t p, std::size_t stride) {
  if (p == 0) throw InvalidArgument("patch size must be positive");
  if (p > field.nx() || p > field.nt())
    throw InvalidArgument("patch size exceeds a grid dimension");
  if (stride == 0) stride = p;
  if (stride > p) throw InvalidArgument("patch stride larger than the patch leaves gaps");

  PatchStack stack;
  stack.patch_size = p;
  stack.nx = field.nx();
  stack.nt = field.nt();
  const auto& v = field.values();
  stack.removed_mean = v.mean();
  for (std::size_t ox : patch_offsets(field.nx(), p, stride))
    for (std::size_t ot : patch_offsets(field.nt(), p, stride)) stack.origins.emplace_back(ox, ot);

  const auto pp = static_cast<Eigen::Index>(p);
  stack.data.resize(pp * pp, static_cast<Eigen::Index>(stack.origins.size()));
  for (std::size_t c = 0; c < stack.origins.size(); ++c) {
    const auto [ox, ot] = stack.origins[c];
    for (Eigen::Index b = 0; b < pp; ++b)
      for (Eigen::Index a = 0; a < pp; ++a)
        stack.data(a + pp * b, static_cast<Eigen::Index>(c)) =
            v(static_cast<Eigen::Index>(ox) + a, static_cast<Eigen::Index>(ot) + b) -
            stack.removed_mean;
  }
  return stack;
}

Field from_patches(const PatchStack& stack, const Axis& x, const Axis& t) {
  if (x.count != stack.nx || t.count != stack.nt)
    throw InvalidArgument("axes do not match the patch stack grid");
  const auto pp = static_cast<Eigen::Index>(stack.patch_size);
  if (stack.data.rows() != pp * pp ||
      static_cast<std::size_t>(stack.data.cols()) != stack.origins.size())
    throw InvalidArgument("patch stack data does not match its origins");

  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(stack.nx, stack.nt);
  Eigen::MatrixXd hits = Eigen::MatrixXd::Zero(stack.nx, stack.nt);
  for (std::size_t c = 0; c < stack.origins.size(); ++c) {
    const auto [ox, ot] = stack.origins[c];
    for (Eigen::Index b = 0; b < pp; ++b)
      for (Eigen::Index a = 0; a < pp; ++a) {
        const auto i = static_cast<Eigen::Index>(ox) + a;
        const auto j = static_cast<Eigen::Index>(ot) + b;
        sum(i, j) += stack.data(a + pp * b, static_cast<Eigen::Index>(c));
        hits(i, j) += 1.0;
      }
  }
  if ((hits.array() == 0.0).any()) throw InvalidArgument("patches do not cover the grid");
  Eigen::MatrixXd values = (sum.array() / hits.array()) + stack.removed_mean;
  return Field(x, t, std::move(values));
}

}  // namespace ubic
