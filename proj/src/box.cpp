#include "otc/box.hpp"

#include <string>

#include "otc/error.hpp"

namespace otc {

double Box::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lower.size(); ++i) v *= upper[i] - lower[i];
  return v;
}

std::vector<double> Box::centroid() const {
  std::vector<double> c(lower.size());
  for (std::size_t i = 0; i < lower.size(); ++i) c[i] = 0.5 * (lower[i] + upper[i]);
  return c;
}

Box Box::unit(std::size_t n) {
  return Box{std::vector<double>(n, 0.0), std::vector<double>(n, 1.0)};
}

const Box& validate(const Box& box) {
  if (box.lower.size() != box.upper.size() || box.lower.empty())
    fail(ErrorCode::InvalidArgument, "box bounds have mismatched dimensions");
  for (std::size_t i = 0; i < box.lower.size(); ++i)
    if (!(box.lower[i] < box.upper[i]))
      fail(ErrorCode::InvalidArgument,
           "box is empty in coordinate " + std::to_string(i));
  return box;
}

}  // namespace otc
