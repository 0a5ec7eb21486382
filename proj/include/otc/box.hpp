#pragma once

#include <cstddef>
#include <vector>

namespace otc {

// Axis-aligned box, the search region for zero localization.
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dim() const { return lower.size(); }
  double volume() const;
  std::vector<double> centroid() const;

  static Box unit(std::size_t n);
};

// Throws InvalidArgument unless lower_i < upper_i for every coordinate.
const Box& validate(const Box& box);

}  // namespace otc
