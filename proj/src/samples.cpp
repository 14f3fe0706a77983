#include "bmot/samples.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "bmot/errors.hpp"

namespace bmot {

SampleSet::SampleSet(Matrix x, Matrix y) : x_(std::move(x)), y_(std::move(y)) {
  if (x_.rows() != y_.rows()) throw ValidationError("sample set: X and Y row counts differ");
  if (x_.rows() == 0) throw ValidationError("sample set: no samples");
  if (!x_.allFinite() || !y_.allFinite()) throw ValidationError("sample set: non-finite entries");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(y_.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  auto row_less = [this](Eigen::Index a, Eigen::Index b) {
    for (Eigen::Index c = 0; c < y_.cols(); ++c) {
      if (y_(a, c) != y_(b, c)) return y_(a, c) < y_(b, c);
    }
    return false;
  };
  std::sort(order.begin(), order.end(), row_less);
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (!row_less(order[i - 1], order[i])) {
      throw ValidationError("sample set: duplicate Y rows " + std::to_string(order[i - 1]) +
                            " and " + std::to_string(order[i]) + " (atoms are not allowed)");
    }
  }
}

}  // namespace bmot
