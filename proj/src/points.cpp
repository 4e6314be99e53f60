#include "normcluster/points.hpp"

#include "normcluster/error.hpp"

namespace normcluster {

Points Points::from_rows(const std::vector<Vector>& rows) {
  Points p(rows.empty() ? 0 : rows.front().size());
  for (const auto& r : rows) p.push_back(r);
  return p;
}

Points Points::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Points p(rows.size() == 0 ? 0 : rows.begin()->size());
  for (const auto& r : rows) p.push_back(std::span<const double>(r.begin(), r.size()));
  return p;
}

void Points::push_back(std::span<const double> row) {
  if (empty() && dim_ == 0) dim_ = row.size();
  if (row.size() != dim_) {
    throw InputError("point dimension " + std::to_string(row.size()) + " does not match " +
                     std::to_string(dim_));
  }
  if (dim_ == 0) throw InputError("points must have dimension >= 1");
  data_.insert(data_.end(), row.begin(), row.end());
}

}  // namespace normcluster
