// Copyright 2026 The fairkm Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#ifndef FAIRKM_TESTS_SPECTRAL_HPP_
#define FAIRKM_TESTS_SPECTRAL_HPP_

#include <Eigen/Dense>

#include "fairkm/core.hpp"

namespace fairkm::oracle {

// Lower bound on the k-means cost of any k-clustering of the unit copies:
// cluster means minus the global mean span at most k-1 dimensions, so the
// cost is at least the centered energy outside the top k-1 singular
// directions.
inline double pca_lower_bound(const Dataset& data, std::size_t k) {
  const auto mu = centroid(data);
  Eigen::MatrixXd a(static_cast<Eigen::Index>(data.size()), static_cast<Eigen::Index>(data.dim()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double s = std::sqrt(static_cast<double>(data.weight(i)));
    for (std::size_t j = 0; j < data.dim(); ++j) {
      a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = s * (data.point(i)[j] - mu[j]);
    }
  }
  const Eigen::VectorXd sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues();
  double bound = a.squaredNorm();
  for (Eigen::Index i = 0; i < sigma.size() && i + 1 < static_cast<Eigen::Index>(k); ++i) {
    bound -= sigma(i) * sigma(i);
  }
  return std::max(bound, 0.0);
}

}  // namespace fairkm::oracle

#endif  // FAIRKM_TESTS_SPECTRAL_HPP_
