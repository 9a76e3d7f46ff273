#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace presep {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using IndexList = std::vector<Eigen::Index>;

// Data is rank deficient where full rank was required; `dimension` is the
// first deficient dimension (0-based).
class RankError : public std::runtime_error {
public:
  RankError(const std::string &what, Index dimension)
      : std::runtime_error(what), dimension(dimension) {}
  Index dimension;
};

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string &msg) {
  if (!cond)
    throw std::invalid_argument(msg);
}

inline void require_finite(const Matrix &m, const std::string &name) {
  if (!m.allFinite())
    throw std::invalid_argument(name + " contains non-finite entries");
}

} // namespace presep
