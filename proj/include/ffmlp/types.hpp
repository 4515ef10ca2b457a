#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace ffmlp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Class index; doubles as the output-neuron index of a constructed network.
using ClassId = int;

using Seed = std::uint64_t;

}  // namespace ffmlp
