#pragma once

#include <Eigen/Core>
#include <string>

#include "lipest/errors.hpp"

namespace lipest {

enum class NormTag { One, Two, Inf };

NormTag dual(NormTag tag);

std::string to_string(NormTag tag);            // "1" | "2" | "inf"
NormTag parse_norm_tag(const std::string& s);  // throws ConfigError

// (alpha, beta): alpha is the input-space norm, beta the output-space norm.
struct NormPair {
  NormTag alpha = NormTag::Inf;
  NormTag beta = NormTag::Inf;
};

// Pairs with a closed-form induced norm: {alpha=1} u {beta=inf} u {(2,2)}.
bool is_supported(const NormPair& pair);

double vector_norm(const Eigen::VectorXd& v, NormTag tag);

// ||G||_{alpha,beta} = sup_{||x||_alpha <= 1} ||Gx||_beta.
//   alpha = 1    -> max over columns j of ||G e_j||_beta
//   beta  = inf  -> max over rows i of ||row_i||_{dual(alpha)}
//   (2, 2)       -> largest singular value by power iteration on G^T G
// Anything else throws UnsupportedNormPair.
double induced_norm(const Eigen::MatrixXd& G, const NormPair& pair);

}  // namespace lipest
