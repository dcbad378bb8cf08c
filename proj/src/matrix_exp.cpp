#include "rigsched/matrix_exp.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace rigsched {
namespace {

using Eigen::MatrixXd;

// Pade numerator coefficients b_0..b_m for expm, Higham's degrees.
const std::vector<double> kPade3 = {120, 60, 12, 1};
const std::vector<double> kPade5 = {30240, 15120, 3360, 420, 30, 1};
const std::vector<double> kPade7 = {17297280, 8648640, 1995840, 277200,
                                    25200,    1512,    56,      1};
const std::vector<double> kPade9 = {17643225600., 8821612800., 2075673600.,
                                    302702400.,   30270240.,   2162160.,
                                    110880.,      3960.,       90.,
                                    1.};
const std::vector<double> kPade13 = {
    64764752532480000., 32382376266240000., 7771770303897600.,
    1187353796428800.,  129060195264000.,   10559470521600.,
    670442572800.,      33522128640.,       1323241920.,
    40840800.,          960960.,            16380.,
    182.,               1.};

// ||M||_1 thresholds below which Pade degree m is accurate to double eps.
constexpr double kTheta3 = 1.495585217958292e-2;
constexpr double kTheta5 = 2.539398330063230e-1;
constexpr double kTheta7 = 9.504178996162932e-1;
constexpr double kTheta9 = 2.097847961257068e0;
constexpr double kTheta13 = 5.371920351148152e0;

MatrixXd pade_approximant(const MatrixXd& a, const std::vector<double>& b) {
  const auto n = a.rows();
  const MatrixXd identity = MatrixXd::Identity(n, n);
  const MatrixXd a2 = a * a;

  MatrixXd u;  // odd part (times A)
  MatrixXd v;  // even part
  if (b.size() == 14) {
    const MatrixXd a4 = a2 * a2;
    const MatrixXd a6 = a2 * a4;
    u = a * (a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2) + b[7] * a6 +
             b[5] * a4 + b[3] * a2 + b[1] * identity);
    v = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2) + b[6] * a6 + b[4] * a4 +
        b[2] * a2 + b[0] * identity;
  } else {
    // Even-power ladder for degrees 3..9.
    std::vector<MatrixXd> pow_even;  // I, A^2, A^4, ...
    pow_even.push_back(identity);
    pow_even.push_back(a2);
    const std::size_t half = b.size() / 2;  // number of even powers needed
    while (pow_even.size() < half) {
      pow_even.push_back(pow_even.back() * a2);
    }
    MatrixXd usum = MatrixXd::Zero(n, n);
    MatrixXd vsum = MatrixXd::Zero(n, n);
    for (std::size_t k = 0; 2 * k + 1 < b.size(); ++k) {
      usum += b[2 * k + 1] * pow_even[k];
    }
    for (std::size_t k = 0; 2 * k < b.size(); ++k) {
      vsum += b[2 * k] * pow_even[k];
    }
    u = a * usum;
    v = vsum;
  }
  // Solve (V - U) X = (V + U).
  return (v - u).partialPivLu().solve(v + u);
}

}  // namespace

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("matrix_exponential: matrix must be square");
  }
  if (!m.allFinite()) {
    throw std::invalid_argument("matrix_exponential: matrix must be finite");
  }
  if (m.rows() == 0) {
    return m;
  }

  const double norm1 = m.cwiseAbs().colwise().sum().maxCoeff();
  if (norm1 <= kTheta3) return pade_approximant(m, kPade3);
  if (norm1 <= kTheta5) return pade_approximant(m, kPade5);
  if (norm1 <= kTheta7) return pade_approximant(m, kPade7);
  if (norm1 <= kTheta9) return pade_approximant(m, kPade9);

  int squarings = 0;
  double scaled = norm1;
  while (scaled > kTheta13) {
    scaled *= 0.5;
    ++squarings;
  }
  MatrixXd result = pade_approximant(m / std::ldexp(1.0, squarings), kPade13);
  for (int i = 0; i < squarings; ++i) {
    result = result * result;
  }
  return result;
}

TransitionPair transition_pair(const Eigen::MatrixXd& a, double h) {
  if (a.rows() != a.cols()) {
    throw std::invalid_argument("transition_pair: matrix must be square");
  }
  if (!(h >= 0.0)) {
    throw std::invalid_argument("transition_pair: duration must be >= 0");
  }
  const auto n = a.rows();
  Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  aug.topLeftCorner(n, n) = a * h;
  aug.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n) * h;
  const Eigen::MatrixXd e = matrix_exponential(aug);
  return TransitionPair{e.topLeftCorner(n, n), e.topRightCorner(n, n)};
}

}  // namespace rigsched
