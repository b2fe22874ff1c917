#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace revshell {

/// Complete elliptic integrals K(k), E(k) from the complementary modulus k'
/// by the arithmetic-geometric mean. Taking k' as input keeps full relative
/// accuracy of the logarithmic blow-up as k -> 1.
template <typename Scalar>
struct EllipticPair {
  Scalar K;
  Scalar E;
};

template <typename Scalar>
EllipticPair<Scalar> elliptic_ke(Scalar k_complement) {
  using std::abs;
  using std::sqrt;
  const Scalar pi = std::numbers::pi_v<Scalar>;
  const Scalar kc = k_complement;
  Scalar a = 1;
  Scalar b = kc;
  const Scalar k2 = (1 - kc) * (1 + kc);
  Scalar sum = k2 / 2;
  Scalar pow2 = Scalar(0.5);
  for (int it = 0; it < 64; ++it) {
    const Scalar c = (a - b) / 2;
    const Scalar an = (a + b) / 2;
    b = sqrt(a * b);
    a = an;
    pow2 *= 2;
    sum += pow2 * c * c;
    if (abs(c) <= std::numeric_limits<Scalar>::epsilon() * a) break;
  }
  const Scalar K = pi / (2 * a);
  return {K, K * (1 - sum)};
}

/// Toroidal (half-integer degree) Legendre functions of the second kind
/// Q_{m-1/2}(chi), m = 0..m_max+1, and their chi-derivatives for m = 0..m_max.
/// The argument is passed as chi - 1 > 0 to keep precision near the diagonal.
template <typename Scalar>
struct ToroidalQ {
  std::vector<Scalar> value;       // size m_max + 2
  std::vector<Scalar> derivative;  // size m_max + 1
  bool backward = false;           // Miller backward recurrence was used
};

template <typename Scalar>
ToroidalQ<Scalar> toroidal_q(Scalar chi_minus_one, int m_max,
                             Scalar loss_threshold = Scalar(1e3)) {
  using std::abs;
  using std::ceil;
  using std::log;
  using std::max;
  using std::sqrt;

  const Scalar cm1 = chi_minus_one;
  const Scalar chi = 1 + cm1;
  const Scalar chi2m1 = cm1 * (chi + 1);
  const Scalar k = sqrt(2 / (chi + 1));
  const Scalar kc = sqrt(cm1 / (chi + 1));
  const auto [K, E] = elliptic_ke(kc);

  ToroidalQ<Scalar> out;
  const int count = m_max + 2;
  out.value.assign(count, Scalar(0));
  out.derivative.assign(m_max + 1, Scalar(0));

  // forward recurrence, watching for cancellation
  auto& q = out.value;
  q[0] = k * K;
  Scalar loss = 1;
  {
    const Scalar a = chi * k * K;
    const Scalar b = 2 * E / k;
    q[1] = a - b;
    loss = max(abs(a), abs(b)) / abs(q[1]);
  }
  for (int m = 1; m + 1 < count && loss <= loss_threshold; ++m) {
    const Scalar a = 2 * m * chi * q[m];
    const Scalar b = (m - Scalar(0.5)) * q[m - 1];
    q[m + 1] = (a - b) / (m + Scalar(0.5));
    loss *= max(abs(a), abs(b)) / abs(a - b);
  }

  if (loss <= loss_threshold) {
    auto& dq = out.derivative;
    dq[0] = -E * k / (2 * cm1);
    if (m_max >= 1) dq[1] = k * K / 2 - chi * E * k / (2 * cm1);
    for (int m = 1; m + 1 <= m_max; ++m) {
      dq[m + 1] = (2 * m * (q[m] + chi * dq[m]) - (m - Scalar(0.5)) * dq[m - 1]) /
                  (m + Scalar(0.5));
    }
    return out;
  }

  // Miller: backward recurrence from a far start, normalized by Q_{-1/2}.
  out.backward = true;
  const Scalar mu = chi + sqrt(chi2m1);
  const int extra = static_cast<int>(ceil(Scalar(20) / log(mu) * log(Scalar(10)) / 2)) + 8;
  const int start = count + std::min(extra, 4000);
  std::vector<Scalar> w(start + 2, Scalar(0));
  w[start] = Scalar(1e-30);
  for (int j = start; j >= 1; --j) {
    // (j - 1/2) Q_{j-3/2} = 2 j chi Q_{j-1/2} - (j + 1/2) Q_{j+1/2}
    w[j - 1] = (2 * j * chi * w[j] - (j + Scalar(0.5)) * w[j + 1]) / (j - Scalar(0.5));
    if (abs(w[j - 1]) > Scalar(1e250)) {
      for (int i = j - 1; i <= start + 1; ++i) w[i] *= Scalar(1e-250);
    }
  }
  const Scalar scale = k * K / w[0];
  for (int m = 0; m < count; ++m) q[m] = w[m] * scale;
  for (int m = 0; m <= m_max; ++m) {
    const Scalar nu = m - Scalar(0.5);
    out.derivative[m] = (nu + 1) * (q[m + 1] - chi * q[m]) / chi2m1;
  }
  return out;
}

}  // namespace revshell
