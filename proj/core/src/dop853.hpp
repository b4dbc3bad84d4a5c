// Dormand-Prince 8(5,3) embedded pair (Hairer, Norsett & Wanner), stepping
// complex-valued linear systems between fixed breakpoints.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "slspec/common.hpp"

namespace slspec::detail {

namespace dop {

constexpr double c2 = 0.526001519587677318785587544488e-01;
constexpr double c3 = 0.789002279381515978178381316732e-01;
constexpr double c4 = 0.118350341907227396726757197510e+00;
constexpr double c5 = 0.281649658092772603273242802490e+00;
constexpr double c6 = 0.333333333333333333333333333333e+00;
constexpr double c7 = 0.25e+00;
constexpr double c8 = 0.307692307692307692307692307692e+00;
constexpr double c9 = 0.651282051282051282051282051282e+00;
constexpr double c10 = 0.6e+00;
constexpr double c11 = 0.857142857142857142857142857142e+00;

constexpr double a21 = 5.26001519587677318785587544488e-2;
constexpr double a31 = 1.97250569845378994544595329183e-2;
constexpr double a32 = 5.91751709536136983633785987549e-2;
constexpr double a41 = 2.95875854768068491816892993775e-2;
constexpr double a43 = 8.87627564304205475450678981324e-2;
constexpr double a51 = 2.41365134159266685502369798665e-1;
constexpr double a53 = -8.84549479328286085344864962717e-1;
constexpr double a54 = 9.24834003261792003115737966543e-1;
constexpr double a61 = 3.7037037037037037037037037037e-2;
constexpr double a64 = 1.70828608729473871279604482173e-1;
constexpr double a65 = 1.25467687566822425016691814123e-1;
constexpr double a71 = 3.7109375e-2;
constexpr double a74 = 1.70252211019544039314978060272e-1;
constexpr double a75 = 6.02165389804559606850219397283e-2;
constexpr double a76 = -1.7578125e-2;
constexpr double a81 = 3.70920001185047927108779319836e-2;
constexpr double a84 = 1.70383925712239993810214054705e-1;
constexpr double a85 = 1.07262030446373284651809199168e-1;
constexpr double a86 = -1.53194377486244017527936158236e-2;
constexpr double a87 = 8.27378916381402288758473766002e-3;
constexpr double a91 = 6.24110958716075717114429577812e-1;
constexpr double a94 = -3.36089262944694129406857109825e0;
constexpr double a95 = -8.68219346841726006818189891453e-1;
constexpr double a96 = 2.75920996994467083049415600797e1;
constexpr double a97 = 2.01540675504778934086186788979e1;
constexpr double a98 = -4.34898841810699588477366255144e1;
constexpr double a101 = 4.77662536438264365890433908527e-1;
constexpr double a104 = -2.48811461997166764192642586468e0;
constexpr double a105 = -5.90290826836842996371446475743e-1;
constexpr double a106 = 2.12300514481811942347288949897e1;
constexpr double a107 = 1.52792336328824235832596922938e1;
constexpr double a108 = -3.32882109689848629194453265587e1;
constexpr double a109 = -2.03312017085086261358222928593e-2;
constexpr double a111 = -9.3714243008598732571704021658e-1;
constexpr double a114 = 5.18637242884406370830023853209e0;
constexpr double a115 = 1.09143734899672957818500254654e0;
constexpr double a116 = -8.14978701074692612513997267357e0;
constexpr double a117 = -1.85200656599969598641566180701e1;
constexpr double a118 = 2.27394870993505042818970056734e1;
constexpr double a119 = 2.49360555267965238987089396762e0;
constexpr double a1110 = -3.0467644718982195003823669022e0;
constexpr double a121 = 2.27331014751653820792359768449e0;
constexpr double a124 = -1.05344954667372501984066689879e1;
constexpr double a125 = -2.00087205822486249909675718444e0;
constexpr double a126 = -1.79589318631187989172765950534e1;
constexpr double a127 = 2.79488845294199600508499808837e1;
constexpr double a128 = -2.85899827713502369474065508674e0;
constexpr double a129 = -8.87285693353062954433549289258e0;
constexpr double a1210 = 1.23605671757943030647266201528e1;
constexpr double a1211 = 6.43392746015763530355970484046e-1;

constexpr double b1 = 5.42937341165687622380535766363e-2;
constexpr double b6 = 4.45031289275240888144113950566e0;
constexpr double b7 = 1.89151789931450038304281599044e0;
constexpr double b8 = -5.8012039600105847814672114227e0;
constexpr double b9 = 3.1116436695781989440891606237e-1;
constexpr double b10 = -1.52160949662516078556178806805e-1;
constexpr double b11 = 2.01365400804030348374776537501e-1;
constexpr double b12 = 4.47106157277725905176885569043e-2;

constexpr double bhh1 = 0.244094488188976377952755905512e+00;
constexpr double bhh2 = 0.733846688281611857341361741547e+00;
constexpr double bhh3 = 0.220588235294117647058823529412e-01;

constexpr double er1 = 0.1312004499419488073250102996e-01;
constexpr double er6 = -0.1225156446376204440720569753e+01;
constexpr double er7 = -0.4957589496572501915214079952e+00;
constexpr double er8 = 0.1664377182454986536961530415e+01;
constexpr double er9 = -0.3503288487499736816886487290e+00;
constexpr double er10 = 0.3341791187130174790297318841e+00;
constexpr double er11 = 0.8192320648511571246570742613e-01;
constexpr double er12 = -0.2235530786388629525884427845e-01;

}  // namespace dop

struct StepControl {
  double rtol = 1e-12;
  double atol = 1e-12;
  std::size_t max_steps = 2'000'000;
};

/// Integrates y' = f(x, y) from x0 to x1 (x1 > x0), landing exactly on x1.
/// `h` carries the step-size suggestion between calls; pass h <= 0 to let
/// the integrator pick one. `f(x, y, dy)` writes n derivatives.
template <class F>
class Dop853 {
 public:
  Dop853(F& f, std::size_t n, StepControl ctl)
      : f_(f), n_(n), ctl_(ctl), k_(12, std::vector<std::complex<double>>(n)),
        ytmp_(n), ynew_(n) {}

  void advance(double x0, double x1, std::vector<std::complex<double>>& y,
               double& h) {
    using namespace dop;
    using C = std::complex<double>;
    if (!(x1 > x0)) return;
    double x = x0;
    auto& k1 = k_[0];
    auto& k2 = k_[1];
    auto& k3 = k_[2];
    auto& k4 = k_[3];
    auto& k5 = k_[4];
    auto& k6 = k_[5];
    auto& k7 = k_[6];
    auto& k8 = k_[7];
    auto& k9 = k_[8];
    auto& k10 = k_[9];
    auto& k11 = k_[10];
    auto& k12 = k_[11];

    f_(x, y.data(), k1.data());
    if (!(h > 0.0)) h = initial_step(x0, x1, y, k1);

    bool last_rejected = false;
    while (x < x1) {
      if (++steps_ > ctl_.max_steps) {
        throw IntegrationError(x, "integrator exceeded the step budget at x = " +
                                      std::to_string(x));
      }
      bool final_step = false;
      double hs = h;
      if (x + hs >= x1 || x1 - (x + hs) < 1e-12 * hs) {
        hs = x1 - x;
        final_step = true;
      }
      if (hs < 1e-14 * std::max(1.0, std::abs(x))) {
        throw IntegrationError(x, "step size underflow at x = " + std::to_string(x));
      }
      const std::size_t n = n_;
      auto stage = [&](double c, auto&& combine, std::vector<C>& out) {
        for (std::size_t i = 0; i < n; ++i) ytmp_[i] = y[i] + hs * combine(i);
        f_(x + c * hs, ytmp_.data(), out.data());
      };
      stage(c2, [&](std::size_t i) { return a21 * k1[i]; }, k2);
      stage(c3, [&](std::size_t i) { return a31 * k1[i] + a32 * k2[i]; }, k3);
      stage(c4, [&](std::size_t i) { return a41 * k1[i] + a43 * k3[i]; }, k4);
      stage(c5, [&](std::size_t i) { return a51 * k1[i] + a53 * k3[i] + a54 * k4[i]; }, k5);
      stage(c6, [&](std::size_t i) { return a61 * k1[i] + a64 * k4[i] + a65 * k5[i]; }, k6);
      stage(c7, [&](std::size_t i) {
        return a71 * k1[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i];
      }, k7);
      stage(c8, [&](std::size_t i) {
        return a81 * k1[i] + a84 * k4[i] + a85 * k5[i] + a86 * k6[i] + a87 * k7[i];
      }, k8);
      stage(c9, [&](std::size_t i) {
        return a91 * k1[i] + a94 * k4[i] + a95 * k5[i] + a96 * k6[i] + a97 * k7[i] +
               a98 * k8[i];
      }, k9);
      stage(c10, [&](std::size_t i) {
        return a101 * k1[i] + a104 * k4[i] + a105 * k5[i] + a106 * k6[i] +
               a107 * k7[i] + a108 * k8[i] + a109 * k9[i];
      }, k10);
      stage(c11, [&](std::size_t i) {
        return a111 * k1[i] + a114 * k4[i] + a115 * k5[i] + a116 * k6[i] +
               a117 * k7[i] + a118 * k8[i] + a119 * k9[i] + a1110 * k10[i];
      }, k11);
      stage(1.0, [&](std::size_t i) {
        return a121 * k1[i] + a124 * k4[i] + a125 * k5[i] + a126 * k6[i] +
               a127 * k7[i] + a128 * k8[i] + a129 * k9[i] + a1210 * k10[i] +
               a1211 * k11[i];
      }, k12);

      double err = 0.0;
      double err2 = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const C incr = b1 * k1[i] + b6 * k6[i] + b7 * k7[i] + b8 * k8[i] +
                       b9 * k9[i] + b10 * k10[i] + b11 * k11[i] + b12 * k12[i];
        ynew_[i] = y[i] + hs * incr;
        const double sk =
            ctl_.atol + ctl_.rtol * std::max(std::abs(y[i]), std::abs(ynew_[i]));
        const C e3 = incr - bhh1 * k1[i] - bhh2 * k9[i] - bhh3 * k12[i];
        const C e5 = er1 * k1[i] + er6 * k6[i] + er7 * k7[i] + er8 * k8[i] +
                     er9 * k9[i] + er10 * k10[i] + er11 * k11[i] + er12 * k12[i];
        err2 += std::norm(e3) / (sk * sk);
        err += std::norm(e5) / (sk * sk);
      }
      double deno = err + 0.01 * err2;
      if (deno <= 0.0) deno = 1.0;
      err = hs * err * std::sqrt(1.0 / (static_cast<double>(n) * deno));
      if (!std::isfinite(err)) {
        h = 0.1 * hs;
        last_rejected = true;
        continue;
      }

      // step-size factor, clamped as in the reference implementation
      double fac = std::pow(err, 0.125) / 0.9;
      fac = std::clamp(fac, 1.0 / 6.0, 1.0 / 0.333);
      double hnew = hs / fac;

      if (err <= 1.0) {
        x = final_step ? x1 : x + hs;
        y.swap(ynew_);
        if (last_rejected) hnew = std::min(hnew, hs);
        last_rejected = false;
        if (!final_step) {
          h = hnew;
          f_(x, y.data(), k1.data());
        } else {
          // keep the unclamped suggestion for the next segment
          h = std::max(hnew, h);
        }
      } else {
        h = hnew;
        last_rejected = true;
      }
    }
  }

  std::size_t steps() const { return steps_; }

 private:
  double initial_step(double x0, double x1,
                      const std::vector<std::complex<double>>& y,
                      const std::vector<std::complex<double>>& dy) const {
    double d0 = 0.0;
    double d1 = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      const double sk = ctl_.atol + ctl_.rtol * std::abs(y[i]);
      d0 += std::norm(y[i]) / (sk * sk);
      d1 += std::norm(dy[i]) / (sk * sk);
    }
    double h = (d0 <= 1e-10 || d1 <= 1e-10) ? 1e-6 : 0.01 * std::sqrt(d0 / d1);
    return std::min(h, x1 - x0);
  }

  F& f_;
  std::size_t n_;
  StepControl ctl_;
  std::vector<std::vector<std::complex<double>>> k_;
  std::vector<std::complex<double>> ytmp_;
  std::vector<std::complex<double>> ynew_;
  std::size_t steps_ = 0;
};

}  // namespace slspec::detail
