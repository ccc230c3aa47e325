#include "mfe/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <functional>
#include <numbers>

namespace mfe {

namespace {

using cd = std::complex<double>;
constexpr double pi = std::numbers::pi;

// Unscaled 2-D DFT with exponent sign -1, rows then columns.
Eigen::MatrixXcd dft2(const Eigen::MatrixXcd& in) {
  static thread_local Eigen::FFT<double> fft;
  const int n = static_cast<int>(in.rows());
  Eigen::MatrixXcd tmp(n, n), out(n, n);
  Eigen::VectorXcd src(n), dst(n);
  for (int i = 0; i < n; ++i) {
    src = in.row(i).transpose();
    fft.fwd(dst, src);
    tmp.row(i) = dst.transpose();
  }
  for (int j = 0; j < n; ++j) {
    src = tmp.col(j);
    fft.fwd(dst, src);
    out.col(j) = dst;
  }
  return out;
}

// Unscaled inverse-sign transform via conjugation.
Eigen::MatrixXcd idft2(const Eigen::MatrixXcd& in) {
  return dft2(in.conjugate()).conjugate();
}

Spectrum scaled_multiplier(const Spectrum& c, int n,
                           const std::function<cd(int, int)>& m) {
  Spectrum out(n, n);
  for (int i = 0; i < n; ++i) {
    const int k1 = freq(i, n);
    for (int j = 0; j < n; ++j) out(i, j) = m(k1, freq(j, n)) * c(i, j);
  }
  return out;
}

}  // namespace

Spectrum analyze(const Field& f) {
  const int n = f.grid().n;
  Eigen::MatrixXcd in = f.values().matrix().cast<cd>();
  return dft2(in).array() / static_cast<double>(n * n);
}

Field synthesize(const Grid& g, const Spectrum& c) {
  if (c.rows() != g.n || c.cols() != g.n)
    throw Error("spectrum does not match grid size");
  Eigen::MatrixXcd out = idft2(c.matrix());
  return Field(g, out.real().array());
}

Field laplacian(const Field& f) {
  const int n = f.grid().n;
  Spectrum c = analyze(f);
  c = scaled_multiplier(c, n, [](int k1, int k2) {
    return cd(-4.0 * pi * pi * (double(k1) * k1 + double(k2) * k2), 0.0);
  });
  return synthesize(f.grid(), c);
}

Field inverse_laplacian(const Field& f) {
  if (std::abs(f.mean()) > 1e-10)
    throw NonZeroMean("inverse_laplacian requires a mean-zero source");
  const int n = f.grid().n;
  Spectrum c = analyze(f);
  c(0, 0) = 0.0;
  c = scaled_multiplier(c, n, [](int k1, int k2) {
    const double k2sum = double(k1) * k1 + double(k2) * k2;
    return k2sum == 0.0 ? cd(0.0) : cd(-1.0 / (4.0 * pi * pi * k2sum), 0.0);
  });
  return synthesize(f.grid(), c);
}

Field derivative(const Field& f, int axis) {
  const int n = f.grid().n;
  Spectrum c = analyze(f);
  c = scaled_multiplier(c, n, [axis, n](int k1, int k2) {
    const int k = axis == 0 ? k1 : k2;
    if (k == -n / 2) return cd(0.0);  // odd multiplier: drop the Nyquist mode
    return cd(0.0, 2.0 * pi * k);
  });
  return synthesize(f.grid(), c);
}

std::pair<Field, Field> gradient(const Field& f) {
  return {derivative(f, 0), derivative(f, 1)};
}

double dirichlet_energy(const Field& f) {
  const int n = f.grid().n;
  Spectrum c = analyze(f);
  double e = 0;
  for (int i = 0; i < n; ++i) {
    const int k1 = freq(i, n);
    for (int j = 0; j < n; ++j) {
      const int k2 = freq(j, n);
      e += (double(k1) * k1 + double(k2) * k2) * std::norm(c(i, j));
    }
  }
  return 4.0 * pi * pi * e;
}

double l2_norm(const Field& f) {
  return std::sqrt(f.values().square().mean());
}

double eval_at(const Spectrum& c, Point p, int dx, int dy) {
  const int n = static_cast<int>(c.rows());
  Eigen::VectorXcd ex(n), ey(n);
  for (int i = 0; i < n; ++i) {
    const int k = freq(i, n);
    cd fx = std::exp(cd(0.0, 2.0 * pi * k * p.x));
    cd fy = std::exp(cd(0.0, 2.0 * pi * k * p.y));
    for (int d = 0; d < dx; ++d) fx *= cd(0.0, 2.0 * pi * k);
    for (int d = 0; d < dy; ++d) fy *= cd(0.0, 2.0 * pi * k);
    if (k == -n / 2) {
      if (dx % 2 == 1) fx = 0.0;
      if (dy % 2 == 1) fy = 0.0;
    }
    ex(i) = fx;
    ey(i) = fy;
  }
  Eigen::VectorXcd t = c.matrix() * ey;
  return ((ex.array() * t.array()).sum()).real();
}

double ring_average(const Spectrum& c, Point center, double radius) {
  const int n = static_cast<int>(c.rows());
  cd acc = 0.0;
  for (int i = 0; i < n; ++i) {
    const int k1 = freq(i, n);
    for (int j = 0; j < n; ++j) {
      const int k2 = freq(j, n);
      const double kn = std::hypot(double(k1), double(k2));
      acc += c(i, j) * std::exp(cd(0.0, 2.0 * pi * (k1 * center.x + k2 * center.y))) *
             std::cyl_bessel_j(0.0, 2.0 * pi * kn * radius);
    }
  }
  return acc.real();
}

TaylorData taylor_at(const Spectrum& c, Point p) {
  TaylorData t;
  t.value = eval_at(c, p, 0, 0);
  t.k1 = eval_at(c, p, 1, 0);
  t.k2 = eval_at(c, p, 0, 1);
  t.k3 = 0.5 * eval_at(c, p, 2, 0);
  t.k4 = eval_at(c, p, 1, 1);
  t.k5 = 0.5 * eval_at(c, p, 0, 2);
  return t;
}

TaylorData taylor_at(const Field& f, Point p) { return taylor_at(analyze(f), p); }

}  // namespace mfe
