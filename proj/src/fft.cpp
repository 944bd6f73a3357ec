#include "ssmri/fft.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace ssmri {

namespace {

constexpr double kPi = 3.14159265358979323846;

void fft_radix2(std::complex<double>* a, std::size_t n, bool inverse) {
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
    const std::complex<double> step(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= step;
      }
    }
  }
}

void check_input(const Tensor& t, const char* what) {
  if (t.ndim() != 3 || t.dim(0) != 2)
    throw std::invalid_argument(std::string(what) + ": expected 2xHxW tensor, got " + shape_str(t.shape()));
  if (!is_pow2(t.dim(1)) || !is_pow2(t.dim(2)))
    throw std::invalid_argument(std::string(what) + ": H and W must be powers of two, got " +
                                shape_str(t.shape()));
}

// Shared by both directions: shift, row/column transforms, shift, scale.
// For even sizes fftshift and its inverse are the same half-size roll.
Tensor transform_centered(const Tensor& in, bool inverse) {
  const int h = in.dim(1);
  const int w = in.dim(2);
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  std::vector<std::complex<double>> grid(hw);
  for (int y = 0; y < h; ++y) {
    const int ys = (y + h / 2) % h;
    for (int x = 0; x < w; ++x) {
      const int xs = (x + w / 2) % w;
      grid[static_cast<std::size_t>(y) * w + x] =
          std::complex<double>(in.at(0, ys, xs), in.at(1, ys, xs));
    }
  }

  for (int y = 0; y < h; ++y) fft_radix2(grid.data() + static_cast<std::size_t>(y) * w, w, inverse);

  std::vector<std::complex<double>> col(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) col[y] = grid[static_cast<std::size_t>(y) * w + x];
    fft_radix2(col.data(), h, inverse);
    for (int y = 0; y < h; ++y) grid[static_cast<std::size_t>(y) * w + x] = col[y];
  }

  const double scale = 1.0 / std::sqrt(static_cast<double>(hw));
  Tensor out({2, h, w});
  for (int y = 0; y < h; ++y) {
    const int ys = (y + h / 2) % h;
    for (int x = 0; x < w; ++x) {
      const int xs = (x + w / 2) % w;
      const std::complex<double>& v = grid[static_cast<std::size_t>(y) * w + x];
      out.at(0, ys, xs) = v.real() * scale;
      out.at(1, ys, xs) = v.imag() * scale;
    }
  }
  return out;
}

}  // namespace

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

Tensor fft2_centered(const Tensor& img) {
  check_input(img, "fft2_centered");
  return transform_centered(img, false);
}

Tensor ifft2_centered(const Tensor& ksp) {
  check_input(ksp, "ifft2_centered");
  return transform_centered(ksp, true);
}

}  // namespace ssmri
