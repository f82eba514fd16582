#pragma once

// Exact (O(n^2)) t-SNE to two dimensions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "scriptaffect/errors.hpp"
#include "scriptaffect/util.hpp"

namespace scriptaffect {

struct TsneConfig {
  double perplexity = 30.0;
  std::size_t iterations = 1000;
  double learning_rate = 200.0;
  double early_exaggeration = 12.0;
  std::size_t exaggeration_iters = 250;
  std::uint64_t seed = 42;
};

struct Embedding2D {
  Matrix coords;                        // n x 2
  std::vector<double> kl_trace;         // KL(P || Q) every 50 iterations
  std::vector<std::size_t> kl_iterations;  // iteration count at each trace entry
  double perplexity = 0.0;              // after clamping
};

inline constexpr std::size_t kKlInterval = 50;
inline constexpr std::size_t kMomentumSwitch = 250;
inline constexpr double kEntropyTolerance = 1e-5;
inline constexpr std::size_t kMaxBandwidthSteps = 50;

inline Matrix pairwise_squared_distances(const Matrix& points) {
  const std::size_t n = points.rows();
  Matrix d(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = squared_distance(points.row(i), points.row(j));
      d(i, j) = v;
      d(j, i) = v;
    }
  }
  return d;
}

namespace detail {

// Fills `row` with exp(-beta (d - d_min)) normalized, returns entropy in bits.
inline double gaussian_row(std::span<const double> dist, std::size_t self, double d_min, double beta,
                           std::span<double> row) {
  double z = 0.0;
  double weighted = 0.0;
  for (std::size_t j = 0; j < dist.size(); ++j) {
    if (j == self) {
      row[j] = 0.0;
      continue;
    }
    const double shifted = dist[j] - d_min;
    const double w = std::exp(-beta * shifted);
    row[j] = w;
    z += w;
    weighted += w * shifted;
  }
  for (double& v : row) v /= z;
  return (std::log(z) + beta * weighted / z) / std::log(2.0);
}

}  // namespace detail

// Conditional p_{j|i} with a per-row Gaussian bandwidth found by bisection
// on log(beta) so each row's entropy equals log2(perplexity). Targets
// outside the achievable entropy range take the nearest end of the search
// bracket (e.g. uniform rows when all distances are equal).
inline Matrix perplexity_calibration(const Matrix& distances, double perplexity) {
  const std::size_t n = distances.rows();
  if (n < 2 || distances.cols() != n) throw DimensionError("distance matrix must be square with n >= 2");
  if (!(perplexity > 0.0)) throw CalibrationError("perplexity must be positive");
  const double target = std::log2(perplexity);
  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto dist = distances.row(i);
    auto row = p.row(i);
    double d_min = std::numeric_limits<double>::infinity();
    double spread = 0.0;
    std::size_t spread_n = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      d_min = std::min(d_min, dist[j]);
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i || dist[j] <= d_min) continue;
      spread += dist[j] - d_min;
      ++spread_n;
    }
    if (spread_n == 0) {
      detail::gaussian_row(dist, i, d_min, 0.0, row);
      continue;
    }
    const double centre = -std::log(spread / static_cast<double>(spread_n));
    double lo = centre - 40.0;
    double hi = centre + 40.0;
    const double h_lo = detail::gaussian_row(dist, i, d_min, std::exp(lo), row);
    if (target >= h_lo) continue;
    const double h_hi = detail::gaussian_row(dist, i, d_min, std::exp(hi), row);
    if (target <= h_hi) continue;

    bool converged = false;
    for (std::size_t step = 0; step < kMaxBandwidthSteps; ++step) {
      const double mid = 0.5 * (lo + hi);
      const double h = detail::gaussian_row(dist, i, d_min, std::exp(mid), row);
      if (std::abs(h - target) <= kEntropyTolerance) {
        converged = true;
        break;
      }
      (h > target ? lo : hi) = mid;
    }
    if (!converged) {
      throw CalibrationError("bandwidth search did not converge for row " + std::to_string(i));
    }
  }
  return p;
}

inline double row_entropy_bits(std::span<const double> row) {
  double h = 0.0;
  for (double v : row) {
    if (v > 0.0) h -= v * std::log2(v);
  }
  return h;
}

// (P + P^T) / 2n
inline Matrix joint_probabilities(const Matrix& conditional) {
  const std::size_t n = conditional.rows();
  Matrix p(n, n);
  const double scale = 1.0 / (2.0 * static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) p(i, j) = (conditional(i, j) + conditional(j, i)) * scale;
  }
  return p;
}

namespace detail {

inline int sign(double x) { return (x > 0.0) - (x < 0.0); }

// Student-t kernel values and their off-diagonal sum.
inline double student_kernel(const Matrix& y, Matrix& num) {
  const std::size_t n = y.rows();
  double z = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num(i, i) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = 1.0 / (1.0 + squared_distance(y.row(i), y.row(j)));
      num(i, j) = v;
      num(j, i) = v;
      z += 2.0 * v;
    }
  }
  return z;
}

inline void gradient_into(const Matrix& p, double p_scale, const Matrix& y, const Matrix& num, double z, Matrix& grad) {
  const std::size_t n = y.rows();
  const std::size_t dim = y.cols();
  for (std::size_t i = 0; i < n; ++i) {
    auto g = grad.row(i);
    std::fill(g.begin(), g.end(), 0.0);
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double mult = (p_scale * p(i, j) - num(i, j) / z) * num(i, j);
      for (std::size_t d = 0; d < dim; ++d) g[d] += 4.0 * mult * (y(i, d) - y(j, d));
    }
  }
}

}  // namespace detail

inline double kl_divergence(const Matrix& p, const Matrix& y) {
  Matrix num(y.rows(), y.rows());
  const double z = detail::student_kernel(y, num);
  double kl = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    for (std::size_t j = 0; j < p.cols(); ++j) {
      if (i == j || p(i, j) <= 0.0) continue;
      kl += p(i, j) * std::log(p(i, j) / (num(i, j) / z));
    }
  }
  return kl;
}

inline Matrix kl_gradient(const Matrix& p, const Matrix& y) {
  Matrix num(y.rows(), y.rows());
  const double z = detail::student_kernel(y, num);
  Matrix grad(y.rows(), y.cols());
  detail::gradient_into(p, 1.0, y, num, z, grad);
  return grad;
}

inline Embedding2D tsne(const Matrix& points, const TsneConfig& config) {
  const std::size_t n = points.rows();
  if (n < 5) throw DimensionError("t-SNE needs at least 5 points, got " + std::to_string(n));
  require_finite(points, "t-SNE input");
  if (!(config.learning_rate > 0.0) || config.early_exaggeration < 1.0) {
    throw Error("t-SNE: learning rate must be positive and exaggeration at least 1");
  }

  Embedding2D out;
  out.perplexity = std::min(config.perplexity, static_cast<double>(n - 1) / 3.0);
  const Matrix p = joint_probabilities(perplexity_calibration(pairwise_squared_distances(points), out.perplexity));

  Rng rng(config.seed);
  Matrix y(n, 2);
  for (std::size_t i = 0; i < n; ++i) {
    y(i, 0) = 1e-4 * rng.normal();
    y(i, 1) = 1e-4 * rng.normal();
  }
  Matrix update(n, 2);
  Matrix gains(n, 2, 1.0);
  Matrix grad(n, 2);
  Matrix num(n, n);

  for (std::size_t it = 0; it < config.iterations; ++it) {
    const double exaggeration = it < config.exaggeration_iters ? config.early_exaggeration : 1.0;
    const double z = detail::student_kernel(y, num);
    detail::gradient_into(p, exaggeration, y, num, z, grad);

    const double momentum = it < kMomentumSwitch ? 0.5 : 0.8;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t d = 0; d < 2; ++d) {
        double& g = gains(i, d);
        g = detail::sign(grad(i, d)) != detail::sign(update(i, d)) ? g + 0.2 : g * 0.8;
        g = std::max(g, 0.01);
        update(i, d) = momentum * update(i, d) - config.learning_rate * g * grad(i, d);
        y(i, d) += update(i, d);
      }
    }
    for (std::size_t d = 0; d < 2; ++d) {
      double mean = 0.0;
      for (std::size_t i = 0; i < n; ++i) mean += y(i, d);
      mean /= static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) y(i, d) -= mean;
    }
    if ((it + 1) % kKlInterval == 0) {
      out.kl_trace.push_back(kl_divergence(p, y));
      out.kl_iterations.push_back(it + 1);
    }
  }
  out.coords = std::move(y);
  return out;
}

// Scatter plot on an 800x800 canvas; `groups` indexes into `palette`.
inline std::string scatter_svg(const Matrix& coords, std::span<const std::size_t> groups,
                               std::span<const std::string> palette, std::span<const std::string> labels) {
  double min_x = std::numeric_limits<double>::infinity();
  double max_x = -min_x;
  double min_y = min_x;
  double max_y = -min_x;
  for (std::size_t i = 0; i < coords.rows(); ++i) {
    min_x = std::min(min_x, coords(i, 0));
    max_x = std::max(max_x, coords(i, 0));
    min_y = std::min(min_y, coords(i, 1));
    max_y = std::max(max_y, coords(i, 1));
  }
  const double span_x = max_x > min_x ? max_x - min_x : 1.0;
  const double span_y = max_y > min_y ? max_y - min_y : 1.0;
  std::string svg =
      "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 800 800\" width=\"800\" height=\"800\">\n"
      "<rect width=\"800\" height=\"800\" fill=\"#ffffff\"/>\n";
  char buf[256];
  for (std::size_t i = 0; i < coords.rows(); ++i) {
    const double cx = 40.0 + 720.0 * (coords(i, 0) - min_x) / span_x;
    const double cy = 760.0 - 720.0 * (coords(i, 1) - min_y) / span_y;
    std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"6\" fill=\"%s\" fill-opacity=\"0.8\">", cx, cy,
                  palette[groups[i] % palette.size()].c_str());
    svg += buf;
    if (i < labels.size()) {
      std::string title;
      for (char c : labels[i]) {
        switch (c) {
          case '&': title += "&amp;"; break;
          case '<': title += "&lt;"; break;
          case '>': title += "&gt;"; break;
          default: title += c;
        }
      }
      svg += "<title>" + title + "</title>";
    }
    svg += "</circle>\n";
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace scriptaffect
