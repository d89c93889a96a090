#include <choquard/log_kernel.hpp>

#include <choquard/errors.hpp>
#include <choquard/parallel.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

namespace choquard {

namespace {

constexpr double pi = std::numbers::pi;
// mean of log|x - y| over the unit square: -25/12 + pi/3 + log(2)/3
const double unit_square_log_mean = -25.0 / 12.0 + pi / 3.0 + std::log(2.0) / 3.0;

double far_kernel(double d, double) { return std::log1p(d); }
double total_kernel(double d, double) { return -std::log(d); }
double power_kernel(double d, double mu) { return std::pow(d, -mu); }

// Angular mean (1/pi) int_0^pi g(|r - s e^{i theta}|) d theta.
template <class G>
double angular_mean(G&& g, double r, double s, bool singular) {
  auto integrand = [&](double th) {
    return g(std::hypot(r - s, 2.0 * std::sqrt(r * s) * std::sin(0.5 * th)));
  };
  if (singular) {
    thread_local boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(integrand, 0.0, pi, 1e-12) / pi;
  }
  return boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, 0.0, pi, 12,
                                                                       1e-11) /
         pi;
}

// ---------------------------------------------------------------------------
// FFT convolution on the zero-padded 2n x 2n grid.

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};
using RealBuffer = std::unique_ptr<double[], FftwFree>;
using ComplexBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

RealBuffer real_buffer(std::size_t n) {
  return RealBuffer(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
}
ComplexBuffer complex_buffer(std::size_t n) {
  return ComplexBuffer(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n)));
}

class FftConvolver {
 public:
  // table(di, dj) is the kernel at offset (di, dj) in cells, |di|, |dj| < n.
  template <class Table>
  FftConvolver(int n, int count, Table&& table) : n_(n), m_(2 * n) {
    real_size_ = static_cast<std::size_t>(m_) * m_;
    spec_size_ = static_cast<std::size_t>(m_) * (m_ / 2 + 1);
    auto in = real_buffer(real_size_);
    auto out = complex_buffer(spec_size_);
    {
      std::lock_guard lock(fftw_planner_mutex());
      forward_ = fftw_plan_dft_r2c_2d(m_, m_, in.get(), out.get(), FFTW_ESTIMATE);
      backward_ = fftw_plan_dft_c2r_2d(m_, m_, out.get(), in.get(), FFTW_ESTIMATE);
    }
    for (int t = 0; t < count; ++t) {
      for (int a = 0; a < m_; ++a) {
        const int di = a < n ? a : a - m_;
        for (int b = 0; b < m_; ++b) {
          const int dj = b < n ? b : b - m_;
          const bool used = a != n && b != n;
          in[static_cast<std::size_t>(a) * m_ + b] = used ? table(t, di, dj) : 0.0;
        }
      }
      fftw_execute_dft_r2c(forward_, in.get(), out.get());
      spectra_.push_back(complex_buffer(spec_size_));
      std::memcpy(spectra_.back().get(), out.get(), sizeof(fftw_complex) * spec_size_);
    }
  }

  ~FftConvolver() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  FftConvolver(const FftConvolver&) = delete;
  FftConvolver& operator=(const FftConvolver&) = delete;

  std::vector<std::vector<double>> apply(std::span<const double> masses) const {
    auto in = real_buffer(real_size_);
    auto spec = complex_buffer(spec_size_);
    auto prod = complex_buffer(spec_size_);
    std::fill(in.get(), in.get() + real_size_, 0.0);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        in[static_cast<std::size_t>(i) * m_ + j] = masses[static_cast<std::size_t>(i) * n_ + j];
    fftw_execute_dft_r2c(forward_, in.get(), spec.get());
    const double scale = 1.0 / static_cast<double>(real_size_);
    std::vector<std::vector<double>> result;
    for (const auto& kernel : spectra_) {
      for (std::size_t k = 0; k < spec_size_; ++k) {
        const double ar = spec[k][0], ai = spec[k][1];
        const double br = kernel[k][0], bi = kernel[k][1];
        prod[k][0] = ar * br - ai * bi;
        prod[k][1] = ar * bi + ai * br;
      }
      fftw_execute_dft_c2r(backward_, prod.get(), in.get());
      std::vector<double> phi(static_cast<std::size_t>(n_) * n_);
      for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
          phi[static_cast<std::size_t>(i) * n_ + j] =
              in[static_cast<std::size_t>(i) * m_ + j] * scale;
      result.push_back(std::move(phi));
    }
    return result;
  }

 private:
  int n_;
  int m_;
  std::size_t real_size_ = 0;
  std::size_t spec_size_ = 0;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
  std::vector<ComplexBuffer> spectra_;
};

class CartesianOperator final : public KernelOperator {
 public:
  explicit CartesianOperator(GridPtr grid) : grid_(std::move(grid)) {
    const double h = grid_->spacing();
    const double total_diag = square_cell_log_average(h);
    const double far_diag = square_cell_average(far_kernel, 0.0, h);
    conv_ = std::make_unique<FftConvolver>(grid_->resolution(), 2, [&](int t, int di, int dj) {
      if (di == 0 && dj == 0) return t == 0 ? total_diag + far_diag : far_diag;
      const KernelSplit ks = kernel_split(h * std::hypot(double(di), double(dj)));
      return t == 0 ? ks.near : ks.far;
    });
  }

  KernelPotentials apply(std::span<const double> masses) const override {
    auto out = conv_->apply(masses);
    return {std::move(out[0]), std::move(out[1])};
  }

  const Grid& grid() const override { return *grid_; }

 private:
  GridPtr grid_;
  std::unique_ptr<FftConvolver> conv_;
};

// ---------------------------------------------------------------------------
// Radial profiles: the angular mean of log(1/|x-y|) is log(1/max(r, s)).

double central_disc_radius(const Grid& g) { return std::sqrt(g.weights()[0] / pi); }

class RadialOperator final : public KernelOperator {
 public:
  explicit RadialOperator(GridPtr grid) : grid_(std::move(grid)) {
    const std::size_t n = grid_->size();
    const auto r = grid_->radii();
    const double a = central_disc_radius(*grid_);
    total_00_ = disc_cell_average(total_kernel, 0.0, a);
    log_r_.resize(n);
    for (std::size_t i = 1; i < n; ++i) log_r_[i] = std::log(r[i]);
    far_.assign(n * n, 0.0);
    parallel_blocks(n, 16, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i)
        for (std::size_t j = 0; j <= i; ++j)
          far_[i * n + j] = angular_mean([](double d) { return std::log1p(d); }, r[i], r[j], false);
    });
    far_[0] = disc_cell_average(far_kernel, 0.0, a);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) far_[i * n + j] = far_[j * n + i];
  }

  KernelPotentials apply(std::span<const double> m) const override {
    const std::size_t n = grid_->size();
    KernelPotentials out{std::vector<double>(n), std::vector<double>(n)};
    // suffix[i] = sum_{j > i} m_j (-log r_j)
    std::vector<double> suffix(n + 1, 0.0);
    for (std::size_t j = n; j-- > 1;) suffix[j - 1] = suffix[j] - m[j] * log_r_[j];
    double prefix = m[0];
    for (std::size_t i = 0; i < n; ++i) {
      if (i == 0) {
        out.near[0] = m[0] * total_00_ + suffix[0];
      } else {
        prefix += m[i];
        out.near[i] = -log_r_[i] * prefix + suffix[i];
      }
    }
    parallel_blocks(n, 64, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i) {
        const double* row = &far_[i * n];
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += row[j] * m[j];
        out.far[i] = s;
      }
    });
    for (std::size_t i = 0; i < n; ++i) out.near[i] += out.far[i];
    return out;
  }

  const Grid& grid() const override { return *grid_; }

 private:
  GridPtr grid_;
  double total_00_ = 0.0;
  std::vector<double> log_r_;
  std::vector<double> far_;
};

std::vector<double> masses(const GridField& u) {
  const auto w = u.grid().weights();
  std::vector<double> m(w.size());
  for (std::size_t k = 0; k < m.size(); ++k) m[k] = w[k] * u[k];
  return m;
}

using CacheKey = std::tuple<int, double, int, std::vector<double>>;

CacheKey cache_key(const Grid& g) {
  return {static_cast<int>(g.kind()), g.radius(), g.resolution(),
          std::vector<double>(g.breakpoints().begin(), g.breakpoints().end())};
}

}  // namespace

KernelSplit kernel_split(double r) {
  if (!(r > 0.0)) fail(ErrorKind::domain_error, "kernel_split needs r > 0");
  const double near = std::log1p(1.0 / r);
  const double far = std::log1p(r);
  return {near, far, near - far};
}

double KernelForm::value(FormKind which) const {
  switch (which) {
    case FormKind::B0: return b0;
    case FormKind::B1: return b1;
    case FormKind::B2: return b2;
  }
  return 0.0;
}

double square_cell_log_average(double h) { return -std::log(h) - unit_square_log_mean; }

double square_cell_average(double (*g)(double, double), double param, double h) {
  // Difference of two uniform points has density (1-|a|)(1-|b|) on [-1,1]^2;
  // by symmetry integrate over the octant 0 <= theta <= pi/4 in polar form.
  thread_local boost::math::quadrature::tanh_sinh<double> ts;
  auto outer = [&](double th) {
    const double c = std::cos(th), s = std::sin(th);
    auto inner = [&](double rho) { return g(h * rho, param) * (1.0 - rho * c) * (1.0 - rho * s) * rho; };
    return ts.integrate(inner, 0.0, 1.0 / c, 1e-13);
  };
  return 8.0 * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(outer, 0.0, pi / 4.0,
                                                                             10, 1e-13);
}

double disc_cell_average(double (*g)(double, double), double param, double a) {
  thread_local boost::math::quadrature::tanh_sinh<double> ts;
  // Density of the distance between two uniform points of the unit disc.
  auto integrand = [&](double d) {
    const double x = 0.5 * d;
    const double density = 4.0 * d / pi * (std::acos(x) - x * std::sqrt(std::max(0.0, 1.0 - x * x)));
    return g(a * d, param) * density;
  };
  return ts.integrate(integrand, 0.0, 2.0, 1e-13);
}

std::shared_ptr<const KernelOperator> kernel_operator(const GridPtr& grid) {
  static std::mutex mutex;
  static std::map<CacheKey, std::shared_ptr<const KernelOperator>> cache;
  const CacheKey key = cache_key(*grid);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  std::shared_ptr<const KernelOperator> op;
  if (grid->kind() == GridKind::cartesian)
    op = std::make_shared<CartesianOperator>(grid);
  else
    op = std::make_shared<RadialOperator>(grid);
  std::lock_guard lock(mutex);
  if (cache.size() >= 8) cache.clear();
  return cache.emplace(key, op).first->second;
}

KernelForm bilinear_fast(const GridField& u, const GridField& v) {
  require_same_grid(u.grid(), v.grid());
  const auto op = kernel_operator(u.grid_ptr());
  const auto mv = masses(v);
  const auto pot = op->apply(mv);
  const auto mu = masses(u);
  KernelForm out;
  out.method = KernelMethod::fast;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    out.b2 += mu[k] * pot.near[k];
    out.b1 += mu[k] * pot.far[k];
  }
  out.b0 = out.b2 - out.b1;
  return out;
}

KernelForm bilinear_direct(const GridField& u, const GridField& v) {
  require_same_grid(u.grid(), v.grid());
  const Grid& g = u.grid();
  const auto mu = masses(u);
  const auto mv = masses(v);
  std::vector<std::size_t> active;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g.active(k)) active.push_back(k);
  const std::size_t na = active.size();
  constexpr std::size_t block = 32;
  std::vector<double> part1((na + block - 1) / block, 0.0);
  std::vector<double> part2(part1.size(), 0.0);

  if (g.kind() == GridKind::cartesian) {
    const double h = g.spacing();
    const double far_diag = square_cell_average(far_kernel, 0.0, h);
    const double near_diag = square_cell_log_average(h) + far_diag;
    parallel_blocks(na, block, [&](std::size_t begin, std::size_t end) {
      double s1 = 0.0, s2 = 0.0;
      for (std::size_t ia = begin; ia < end; ++ia) {
        const std::size_t a = active[ia];
        const Point pa = g.node(a);
        s1 += far_diag * mu[a] * mv[a];
        s2 += near_diag * mu[a] * mv[a];
        for (std::size_t ib = ia + 1; ib < na; ++ib) {
          const std::size_t b = active[ib];
          const Point pb = g.node(b);
          const KernelSplit ks = kernel_split(std::hypot(pa.x - pb.x, pa.y - pb.y));
          const double pair = mu[a] * mv[b] + mu[b] * mv[a];
          s1 += ks.far * pair;
          s2 += ks.near * pair;
        }
      }
      part1[begin / block] = s1;
      part2[begin / block] = s2;
    });
  } else {
    const auto r = g.radii();
    const double a0 = central_disc_radius(g);
    const double far00 = disc_cell_average(far_kernel, 0.0, a0);
    const double total00 = disc_cell_average(total_kernel, 0.0, a0);
    parallel_blocks(na, block, [&](std::size_t begin, std::size_t end) {
      double s1 = 0.0, s2 = 0.0;
      for (std::size_t ia = begin; ia < end; ++ia) {
        const std::size_t a = active[ia];
        for (std::size_t ib = ia; ib < na; ++ib) {
          const std::size_t b = active[ib];
          double far = 0.0, total = 0.0;
          if (a == 0 && b == 0) {
            far = far00;
            total = total00;
          } else {
            far = angular_mean([](double d) { return std::log1p(d); }, r[a], r[b], true);
            total = angular_mean([](double d) { return -std::log(d); }, r[a], r[b], true);
          }
          const double pair = a == b ? mu[a] * mv[a] : mu[a] * mv[b] + mu[b] * mv[a];
          s1 += far * pair;
          s2 += (total + far) * pair;
        }
      }
      part1[begin / block] = s1;
      part2[begin / block] = s2;
    });
  }
  KernelForm out;
  out.method = KernelMethod::direct;
  for (double p : part1) out.b1 += p;
  for (double p : part2) out.b2 += p;
  out.b0 = out.b2 - out.b1;
  return out;
}

KernelForm bilinear_checked(const GridField& u, const GridField& v) {
  KernelForm fast = bilinear_fast(u, v);
  const KernelForm direct = bilinear_direct(u, v);
  fast.error_vs_direct = std::max({std::abs(fast.b0 - direct.b0), std::abs(fast.b1 - direct.b1),
                                   std::abs(fast.b2 - direct.b2)});
  return fast;
}

HlsResult hls_check(const GridField& u, const GridField& v, double mu, double s, double r) {
  require_same_grid(u.grid(), v.grid());
  if (!(mu > 0.0 && mu < 2.0)) fail(ErrorKind::invalid_parameter, "mu must lie in (0, 2)");
  if (!(s > 1.0) || !(r > 1.0)) fail(ErrorKind::invalid_parameter, "s and r must exceed 1");
  if (std::abs(1.0 / s + mu / 2.0 + 1.0 / r - 2.0) > 1e-12)
    fail(ErrorKind::exponent_mismatch, "1/s + mu/2 + 1/r must equal 2");
  const Grid& g = u.grid();
  if (g.kind() != GridKind::cartesian)
    fail(ErrorKind::unsupported_grid, "hls_check needs a cartesian grid");
  const double h = g.spacing();
  const double diag = square_cell_average(power_kernel, mu, h);
  FftConvolver conv(g.resolution(), 1, [&](int, int di, int dj) {
    if (di == 0 && dj == 0) return diag;
    return std::pow(h * std::hypot(double(di), double(dj)), -mu);
  });
  const auto phi = conv.apply(masses(v))[0];
  const auto mu_u = masses(u);
  HlsResult out;
  for (std::size_t k = 0; k < phi.size(); ++k) out.lhs += mu_u[k] * phi[k];
  out.norm_u = std::pow(integrate(u, [&](double x) { return std::pow(std::abs(x), s); }), 1.0 / s);
  out.norm_v = std::pow(integrate(v, [&](double x) { return std::pow(std::abs(x), r); }), 1.0 / r);
  out.norm_product = out.norm_u * out.norm_v;
  out.ratio = out.norm_product > 0.0 ? out.lhs / out.norm_product : 0.0;
  return out;
}

LogHlsResult log_hls_check(const GridField& u_in, const GridField& v_in) {
  require_same_grid(u_in.grid(), v_in.grid());
  LogHlsResult out;
  auto prepare = [&](const GridField& f, double& mass) {
    for (double x : f.values())
      if (x < -1e-12) fail(ErrorKind::negative_input, "log-HLS needs nonnegative densities");
    GridField clipped = f.mapped([](double x) { return std::max(x, 0.0); });
    mass = integrate(clipped);
    if (!(mass > 0.0)) fail(ErrorKind::invalid_parameter, "log-HLS needs positive mass");
    if (std::abs(mass - 1.0) > 1e-8) {
      out.normalized = true;
      return clipped.scaled(1.0 / mass);
    }
    return clipped;
  };
  const GridField u = prepare(u_in, out.mass_u);
  const GridField v = prepare(v_in, out.mass_v);
  auto entropy = [](double x) { return x > 0.0 ? x * std::log(std::max(x, 1e-300)) : 0.0; };
  const GridField w = GridField::sample_radial(u.grid_ptr(), [](double r) { return std::log1p(r); });
  out.entropy_u = integrate(u, entropy);
  out.entropy_v = integrate(v, entropy);
  out.moment_u = integrate(u, [](double x) { return x; }, w);
  out.moment_v = integrate(v, [](double x) { return x; }, w);
  out.lhs = 4.0 * bilinear_fast(u, v).b0;
  out.required_C = out.lhs - out.entropy_u - out.entropy_v;
  return out;
}

}  // namespace choquard
