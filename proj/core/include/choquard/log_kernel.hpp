#pragma once

#include <choquard/grid.hpp>

#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace choquard {

/// log(1/r) = log(1 + 1/r) - log(1 + r).
struct KernelSplit {
  double near = 0.0;   // log(1 + 1/r) >= 0
  double far = 0.0;    // log(1 + r) >= 0
  double total = 0.0;  // near - far
};

KernelSplit kernel_split(double r);

enum class FormKind { B0, B1, B2 };
enum class KernelMethod { direct, fast };

/**
 * B2(u, v) = double integral of log(1 + 1/|x-y|) u(x) v(y),
 * B1(u, v) = same with log(1 + |x-y|), B0 = B2 - B1.
 */
struct KernelForm {
  double b1 = 0.0;
  double b2 = 0.0;
  double b0 = 0.0;
  KernelMethod method = KernelMethod::direct;
  std::optional<double> error_vs_direct;

  double value(FormKind which) const;
};

/// O(N^2) pair sum. Off-diagonal pairs use the kernel at the node distance;
/// the diagonal uses the exact average of the kernel over the cell (square
/// cells on cartesian grids, the central disc on radial grids). Radial grids
/// integrate the angular means of the kernel numerically.
KernelForm bilinear_direct(const GridField& u, const GridField& v);

/// Same discretization evaluated by zero-padded FFT convolution (cartesian)
/// or through Newton's formula and a cached angular-mean matrix (radial).
KernelForm bilinear_fast(const GridField& u, const GridField& v);

/// bilinear_fast with error_vs_direct filled in from bilinear_direct.
KernelForm bilinear_checked(const GridField& u, const GridField& v);

/// Kernel potentials phi_i = sum_j K_ij m_j for nodal masses m_j = w_j rho_j.
struct KernelPotentials {
  std::vector<double> near;
  std::vector<double> far;
};

class KernelOperator {
 public:
  virtual ~KernelOperator() = default;
  virtual KernelPotentials apply(std::span<const double> masses) const = 0;
  virtual const Grid& grid() const = 0;
};

/// Shared, immutable operator for the grid (built once and cached).
std::shared_ptr<const KernelOperator> kernel_operator(const GridPtr& grid);

/// Mean of g(|x - y|) for x, y independent and uniform in a square of side h.
double square_cell_average(double (*g)(double, double), double param, double h);
/// Mean of log(1/|x - y|) over a square cell of side h.
double square_cell_log_average(double h);
/// Mean of g(|x - y|) for x, y uniform in a disc of radius a.
double disc_cell_average(double (*g)(double, double), double param, double a);

struct HlsResult {
  double lhs = 0.0;           // double integral of |x-y|^{-mu} u(x) v(y)
  double norm_u = 0.0;        // ||u||_s
  double norm_v = 0.0;        // ||v||_r
  double norm_product = 0.0;
  double ratio = 0.0;         // lhs / norm_product, 0 when both vanish
};

/// Requires 1/s + mu/2 + 1/r = 2 within 1e-12 and s, r > 1; cartesian grids.
HlsResult hls_check(const GridField& u, const GridField& v, double mu, double s, double r);

struct LogHlsResult {
  double lhs = 0.0;  // 4 * double integral of log(1/|x-y|) u(x) v(y)
  double entropy_u = 0.0;
  double entropy_v = 0.0;
  double moment_u = 0.0;  // int u log(1 + |x|)
  double moment_v = 0.0;
  double required_C = 0.0;  // lhs - entropy_u - entropy_v
  double mass_u = 0.0;      // L1 mass before normalization
  double mass_v = 0.0;
  bool normalized = false;  // true if either input was rescaled to unit mass
};

LogHlsResult log_hls_check(const GridField& u, const GridField& v);

}  // namespace choquard
