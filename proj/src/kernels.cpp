#include "pnel/kernels.hpp"

#include <cmath>

// Work-size gate: below this many multiply-adds the OpenMP fork overhead
// dominates, so the loop runs inline on the calling thread.
namespace {
constexpr std::size_t kParallelCutoff = 1 << 15;
}

namespace pnel::kernels {

namespace ref {

void matvec(const float* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const float* wr = w + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += static_cast<double>(wr[c]) * x[c];
    y[r] = acc;
  }
}

void matvec_t_acc(const float* w, std::size_t rows, std::size_t cols, const double* g, double* y) {
  for (std::size_t c = 0; c < cols; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) acc += static_cast<double>(w[r * cols + c]) * g[r];
    y[c] += acc;
  }
}

void outer_acc(double* dw, std::size_t rows, std::size_t cols, const double* g, const double* x) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* dwr = dw + r * cols;
    const double gr = g[r];
    for (std::size_t c = 0; c < cols; ++c) dwr[c] += gr * x[c];
  }
}

void gate_preact(const float* wx, const float* wh, const float* b, std::size_t rows,
                 std::size_t xdim, std::size_t hdim, const double* x, const double* h, double* z) {
  for (std::size_t r = 0; r < rows; ++r) {
    const float* wxr = wx + r * xdim;
    const float* whr = wh + r * hdim;
    double acc = static_cast<double>(b[r]);
    for (std::size_t c = 0; c < xdim; ++c) acc += static_cast<double>(wxr[c]) * x[c];
    for (std::size_t c = 0; c < hdim; ++c) acc += static_cast<double>(whr[c]) * h[c];
    z[r] = acc;
  }
}

void project_rows(const float* w, std::size_t out_dim, std::size_t in_dim, const double* x,
                  std::size_t n, double* y) {
  for (std::size_t j = 0; j < n; ++j) {
    matvec(w, out_dim, in_dim, x + j * in_dim, y + j * out_dim);
  }
}

void project_rows_t_acc(const float* w, std::size_t out_dim, std::size_t in_dim, const double* g,
                        std::size_t n, double* y) {
  for (std::size_t j = 0; j < n; ++j) {
    matvec_t_acc(w, out_dim, in_dim, g + j * out_dim, y + j * in_dim);
  }
}

void accum_gram(double* dw, std::size_t rows, std::size_t cols, const double* g, const double* x,
                std::size_t n) {
  for (std::size_t r = 0; r < rows; ++r) {
    double* dwr = dw + r * cols;
    for (std::size_t j = 0; j < n; ++j) {
      const double gj = g[j * rows + r];
      if (gj == 0.0) continue;
      const double* xj = x + j * cols;
      for (std::size_t c = 0; c < cols; ++c) dwr[c] += gj * xj[c];
    }
  }
}

void attn_scores(const double* p, const double* q, const float* v, std::size_t slots,
                 std::size_t adim, double* u) {
  for (std::size_t j = 0; j < slots; ++j) {
    const double* pj = p + j * adim;
    double acc = 0.0;
    for (std::size_t a = 0; a < adim; ++a) {
      acc += static_cast<double>(v[a]) * std::tanh(pj[a] + q[a]);
    }
    u[j] = acc;
  }
}

void attn_backward_step(const double* p, const double* q, const float* v, const double* du,
                        std::size_t slots, std::size_t adim, double* dp, double* dq, double* dv) {
  // Each a-column of dp/dq/dv is independent; the j loop stays serial so the
  // summation order is fixed.
  for (std::size_t a = 0; a < adim; ++a) {
    const double va = static_cast<double>(v[a]);
    const double qa = q[a];
    double dq_acc = 0.0;
    double dv_acc = 0.0;
    for (std::size_t j = 0; j < slots; ++j) {
      const double t = std::tanh(p[j * adim + a] + qa);
      const double dpre = du[j] * va * (1.0 - t * t);
      dp[j * adim + a] += dpre;
      dq_acc += dpre;
      dv_acc += du[j] * t;
    }
    dq[a] += dq_acc;
    dv[a] += dv_acc;
  }
}

}  // namespace ref

void matvec(const float* w, std::size_t rows, std::size_t cols, const double* x, double* y) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (rows * cols > kParallelCutoff)
#endif
  for (std::size_t r = 0; r < rows; ++r) {
    const float* wr = w + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += static_cast<double>(wr[c]) * x[c];
    y[r] = acc;
  }
}

void matvec_t_acc(const float* w, std::size_t rows, std::size_t cols, const double* g, double* y) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (rows * cols > kParallelCutoff)
#endif
  for (std::size_t c = 0; c < cols; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < rows; ++r) acc += static_cast<double>(w[r * cols + c]) * g[r];
    y[c] += acc;
  }
}

void outer_acc(double* dw, std::size_t rows, std::size_t cols, const double* g, const double* x) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (rows * cols > kParallelCutoff)
#endif
  for (std::size_t r = 0; r < rows; ++r) {
    double* dwr = dw + r * cols;
    const double gr = g[r];
    for (std::size_t c = 0; c < cols; ++c) dwr[c] += gr * x[c];
  }
}

void gate_preact(const float* wx, const float* wh, const float* b, std::size_t rows,
                 std::size_t xdim, std::size_t hdim, const double* x, const double* h, double* z) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (rows * (xdim + hdim) > kParallelCutoff)
#endif
  for (std::size_t r = 0; r < rows; ++r) {
    const float* wxr = wx + r * xdim;
    const float* whr = wh + r * hdim;
    double acc = static_cast<double>(b[r]);
    for (std::size_t c = 0; c < xdim; ++c) acc += static_cast<double>(wxr[c]) * x[c];
    for (std::size_t c = 0; c < hdim; ++c) acc += static_cast<double>(whr[c]) * h[c];
    z[r] = acc;
  }
}

void project_rows(const float* w, std::size_t out_dim, std::size_t in_dim, const double* x,
                  std::size_t n, double* y) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n * out_dim * in_dim > kParallelCutoff)
#endif
  for (std::size_t j = 0; j < n; ++j) {
    ref::matvec(w, out_dim, in_dim, x + j * in_dim, y + j * out_dim);
  }
}

void project_rows_t_acc(const float* w, std::size_t out_dim, std::size_t in_dim, const double* g,
                        std::size_t n, double* y) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (n * out_dim * in_dim > kParallelCutoff)
#endif
  for (std::size_t j = 0; j < n; ++j) {
    ref::matvec_t_acc(w, out_dim, in_dim, g + j * out_dim, y + j * in_dim);
  }
}

void accum_gram(double* dw, std::size_t rows, std::size_t cols, const double* g, const double* x,
                std::size_t n) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (rows * cols * n > kParallelCutoff)
#endif
  for (std::size_t r = 0; r < rows; ++r) {
    double* dwr = dw + r * cols;
    for (std::size_t j = 0; j < n; ++j) {
      const double gj = g[j * rows + r];
      if (gj == 0.0) continue;
      const double* xj = x + j * cols;
      for (std::size_t c = 0; c < cols; ++c) dwr[c] += gj * xj[c];
    }
  }
}

void attn_scores(const double* p, const double* q, const float* v, std::size_t slots,
                 std::size_t adim, double* u) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (slots * adim > kParallelCutoff)
#endif
  for (std::size_t j = 0; j < slots; ++j) {
    const double* pj = p + j * adim;
    double acc = 0.0;
    for (std::size_t a = 0; a < adim; ++a) {
      acc += static_cast<double>(v[a]) * std::tanh(pj[a] + q[a]);
    }
    u[j] = acc;
  }
}

void attn_backward_step(const double* p, const double* q, const float* v, const double* du,
                        std::size_t slots, std::size_t adim, double* dp, double* dq, double* dv) {
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (slots * adim > kParallelCutoff)
#endif
  for (std::size_t a = 0; a < adim; ++a) {
    const double va = static_cast<double>(v[a]);
    const double qa = q[a];
    double dq_acc = 0.0;
    double dv_acc = 0.0;
    for (std::size_t j = 0; j < slots; ++j) {
      const double t = std::tanh(p[j * adim + a] + qa);
      const double dpre = du[j] * va * (1.0 - t * t);
      dp[j * adim + a] += dpre;
      dq_acc += dpre;
      dv_acc += du[j] * t;
    }
    dq[a] += dq_acc;
    dv[a] += dv_acc;
  }
}

}  // namespace pnel::kernels
