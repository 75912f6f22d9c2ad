#pragma once

#include <cstddef>

// Dense compute kernels for the encoder/decoder/attention math. Parameters are
// stored as f32; all accumulation happens in f64.
//
// The OpenMP variants parallelize only across independent output elements and
// keep each element's summation order fixed, so their results are bit-identical
// to the serial reference in `ref` for any thread count. Tests compare the two
// for exact equality and the bench tool compares their throughput.
namespace pnel::kernels {

// y = W x, W row-major (rows x cols).
void matvec(const float* w, std::size_t rows, std::size_t cols, const double* x, double* y);

// y += W^T g, y has `cols` elements.
void matvec_t_acc(const float* w, std::size_t rows, std::size_t cols, const double* g, double* y);

// dw += g x^T, dw row-major f64 (rows x cols).
void outer_acc(double* dw, std::size_t rows, std::size_t cols, const double* g, const double* x);

// z = b + Wx x + Wh h; z has `rows` elements. Fused LSTM gate pre-activation.
void gate_preact(const float* wx, const float* wh, const float* b, std::size_t rows,
                 std::size_t xdim, std::size_t hdim, const double* x, const double* h, double* z);

// Y[j] = W X[j] for j in [0, n): projects every row of X (n x in_dim) through
// W (out_dim x in_dim) into Y (n x out_dim).
void project_rows(const float* w, std::size_t out_dim, std::size_t in_dim, const double* x,
                  std::size_t n, double* y);

// Y[j] += W^T G[j]: the adjoint of project_rows. G is n x out_dim, Y is n x in_dim.
void project_rows_t_acc(const float* w, std::size_t out_dim, std::size_t in_dim, const double* g,
                        std::size_t n, double* y);

// dw += G^T X with G (n x rows) and X (n x cols); dw row-major f64 (rows x cols).
void accum_gram(double* dw, std::size_t rows, std::size_t cols, const double* g, const double* x,
                std::size_t n);

// u[j] = sum_a v[a] * tanh(P[j,a] + q[a]) over `slots` rows of P (slots x adim).
void attn_scores(const double* p, const double* q, const float* v, std::size_t slots,
                 std::size_t adim, double* u);

// Backward of attn_scores for one decoder step. du[j] = dL/du_j on input;
// accumulates dP (slots x adim), dq (adim) and dv (adim).
void attn_backward_step(const double* p, const double* q, const float* v, const double* du,
                        std::size_t slots, std::size_t adim, double* dp, double* dq, double* dv);

namespace ref {

void matvec(const float* w, std::size_t rows, std::size_t cols, const double* x, double* y);
void matvec_t_acc(const float* w, std::size_t rows, std::size_t cols, const double* g, double* y);
void outer_acc(double* dw, std::size_t rows, std::size_t cols, const double* g, const double* x);
void gate_preact(const float* wx, const float* wh, const float* b, std::size_t rows,
                 std::size_t xdim, std::size_t hdim, const double* x, const double* h, double* z);
void project_rows(const float* w, std::size_t out_dim, std::size_t in_dim, const double* x,
                  std::size_t n, double* y);
void project_rows_t_acc(const float* w, std::size_t out_dim, std::size_t in_dim, const double* g,
                        std::size_t n, double* y);
void accum_gram(double* dw, std::size_t rows, std::size_t cols, const double* g, const double* x,
                std::size_t n);
void attn_scores(const double* p, const double* q, const float* v, std::size_t slots,
                 std::size_t adim, double* u);
void attn_backward_step(const double* p, const double* q, const float* v, const double* du,
                        std::size_t slots, std::size_t adim, double* dp, double* dq, double* dv);

}  // namespace ref

}  // namespace pnel::kernels
