#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "pnel/common.hpp"
#include "pnel/kernels.hpp"

// Times each parallel kernel against its serial reference on full-scale
// shapes and verifies the outputs are bit-identical. Thread count follows
// OMP_NUM_THREADS; on one core the speedup column should sit near 1.

namespace {

using Clock = std::chrono::steady_clock;

double best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    auto t0 = Clock::now();
    fn();
    double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    if (ms < best) best = ms;
  }
  return best;
}

std::vector<float> random_f32(pnel::Rng& rng, std::size_t n) {
  std::vector<float> v(n);
  for (float& x : v) x = static_cast<float>(rng.uniform(-1.0, 1.0));
  return v;
}

std::vector<double> random_f64(pnel::Rng& rng, std::size_t n) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(-1.0, 1.0);
  return v;
}

bool report(const char* name, double serial_ms, double omp_ms, bool equal) {
  std::printf("%-22s %10.3f ms %12.3f ms %8.2fx   %s\n", name, serial_ms, omp_ms,
              serial_ms / omp_ms, equal ? "identical" : "DIFFERS");
  return equal;
}

}  // namespace

int main(int argc, char** argv) {
  int reps = 5;
  if (argc > 1) reps = std::stoi(argv[1]);

  pnel::Rng rng(42);
  const std::size_t d = 1142, h = 512, a = 128, slots = 1403;

  bool ok = true;
  std::printf("%-22s %13s %15s %9s\n", "kernel", "serial", "parallel", "speedup");

  {
    auto wx = random_f32(rng, 4 * h * d);
    auto wh = random_f32(rng, 4 * h * h);
    auto b = random_f32(rng, 4 * h);
    auto x = random_f64(rng, d);
    auto hv = random_f64(rng, h);
    std::vector<double> z_ref(4 * h), z_omp(4 * h);
    double s = best_of(reps, [&] {
      pnel::kernels::ref::gate_preact(wx.data(), wh.data(), b.data(), 4 * h, d, h, x.data(), hv.data(),
                                      z_ref.data());
    });
    double p = best_of(reps, [&] {
      pnel::kernels::gate_preact(wx.data(), wh.data(), b.data(), 4 * h, d, h, x.data(), hv.data(),
                                 z_omp.data());
    });
    ok &= report("gate_preact", s, p, std::memcmp(z_ref.data(), z_omp.data(), 4 * h * sizeof(double)) == 0);
  }

  {
    auto w = random_f32(rng, a * 2 * h);
    auto x = random_f64(rng, slots * 2 * h);
    std::vector<double> y_ref(slots * a), y_omp(slots * a);
    double s = best_of(reps, [&] {
      pnel::kernels::ref::project_rows(w.data(), a, 2 * h, x.data(), slots, y_ref.data());
    });
    double p = best_of(reps, [&] {
      pnel::kernels::project_rows(w.data(), a, 2 * h, x.data(), slots, y_omp.data());
    });
    ok &= report("project_rows", s, p,
                 std::memcmp(y_ref.data(), y_omp.data(), slots * a * sizeof(double)) == 0);
  }

  {
    auto w = random_f32(rng, a * 2 * h);
    auto g = random_f64(rng, slots * a);
    std::vector<double> y_ref(slots * 2 * h, 0.0), y_omp(slots * 2 * h, 0.0);
    double s = best_of(reps, [&] {
      pnel::kernels::ref::project_rows_t_acc(w.data(), a, 2 * h, g.data(), slots, y_ref.data());
    });
    double p = best_of(reps, [&] {
      pnel::kernels::project_rows_t_acc(w.data(), a, 2 * h, g.data(), slots, y_omp.data());
    });
    ok &= report("project_rows_t_acc", s, p,
                 std::memcmp(y_ref.data(), y_omp.data(), slots * 2 * h * sizeof(double)) == 0);
  }

  {
    auto g = random_f64(rng, slots * a);
    auto x = random_f64(rng, slots * 2 * h);
    std::vector<double> dw_ref(a * 2 * h, 0.0), dw_omp(a * 2 * h, 0.0);
    double s = best_of(reps, [&] {
      std::fill(dw_ref.begin(), dw_ref.end(), 0.0);
      pnel::kernels::ref::accum_gram(dw_ref.data(), a, 2 * h, g.data(), x.data(), slots);
    });
    double p = best_of(reps, [&] {
      std::fill(dw_omp.begin(), dw_omp.end(), 0.0);
      pnel::kernels::accum_gram(dw_omp.data(), a, 2 * h, g.data(), x.data(), slots);
    });
    ok &= report("accum_gram", s, p,
                 std::memcmp(dw_ref.data(), dw_omp.data(), a * 2 * h * sizeof(double)) == 0);
  }

  {
    auto pm = random_f64(rng, slots * a);
    auto q = random_f64(rng, a);
    auto v = random_f32(rng, a);
    std::vector<double> u_ref(slots), u_omp(slots);
    double s = best_of(reps, [&] {
      pnel::kernels::ref::attn_scores(pm.data(), q.data(), v.data(), slots, a, u_ref.data());
    });
    double p = best_of(reps, [&] {
      pnel::kernels::attn_scores(pm.data(), q.data(), v.data(), slots, a, u_omp.data());
    });
    ok &= report("attn_scores", s, p,
                 std::memcmp(u_ref.data(), u_omp.data(), slots * sizeof(double)) == 0);
  }

  {
    auto pm = random_f64(rng, slots * a);
    auto q = random_f64(rng, a);
    auto v = random_f32(rng, a);
    auto du = random_f64(rng, slots);
    std::vector<double> dp_ref(slots * a, 0.0), dq_ref(a, 0.0), dv_ref(a, 0.0);
    std::vector<double> dp_omp(slots * a, 0.0), dq_omp(a, 0.0), dv_omp(a, 0.0);
    double s = best_of(reps, [&] {
      std::fill(dp_ref.begin(), dp_ref.end(), 0.0);
      std::fill(dq_ref.begin(), dq_ref.end(), 0.0);
      std::fill(dv_ref.begin(), dv_ref.end(), 0.0);
      pnel::kernels::ref::attn_backward_step(pm.data(), q.data(), v.data(), du.data(), slots, a,
                                             dp_ref.data(), dq_ref.data(), dv_ref.data());
    });
    double p = best_of(reps, [&] {
      std::fill(dp_omp.begin(), dp_omp.end(), 0.0);
      std::fill(dq_omp.begin(), dq_omp.end(), 0.0);
      std::fill(dv_omp.begin(), dv_omp.end(), 0.0);
      pnel::kernels::attn_backward_step(pm.data(), q.data(), v.data(), du.data(), slots, a,
                                        dp_omp.data(), dq_omp.data(), dv_omp.data());
    });
    bool equal = std::memcmp(dp_ref.data(), dp_omp.data(), slots * a * sizeof(double)) == 0 &&
                 std::memcmp(dq_ref.data(), dq_omp.data(), a * sizeof(double)) == 0 &&
                 std::memcmp(dv_ref.data(), dv_omp.data(), a * sizeof(double)) == 0;
    ok &= report("attn_backward_step", s, p, equal);
  }

  if (!ok) {
    std::fprintf(stderr, "parallel kernels diverged from the serial reference\n");
    return 1;
  }
  return 0;
}
